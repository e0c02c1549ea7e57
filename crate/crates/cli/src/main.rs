//! Command line front end. Construct certified pairs from a config file,
//! re-verify emitted documents, sweep constructions for non-I₀ witnesses,
//! and run the brute-force oracle.
//!
//! Exit codes: 0 all checks pass, 1 mathematical failure or inconclusive
//! result, 2 usage or parse error. Errors are written to stderr as a single
//! JSON object.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use kronwit_core::constructions::{
    build_pair, non_i0_witness, seeded_spec, BuildConfig, ConstructionResult,
};
use kronwit_core::exact::{chord_approx, UnitAngle};
use kronwit_core::groups::{AmbientGroup, Coordinate, ElementStream, GroupElement, StreamRule};
use kronwit_core::json::{self, ElementRepr};
use kronwit_core::kronecker::{
    grid_minimax, CertificateError, KroneckerCertificate, SearchBudget,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(name = "kronwit", version, about = "Certified Kronecker pairs whose union is not I₀")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a construction described by a JSON config file.
    Construct {
        #[arg(long)]
        config: PathBuf,
        /// Write the report here instead of the config's output path / stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-check every bound in a certificate or construction document.
    Verify { file: PathBuf },
    /// Sweep a construction for a witness pair under a seeded precision spec.
    Witness {
        file: PathBuf,
        /// Number of sample points (the chord bound is 1/m).
        #[arg(long)]
        m: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force min-max scan over a frequency grid.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's grid resolution.
        #[arg(long)]
        grid: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Everything a construction run needs; `build` carries the seed and budgets
/// and is echoed, post-overrides, in the emitted report.
#[derive(Clone, Serialize, Deserialize)]
struct RunConfig {
    group: AmbientGroup,
    set: SetRule,
    #[serde(default = "default_stream_budget")]
    stream_budget: usize,
    #[serde(default)]
    build: BuildConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
}

fn default_stream_budget() -> usize {
    4096
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
enum SetRule {
    Explicit {
        elements: Vec<ElementRepr>,
    },
    Geometric {
        base: u64,
        #[serde(default)]
        factor: u64,
    },
    UnitGenerators,
    PrimeReciprocals {
        #[serde(default)]
        factor: u64,
    },
    PowerReciprocals {
        base: u64,
        #[serde(default)]
        factor: u64,
    },
}

impl SetRule {
    fn to_stream_rule(&self, group: &Arc<AmbientGroup>) -> Result<StreamRule, CliError> {
        Ok(match self {
            SetRule::Explicit { elements } => {
                let elements: Result<Vec<GroupElement>, _> =
                    elements.iter().map(|r| r.attach(group)).collect();
                StreamRule::Explicit(elements.map_err(|e| {
                    CliError::usage("invalid-config", format!("explicit element: {e}"))
                })?)
            }
            SetRule::Geometric { base, factor } => StreamRule::Geometric {
                base: *base,
                factor: *factor,
            },
            SetRule::UnitGenerators => StreamRule::UnitGenerators,
            SetRule::PrimeReciprocals { factor } => {
                StreamRule::PrimeReciprocals { factor: *factor }
            }
            SetRule::PowerReciprocals { base, factor } => StreamRule::PowerReciprocals {
                base: *base,
                factor: *factor,
            },
        })
    }
}

#[derive(Clone, Serialize, Deserialize)]
struct OracleConfig {
    /// Integer frequencies, as decimal strings.
    elements: Vec<String>,
    /// Target angles in turns, "num/den".
    targets: Vec<String>,
    #[serde(default = "default_grid")]
    grid: u64,
    /// Exact extra frequencies evaluated alongside the grid.
    #[serde(default)]
    extra: Vec<String>,
    #[serde(default = "default_max_candidates")]
    max_candidates: u64,
}

fn default_grid() -> u64 {
    1 << 20
}

fn default_max_candidates() -> u64 {
    4_000_000
}

#[derive(Serialize, Deserialize)]
struct ConstructReport {
    kind: String,
    config: RunConfig,
    summary: Vec<String>,
    result: ConstructionResult,
}

const CONSTRUCT_KIND: &str = "construction-report";

#[derive(Serialize)]
struct OracleReport {
    kind: &'static str,
    grid: u64,
    grid_argmin: u64,
    grid_min_max: String,
    grid_min_max_chord_approx: f64,
    best_frequency: String,
    best_min_max: String,
    best_min_max_chord_approx: f64,
}

#[derive(Serialize)]
struct WitnessDocument {
    kind: &'static str,
    m: u64,
    seed: u64,
    inconclusive: bool,
    /// Chord lengths at the witness pair, floats for readability only.
    #[serde(skip_serializing_if = "Option::is_none")]
    found_chord_approx: Option<Vec<f64>>,
    report: kronwit_core::constructions::WitnessReport,
}

struct CliError {
    code: u8,
    kind: &'static str,
    message: String,
    detail: Option<serde_json::Value>,
}

impl CliError {
    fn usage(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            kind,
            message: message.into(),
            detail: None,
        }
    }

    fn fail(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            kind,
            message: message.into(),
            detail: None,
        }
    }

    fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = Some(detail);
        self
    }

    fn render(&self) -> String {
        let mut error = serde_json::json!({
            "code": self.code,
            "kind": self.kind,
            "message": self.message,
        });
        if let Some(detail) = &self.detail {
            error["detail"] = detail.clone();
        }
        serde_json::json!({ "error": error }).to_string()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.render());
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Construct { config, out, seed } => cmd_construct(&config, out, seed),
        Command::Verify { file } => cmd_verify(&file),
        Command::Witness { file, m, seed, out } => cmd_witness(&file, m, seed, out),
        Command::Oracle { config, grid, out } => cmd_oracle(&config, grid, out),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::usage("io", format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| CliError::usage("io", format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_construct(
    config_path: &Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let text = read_text(config_path)?;
    let mut config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::usage("parse", format!("config: {e}")))?;
    if let Some(seed) = seed {
        config.build.seed = seed;
    }
    validate_config(&config)?;

    config
        .group
        .validate()
        .map_err(|e| CliError::usage("invalid-config", format!("group: {e}")))?;
    let group = Arc::new(config.group.clone());
    let rule = config.set.to_stream_rule(&group)?;
    let stream = ElementStream::new(&group, rule, config.stream_budget)
        .map_err(|e| CliError::usage("invalid-config", format!("stream: {e}")))?;

    let result = build_pair(&stream, &config.build)
        .map_err(|e| CliError::fail("construction", e.to_string()))?;

    let report = ConstructReport {
        kind: CONSTRUCT_KIND.into(),
        summary: summary_lines(&result),
        config: config.clone(),
        result,
    };
    let rendered = json::to_canonical_string(&report)
        .map_err(|e| CliError::fail("serialize", e.to_string()))?;
    emit(out.as_deref().or(config.out.as_deref()), &rendered)
}

fn validate_config(config: &RunConfig) -> Result<(), CliError> {
    let invalid = |what: &str| CliError::usage("invalid-config", format!("{what} must be ≥ 1"));
    if config.build.rounds == 0 {
        return Err(invalid("rounds"));
    }
    if config.stream_budget == 0 {
        return Err(invalid("stream_budget"));
    }
    if config.build.cluster_budget == 0 {
        return Err(invalid("cluster_budget"));
    }
    if config.build.selection_budget == 0 {
        return Err(invalid("selection_budget"));
    }
    if config.build.probe_window == 0 {
        return Err(invalid("probe_window"));
    }
    if config.build.independence_budget == 0 {
        return Err(invalid("independence_budget"));
    }
    Ok(())
}

fn coordinate_text(c: &Coordinate) -> String {
    match c {
        Coordinate::Rational(r) => r.to_string(),
        Coordinate::Angle(a) => format!("{} turn", a.turns()),
    }
}

fn element_text(e: &GroupElement) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = e
        .support()
        .map(|(i, c)| format!("[{i}] {}", coordinate_text(c)))
        .collect();
    parts.join(", ")
}

fn summary_lines(result: &ConstructionResult) -> Vec<String> {
    let mut lines = vec![
        format!(
            "case {:?}: q = {}, {} rounds, ε bound {} turns (chord ≈ {:.6}{})",
            result.provenance.case,
            result.q,
            result.pairs.len(),
            result.bound_turns,
            chord_approx(&result.bound_turns),
            if result.strict { ", strict" } else { "" },
        ),
        "E ⊆ F and E′ ⊆ F+F−F are each certified; E ∪ E′ admits finite-scale \
         non-I₀ witnesses via the χ_n below"
            .to_string(),
    ];
    for (n, pair) in result.pairs.iter().enumerate() {
        lines.push(format!(
            "pair {n}: γ = {{{}}}, χ = {{{}}}, γ+χ = {{{}}}",
            element_text(&pair.gamma),
            element_text(&pair.chi),
            element_text(&pair.sum),
        ));
    }
    if let Some(independence) = &result.independence {
        lines.push(format!(
            "independence: E and E′ checked exhaustively up to subsets of {} \
             ({} + {} combinations)",
            independence.e.check.max_subset,
            independence.e.check.combinations_checked,
            independence.eprime.check.combinations_checked,
        ));
    }
    lines
}

fn verify_certificate(cert: &KroneckerCertificate, which: &str) -> Result<(), CliError> {
    cert.verify().map_err(|e| {
        let detail = match &e {
            CertificateError::AchievedMismatch { index, .. }
            | CertificateError::BoundExceeded { index, .. }
            | CertificateError::Evaluation { index, .. } => serde_json::json!({
                "certificate": which,
                "point": index,
                "element": ElementRepr::of(&cert.points[*index].element),
            }),
            _ => serde_json::json!({ "certificate": which }),
        };
        CliError::fail("verification", format!("{which}: {e}")).with_detail(detail)
    })
}

/// Accepts a construction report, a bare construction result, or a bare
/// certificate, keyed on the document's `kind`.
fn parse_result_document(path: &Path) -> Result<ConstructionResult, CliError> {
    let text = read_text(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::usage("parse", format!("{}: {e}", path.display())))?;
    let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or("");
    let payload = match kind {
        CONSTRUCT_KIND => value
            .get("result")
            .cloned()
            .ok_or_else(|| CliError::usage("parse", "report carries no result"))?,
        kronwit_core::constructions::RESULT_KIND => value,
        other => {
            return Err(CliError::usage(
                "parse",
                format!("expected a construction document, found kind {other:?}"),
            ))
        }
    };
    serde_json::from_value(payload).map_err(|e| CliError::usage("parse", e.to_string()))
}

fn cmd_verify(path: &Path) -> Result<(), CliError> {
    let text = read_text(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::usage("parse", format!("{}: {e}", path.display())))?;
    let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or("");
    let checked = if kind == CONSTRUCT_KIND || kind == kronwit_core::constructions::RESULT_KIND {
        let result = parse_result_document(path)?;
        verify_certificate(&result.e_certificate, "e-certificate")?;
        verify_certificate(&result.eprime_certificate, "eprime-certificate")?;
        result
            .check_invariants()
            .map_err(|e| CliError::fail("verification", e.to_string()))?;
        "construction"
    } else {
        let cert: KroneckerCertificate = serde_json::from_value(value)
            .map_err(|e| CliError::usage("parse", e.to_string()))?;
        verify_certificate(&cert, "certificate")?;
        "certificate"
    };
    println!(
        "{}",
        serde_json::json!({ "kind": "verify-report", "checked": checked, "verified": true })
    );
    Ok(())
}

fn cmd_witness(path: &Path, m: u64, seed: u64, out: Option<PathBuf>) -> Result<(), CliError> {
    if m == 0 {
        return Err(CliError::usage("invalid-config", "m must be ≥ 1"));
    }
    let result = parse_result_document(path)?;
    let spec = seeded_spec(&result.group, m, seed);
    let report = non_i0_witness(&result, &spec)
        .map_err(|e| CliError::fail("witness", e.to_string()))?;
    let inconclusive = report.found.is_none();
    let document = WitnessDocument {
        kind: "witness-report",
        m,
        seed,
        inconclusive,
        found_chord_approx: report.found.as_ref().map(|h| h.chords_approx()),
        report,
    };
    let rendered = json::to_canonical_string(&document)
        .map_err(|e| CliError::fail("serialize", e.to_string()))?;
    emit(out.as_deref(), &rendered)?;
    if inconclusive {
        return Err(CliError::fail(
            "witness",
            format!("no pair met the 1/{m} chord bound; result is inconclusive"),
        ));
    }
    Ok(())
}

fn cmd_oracle(config_path: &Path, grid: Option<u64>, out: Option<PathBuf>) -> Result<(), CliError> {
    let text = read_text(config_path)?;
    let config: OracleConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::usage("parse", format!("config: {e}")))?;
    let grid = grid.unwrap_or(config.grid);
    if grid == 0 {
        return Err(CliError::usage("invalid-config", "grid must be ≥ 1"));
    }

    let elements: Vec<BigInt> = config
        .elements
        .iter()
        .map(|s| {
            BigInt::from_str(s)
                .map_err(|e| CliError::usage("parse", format!("element {s:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let parse_turns = |s: &String| -> Result<BigRational, CliError> {
        BigRational::from_str(s)
            .map_err(|e| CliError::usage("parse", format!("angle {s:?}: {e}")))
    };
    let targets: Vec<UnitAngle> = config
        .targets
        .iter()
        .map(|s| Ok(UnitAngle::from_turns(&parse_turns(s)?)))
        .collect::<Result<_, CliError>>()?;
    let extra: Vec<BigRational> = config.extra.iter().map(parse_turns).collect::<Result<_, _>>()?;

    let budget = SearchBudget {
        max_candidates: config.max_candidates,
    };
    let scan = grid_minimax(&elements, &targets, grid, &extra, &budget)
        .map_err(|e| CliError::fail("oracle", e.to_string()))?;

    let report = OracleReport {
        kind: "oracle-report",
        grid: scan.grid,
        grid_argmin: scan.grid_argmin,
        grid_min_max: scan.grid_min_max.to_string(),
        grid_min_max_chord_approx: chord_approx(&scan.grid_min_max),
        best_frequency: scan.best_frequency.to_string(),
        best_min_max: scan.best_min_max.to_string(),
        best_min_max_chord_approx: chord_approx(&scan.best_min_max),
    };
    let rendered = json::to_canonical_string(&report)
        .map_err(|e| CliError::fail("serialize", e.to_string()))?;
    emit(out.as_deref(), &rendered)
}
