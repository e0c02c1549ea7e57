//! Case analysis: probe the stream, pick a route, run the matching builder.

use super::case1::{build_case1_cpinf, build_case1_q};
use super::case2::build_case2;
use super::probe::{probe_stream, ProbeReport};
use super::result::ConstructionResult;
use super::ConstructionError;
use crate::groups::{ElementStream, FactorSignature};
use crate::kronecker::LadderMode;
use serde::{Deserialize, Serialize};

/// A caller-supplied override for what the probe cannot decide from a finite
/// window. Assumptions are trusted, not checked; the builders still verify
/// everything they construct, so a wrong assumption surfaces as a build error
/// rather than a bad certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CaseAssumption {
    /// π_index(F) is infinite, routing the build through that factor.
    InfiniteImage { index: u64 },
    /// Infinitely many elements of F have a coordinate of order ≥ q, spread
    /// over infinitely many factors.
    ScatteredOrders { q: u64 },
}

/// Knobs for a full construction run. `Default` gives a 16-round build with
/// deterministic seed 0 and search budgets sized for interactive use.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildConfig {
    /// Interpolation constant override; `None` lets the probe choose.
    pub q: Option<u64>,
    /// Number of (γ_n, γ_n + χ_n) pairs to construct.
    pub rounds: usize,
    pub seed: u64,
    /// Candidates examined per cluster-element search before giving up.
    pub cluster_budget: u64,
    /// Stream elements examined across all steering selections.
    pub selection_budget: u64,
    /// Stream elements drawn when probing the group structure.
    pub probe_window: usize,
    /// Coefficient tuples tried per independence check.
    pub independence_budget: u64,
    /// Largest subset size the independence check enumerates.
    pub independence_max_subset: usize,
    pub ladder_mode: LadderMode,
    pub assume: Option<CaseAssumption>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            q: None,
            rounds: 16,
            seed: 0,
            cluster_budget: 500_000,
            selection_budget: 100_000,
            probe_window: 64,
            independence_budget: 4_000_000,
            independence_max_subset: 10,
            ladder_mode: LadderMode::Lcm,
            assume: None,
        }
    }
}

fn dispatch_case1(
    stream: &ElementStream,
    alpha: u64,
    probe: &ProbeReport,
    config: &BuildConfig,
) -> Result<ConstructionResult, ConstructionError> {
    let q = config.q.unwrap_or(3);
    match stream.group().signature(alpha) {
        Some(FactorSignature::Rationals) => build_case1_q(stream, alpha, q, probe, config),
        Some(FactorSignature::Pruefer { .. }) => {
            build_case1_cpinf(stream, alpha, q, probe, config)
        }
        _ => Err(ConstructionError::WrongFactor {
            index: alpha,
            expected: "a rational or Prüfer factor",
        }),
    }
}

/// Probes the stream and builds E ⊆ F and E′ ⊆ F + F − F along whichever
/// route the probe supports.
///
/// Routing order: an explicit assumption wins; otherwise the smallest factor
/// with provably infinite image; otherwise, if some factor is ambiguous the
/// build refuses rather than guess; otherwise every factor has finite image
/// and the scattered-order route runs with the largest q the probe supports.
pub fn build_pair(
    stream: &ElementStream,
    config: &BuildConfig,
) -> Result<ConstructionResult, ConstructionError> {
    let probe = probe_stream(stream, config.probe_window);
    if probe.factors.is_empty() {
        return Err(ConstructionError::ProbeInconclusive(format!(
            "all {} probed elements were zero",
            probe.window
        )));
    }
    if let Some(assume) = config.assume {
        match assume {
            CaseAssumption::InfiniteImage { index } => {
                return dispatch_case1(stream, index, &probe, config);
            }
            CaseAssumption::ScatteredOrders { q } => {
                return build_case2(stream, config.q.unwrap_or(q), &probe, config);
            }
        }
    }
    if let Some(fp) = probe.case1_candidate() {
        return dispatch_case1(stream, fp.index, &probe, config);
    }
    if let Some(fp) = probe.ambiguous_factor() {
        return Err(ConstructionError::ProbeInconclusive(format!(
            "{} probed elements cannot settle whether factor {} has infinite image; \
             widen the window or pass an explicit assumption",
            probe.window, fp.index
        )));
    }
    let q = config.q.or_else(|| probe.scattered_q()).unwrap_or(2);
    build_case2(stream, q, &probe, config)
}
