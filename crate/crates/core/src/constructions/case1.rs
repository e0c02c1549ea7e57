//! Builders for the route through one infinite-image factor.
//!
//! Both builders fix a factor α whose projection π_α(F) is infinite, pick
//! steering elements γ_n ∈ F by their α-coordinates, and pair them with the
//! cluster differences χ_n. Interpolation runs twice per build: once for
//! E = {γ_n} and once for E′ = {γ_n + χ_n}, and the engine certificates are
//! lifted back to the ambient group before anything is returned.
//!
//! The two routes differ in how the α-coordinates grow. When the coordinate
//! denominators stabilise early the values behave like integers scaled by a
//! common denominator, and a Hadamard-ratio selection suffices. When the
//! denominators keep growing, selection instead tracks the running level of a
//! ladder character and picks values whose denominator introduces granularity
//! strictly finer than q at every stage, which is exactly the condition the
//! ladder engine checks before steering a rung.

use super::cluster::{cluster_schedule, ClusterWitness};
use super::dispatch::{BuildConfig, CaseAssumption};
use super::precision::{seeded_targets, stage_seed, PrecisionSpec};
use super::probe::{FactorProbe, ProbeReport};
use super::result::{BranchTrace, CaseTag, ConstructionPair, ConstructionResult, Provenance};
use super::ConstructionError;
use crate::characters::LevelCharacter;
use crate::exact::{denominator, frac, UnitAngle};
use crate::groups::{AmbientGroup, Coordinate, ElementStream, FactorSignature, GroupElement};
use crate::kronecker::{
    hadamard_interpolate, ladder_interpolate, CertPoint, DualWitness, HadamardRequest,
    KroneckerCertificate, LadderMode, LadderRequest, SearchBudget,
};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::sync::Arc;

/// Steering elements chosen from the stream, with the rational stand-ins the
/// engines will interpolate. For a rational factor the stand-in is the
/// coordinate itself; for a Prüfer factor it is the angle in turns.
struct Selection {
    gammas: Vec<(GroupElement, usize)>,
    lambdas: Vec<BigRational>,
    sums: Vec<BigRational>,
}

fn stand_in(element: &GroupElement, factor: u64) -> BigRational {
    match element.project(factor) {
        Coordinate::Rational(r) => r,
        Coordinate::Angle(a) => a.turns().clone(),
    }
}

/// The distinctness condition on α-coordinates: against every earlier stage,
/// the new λ must avoid the earlier λ and sum, and the new sum must too.
fn condition_b(
    lambdas: &[BigRational],
    sums: &[BigRational],
    lambda: &BigRational,
    sum: &BigRational,
) -> bool {
    lambdas
        .iter()
        .zip(sums)
        .all(|(pl, ps)| lambda != pl && lambda != ps && sum != ps && sum != pl)
}

fn probe_gate<'a>(
    probe: &'a ProbeReport,
    alpha: u64,
    config: &BuildConfig,
) -> Result<&'a FactorProbe, ConstructionError> {
    let fp = probe.factor(alpha).ok_or_else(|| {
        ConstructionError::ProbeInconclusive(format!(
            "factor {alpha} carries no nonzero coordinate in the probe window"
        ))
    })?;
    let assumed = matches!(
        config.assume,
        Some(CaseAssumption::InfiniteImage { index }) if index == alpha
    );
    if !assumed {
        match fp.appears_infinite() {
            Some(true) => {}
            Some(false) => {
                return Err(ConstructionError::ImageFinite {
                    index: alpha,
                    distinct: fp.distinct_images,
                });
            }
            None => {
                return Err(ConstructionError::ProbeInconclusive(format!(
                    "{} probed elements cannot settle whether factor {alpha} has infinite \
                     image; widen the window or assume it explicitly",
                    probe.window
                )));
            }
        }
    }
    Ok(fp)
}

/// Hadamard-ratio selection for the stable-denominator route. The threshold
/// |λ_n| > q·|λ_{n−1}| + (q+1)·max|x| forces ratio ≥ q for both the λ run and
/// the shifted run, keeps every sum nonzero, and implies the distinctness
/// condition; the explicit checks below still reselect on any violation.
fn select_hadamard(
    stream: &ElementStream,
    alpha: u64,
    q: u64,
    xs: &[BigRational],
    budget: u64,
) -> Result<Selection, ConstructionError> {
    let q_rat = BigRational::from(BigInt::from(q));
    let x_max = xs
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(BigRational::zero);
    let mut selection = Selection {
        gammas: Vec::with_capacity(xs.len()),
        lambdas: Vec::with_capacity(xs.len()),
        sums: Vec::with_capacity(xs.len()),
    };
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut examined = 0u64;
    for x in xs {
        let threshold = match selection.lambdas.last() {
            None => x_max.clone(),
            Some(prev) => {
                q_rat.clone() * prev.abs() + (q_rat.clone() + BigRational::one()) * x_max.clone()
            }
        };
        let mut found = None;
        for (k, f) in stream.iter().enumerate() {
            if used.contains(&k) {
                continue;
            }
            if examined >= budget {
                break;
            }
            examined += 1;
            let lambda = stand_in(&f, alpha);
            if lambda.abs() <= threshold {
                continue;
            }
            let sum = &lambda + x;
            if sum.is_zero() || !condition_b(&selection.lambdas, &selection.sums, &lambda, &sum) {
                continue;
            }
            found = Some((f, k, lambda, sum));
            break;
        }
        let Some((f, k, lambda, sum)) = found else {
            return Err(ConstructionError::BudgetExhausted {
                task: format!("selecting elements of Hadamard ratio {q} at factor {alpha}"),
                searched: examined,
            });
        };
        used.insert(k);
        selection.gammas.push((f, k));
        selection.lambdas.push(lambda);
        selection.sums.push(sum);
    }
    Ok(selection)
}

/// Ladder selection for the growing-denominator route. The running level
/// mirrors the engine: each stage first covers the shift's denominator, then
/// absorbs the chosen λ's. Picking t = den(λ) with t / gcd(t, level) > q makes
/// the stage granularity exactly that quotient, so the engine's gap check
/// cannot fail, in the shifted run or the unshifted one.
fn select_ladder(
    stream: &ElementStream,
    alpha: u64,
    q: u64,
    xs: &[BigRational],
    fold_sums: bool,
    budget: u64,
) -> Result<Selection, ConstructionError> {
    let q_big = BigUint::from(q);
    let mut level = BigUint::one();
    let mut selection = Selection {
        gammas: Vec::with_capacity(xs.len()),
        lambdas: Vec::with_capacity(xs.len()),
        sums: Vec::with_capacity(xs.len()),
    };
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut examined = 0u64;
    for x in xs {
        level = level.lcm(&denominator(x));
        let mut found = None;
        for (k, f) in stream.iter().enumerate() {
            if used.contains(&k) {
                continue;
            }
            if examined >= budget {
                break;
            }
            examined += 1;
            let lambda = stand_in(&f, alpha);
            if lambda.is_zero() {
                continue;
            }
            let t = denominator(&lambda);
            if &t / t.gcd(&level) <= q_big {
                continue;
            }
            let raw = &lambda + x;
            if raw.is_zero() {
                continue;
            }
            let sum = if fold_sums { frac(&raw) } else { raw };
            if sum.is_zero() || !condition_b(&selection.lambdas, &selection.sums, &lambda, &sum) {
                continue;
            }
            found = Some((f, k, lambda, sum, t));
            break;
        }
        let Some((f, k, lambda, sum, t)) = found else {
            return Err(ConstructionError::BudgetExhausted {
                task: format!("selecting ladder-compatible elements at factor {alpha}"),
                searched: examined,
            });
        };
        used.insert(k);
        selection.gammas.push((f, k));
        selection.lambdas.push(lambda);
        selection.sums.push(sum);
        level = level.lcm(&t);
    }
    Ok(selection)
}

/// Rebuilds an engine certificate over the ambient group: same witness, same
/// bound, but the points are the real γ_n (or γ_n + χ_n) rather than their
/// α-coordinates. The achieved values are recomputed through the witness and
/// the result verified before use.
fn lift(
    group: &Arc<AmbientGroup>,
    witness: DualWitness,
    elements: &[GroupElement],
    targets: &[UnitAngle],
    bound_turns: BigRational,
    strict: bool,
) -> Result<KroneckerCertificate, ConstructionError> {
    let mut points = Vec::with_capacity(elements.len());
    for (element, target) in elements.iter().zip(targets) {
        let achieved = witness.evaluate(element)?;
        points.push(CertPoint {
            element: element.clone(),
            target: target.clone(),
            achieved,
        });
    }
    let certificate = KroneckerCertificate {
        group: Arc::clone(group),
        witness,
        points,
        bound_turns,
        strict,
    };
    certificate.verify()?;
    Ok(certificate)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    group: Arc<AmbientGroup>,
    case: CaseTag,
    alpha: u64,
    q: u64,
    config: &BuildConfig,
    selection: Selection,
    chis: Vec<ClusterWitness>,
    specs: Vec<PrecisionSpec>,
    sums: Vec<GroupElement>,
    e_certificate: KroneckerCertificate,
    eprime_certificate: KroneckerCertificate,
    trace: BranchTrace,
) -> Result<ConstructionResult, ConstructionError> {
    let (bound_turns, strict) = case.bound(q);
    let pairs = selection
        .gammas
        .into_iter()
        .zip(chis)
        .zip(sums)
        .zip(specs)
        .map(|((((gamma, position), chi), sum), spec)| ConstructionPair {
            gamma,
            sum,
            gamma_stream_index: position,
            chi_minuend: chi.minuend,
            chi_subtrahend: chi.subtrahend,
            cluster_distances: chi.distances_turns,
            chi: chi.element,
            spec,
        })
        .collect();
    let result = ConstructionResult {
        group,
        q,
        bound_turns,
        strict,
        pairs,
        e_certificate,
        eprime_certificate,
        independence: None,
        provenance: Provenance {
            case,
            factor: Some(alpha),
            betas: Vec::new(),
            exceptional: Vec::new(),
            seed: config.seed,
            rounds: config.rounds,
            trace,
        },
    };
    result.check_invariants()?;
    Ok(result)
}

fn sum_elements(
    gammas: &[(GroupElement, usize)],
    chis: &[ClusterWitness],
) -> Result<Vec<GroupElement>, ConstructionError> {
    gammas
        .iter()
        .zip(chis)
        .map(|((gamma, _), chi)| gamma.add(&chi.element).map_err(ConstructionError::from))
        .collect()
}

/// Builds E and E′ through a rational factor α with infinite image.
pub fn build_case1_q(
    stream: &ElementStream,
    alpha: u64,
    q: u64,
    probe: &ProbeReport,
    config: &BuildConfig,
) -> Result<ConstructionResult, ConstructionError> {
    if q < 3 {
        return Err(ConstructionError::InsufficientQ(q, 3));
    }
    let rounds = config.rounds;
    if rounds == 0 {
        return Err(ConstructionError::NoRounds);
    }
    let group = stream.group().clone();
    match group.signature(alpha) {
        Some(FactorSignature::Rationals) => {}
        Some(_) => {
            return Err(ConstructionError::WrongFactor {
                index: alpha,
                expected: "a rational factor",
            });
        }
        None => {
            return Err(ConstructionError::ProbeInconclusive(format!(
                "the group has no factor {alpha}"
            )));
        }
    }
    let fp = probe_gate(probe, alpha, config)?;
    let bounded = fp.denominators_stable;

    let cluster_budget = SearchBudget {
        max_candidates: config.cluster_budget,
    };
    let (chis, specs) = cluster_schedule(stream, rounds, config.seed, &cluster_budget)?;
    let xs: Vec<BigRational> = chis.iter().map(|c| stand_in(&c.element, alpha)).collect();
    let targets_e = seeded_targets(rounds, stage_seed(config.seed, rounds as u64 + 1));
    let targets_eprime = seeded_targets(rounds, stage_seed(config.seed, rounds as u64 + 2));

    if bounded {
        let selection = select_hadamard(stream, alpha, q, &xs, config.selection_budget)?;
        let e_run = hadamard_interpolate(
            &group,
            alpha,
            &HadamardRequest {
                elements: selection.lambdas.clone(),
                targets: targets_e.clone(),
                q,
            },
        )?;
        let eprime_run = hadamard_interpolate(
            &group,
            alpha,
            &HadamardRequest {
                elements: selection.sums.clone(),
                targets: targets_eprime.clone(),
                q,
            },
        )?;
        let sums = sum_elements(&selection.gammas, &chis)?;
        let gamma_elems: Vec<GroupElement> =
            selection.gammas.iter().map(|(g, _)| g.clone()).collect();
        let (bound_turns, strict) = CaseTag::Case1Bounded.bound(q);
        let e_certificate = lift(
            &group,
            DualWitness::Frequency {
                index: alpha,
                value: e_run.frequency.clone(),
            },
            &gamma_elems,
            &targets_e,
            bound_turns.clone(),
            strict,
        )?;
        let eprime_certificate = lift(
            &group,
            DualWitness::Frequency {
                index: alpha,
                value: eprime_run.frequency.clone(),
            },
            &sums,
            &targets_eprime,
            bound_turns,
            strict,
        )?;
        let trace = BranchTrace::Hadamard {
            frequency_e: e_run.frequency,
            frequency_eprime: eprime_run.frequency,
            scale_e: e_run.scale,
            scale_eprime: eprime_run.scale,
        };
        assemble(
            group,
            CaseTag::Case1Bounded,
            alpha,
            q,
            config,
            selection,
            chis,
            specs,
            sums,
            e_certificate,
            eprime_certificate,
            trace,
        )
    } else {
        let selection = select_ladder(stream, alpha, q, &xs, false, config.selection_budget)?;
        // Run A carries the shifts, so its summed points interpolate the E′
        // targets; run B reuses the same λ's unshifted for E. Run B's level
        // divides run A's at every stage, so the same selection steers both.
        let run_a = ladder_interpolate(
            &group,
            alpha,
            &LadderRequest {
                lambdas: selection.lambdas.clone(),
                shifts: xs.clone(),
                targets: targets_eprime.clone(),
                q,
                mode: config.ladder_mode,
            },
        )?;
        let run_b = ladder_interpolate(
            &group,
            alpha,
            &LadderRequest {
                lambdas: selection.lambdas.clone(),
                shifts: vec![BigRational::zero(); rounds],
                targets: targets_e.clone(),
                q,
                mode: config.ladder_mode,
            },
        )?;
        let sums = sum_elements(&selection.gammas, &chis)?;
        let gamma_elems: Vec<GroupElement> =
            selection.gammas.iter().map(|(g, _)| g.clone()).collect();
        let (bound_turns, strict) = CaseTag::Case1Unbounded.bound(q);
        let e_certificate = lift(
            &group,
            DualWitness::Ladder {
                index: alpha,
                ladder: run_b.character.clone(),
            },
            &gamma_elems,
            &targets_e,
            bound_turns.clone(),
            strict,
        )?;
        let eprime_certificate = lift(
            &group,
            DualWitness::Ladder {
                index: alpha,
                ladder: run_a.character.clone(),
            },
            &sums,
            &targets_eprime,
            bound_turns,
            strict,
        )?;
        let trace = BranchTrace::Ladder {
            stages_e: run_b.stages,
            stages_eprime: run_a.stages,
        };
        assemble(
            group,
            CaseTag::Case1Unbounded,
            alpha,
            q,
            config,
            selection,
            chis,
            specs,
            sums,
            e_certificate,
            eprime_certificate,
            trace,
        )
    }
}

/// Builds E and E′ through a Prüfer factor α with infinite image.
///
/// The α-coordinates are roots of unity of p-power order, viewed as rationals
/// in turns. A ladder over a scratch copy of ℤ interpolates those rationals;
/// because every denominator is a p-power and the ladder keeps its base rung
/// pinned, the finished ladder character factors through the p-power levels
/// and converts into a character of the Prüfer factor itself.
pub fn build_case1_cpinf(
    stream: &ElementStream,
    alpha: u64,
    q: u64,
    probe: &ProbeReport,
    config: &BuildConfig,
) -> Result<ConstructionResult, ConstructionError> {
    if q < 3 {
        return Err(ConstructionError::InsufficientQ(q, 3));
    }
    let rounds = config.rounds;
    if rounds == 0 {
        return Err(ConstructionError::NoRounds);
    }
    let group = stream.group().clone();
    let prime = match group.signature(alpha) {
        Some(FactorSignature::Pruefer { p }) => *p,
        Some(_) => {
            return Err(ConstructionError::WrongFactor {
                index: alpha,
                expected: "a Prüfer factor",
            });
        }
        None => {
            return Err(ConstructionError::ProbeInconclusive(format!(
                "the group has no factor {alpha}"
            )));
        }
    };
    probe_gate(probe, alpha, config)?;

    let cluster_budget = SearchBudget {
        max_candidates: config.cluster_budget,
    };
    let (chis, specs) = cluster_schedule(stream, rounds, config.seed, &cluster_budget)?;
    let xs: Vec<BigRational> = chis.iter().map(|c| stand_in(&c.element, alpha)).collect();
    let targets_e = seeded_targets(rounds, stage_seed(config.seed, rounds as u64 + 1));
    let targets_eprime = seeded_targets(rounds, stage_seed(config.seed, rounds as u64 + 2));

    let selection = select_ladder(stream, alpha, q, &xs, true, config.selection_budget)?;
    // Levels must stay p-powers for the conversion below, so the lcm mode is
    // forced here regardless of the configured one.
    let scratch = AmbientGroup::integers();
    let run_a = ladder_interpolate(
        &scratch,
        0,
        &LadderRequest {
            lambdas: selection.lambdas.clone(),
            shifts: xs.clone(),
            targets: targets_eprime.clone(),
            q,
            mode: LadderMode::Lcm,
        },
    )?;
    let run_b = ladder_interpolate(
        &scratch,
        0,
        &LadderRequest {
            lambdas: selection.lambdas.clone(),
            shifts: vec![BigRational::zero(); rounds],
            targets: targets_e.clone(),
            q,
            mode: LadderMode::Lcm,
        },
    )?;
    let level_a = LevelCharacter::new(prime, run_a.character.clone())?;
    let level_b = LevelCharacter::new(prime, run_b.character.clone())?;
    let sums = sum_elements(&selection.gammas, &chis)?;
    let gamma_elems: Vec<GroupElement> = selection.gammas.iter().map(|(g, _)| g.clone()).collect();
    let (bound_turns, strict) = CaseTag::Case1Pruefer.bound(q);
    let e_certificate = lift(
        &group,
        DualWitness::Level {
            index: alpha,
            level: level_b,
        },
        &gamma_elems,
        &targets_e,
        bound_turns.clone(),
        strict,
    )?;
    let eprime_certificate = lift(
        &group,
        DualWitness::Level {
            index: alpha,
            level: level_a,
        },
        &sums,
        &targets_eprime,
        bound_turns,
        strict,
    )?;
    let trace = BranchTrace::Ladder {
        stages_e: run_b.stages,
        stages_eprime: run_a.stages,
    };
    assemble(
        group,
        CaseTag::Case1Pruefer,
        alpha,
        q,
        config,
        selection,
        chis,
        specs,
        sums,
        e_certificate,
        eprime_certificate,
        trace,
    )
}
