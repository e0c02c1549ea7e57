//! Construction when no single projection is infinite: infinitely many
//! factors see F, so every stage can claim a fresh factor.
//!
//! Stage n picks the smallest unused factor β_n where the stage's γ_n has
//! a coordinate of order ≥ q, all earlier γ_m vanish, and every χ_m with
//! m ≤ n vanishes. Those vanishing conditions are exactly what makes the
//! product engine's residuals evaluable, and they make distinctness of
//! E ∪ E′ structural: each γ_n is the only point of the construction with
//! a nonzero coordinate at β_n among {γ_m, γ_m + χ_m : m ≥ n}.
//!
//! With q = 2 every admissible coordinate has order exactly 2 and the
//! certified arc is a quarter turn (chord √2). That bound is weak, so the
//! certificates alone cannot distinguish E from a set with collapsing
//! combinations; an exhaustive independence check over the stage-factor
//! projections Π(E) and Π(E′) closes the gap.

use super::cluster::cluster_schedule;
use super::dispatch::BuildConfig;
use super::precision::{seeded_targets, stage_seed};
use super::probe::ProbeReport;
use super::result::{
    restrict, BranchTrace, CaseTag, ConstructionPair, ConstructionResult, IndependenceCertificate,
    IndependencePair, Provenance,
};
use super::ConstructionError;
use crate::groups::{ElementStream, GroupElement, Order};
use crate::kronecker::{product_interpolate, ProductPoint, ProductRequest, SearchBudget};
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

/// One coefficient of a vanishing combination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Combination {
    pub position: usize,
    #[serde(with = "crate::json::biguint_string")]
    pub coefficient: BigUint,
}

/// Outcome of the exhaustive dependence search: every subset of size up to
/// `max_subset`, every coefficient tuple with 1 ≤ c_i < ord(s_i).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceCheck {
    pub independent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<Combination>>,
    pub combinations_checked: u64,
    pub max_subset: usize,
}

/// Searches for a nontrivial vanishing combination Σ c_i s_i = 0 with
/// c_i ∈ {1, …, ord(s_i) − 1} over subsets of size ≤ `max_subset`. A zero
/// element is reported as an immediate counterexample with coefficient 1.
/// Elements of infinite order are refused; the coefficient range would not
/// be finite.
pub fn independence_check(
    elements: &[GroupElement],
    max_subset: usize,
    budget: &SearchBudget,
) -> Result<IndependenceCheck, ConstructionError> {
    let mut orders = Vec::with_capacity(elements.len());
    for (position, e) in elements.iter().enumerate() {
        if e.is_zero() {
            return Ok(IndependenceCheck {
                independent: false,
                counterexample: Some(vec![Combination {
                    position,
                    coefficient: BigUint::one(),
                }]),
                combinations_checked: 0,
                max_subset,
            });
        }
        match e.element_order() {
            Order::Finite(n) => orders.push(n),
            Order::Infinite => return Err(ConstructionError::InfiniteOrder { position }),
        }
    }
    let mut checked = 0u64;
    let mut subset = Vec::new();
    let counterexample = scan_subsets(
        elements,
        &orders,
        max_subset,
        budget.max_candidates,
        &mut checked,
        &mut subset,
        0,
    )?;
    Ok(IndependenceCheck {
        independent: counterexample.is_none(),
        counterexample,
        combinations_checked: checked,
        max_subset,
    })
}

fn scan_subsets(
    elements: &[GroupElement],
    orders: &[BigUint],
    max_subset: usize,
    budget: u64,
    checked: &mut u64,
    subset: &mut Vec<usize>,
    start: usize,
) -> Result<Option<Vec<Combination>>, ConstructionError> {
    for i in start..elements.len() {
        subset.push(i);
        if let Some(hit) = test_subset(elements, orders, subset, budget, checked)? {
            return Ok(Some(hit));
        }
        if subset.len() < max_subset {
            if let Some(hit) =
                scan_subsets(elements, orders, max_subset, budget, checked, subset, i + 1)?
            {
                return Ok(Some(hit));
            }
        }
        subset.pop();
    }
    Ok(None)
}

fn test_subset(
    elements: &[GroupElement],
    orders: &[BigUint],
    subset: &[usize],
    budget: u64,
    checked: &mut u64,
) -> Result<Option<Vec<Combination>>, ConstructionError> {
    let k = subset.len();
    let mut coeffs = vec![BigUint::one(); k];
    loop {
        if *checked >= budget {
            return Err(ConstructionError::BudgetExhausted {
                task: format!(
                    "enumerating coefficient combinations over subsets of size up to {}",
                    k.max(1)
                ),
                searched: *checked,
            });
        }
        *checked += 1;
        let mut acc = GroupElement::zero(elements[subset[0]].group());
        for (pos, c) in subset.iter().zip(&coeffs) {
            acc = acc.add(&elements[*pos].scale(&BigInt::from(c.clone())))?;
        }
        if acc.is_zero() {
            return Ok(Some(
                subset
                    .iter()
                    .zip(&coeffs)
                    .map(|(pos, c)| Combination {
                        position: *pos,
                        coefficient: c.clone(),
                    })
                    .collect(),
            ));
        }
        let mut j = k;
        loop {
            if j == 0 {
                return Ok(None);
            }
            j -= 1;
            coeffs[j] += 1u32;
            if coeffs[j] < orders[subset[j]] {
                break;
            }
            coeffs[j] = BigUint::one();
        }
    }
}

pub fn build_case2(
    stream: &ElementStream,
    q: u64,
    probe: &ProbeReport,
    config: &BuildConfig,
) -> Result<ConstructionResult, ConstructionError> {
    if q < 2 {
        return Err(ConstructionError::InsufficientQ(q, 2));
    }
    if config.rounds == 0 {
        return Err(ConstructionError::NoRounds);
    }
    let group = Arc::clone(stream.group());
    let rounds = config.rounds;
    let exceptional = if q == 2 {
        probe.exceptional_indices()
    } else {
        Vec::new()
    };

    // Cluster differences first: stage n runs at precision m = n, so the
    // stage factors can be chosen clear of every χ they must vanish on.
    let cluster_budget = SearchBudget {
        max_candidates: config.cluster_budget,
    };
    let (chis, specs) = cluster_schedule(stream, rounds, config.seed, &cluster_budget)?;

    let order_two = Order::Finite(BigUint::from(2u32));
    let mut betas: Vec<u64> = Vec::with_capacity(rounds);
    let mut gammas: Vec<(GroupElement, usize)> = Vec::with_capacity(rounds);
    let mut used_positions: BTreeSet<usize> = BTreeSet::new();
    let mut examined = 0u64;
    for n in 0..rounds {
        let mut found = None;
        'scan: for (k, f) in stream.iter().enumerate() {
            if used_positions.contains(&k) || gammas.iter().any(|(g, _)| g == &f) {
                continue;
            }
            for beta in f.support_indices() {
                if examined >= config.selection_budget {
                    break 'scan;
                }
                examined += 1;
                if betas.contains(&beta) || exceptional.contains(&beta) {
                    continue;
                }
                let admissible = if q == 2 {
                    f.project(beta).order() == order_two
                } else {
                    f.project(beta).order().at_least(q)
                };
                if !admissible {
                    continue;
                }
                if gammas.iter().any(|(g, _)| !g.project(beta).is_zero()) {
                    continue;
                }
                if chis[..=n].iter().any(|c| !c.element.project(beta).is_zero()) {
                    continue;
                }
                found = Some((f.clone(), k, beta));
                break 'scan;
            }
        }
        let Some((f, k, beta)) = found else {
            return Err(ConstructionError::OrderTooSmall { q });
        };
        used_positions.insert(k);
        gammas.push((f, k));
        betas.push(beta);
    }

    let sums: Vec<GroupElement> = gammas
        .iter()
        .zip(&chis)
        .map(|((g, _), c)| g.add(&c.element))
        .collect::<Result<_, _>>()?;
    let run = |points: &[GroupElement], target_seed: u64| {
        product_interpolate(&ProductRequest {
            points: points
                .iter()
                .zip(&betas)
                .map(|(e, b)| ProductPoint {
                    element: e.clone(),
                    index: *b,
                })
                .collect(),
            targets: seeded_targets(rounds, target_seed),
            q,
        })
    };
    let e_run = run(
        &gammas.iter().map(|(g, _)| g.clone()).collect::<Vec<_>>(),
        stage_seed(config.seed, rounds as u64 + 1),
    )?;
    let eprime_run = run(&sums, stage_seed(config.seed, rounds as u64 + 2))?;

    let independence = if q == 2 {
        let beta_set: BTreeSet<u64> = betas.iter().copied().collect();
        let ind_budget = SearchBudget {
            max_candidates: config.independence_budget,
        };
        let project = |points: &[GroupElement]| -> Result<Vec<GroupElement>, ConstructionError> {
            points
                .iter()
                .map(|p| restrict(p, &beta_set).map_err(ConstructionError::from))
                .collect()
        };
        let mut certs = Vec::with_capacity(2);
        for (label, points) in [
            ("Π(E)", gammas.iter().map(|(g, _)| g.clone()).collect::<Vec<_>>()),
            ("Π(E′)", sums.clone()),
        ] {
            let elements = project(&points)?;
            let check = independence_check(&elements, config.independence_max_subset, &ind_budget)?;
            if !check.independent {
                return Err(ConstructionError::DependenceFound(format!(
                    "{label} admits a vanishing combination"
                )));
            }
            certs.push(IndependenceCertificate { elements, check });
        }
        let eprime = certs.pop().expect("two certificates");
        let e = certs.pop().expect("two certificates");
        Some(IndependencePair { e, eprime })
    } else {
        None
    };

    let case = if q == 2 {
        CaseTag::Case2OrderTwo
    } else {
        CaseTag::Case2
    };
    let (bound_turns, strict) = case.bound(q);
    let pairs = gammas
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
        e_certificate: e_run.certificate,
        eprime_certificate: eprime_run.certificate,
        independence,
        provenance: Provenance {
            case,
            factor: None,
            betas,
            exceptional,
            seed: config.seed,
            rounds,
            trace: BranchTrace::Product {
                stages_e: e_run.stages,
                stages_eprime: eprime_run.stages,
            },
        },
    };
    result.check_invariants()?;
    Ok(result)
}
