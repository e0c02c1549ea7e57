//! Search for differences of stream elements that a precision spec cannot
//! tell apart from 0.
//!
//! For any finite set of sample points and any bound, compactness of the
//! value tuples guarantees two stream elements whose evaluations collide
//! within the bound, so their difference passes the spec. The sweep below
//! finds the first such difference in the deterministic diagonal order of
//! [`DifferenceStream`]; a budget keeps it finite, and exhausting the budget
//! is reported as exactly that, not as nonexistence.

use super::precision::{seeded_spec, stage_seed};
use crate::constructions::{ConstructionError, PrecisionSpec};
use crate::groups::{DifferenceStream, ElementStream, GroupElement};
use crate::kronecker::SearchBudget;
use num_rational::BigRational;

/// A difference χ = f_minuend − f_subtrahend passing a spec, with the exact
/// per-point distances that prove it.
#[derive(Clone, Debug)]
pub struct ClusterWitness {
    pub element: GroupElement,
    pub minuend: usize,
    pub subtrahend: usize,
    pub distances_turns: Vec<BigRational>,
    /// Distinct candidates examined before this one matched.
    pub searched: u64,
}

pub fn find_cluster_element(
    stream: &ElementStream,
    spec: &PrecisionSpec,
    budget: &SearchBudget,
) -> Result<ClusterWitness, ConstructionError> {
    let mut searched: u64 = 0;
    for item in DifferenceStream::new(stream) {
        if item.duplicate {
            continue;
        }
        if searched >= budget.max_candidates {
            break;
        }
        searched += 1;
        if spec.admits(&item.element)? {
            let distances_turns = spec.distances(&item.element)?;
            return Ok(ClusterWitness {
                element: item.element,
                minuend: item.minuend,
                subtrahend: item.subtrahend,
                distances_turns,
                searched: searched - 1,
            });
        }
    }
    Err(ConstructionError::BudgetExhausted {
        task: format!("searching F − F for a difference at chord bound 1/{}", spec.m()),
        searched,
    })
}

/// Runs the per-stage cluster search for `rounds` stages, tightening the
/// precision spec one notch per stage so the returned differences shrink
/// towards 0 in every sampled direction.
pub(crate) fn cluster_schedule(
    stream: &ElementStream,
    rounds: usize,
    seed: u64,
    budget: &SearchBudget,
) -> Result<(Vec<ClusterWitness>, Vec<PrecisionSpec>), ConstructionError> {
    let group = stream.group();
    let mut chis = Vec::with_capacity(rounds);
    let mut specs = Vec::with_capacity(rounds);
    for n in 1..=rounds {
        let spec = seeded_spec(group, n as u64, stage_seed(seed, n as u64));
        chis.push(find_cluster_element(stream, &spec, budget)?);
        specs.push(spec);
    }
    Ok((chis, specs))
}
