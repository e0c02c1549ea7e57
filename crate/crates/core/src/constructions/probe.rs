//! Budgeted probing of a stream to pick the construction case.
//!
//! Whether a projection π_α(F) is infinite is not decidable from finitely
//! many elements, so the dispatcher works from heuristics over a probe
//! window and refuses to guess when they disagree: a projection "appears
//! infinite" after [`INFINITE_IMAGE_MIN`] distinct values, "appears finite"
//! when no new value showed up in the second half of the window, and is
//! ambiguous otherwise. Explicit assumptions in the build config override
//! the probe entirely.

use crate::exact::denominator;
use crate::groups::{Coordinate, ElementStream, FactorSignature, Order};
use num_bigint::BigUint;
use num_integer::Integer;
use std::collections::{BTreeMap, BTreeSet};

/// Distinct projected values before a factor image is taken as infinite.
pub const INFINITE_IMAGE_MIN: usize = 8;

/// Probed factors with an order-q element before I_q is taken as infinite.
pub const SCATTER_MIN_FACTORS: usize = 4;

/// Default q when the count of order-q factors is driven past every finite
/// order by infinite-order coordinates.
const UNBOUNDED_ORDER_Q: u64 = 12;

#[derive(Clone, Debug)]
pub struct FactorProbe {
    pub index: u64,
    pub signature: FactorSignature,
    /// Distinct nonzero coordinate values seen at this index.
    pub distinct_images: usize,
    /// No new distinct value appeared in the second half of the window.
    pub first_half_stable: bool,
    /// Largest coordinate order seen at this index.
    pub max_order: Order,
    /// The running lcm of coordinate denominators stopped growing in the
    /// first half of the window.
    pub denominators_stable: bool,
}

impl FactorProbe {
    /// Three-valued: `Some(true)` infinite, `Some(false)` finite, `None`
    /// undecided at this window.
    pub fn appears_infinite(&self) -> Option<bool> {
        if matches!(self.signature, FactorSignature::Cyclic { .. }) {
            return Some(false);
        }
        if self.distinct_images >= INFINITE_IMAGE_MIN {
            return Some(true);
        }
        if self.first_half_stable {
            return Some(false);
        }
        None
    }
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    /// Elements actually drawn.
    pub window: usize,
    /// Indices seen with a nonzero coordinate, ascending.
    pub factors: Vec<FactorProbe>,
}

impl ProbeReport {
    pub fn factor(&self, index: u64) -> Option<&FactorProbe> {
        self.factors.iter().find(|f| f.index == index)
    }

    /// Smallest factor whose image appears infinite; the case-1 entry point.
    pub fn case1_candidate(&self) -> Option<&FactorProbe> {
        self.factors
            .iter()
            .find(|f| f.appears_infinite() == Some(true))
    }

    /// Smallest factor the window cannot classify.
    pub fn ambiguous_factor(&self) -> Option<&FactorProbe> {
        self.factors.iter().find(|f| f.appears_infinite().is_none())
    }

    /// Largest q ≥ 2 such that at least [`SCATTER_MIN_FACTORS`] probed
    /// factors hold an element of order ≥ q.
    pub fn scattered_q(&self) -> Option<u64> {
        let count_at_least =
            |q: u64| self.factors.iter().filter(|f| f.max_order.at_least(q)).count();
        let mut candidates: BTreeSet<u64> = BTreeSet::from([2]);
        for f in &self.factors {
            match &f.max_order {
                Order::Finite(n) => {
                    if let Ok(q) = u64::try_from(n) {
                        candidates.insert(q);
                    }
                }
                Order::Infinite => {
                    candidates.insert(UNBOUNDED_ORDER_Q);
                }
            }
        }
        candidates
            .into_iter()
            .rev()
            .find(|q| *q >= 2 && count_at_least(*q) >= SCATTER_MIN_FACTORS)
    }

    /// Probed indices holding an element of order ≥ 3; the order-2 branch
    /// must avoid them.
    pub fn exceptional_indices(&self) -> Vec<u64> {
        self.factors
            .iter()
            .filter(|f| f.max_order.at_least(3))
            .map(|f| f.index)
            .collect()
    }
}

struct Tally {
    values: BTreeSet<Coordinate>,
    last_new_value: usize,
    max_order: Order,
    denominator_lcm: BigUint,
    last_lcm_growth: usize,
}

fn order_max(a: Order, b: Order) -> Order {
    match (&a, &b) {
        (Order::Infinite, _) | (_, Order::Infinite) => Order::Infinite,
        (Order::Finite(x), Order::Finite(y)) => {
            if x >= y {
                a
            } else {
                b
            }
        }
    }
}

fn coordinate_denominator(coord: &Coordinate) -> BigUint {
    match coord {
        Coordinate::Rational(r) => denominator(r),
        Coordinate::Angle(a) => denominator(a.turns()),
    }
}

pub fn probe_stream(stream: &ElementStream, window: usize) -> ProbeReport {
    let mut tallies: BTreeMap<u64, Tally> = BTreeMap::new();
    let mut drawn = 0usize;
    for (k, element) in stream.iter().take(window).enumerate() {
        drawn = k + 1;
        for (index, coord) in element.support() {
            let tally = tallies.entry(*index).or_insert_with(|| Tally {
                values: BTreeSet::new(),
                last_new_value: 0,
                max_order: Order::Finite(BigUint::from(1u32)),
                denominator_lcm: BigUint::from(1u32),
                last_lcm_growth: 0,
            });
            if tally.values.insert(coord.clone()) {
                tally.last_new_value = k;
            }
            tally.max_order = order_max(tally.max_order.clone(), coord.order());
            let lcm = tally.denominator_lcm.lcm(&coordinate_denominator(coord));
            if lcm != tally.denominator_lcm {
                tally.denominator_lcm = lcm;
                tally.last_lcm_growth = k;
            }
        }
    }
    let half = drawn / 2;
    let factors = tallies
        .into_iter()
        .map(|(index, tally)| FactorProbe {
            index,
            signature: stream
                .group()
                .signature(index)
                .expect("probed index exists")
                .clone(),
            distinct_images: tally.values.len(),
            first_half_stable: drawn >= 2 && tally.last_new_value < half,
            max_order: tally.max_order,
            denominators_stable: drawn >= 2 && tally.last_lcm_growth < half,
        })
        .collect();
    ProbeReport {
        window: drawn,
        factors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{AmbientGroup, StreamRule};

    fn geometric(budget: usize) -> ElementStream {
        let group = AmbientGroup::integers();
        ElementStream::new(&group, StreamRule::Geometric { base: 3, factor: 0 }, budget).unwrap()
    }

    #[test]
    fn geometric_image_appears_infinite_with_stable_denominators() {
        let report = probe_stream(&geometric(64), 16);
        assert_eq!(report.window, 16);
        let f = report.factor(0).unwrap();
        assert_eq!(f.distinct_images, 16);
        assert_eq!(f.appears_infinite(), Some(true));
        assert!(f.denominators_stable);
        assert_eq!(f.max_order, Order::Infinite);
        assert!(report.case1_candidate().is_some());
    }

    #[test]
    fn short_window_is_ambiguous() {
        let report = probe_stream(&geometric(64), 5);
        let f = report.factor(0).unwrap();
        assert_eq!(f.appears_infinite(), None);
        assert!(report.ambiguous_factor().is_some());
    }

    #[test]
    fn prime_reciprocals_grow_denominators() {
        let group = AmbientGroup::integers();
        let stream =
            ElementStream::new(&group, StreamRule::PrimeReciprocals { factor: 0 }, 64).unwrap();
        let f = probe_stream(&stream, 16).factor(0).unwrap().clone();
        assert_eq!(f.appears_infinite(), Some(true));
        assert!(!f.denominators_stable);
    }

    #[test]
    fn scattered_orders_pick_the_factor_order() {
        let group = AmbientGroup::uniform(FactorSignature::Cyclic { n: 3 }).unwrap();
        let stream = ElementStream::new(&group, StreamRule::UnitGenerators, 64).unwrap();
        let report = probe_stream(&stream, 16);
        assert_eq!(report.factors.len(), 16);
        assert!(report.case1_candidate().is_none());
        assert!(report.ambiguous_factor().is_none());
        assert_eq!(report.scattered_q(), Some(3));
        assert!(report.exceptional_indices().iter().eq(report
            .factors
            .iter()
            .map(|f| &f.index)));
    }

    #[test]
    fn order_two_generators_fall_back_to_q_two() {
        let group = AmbientGroup::uniform(FactorSignature::Cyclic { n: 2 }).unwrap();
        let stream = ElementStream::new(&group, StreamRule::UnitGenerators, 64).unwrap();
        let report = probe_stream(&stream, 12);
        assert_eq!(report.scattered_q(), Some(2));
        assert!(report.exceptional_indices().is_empty());
    }
}
