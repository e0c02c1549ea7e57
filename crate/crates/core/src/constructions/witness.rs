//! Finite-scale witnesses that E ∪ E′ is not an interpolation set.
//!
//! Interpolating a bounded function that is 0 on E and 1 on E′ requires
//! characters that separate γ_n from γ_n + χ_n uniformly in n. The χ_n were
//! chosen to cluster at 0 in the Bohr topology, so no finite family of
//! characters can do that: some round must have every sampled value of γ_n
//! and γ_n + χ_n within a chord of 1/m. `non_i0_witness` takes a
//! caller-chosen precision spec and returns the first such round, which is
//! the concrete, checkable failure at that scale.

use super::precision::PrecisionSpec;
use super::result::ConstructionResult;
use super::ConstructionError;
use crate::exact::{chord_approx, chord_cmp, UnitAngle};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// One round the sampled characters fail to separate at scale 1/m.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessHit {
    /// Index of the round in construction order.
    pub index: usize,
    /// Circular distances (turns) between the values at γ_n and at γ_n + χ_n,
    /// one per sample point, each strictly below the chord bound.
    #[serde(with = "crate::json::rational_vec")]
    pub distances_turns: Vec<BigRational>,
    /// Sampled values at γ_n.
    pub gamma_values: Vec<UnitAngle>,
    /// Sampled values at γ_n + χ_n.
    pub sum_values: Vec<UnitAngle>,
}

impl WitnessHit {
    /// Approximate chord lengths for the recorded distances, advisory only;
    /// the exact comparison is `chord_cmp` on `distances_turns`.
    pub fn chords_approx(&self) -> Vec<f64> {
        self.distances_turns.iter().map(chord_approx).collect()
    }
}

/// Outcome of sweeping a construction for a round below the spec's bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub spec: PrecisionSpec,
    /// Chord bound 1/m the hit had to beat at every sample point.
    #[serde(with = "crate::json::rational_string")]
    pub chord_bound: BigRational,
    pub found: Option<WitnessHit>,
    /// Rounds examined, including the hit when there is one.
    pub pairs_examined: usize,
}

/// Sweeps the construction's rounds in order and reports the first one whose
/// γ_n and γ_n + χ_n every sample point of `spec` leaves within a chord of
/// 1/m. `found: None` is an honest miss at this spec, not an error: the
/// construction only guarantees hits for specs drawn from the same sampling
/// scheme its cluster search used.
pub fn non_i0_witness(
    result: &ConstructionResult,
    spec: &PrecisionSpec,
) -> Result<WitnessReport, ConstructionError> {
    let bound = spec.chord_bound();
    let mut examined = 0usize;
    let mut found = None;
    for (index, pair) in result.pairs.iter().enumerate() {
        examined += 1;
        // Sample points are homomorphisms, so the distance between the
        // values at γ_n and γ_n + χ_n is the distance of the value at χ_n
        // from 0, which is what `distances` computes.
        let distances = spec.distances(&pair.chi)?;
        if distances
            .iter()
            .all(|d| chord_cmp(d, &bound) == Ordering::Less)
        {
            let gamma_values = spec
                .points()
                .iter()
                .map(|p| p.evaluate(&pair.gamma))
                .collect::<Result<Vec<_>, _>>()?;
            let sum_values = spec
                .points()
                .iter()
                .map(|p| p.evaluate(&pair.sum))
                .collect::<Result<Vec<_>, _>>()?;
            found = Some(WitnessHit {
                index,
                distances_turns: distances,
                gamma_values,
                sum_values,
            });
            break;
        }
    }
    Ok(WitnessReport {
        spec: spec.clone(),
        chord_bound: bound,
        found,
        pairs_examined: examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::case2::build_case2;
    use crate::constructions::precision::seeded_spec;
    use crate::constructions::probe::probe_stream;
    use crate::constructions::BuildConfig;
    use crate::exact::circular_distance;
    use crate::groups::{AmbientGroup, ElementStream, FactorSignature, StreamRule};

    fn sample_build(rounds: usize) -> ConstructionResult {
        let group = AmbientGroup::uniform(FactorSignature::Cyclic { n: 3 }).unwrap();
        let stream = ElementStream::new(&group, StreamRule::UnitGenerators, 256).unwrap();
        let probe = probe_stream(&stream, 16);
        let config = BuildConfig {
            rounds,
            seed: 7,
            ..BuildConfig::default()
        };
        build_case2(&stream, 3, &probe, &config).unwrap()
    }

    #[test]
    fn witness_found_for_seeded_specs() {
        // Stages 13 and 14 sample the full covering family, which pins the
        // later χ's to vanish on every slot a small witness spec can draw.
        let result = sample_build(14);
        for seed in 0..5u64 {
            let spec = seeded_spec(&result.group, 3, 1000 + seed);
            let report = non_i0_witness(&result, &spec).unwrap();
            let hit = report.found.expect("a round under the bound");
            // Recompute the separation directly from the recorded values.
            let pair = &result.pairs[hit.index];
            assert_eq!(hit.distances_turns, spec.distances(&pair.chi).unwrap());
            for ((g, s), d) in hit
                .gamma_values
                .iter()
                .zip(&hit.sum_values)
                .zip(&hit.distances_turns)
            {
                assert_eq!(&circular_distance(g, s), d);
                assert_eq!(chord_cmp(d, &report.chord_bound), Ordering::Less);
            }
            assert_eq!(hit.chords_approx().len(), spec.points().len());
        }
    }

    #[test]
    fn miss_is_reported_not_raised() {
        let result = sample_build(4);
        // A sample point multiplying by 1 at a factor every χ touches with a
        // nonzero coordinate keeps the chord at a fixed 2·sin(π/3), which a
        // bound of 1/4 rejects; rounds were built at precision at most 4, so
        // a hostile spec at m = 4 can miss every round.
        let mut missed = false;
        for seed in 0..64u64 {
            let spec = seeded_spec(&result.group, 4, seed);
            let report = non_i0_witness(&result, &spec).unwrap();
            assert!(report.pairs_examined <= result.pairs.len());
            if report.found.is_none() {
                missed = true;
                assert_eq!(report.pairs_examined, result.pairs.len());
            }
        }
        // Some seed in the range misses: the χ's only vanish on the factors
        // their own stage sampled, and stage windows stop growing at m = 4.
        assert!(missed);
    }
}
