//! Property tests for the exact arithmetic layers: group operations, circle
//! distances, ladder characters, and certificate verification.

use kronwit_core::exact::{chord_cmp, circular_distance, frac, UnitAngle};
use kronwit_core::groups::{AmbientGroup, Coordinate, FactorSignature, GroupElement};
use kronwit_core::characters::LadderCharacter;
use kronwit_core::constructions::seeded_targets;
use kronwit_core::kronecker::{hadamard_interpolate, HadamardRequest};
use kronwit_core::exact::denominator;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use std::cmp::Ordering;
use std::sync::Arc;

fn test_group() -> Arc<AmbientGroup> {
    AmbientGroup::explicit(vec![
        FactorSignature::Rationals,
        FactorSignature::Cyclic { n: 6 },
        FactorSignature::Pruefer { p: 2 },
    ])
    .unwrap()
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-400i64..400, 1i64..40)
        .prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn angle() -> impl Strategy<Value = UnitAngle> {
    rational().prop_map(|r| UnitAngle::from_turns(&r))
}

prop_compose! {
    fn element()(r in rational(), c in 0i64..6, num in 0i64..16, pow in 2u32..5) -> GroupElement {
        let group = test_group();
        let den = 2i64.pow(pow);
        GroupElement::new(
            &group,
            [
                (0, Coordinate::Rational(r)),
                (1, Coordinate::Angle(UnitAngle::from_ratio(c, 6))),
                (2, Coordinate::Angle(UnitAngle::from_ratio(num, den))),
            ],
        )
        .unwrap()
    }
}

proptest! {
    #[test]
    fn addition_commutes(a in element(), b in element()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
    }

    #[test]
    fn addition_associates(a in element(), b in element(), c in element()) {
        let left = a.add(&b).unwrap().add(&c).unwrap();
        let right = a.add(&b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn subtraction_inverts_addition(a in element(), b in element()) {
        prop_assert_eq!(a.add(&b).unwrap().sub(&b).unwrap(), a);
    }

    #[test]
    fn zero_is_the_identity(a in element()) {
        let zero = GroupElement::zero(a.group());
        prop_assert_eq!(a.add(&zero).unwrap(), a.clone());
        prop_assert_eq!(a.sub(&a).unwrap(), zero);
    }

    #[test]
    fn scaling_matches_repeated_addition(a in element(), k in 0u32..7) {
        let mut acc = GroupElement::zero(a.group());
        for _ in 0..k {
            acc = acc.add(&a).unwrap();
        }
        prop_assert_eq!(a.scale(&BigInt::from(k)), acc);
    }

    #[test]
    fn projection_is_a_homomorphism(a in element(), b in element(), idx in 0u64..3) {
        let sum = a.add(&b).unwrap();
        let expected = a.project(idx).add(&b.project(idx)).unwrap();
        prop_assert_eq!(sum.project(idx), expected);
    }

    #[test]
    fn circular_distance_is_a_metric(x in angle(), y in angle(), z in angle()) {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let dxy = circular_distance(&x, &y);
        prop_assert_eq!(&dxy, &circular_distance(&y, &x));
        prop_assert!(dxy <= half);
        prop_assert!(dxy >= BigRational::zero());
        prop_assert_eq!(circular_distance(&x, &x), BigRational::zero());
        let dxz = circular_distance(&x, &z);
        let dyz = circular_distance(&y, &z);
        prop_assert!(dxz <= &dxy + &dyz);
    }

    #[test]
    fn chord_comparison_is_monotone(
        n1 in 0i64..=500, n2 in 0i64..=500, cn in 0i64..=20, cd in 1i64..=10,
    ) {
        // d1 ≤ d2 in [0, 1/2] implies chord(d1) ≤ chord(d2), so the exact
        // comparisons against any chord value c can never invert.
        let (lo, hi) = if n1 <= n2 { (n1, n2) } else { (n2, n1) };
        let d1 = BigRational::new(BigInt::from(lo), BigInt::from(1000));
        let d2 = BigRational::new(BigInt::from(hi), BigInt::from(1000));
        let c = BigRational::new(BigInt::from(cn), BigInt::from(cd * 10));
        let c1 = chord_cmp(&d1, &c);
        let c2 = chord_cmp(&d2, &c);
        prop_assert!(!(c1 == Ordering::Greater && c2 == Ordering::Less));
        prop_assert!(!(c1 == Ordering::Greater && c2 == Ordering::Equal && lo < hi));
        if lo == hi {
            prop_assert_eq!(c1, c2);
        }
    }

    #[test]
    fn ladder_evaluation_is_a_homomorphism(x in rational(), y in rational()) {
        let level = denominator(&x).lcm(&denominator(&y));
        let g = LadderCharacter::pinned().extended_to_cover(&level);
        let sum = g.evaluate(&(&x + &y)).unwrap();
        let parts = &g.evaluate(&x).unwrap() + &g.evaluate(&y).unwrap();
        prop_assert_eq!(sum, parts);
    }

    #[test]
    fn ladder_extension_preserves_values(x in rational(), extra in 2u64..60) {
        let base_level = denominator(&x);
        let g = LadderCharacter::pinned().extended_to_cover(&base_level);
        let h = g.extended_to_cover(&(&base_level * extra));
        prop_assert!(h.covers(&base_level));
        prop_assert_eq!(g.evaluate(&x).unwrap(), h.evaluate(&x).unwrap());
    }

    #[test]
    fn pinned_ladders_kill_the_integers(x in rational()) {
        // The base rung fixes g(1) = 0, so integers evaluate to zero and
        // evaluation factors through the fractional part.
        let g = LadderCharacter::pinned().extended_to_cover(&denominator(&x));
        let shifted = &x + BigRational::from(BigInt::from(5));
        prop_assert_eq!(g.evaluate(&shifted).unwrap(), g.evaluate(&x).unwrap());
        prop_assert_eq!(g.evaluate(&frac(&x)).unwrap(), g.evaluate(&x).unwrap());
    }

    #[test]
    fn tampered_certificates_are_rejected(seed in 0u64..200) {
        let group = AmbientGroup::integers();
        let elements: Vec<BigRational> =
            [1i64, 3, 9].iter().map(|&n| BigRational::from(BigInt::from(n))).collect();
        let targets = seeded_targets(3, seed);
        let out = hadamard_interpolate(
            &group,
            0,
            &HadamardRequest { elements, targets, q: 3 },
        )
        .unwrap();
        prop_assert!(out.certificate.verify().is_ok());

        // Shifting a recorded value off the witness's actual evaluation.
        let mut forged = out.certificate.clone();
        let half = UnitAngle::from_ratio(1, 2);
        forged.points[1].achieved = &forged.points[1].achieved + &half;
        prop_assert!(forged.verify().is_err());

        // Moving a target outside the certified bound.
        let mut drifted = out.certificate.clone();
        drifted.points[2].target = &drifted.points[2].achieved + &half;
        prop_assert!(drifted.verify().is_err());

        // Claiming a tighter bound than the points satisfy.
        let mut squeezed = out.certificate;
        squeezed.bound_turns = BigRational::zero();
        let max_err = squeezed.max_error_turns();
        if max_err > BigRational::zero() {
            prop_assert!(squeezed.verify().is_err());
        }
    }
}
