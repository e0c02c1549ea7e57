//! Cross-examination of the interpolation engines against the independent
//! brute-force oracles. The engines steer constructively; the oracles search
//! exhaustively; agreement is evidence neither is lying.

use kronwit_core::constructions::{
    build_case2, probe_stream, seeded_targets, BuildConfig,
};
use kronwit_core::groups::{AmbientGroup, ElementStream, FactorSignature, StreamRule};
use kronwit_core::kronecker::{
    coset_minimum, enumerate_finite_dual, grid_minimax, hadamard_interpolate, ladder_interpolate,
    lipschitz_slack, HadamardRequest, LadderMode, LadderRequest, SearchBudget,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn big(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

#[test]
fn hadamard_certificates_respect_the_grid_oracle() {
    let group = AmbientGroup::integers();
    let budget = SearchBudget::default();
    for q in [3u64, 4, 5] {
        for seed in [11u64, 12] {
            let elements: Vec<BigRational> = (1..=6).map(|j| big((q as i64).pow(j))).collect();
            let ints: Vec<BigInt> = elements.iter().map(|r| r.to_integer()).collect();
            let targets = seeded_targets(6, seed);
            let out = hadamard_interpolate(
                &group,
                0,
                &HadamardRequest {
                    elements,
                    targets: targets.clone(),
                    q,
                },
            )
            .unwrap();
            let engine_max = out.certificate.max_error_turns();

            let grid = 1 << 14;
            let scan = grid_minimax(&ints, &targets, grid, &[out.frequency.clone()], &budget)
                .unwrap();
            let slack = lipschitz_slack(&ints, grid);
            // The engine frequency is a real candidate, so the folded best
            // can only improve on the pure grid minimum.
            assert!(scan.best_min_max <= scan.grid_min_max);
            assert!(scan.best_min_max <= engine_max);
            // A grid this fine sits within `slack` of the true minimax, so
            // the engine's error can never undercut grid − slack.
            assert!(&engine_max + &slack >= scan.grid_min_max);
        }
    }
}

#[test]
fn ladder_stages_are_stagewise_optimal() {
    let group = AmbientGroup::integers();
    let budget = SearchBudget::default();
    // Denominators pairwise coprime and each well above q, so every stage
    // has granularity equal to its full denominator.
    let lambdas = vec![
        BigRational::new(BigInt::from(1), BigInt::from(101)),
        BigRational::new(BigInt::from(3), BigInt::from(107)),
        BigRational::new(BigInt::from(5), BigInt::from(109)),
    ];
    let shifts = vec![
        BigRational::new(BigInt::from(1), BigInt::from(2)),
        BigRational::new(BigInt::from(1), BigInt::from(3)),
        BigRational::new(BigInt::from(2), BigInt::from(5)),
    ];
    let targets = seeded_targets(3, 77);
    let run = ladder_interpolate(
        &group,
        0,
        &LadderRequest {
            lambdas,
            shifts,
            targets,
            q: 3,
            mode: LadderMode::Lcm,
        },
    )
    .unwrap();
    assert!(run.v_certificate.verify().is_ok());
    assert!(run.vprime_certificate.verify().is_ok());
    for stage in &run.stages {
        // The engine claims its chosen rung is the best value reachable in
        // base + (1/granularity)ℤ; the oracle enumerates that coset.
        let (_, best) = coset_minimum(&stage.base, &stage.granularity, &stage.desired, &budget)
            .unwrap();
        assert_eq!(stage.error_turns, best);
        // The achieved value really lies in the reachable coset.
        let offset = &stage.achieved - &stage.base;
        let step = offset.turns() * BigRational::from(BigInt::from(stage.granularity.clone()));
        assert!(step.is_integer());
    }
}

#[test]
fn product_certificates_match_the_exhaustive_dual() {
    let group = AmbientGroup::uniform(FactorSignature::Cyclic { n: 5 }).unwrap();
    let stream = ElementStream::new(&group, StreamRule::UnitGenerators, 128).unwrap();
    let probe = probe_stream(&stream, 16);
    let config = BuildConfig {
        rounds: 3,
        seed: 21,
        ..BuildConfig::default()
    };
    let result = build_case2(&stream, 5, &probe, &config).unwrap();
    let cert = &result.e_certificate;
    let engine_max = cert.max_error_turns();
    assert!(engine_max <= result.bound_turns);

    // E's points live exactly on the stage factors, so the finite dual over
    // those factors contains every character the engine could have built.
    let moduli: Vec<(u64, u64)> = result.provenance.betas.iter().map(|&b| (b, 5)).collect();
    let points: Vec<_> = cert.points.iter().map(|p| p.element.clone()).collect();
    let targets: Vec<_> = cert.points.iter().map(|p| p.target.clone()).collect();
    let scan = enumerate_finite_dual(&moduli, &points, &targets, &SearchBudget::default())
        .unwrap();
    assert!(scan.min_max_turns <= engine_max);
    // Nearest-of-5 rounding puts the exhaustive optimum within 1/10 too.
    assert!(scan.min_max_turns <= BigRational::new(BigInt::from(1), BigInt::from(10)));
    assert!(scan.searched >= 125);
}

#[test]
fn grid_oracle_pins_the_two_point_optimum() {
    // For n = (1, 2) with targets (0, 1/2) the minimax sits at x = 1/6 with
    // value 1/6 turns; the grid must land within a slack of it.
    let elements = [BigInt::from(1), BigInt::from(2)];
    let targets = vec![
        kronwit_core::UnitAngle::zero(),
        kronwit_core::UnitAngle::from_ratio(1, 2),
    ];
    let grid = 600_000;
    let scan = grid_minimax(
        &elements,
        &targets,
        grid,
        &[],
        &SearchBudget {
            max_candidates: 1_000_000,
        },
    )
    .unwrap();
    let sixth = BigRational::new(BigInt::from(1), BigInt::from(6));
    assert!(scan.grid_min_max >= sixth.clone() - lipschitz_slack(&elements, grid));
    assert_eq!(scan.grid_min_max, sixth);
    assert_eq!(
        scan.grid_argmin,
        grid / 6,
        "lowest optimal grid point is x = 1/6"
    );
    assert!(!scan.best_min_max.is_zero());
}
