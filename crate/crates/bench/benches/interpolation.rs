//! Engine benchmarks at desk scale: interpolation, the grid oracle, and a
//! full small construction.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use kronwit_core::constructions::{build_pair, seeded_targets, BuildConfig};
use kronwit_core::groups::{AmbientGroup, ElementStream, FactorSignature, StreamRule};
use kronwit_core::kronecker::{
    grid_minimax, hadamard_interpolate, ladder_interpolate, HadamardRequest, LadderMode,
    LadderRequest, SearchBudget,
};
use num_bigint::BigInt;
use num_rational::BigRational;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn bench_hadamard(c: &mut Criterion) {
    let group = AmbientGroup::integers();
    let elements: Vec<BigRational> = (1u32..=8)
        .map(|j| BigRational::from(BigInt::from(3).pow(j)))
        .collect();
    let targets = seeded_targets(8, 7);
    let request = HadamardRequest {
        elements,
        targets,
        q: 3,
    };
    c.bench_function("hadamard_interpolate q=3, 8 points", |b| {
        b.iter(|| hadamard_interpolate(&group, 0, &request).unwrap())
    });
}

fn bench_ladder(c: &mut Criterion) {
    let group = AmbientGroup::integers();
    let request = LadderRequest {
        lambdas: vec![ratio(1, 101), ratio(3, 107), ratio(5, 109)],
        shifts: vec![ratio(1, 2), ratio(1, 3), ratio(2, 5)],
        targets: seeded_targets(3, 5),
        q: 3,
        mode: LadderMode::Lcm,
    };
    c.bench_function("ladder_interpolate 3 stages", |b| {
        b.iter(|| ladder_interpolate(&group, 0, &request).unwrap())
    });
}

fn bench_grid_oracle(c: &mut Criterion) {
    let elements: Vec<BigInt> = (1u32..=8).map(|j| BigInt::from(3).pow(j)).collect();
    let targets = seeded_targets(8, 7);
    let budget = SearchBudget {
        max_candidates: 1 << 21,
    };
    c.bench_function("grid_minimax 2^16 grid, 8 points", |b| {
        b.iter(|| grid_minimax(&elements, &targets, 1 << 16, &[], &budget).unwrap())
    });
}

fn bench_construction(c: &mut Criterion) {
    let group = AmbientGroup::uniform(FactorSignature::Cyclic { n: 3 }).unwrap();
    let config = BuildConfig {
        rounds: 6,
        seed: 7,
        ..BuildConfig::default()
    };
    c.bench_function("build_pair ⊕Z(3), 6 rounds", |b| {
        b.iter_batched(
            || ElementStream::new(&group, StreamRule::UnitGenerators, 1024).unwrap(),
            |stream| build_pair(&stream, &config).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(
    benches,
    bench_hadamard,
    bench_ladder,
    bench_grid_oracle,
    bench_construction
);
criterion_main!(benches);
