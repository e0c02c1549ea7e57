//! Interpolation engines and their machine-checkable certificates.
//!
//! Each engine consumes interpolation points and angular targets and produces
//! a [`KroneckerCertificate`]: an explicit dual witness together with the
//! exact value it achieves at every point and the claimed error bound in
//! turns. Verification recomputes everything from scratch. The `oracle`
//! module holds independent brute-force searches used to cross-examine the
//! engines; they share no code with the constructive paths.

pub mod certificate;
pub mod hadamard;
pub mod ladder;
pub mod oracle;
pub mod product;

pub use certificate::{CertPoint, CertificateError, DualWitness, KroneckerCertificate};
pub use hadamard::{hadamard_interpolate, HadamardInterpolation, HadamardRequest};
pub use ladder::{ladder_interpolate, LadderInterpolation, LadderMode, LadderRequest, LadderStage};
pub use oracle::{
    coset_minimum, enumerate_finite_dual, grid_minimax, lipschitz_slack, DualScan, GridScan,
    SearchBudget,
};
pub use product::{
    product_interpolate, ProductInterpolation, ProductPoint, ProductRequest, ProductStage,
};

use crate::characters::CharacterError;
use crate::exact::chord_approx;
use crate::groups::GroupError;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KroneckerError {
    #[error("need at least one interpolation point")]
    Empty,
    #[error("q = {0} is too small (need at least 2)")]
    InsufficientQ(u64),
    #[error("{points} points but {targets} targets")]
    LengthMismatch { points: usize, targets: usize },
    #[error("interpolation point at position {0} is zero")]
    ZeroElement(usize),
    #[error("interpolation points must be distinct (positions {0} and {1})")]
    NotInjective(usize, usize),
    #[error("growth ratio at position {0} is below q")]
    RatioTooSmall(usize),
    #[error("gap condition fails at stage {stage}: only {granularity} values are reachable, need more than {q}")]
    LadderGapViolated {
        stage: usize,
        granularity: String,
        q: u64,
    },
    #[error("factorial level {0}! exceeds the supported size")]
    FactorialTooLarge(u64),
    #[error("factor index {0} appears in more than one stage")]
    IndexCollision(u64),
    #[error("stage {stage}: residual touches factor {index}, which is only fixed later")]
    ResidualNotEvaluable { stage: usize, index: u64 },
    #[error("stage {stage}: coordinate order {order} is below q = {q}")]
    OrderTooSmall {
        stage: usize,
        order: String,
        q: u64,
    },
    #[error("factor index {index} is not of the kind the engine needs: {reason}")]
    WrongFactor { index: u64, reason: String },
    #[error("search space of {needed} candidates exceeds the budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Character(#[from] CharacterError),
}

/// Interpolation precision ε_q as an arc: chord(1/(2q)) = |1 − e^{iπ/q}|.
pub fn epsilon_turns(q: u64) -> BigRational {
    assert!(q >= 1);
    BigRational::new(BigInt::from(1), BigInt::from(2 * q))
}

/// Index of the m-th root of unity closest to `angle`. Ties pick the smaller
/// root index, so a target exactly between 0 and 1/m resolves to 0.
pub(crate) fn nearest_index(
    angle: &crate::exact::UnitAngle,
    m: &num_bigint::BigUint,
) -> (num_bigint::BigUint, BigRational) {
    use crate::exact::{circular_distance, UnitAngle};
    use num_bigint::BigUint;
    let m_int = BigInt::from(m.clone());
    let scaled = angle.turns() * BigRational::from(m_int.clone());
    let lo = scaled.floor().to_integer();
    let candidates = [
        lo.clone().mod_floor(&m_int),
        (lo + 1i32).mod_floor(&m_int),
    ];
    let mut best: Option<(BigUint, BigRational)> = None;
    for c in candidates {
        let j = c.to_biguint().expect("mod_floor of positive modulus");
        let root = UnitAngle::from_turns(&BigRational::new(
            BigInt::from(j.clone()),
            m_int.clone(),
        ));
        let d = circular_distance(&root, angle);
        best = match best {
            None => Some((j, d)),
            Some((bj, bd)) => {
                if d < bd || (d == bd && j < bj) {
                    Some((j, d))
                } else {
                    Some((bj, bd))
                }
            }
        };
    }
    best.expect("two candidates")
}

/// Inverse of a modulo m, when gcd(a, m) = 1.
pub(crate) fn modinv(
    a: &num_bigint::BigUint,
    m: &num_bigint::BigUint,
) -> Option<num_bigint::BigUint> {
    use num_integer::Integer;
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let ext = a.extended_gcd(&m_int);
    if ext.gcd == BigInt::from(1) {
        Some(ext.x.mod_floor(&m_int).to_biguint().expect("nonnegative"))
    } else {
        None
    }
}

/// Floating-point value of ε_q = 2 sin(π/(2q)), advisory only.
pub fn epsilon_chord(q: u64) -> f64 {
    chord_approx(&epsilon_turns(q))
}
