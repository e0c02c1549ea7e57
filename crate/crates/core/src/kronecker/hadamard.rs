//! Interpolation on lacunary rational sequences by nested intervals.
//!
//! For |λ_1| < |λ_2| < ... with |λ_{j+1}|/|λ_j| ≥ q (q ≥ 2) and any targets
//! t_j, a single real frequency x satisfies ‖λ_j x − t_j‖ ≤ 1/(2(q−1)) for
//! all j. The intervals are maintained exactly: I_j has length c/n_j
//! (c = 1/(q−1), n_j the scaled absolute elements) and maps onto the full
//! admissible arc around t_j, and the Hadamard ratio makes each next
//! constraint solvable inside the current interval.

use super::certificate::{CertPoint, DualWitness, KroneckerCertificate};
use super::KroneckerError;
use crate::exact::{circular_distance, denominator, frac, UnitAngle};
use crate::groups::{AmbientGroup, Coordinate, FactorSignature, GroupElement};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct HadamardRequest {
    /// Nonzero rationals with |λ_{j+1}|/|λ_j| ≥ q.
    pub elements: Vec<BigRational>,
    pub targets: Vec<UnitAngle>,
    pub q: u64,
}

#[derive(Clone, Debug)]
pub struct HadamardInterpolation {
    pub certificate: KroneckerCertificate,
    /// The real frequency x, as an exact rational.
    pub frequency: BigRational,
    /// Common denominator clearing: n_j = scale · |λ_j| are integers.
    pub scale: BigUint,
    /// The nested intervals, outermost first.
    pub intervals: Vec<(BigRational, BigRational)>,
}

pub fn hadamard_interpolate(
    group: &Arc<AmbientGroup>,
    factor: u64,
    request: &HadamardRequest,
) -> Result<HadamardInterpolation, KroneckerError> {
    let HadamardRequest {
        elements,
        targets,
        q,
    } = request;
    if elements.is_empty() {
        return Err(KroneckerError::Empty);
    }
    if elements.len() != targets.len() {
        return Err(KroneckerError::LengthMismatch {
            points: elements.len(),
            targets: targets.len(),
        });
    }
    if *q < 2 {
        return Err(KroneckerError::InsufficientQ(*q));
    }
    match group.signature(factor) {
        Some(FactorSignature::Rationals) => {}
        Some(_) => {
            return Err(KroneckerError::WrongFactor {
                index: factor,
                reason: "interpolation by a real frequency needs a rational factor".into(),
            })
        }
        None => return Err(KroneckerError::Group(crate::groups::GroupError::InvalidIndex(factor))),
    }
    for (j, e) in elements.iter().enumerate() {
        if e.is_zero() {
            return Err(KroneckerError::ZeroElement(j));
        }
        if let Some(i) = elements[..j].iter().position(|o| o == e) {
            return Err(KroneckerError::NotInjective(i, j));
        }
    }

    // Fold signs: ‖(−μ)x − t‖ = ‖μx − (−t)‖, so work with μ_j = |λ_j| and
    // negated targets on the folded positions.
    let magnitudes: Vec<BigRational> = elements.iter().map(|e| e.abs()).collect();
    let folded: Vec<UnitAngle> = elements
        .iter()
        .zip(targets)
        .map(|(e, t)| if e.is_negative() { -t } else { t.clone() })
        .collect();
    let q_rat = BigRational::from(BigInt::from(*q));
    for j in 1..magnitudes.len() {
        if magnitudes[j].clone() < &magnitudes[j - 1] * &q_rat {
            return Err(KroneckerError::RatioTooSmall(j));
        }
    }

    // Clear denominators: n_j = scale · μ_j keeps all ratios intact.
    let scale = magnitudes
        .iter()
        .fold(BigUint::one(), |acc, m| acc.lcm(&denominator(m)));
    let scale_rat = BigRational::from(BigInt::from(scale.clone()));
    let scaled: Vec<BigRational> = magnitudes.iter().map(|m| m * &scale_rat).collect();

    // c = 1/(q−1); I_j = [lo_j, lo_j + c/n_j] with n_j·lo_j ≡ t_j − c/2 (mod 1).
    let c = BigRational::new(BigInt::one(), BigInt::from(*q - 1));
    let half_c = &c / BigRational::from(BigInt::from(2));
    let mut intervals = Vec::with_capacity(scaled.len());
    let mut lo = (folded[0].turns() - &half_c) / &scaled[0];
    let mut hi = &lo + &(&c / &scaled[0]);
    intervals.push((lo.clone(), hi.clone()));
    for j in 1..scaled.len() {
        let n = &scaled[j];
        // Smallest solution of n·lo' ≡ t_j − c/2 (mod 1) with lo' ≥ lo.
        let k = (&lo * n - folded[j].turns() + &half_c).ceil();
        let lo_next = (folded[j].turns() - &half_c + k) / n;
        let hi_next = &lo_next + &(&c / n);
        debug_assert!(lo_next >= lo && hi_next <= hi, "interval escaped its parent");
        lo = lo_next;
        hi = hi_next;
        intervals.push((lo.clone(), hi.clone()));
    }
    // The intervals constrain x against the scaled integers n_j = scale·μ_j,
    // so the frequency acting on the original elements is scale·x.
    let frequency = (&lo + &hi) / BigRational::from(BigInt::from(2)) * &scale_rat;

    let mut points = Vec::with_capacity(elements.len());
    for (e, t) in elements.iter().zip(targets) {
        let achieved = UnitAngle::from_turns(&frac(&(e * &frequency)));
        debug_assert!(circular_distance(&achieved, t) <= half_c);
        points.push(CertPoint {
            element: GroupElement::singleton(group, factor, Coordinate::Rational(e.clone()))?,
            target: t.clone(),
            achieved,
        });
    }
    let certificate = KroneckerCertificate {
        group: Arc::clone(group),
        witness: DualWitness::Frequency {
            index: factor,
            value: frequency.clone(),
        },
        points,
        bound_turns: half_c,
        strict: false,
    };
    Ok(HadamardInterpolation {
        certificate,
        frequency,
        scale,
        intervals,
    })
}
