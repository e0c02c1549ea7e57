//! Interpolation on rationals with growing denominators by ladder steering.
//!
//! Each stage n receives a shift s_n and a steering element λ_n. The ladder
//! character g is first extended without choice (K = 0) to cover the shift,
//! so g(s_n) is pinned; then the level jumps to cover D(λ_n), and among the
//! reachable values of g(λ_n), which form a full coset of a cyclic group of
//! order m (the stage granularity), the closest one to t_n − g(s_n) is
//! selected by choosing the extension offset K. The gap condition m > q makes
//! every stage error < 1/(2q) strictly, and extensions never move values the
//! earlier stages rely on.
//!
//! Two certificates come out of the same character: one on the steering
//! elements λ_n against the shifted targets, one on the sums s_n + λ_n
//! against the original targets.

use super::certificate::{CertPoint, DualWitness, KroneckerCertificate};
use super::{epsilon_turns, modinv, nearest_index, KroneckerError};
use crate::characters::LadderCharacter;
use crate::exact::{denominator, frac, UnitAngle};
use crate::groups::{AmbientGroup, Coordinate, FactorSignature, GroupElement};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LadderMode {
    /// Levels grow by least common multiples: L' = lcm(L, D(λ_n)).
    Lcm,
    /// Levels are factorials B! with B twice the largest denominator seen.
    Factorial,
}

#[derive(Clone, Debug)]
pub struct LadderRequest {
    pub lambdas: Vec<BigRational>,
    pub shifts: Vec<BigRational>,
    pub targets: Vec<UnitAngle>,
    pub q: u64,
    pub mode: LadderMode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderStage {
    pub stage: usize,
    #[serde(with = "crate::json::biguint_string")]
    pub level_before: BigUint,
    #[serde(with = "crate::json::biguint_string")]
    pub level_after: BigUint,
    /// Number of reachable values for g(λ_n) at this stage.
    #[serde(with = "crate::json::biguint_string")]
    pub granularity: BigUint,
    /// The reachable values are base + j/granularity.
    pub base: UnitAngle,
    #[serde(with = "crate::json::biguint_string")]
    pub root_index: BigUint,
    #[serde(with = "crate::json::biguint_string")]
    pub chosen_k: BigUint,
    pub desired: UnitAngle,
    pub achieved: UnitAngle,
    #[serde(with = "crate::json::rational_string")]
    pub error_turns: BigRational,
}

#[derive(Clone, Debug)]
pub struct LadderInterpolation {
    pub character: LadderCharacter,
    /// Steering elements λ_n against the shifted targets t_n − g(s_n).
    pub v_certificate: KroneckerCertificate,
    /// Sums s_n + λ_n against the original targets t_n.
    pub vprime_certificate: KroneckerCertificate,
    pub stages: Vec<LadderStage>,
}

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// One steering step: extend `g` to `new_level`, choosing K so that g(λ)
/// lands on the reachable value nearest `desired`.
fn steer(
    g: &LadderCharacter,
    new_level: BigUint,
    lambda: &BigRational,
    desired: &UnitAngle,
    q: u64,
    stage: usize,
) -> Result<(LadderCharacter, LadderStage), KroneckerError> {
    let top = g.top_level().clone();
    debug_assert!((&new_level % &top).is_zero());
    let j_factor = &new_level / &top;
    let t = denominator(lambda);
    debug_assert!((&new_level % &t).is_zero());
    let a = lambda.numer();

    // g'(λ) = a·(L'/t)·(a_top + K)/J; over K the values sweep a coset of
    // step gcd(a·L'/t, J)/J, i.e. granularity m = J/gcd.
    let ratio = BigInt::from(&new_level / &t);
    let j_int = BigInt::from(j_factor.clone());
    let coeff = (a * &ratio).mod_floor(&j_int).to_biguint().expect("mod_floor");
    let w = coeff.gcd(&j_factor);
    let m = &j_factor / &w;
    if m <= BigUint::from(q) {
        return Err(KroneckerError::LadderGapViolated {
            stage,
            granularity: m.to_string(),
            q,
        });
    }

    let base_turns = frac(
        &(BigRational::new(a * ratio, BigInt::from(j_factor.clone())) * g.top_value().turns()),
    );
    let base = UnitAngle::from_turns(&base_turns);
    let delta = desired - &base;
    let (root_index, error_turns) = nearest_index(&delta, &m);

    // Solve (coeff/w)·K ≡ root_index (mod m); coeff/w is a unit mod m.
    let unit = &coeff / &w;
    let inv = modinv(&unit, &m).expect("unit by construction");
    let k = (&root_index * &inv) % &m;
    let extended = g.extended(new_level.clone(), &k)?;
    let achieved = extended.evaluate(lambda)?;
    debug_assert_eq!(
        achieved,
        &base + &UnitAngle::from_turns(&BigRational::new(
            BigInt::from(root_index.clone()),
            BigInt::from(m.clone()),
        ))
    );
    let stage_record = LadderStage {
        stage,
        level_before: top,
        level_after: new_level,
        granularity: m,
        base,
        root_index,
        chosen_k: k,
        desired: desired.clone(),
        achieved,
        error_turns,
    };
    Ok((extended, stage_record))
}

pub fn ladder_interpolate(
    group: &Arc<AmbientGroup>,
    factor: u64,
    request: &LadderRequest,
) -> Result<LadderInterpolation, KroneckerError> {
    let LadderRequest {
        lambdas,
        shifts,
        targets,
        q,
        mode,
    } = request;
    if lambdas.is_empty() {
        return Err(KroneckerError::Empty);
    }
    if lambdas.len() != targets.len() || lambdas.len() != shifts.len() {
        return Err(KroneckerError::LengthMismatch {
            points: lambdas.len(),
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
                reason: "ladder characters live on a rational factor".into(),
            })
        }
        None => {
            return Err(KroneckerError::Group(
                crate::groups::GroupError::InvalidIndex(factor),
            ))
        }
    }
    let sums: Vec<BigRational> = lambdas.iter().zip(shifts).map(|(l, s)| l + s).collect();
    for (j, lam) in lambdas.iter().enumerate() {
        if lam.is_zero() {
            return Err(KroneckerError::ZeroElement(j));
        }
        if sums[j].is_zero() {
            return Err(KroneckerError::ZeroElement(j));
        }
        if let Some(i) = lambdas[..j].iter().position(|o| o == lam) {
            return Err(KroneckerError::NotInjective(i, j));
        }
        if let Some(i) = sums[..j].iter().position(|o| o == &sums[j]) {
            return Err(KroneckerError::NotInjective(i, j));
        }
    }

    let mut g = LadderCharacter::pinned();
    let mut stages = Vec::with_capacity(lambdas.len());
    let mut max_denominator = BigUint::one();
    let mut shift_values = Vec::with_capacity(lambdas.len());
    for (n, (lam, shift)) in lambdas.iter().zip(shifts).enumerate() {
        max_denominator = max_denominator
            .max(denominator(lam))
            .max(denominator(shift));
        g = g.extended_to_cover(&denominator(shift));
        let shift_value = g.evaluate(shift)?;
        let desired = &targets[n] - &shift_value;
        let new_level = match mode {
            LadderMode::Lcm => g.top_level().lcm(&denominator(lam)),
            LadderMode::Factorial => {
                let b = (BigUint::from(2u32) * &max_denominator)
                    .to_u64()
                    .filter(|b| *b <= 3000)
                    .ok_or_else(|| {
                        KroneckerError::FactorialTooLarge(
                            (BigUint::from(2u32) * &max_denominator)
                                .to_u64()
                                .unwrap_or(u64::MAX),
                        )
                    })?;
                factorial(b)
            }
        };
        let (next, record) = steer(&g, new_level, lam, &desired, *q, n)?;
        g = next;
        shift_values.push(shift_value);
        stages.push(record);
    }

    let bound = epsilon_turns(*q);
    let element = |value: &BigRational| {
        GroupElement::singleton(group, factor, Coordinate::Rational(value.clone()))
    };
    let mut v_points = Vec::with_capacity(lambdas.len());
    let mut vprime_points = Vec::with_capacity(lambdas.len());
    for (n, lam) in lambdas.iter().enumerate() {
        v_points.push(CertPoint {
            element: element(lam)?,
            target: stages[n].desired.clone(),
            achieved: stages[n].achieved.clone(),
        });
        vprime_points.push(CertPoint {
            element: element(&sums[n])?,
            target: targets[n].clone(),
            achieved: g.evaluate(&sums[n])?,
        });
    }
    let witness = DualWitness::Ladder {
        index: factor,
        ladder: g.clone(),
    };
    let v_certificate = KroneckerCertificate {
        group: Arc::clone(group),
        witness: witness.clone(),
        points: v_points,
        bound_turns: bound.clone(),
        strict: true,
    };
    let vprime_certificate = KroneckerCertificate {
        group: Arc::clone(group),
        witness,
        points: vprime_points,
        bound_turns: bound,
        strict: true,
    };
    Ok(LadderInterpolation {
        character: g,
        v_certificate,
        vprime_certificate,
        stages,
    })
}
