//! Interpolation point-by-point across distinct factors of a product group.
//!
//! Stage n owns a fresh factor index β_n. The point splits as
//! γ_n = x_n·e_{β_n} + ρ_n with the residual ρ_n supported away from all
//! later stages' factors, so its character value r_n is already pinned when
//! stage n runs. The component installed at β_n steers x_n to the value
//! nearest t_n − r_n: exactly on a rational factor (infinite order), to the
//! nearest M-th root on a torsion coordinate of order M ≥ q. Ties between
//! two equally close roots resolve to the smaller angle.

use super::certificate::{CertPoint, DualWitness, KroneckerCertificate};
use super::{epsilon_turns, modinv, nearest_index, KroneckerError};
use crate::characters::{
    FactorCharacter, LadderCharacter, LevelCharacter, PointCharacter, ProductCharacter, Rung,
};
use crate::exact::{denominator, frac, UnitAngle};
use crate::groups::{Coordinate, FactorSignature, GroupElement, GroupError, Order};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct ProductPoint {
    pub element: GroupElement,
    /// The factor this stage steers; must not repeat across stages.
    pub index: u64,
}

#[derive(Clone, Debug)]
pub struct ProductRequest {
    pub points: Vec<ProductPoint>,
    pub targets: Vec<UnitAngle>,
    pub q: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductStage {
    pub stage: usize,
    pub index: u64,
    pub order: Order,
    pub residual_value: UnitAngle,
    pub desired: UnitAngle,
    pub assigned: UnitAngle,
    pub achieved: UnitAngle,
    #[serde(with = "crate::json::rational_string")]
    pub error_turns: BigRational,
}

#[derive(Clone, Debug)]
pub struct ProductInterpolation {
    pub character: ProductCharacter,
    pub certificate: KroneckerCertificate,
    pub stages: Vec<ProductStage>,
}

/// Ladder hitting d exactly at the rational a/t (unpinned base).
fn exact_rational_component(value: &BigRational, d: &UnitAngle) -> LadderCharacter {
    let t = denominator(value);
    let a = value.numer().clone();
    let v = frac(&(d.turns() / BigRational::from(a)));
    if t.is_one() {
        return LadderCharacter::with_base(UnitAngle::from_turns(&v));
    }
    let base = frac(&(&v * BigRational::from(BigInt::from(t.clone()))));
    LadderCharacter::from_rungs(vec![
        Rung {
            level: BigUint::one(),
            value: UnitAngle::from_turns(&base),
        },
        Rung {
            level: t,
            value: UnitAngle::from_turns(&v),
        },
    ])
    .expect("consistent by construction")
}

pub fn product_interpolate(request: &ProductRequest) -> Result<ProductInterpolation, KroneckerError> {
    let ProductRequest { points, targets, q } = request;
    if points.is_empty() {
        return Err(KroneckerError::Empty);
    }
    if points.len() != targets.len() {
        return Err(KroneckerError::LengthMismatch {
            points: points.len(),
            targets: targets.len(),
        });
    }
    if *q < 2 {
        return Err(KroneckerError::InsufficientQ(*q));
    }
    let group = Arc::clone(points[0].element.group());
    let mut seen_indices = BTreeSet::new();
    for (n, p) in points.iter().enumerate() {
        if p.element.group() != &group {
            return Err(KroneckerError::Group(GroupError::AmbientMismatch));
        }
        if p.element.is_zero() {
            return Err(KroneckerError::ZeroElement(n));
        }
        if let Some(i) = points[..n].iter().position(|o| o.element == p.element) {
            return Err(KroneckerError::NotInjective(i, n));
        }
        if group.signature(p.index).is_none() {
            return Err(KroneckerError::Group(GroupError::InvalidIndex(p.index)));
        }
        if !seen_indices.insert(p.index) {
            return Err(KroneckerError::IndexCollision(p.index));
        }
    }
    // Residuals may only touch factors fixed at or before their own stage.
    for (n, p) in points.iter().enumerate() {
        for later in &points[n + 1..] {
            if p.element
                .support_indices()
                .any(|i| i == later.index && i != p.index)
            {
                return Err(KroneckerError::ResidualNotEvaluable {
                    stage: n,
                    index: later.index,
                });
            }
        }
    }

    let mut chi = ProductCharacter::trivial();
    let mut stages = Vec::with_capacity(points.len());
    let q_big = BigUint::from(*q);
    for (n, (p, target)) in points.iter().zip(targets).enumerate() {
        let beta = p.index;
        let x = p.element.project(beta);
        if x.is_zero() {
            return Err(KroneckerError::OrderTooSmall {
                stage: n,
                order: "1".into(),
                q: *q,
            });
        }
        let rho = p
            .element
            .sub(&GroupElement::singleton(&group, beta, x.clone())?)?;
        let residual_value = chi.evaluate_extending(&rho)?;
        let desired = target - &residual_value;
        let order = x.order();
        let (component, assigned, error_turns) = match (&x, group.signature(beta).unwrap()) {
            (Coordinate::Rational(r), FactorSignature::Rationals) => {
                let ladder = exact_rational_component(r, &desired);
                debug_assert_eq!(ladder.evaluate(r).unwrap(), desired);
                (
                    FactorCharacter::Ladder(ladder),
                    desired.clone(),
                    BigRational::zero(),
                )
            }
            (Coordinate::Angle(a), sig) => {
                let m = denominator(a.turns());
                if m < q_big {
                    return Err(KroneckerError::OrderTooSmall {
                        stage: n,
                        order: m.to_string(),
                        q: *q,
                    });
                }
                let c = a.turns().numer().to_biguint().expect("angle in [0,1)");
                let (root, err) = nearest_index(&desired, &m);
                let inv = modinv(&c, &m).expect("reduced numerator is a unit");
                let w = (&root * &inv) % &m;
                let assigned = UnitAngle::from_turns(&BigRational::new(
                    BigInt::from(root),
                    BigInt::from(m.clone()),
                ));
                let fc = match sig {
                    FactorSignature::Pruefer { p: prime } => {
                        let ladder = LadderCharacter::from_rungs(vec![
                            Rung {
                                level: BigUint::one(),
                                value: UnitAngle::zero(),
                            },
                            Rung {
                                level: m.clone(),
                                value: UnitAngle::from_turns(&BigRational::new(
                                    BigInt::from(w),
                                    BigInt::from(m.clone()),
                                )),
                            },
                        ])
                        .expect("K-th root rung is consistent");
                        FactorCharacter::Level(LevelCharacter::new(*prime, ladder)?)
                    }
                    FactorSignature::Cyclic { n: modulus } => {
                        let value = UnitAngle::from_turns(&BigRational::new(
                            BigInt::from(w),
                            BigInt::from(*modulus),
                        ));
                        FactorCharacter::Point(PointCharacter::new(*modulus, value)?)
                    }
                    FactorSignature::Rationals => unreachable!("angle on a rational factor"),
                };
                (fc, assigned, err)
            }
            (Coordinate::Rational(_), _) => unreachable!("rational on a torsion factor"),
        };
        chi.set_component(beta, component);
        let achieved = &assigned + &residual_value;
        stages.push(ProductStage {
            stage: n,
            index: beta,
            order,
            residual_value,
            desired,
            assigned,
            achieved,
            error_turns,
        });
    }

    let mut cert_points = Vec::with_capacity(points.len());
    for ((p, stage), target) in points.iter().zip(&stages).zip(targets) {
        let achieved = chi.evaluate(&p.element)?;
        debug_assert_eq!(achieved, stage.achieved, "stage bookkeeping drifted");
        cert_points.push(CertPoint {
            element: p.element.clone(),
            target: target.clone(),
            achieved,
        });
    }
    let certificate = KroneckerCertificate {
        group,
        witness: DualWitness::Product(chi.clone()),
        points: cert_points,
        bound_turns: epsilon_turns(*q),
        strict: false,
    };
    Ok(ProductInterpolation {
        character: chi,
        certificate,
        stages,
    })
}
