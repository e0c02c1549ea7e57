//! Interpolation certificates: a dual witness plus the exact values it takes
//! at each point, verifiable without trusting the engine that produced them.

use crate::characters::{CharacterError, LadderCharacter, LevelCharacter, ProductCharacter};
use crate::exact::{circular_distance, frac, UnitAngle};
use crate::groups::{AmbientGroup, Coordinate, GroupElement};
use crate::json::ElementRepr;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("no interpolation points")]
    Empty,
    #[error("negative bound {0}")]
    NegativeBound(String),
    #[error("points {0} and {1} coincide")]
    RepeatedPoint(usize, usize),
    #[error("point {index}: witness evaluates to {actual:?} but the certificate records {claimed:?}")]
    AchievedMismatch {
        index: usize,
        actual: UnitAngle,
        claimed: UnitAngle,
    },
    #[error("point {index}: distance {distance} to the target exceeds the bound {bound}")]
    BoundExceeded {
        index: usize,
        distance: String,
        bound: String,
    },
    #[error("point {index}: {source}")]
    Evaluation {
        index: usize,
        source: CharacterError,
    },
}

/// The interpolating character, in whichever concrete form the engine built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualWitness {
    /// x ↦ e^{2πi·f·x} on one rational factor, trivial elsewhere.
    Frequency {
        index: u64,
        #[serde(with = "crate::json::rational_string")]
        value: BigRational,
    },
    /// A ladder character on one rational factor, trivial elsewhere.
    Ladder {
        index: u64,
        #[serde(flatten)]
        ladder: LadderCharacter,
    },
    /// A character of one Prüfer factor, trivial elsewhere.
    Level {
        index: u64,
        #[serde(flatten)]
        level: LevelCharacter,
    },
    /// A full product character.
    Product(ProductCharacter),
}

impl DualWitness {
    pub fn evaluate(&self, x: &GroupElement) -> Result<UnitAngle, CharacterError> {
        match self {
            DualWitness::Product(chi) => chi.evaluate(x),
            DualWitness::Frequency { index, value } => {
                single_factor(x, *index, |coord| match coord {
                    Coordinate::Rational(r) => Ok(UnitAngle::from_turns(&frac(&(r * value)))),
                    Coordinate::Angle(_) => Err(CharacterError::ComponentMismatch {
                        index: *index,
                        reason: "frequency witness on a torsion coordinate".into(),
                    }),
                })
            }
            DualWitness::Ladder { index, ladder } => {
                single_factor(x, *index, |coord| match coord {
                    Coordinate::Rational(r) => ladder.evaluate(r),
                    Coordinate::Angle(_) => Err(CharacterError::ComponentMismatch {
                        index: *index,
                        reason: "ladder witness on a torsion coordinate".into(),
                    }),
                })
            }
            DualWitness::Level { index, level } => {
                single_factor(x, *index, |coord| match coord {
                    Coordinate::Angle(a) => level.evaluate(a),
                    Coordinate::Rational(_) => Err(CharacterError::ComponentMismatch {
                        index: *index,
                        reason: "torsion witness on a rational coordinate".into(),
                    }),
                })
            }
        }
    }
}

fn single_factor(
    x: &GroupElement,
    index: u64,
    eval: impl Fn(&Coordinate) -> Result<UnitAngle, CharacterError>,
) -> Result<UnitAngle, CharacterError> {
    let mut acc = UnitAngle::zero();
    for (i, coord) in x.support() {
        if *i == index {
            acc = &acc + &eval(coord)?;
        }
    }
    Ok(acc)
}

/// Claim stored per interpolation point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertPoint {
    pub element: GroupElement,
    pub target: UnitAngle,
    pub achieved: UnitAngle,
}

/// Claim: for every point, `witness(element) = achieved` and the circular
/// distance from `achieved` to `target` respects the bound (strictly when
/// `strict`). Bounds are arcs in turns; the corresponding chord bound is
/// 2 sin(π · bound).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KroneckerCertificate {
    pub group: Arc<AmbientGroup>,
    pub witness: DualWitness,
    pub points: Vec<CertPoint>,
    pub bound_turns: BigRational,
    pub strict: bool,
}

impl KroneckerCertificate {
    /// Full recheck: distinct points, evaluations match, bounds hold.
    pub fn verify(&self) -> Result<(), CertificateError> {
        if self.points.is_empty() {
            return Err(CertificateError::Empty);
        }
        if self.bound_turns.is_negative() {
            return Err(CertificateError::NegativeBound(self.bound_turns.to_string()));
        }
        for (j, p) in self.points.iter().enumerate() {
            if let Some(i) = self.points[..j].iter().position(|o| o.element == p.element) {
                return Err(CertificateError::RepeatedPoint(i, j));
            }
        }
        for (index, point) in self.points.iter().enumerate() {
            let actual = self
                .witness
                .evaluate(&point.element)
                .map_err(|source| CertificateError::Evaluation { index, source })?;
            if actual != point.achieved {
                return Err(CertificateError::AchievedMismatch {
                    index,
                    actual,
                    claimed: point.achieved.clone(),
                });
            }
            let distance = circular_distance(&point.achieved, &point.target);
            let ok = if self.strict {
                distance < self.bound_turns
            } else {
                distance <= self.bound_turns
            };
            if !ok {
                return Err(CertificateError::BoundExceeded {
                    index,
                    distance: distance.to_string(),
                    bound: self.bound_turns.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Largest pointwise error, in turns.
    pub fn max_error_turns(&self) -> BigRational {
        self.points
            .iter()
            .map(|p| circular_distance(&p.achieved, &p.target))
            .max()
            .expect("nonempty certificate")
    }
}

#[derive(Serialize, Deserialize)]
struct CertPointRepr {
    element: ElementRepr,
    target: UnitAngle,
    achieved: UnitAngle,
}

#[derive(Serialize, Deserialize)]
struct CertRepr {
    group: AmbientGroup,
    witness: DualWitness,
    points: Vec<CertPointRepr>,
    #[serde(with = "crate::json::rational_string")]
    bound_turns: BigRational,
    strict: bool,
}

impl Serialize for KroneckerCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = CertRepr {
            group: (*self.group).clone(),
            witness: self.witness.clone(),
            points: self
                .points
                .iter()
                .map(|p| CertPointRepr {
                    element: ElementRepr::of(&p.element),
                    target: p.target.clone(),
                    achieved: p.achieved.clone(),
                })
                .collect(),
            bound_turns: self.bound_turns.clone(),
            strict: self.strict,
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for KroneckerCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = CertRepr::deserialize(d)?;
        repr.group.validate().map_err(serde::de::Error::custom)?;
        let group = Arc::new(repr.group);
        let points = repr
            .points
            .into_iter()
            .map(|p| {
                Ok(CertPoint {
                    element: p.element.attach(&group).map_err(serde::de::Error::custom)?,
                    target: p.target,
                    achieved: p.achieved,
                })
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        Ok(KroneckerCertificate {
            group,
            witness: repr.witness,
            points,
            bound_turns: repr.bound_turns,
            strict: repr.strict,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sample_certificate() -> KroneckerCertificate {
        let group = AmbientGroup::integers();
        let points = [3i64, 9, 27]
            .iter()
            .map(|n| CertPoint {
                element: GroupElement::singleton(&group, 0, Coordinate::Rational(rat(*n, 1)))
                    .unwrap(),
                target: UnitAngle::zero(),
                achieved: UnitAngle::zero(),
            })
            .collect();
        KroneckerCertificate {
            group,
            witness: DualWitness::Frequency {
                index: 0,
                value: rat(0, 1),
            },
            points,
            bound_turns: rat(1, 4),
            strict: false,
        }
    }

    #[test]
    fn valid_certificate_verifies() {
        sample_certificate().verify().unwrap();
    }

    #[test]
    fn tampered_achieved_is_caught() {
        let mut cert = sample_certificate();
        cert.points[1].achieved = UnitAngle::from_ratio(1, 3);
        assert!(matches!(
            cert.verify(),
            Err(CertificateError::AchievedMismatch { index: 1, .. })
        ));
    }

    #[test]
    fn bound_violation_is_caught() {
        let mut cert = sample_certificate();
        cert.points[2].target = UnitAngle::from_ratio(1, 2);
        assert!(matches!(
            cert.verify(),
            Err(CertificateError::BoundExceeded { index: 2, .. })
        ));
    }

    #[test]
    fn strictness_matters_on_the_boundary() {
        let mut cert = sample_certificate();
        cert.points[0].target = UnitAngle::from_ratio(1, 4);
        cert.verify().unwrap();
        cert.strict = true;
        assert!(matches!(
            cert.verify(),
            Err(CertificateError::BoundExceeded { index: 0, .. })
        ));
    }

    #[test]
    fn repeated_points_rejected() {
        let mut cert = sample_certificate();
        let clone = cert.points[0].clone();
        cert.points.push(clone);
        assert!(matches!(
            cert.verify(),
            Err(CertificateError::RepeatedPoint(0, 3))
        ));
    }

    #[test]
    fn serde_round_trip_preserves_verification() {
        let cert = sample_certificate();
        let text = crate::json::to_canonical_string(&cert).unwrap();
        let back: KroneckerCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
        back.verify().unwrap();
        let again = crate::json::to_canonical_string(&back).unwrap();
        assert_eq!(text, again);
    }
}
