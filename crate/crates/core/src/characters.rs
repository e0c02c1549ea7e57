//! Characters of the groups in `groups`, presented so that every value is an
//! exact angle.
//!
//! A [`LadderCharacter`] gives a character of the subgroup
//! ⋃_k (1/L_k)ℤ ⊆ ℚ through compatible values on a divisibility chain of
//! levels L_0 | L_1 | ...; extending the chain refines the character without
//! disturbing values already assigned, which is the mechanism all the
//! interpolation constructions rely on. [`LevelCharacter`] is the same chain
//! on p-power levels, read as a character of C(p^∞). [`ProductCharacter`]
//! assembles factor characters into a character of the ambient group (trivial
//! off its component map). [`SamplePoint`] is the dual object used by
//! finite-scale witnesses: a concrete point of the Bohr compactification with
//! rational frequency data, evaluable on any group element.

use crate::exact::{denominator, frac, UnitAngle};
use crate::groups::{Coordinate, GroupElement};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CharacterError {
    #[error("no ladder level covers denominator {denominator} (top level {top})")]
    LevelNotCovered { top: String, denominator: String },
    #[error("extension level {new} is not a multiple of the top level {top}")]
    NotDivisible { top: String, new: String },
    #[error("invalid ladder: {0}")]
    InvalidLadder(String),
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("component at index {index} cannot evaluate the coordinate: {reason}")]
    ComponentMismatch { index: u64, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rung {
    #[serde(with = "crate::json::biguint_string")]
    pub level: BigUint,
    pub value: UnitAngle,
}

/// Compatible character values on a divisibility chain of levels.
///
/// Invariants: the base level is 1, levels strictly increase and each divides
/// the next, and (L_{k+1}/L_k) · a_{k+1} ≡ a_k (mod 1). On x = s/t (reduced)
/// with t | L_k the character value is s · (L_k/t) · a_k mod 1; compatibility
/// makes the choice of covering rung irrelevant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LadderRepr")]
pub struct LadderCharacter {
    rungs: Vec<Rung>,
}

#[derive(Deserialize)]
struct LadderRepr {
    rungs: Vec<Rung>,
}

impl TryFrom<LadderRepr> for LadderCharacter {
    type Error = CharacterError;
    fn try_from(repr: LadderRepr) -> Result<Self, CharacterError> {
        LadderCharacter::from_rungs(repr.rungs)
    }
}

impl LadderCharacter {
    /// The trivial starting ladder: value 0 at level 1.
    pub fn pinned() -> Self {
        LadderCharacter {
            rungs: vec![Rung {
                level: BigUint::one(),
                value: UnitAngle::zero(),
            }],
        }
    }

    /// Base value a₀ at level 1; on integers this is the frequency n ↦ n·a₀.
    pub fn with_base(a0: UnitAngle) -> Self {
        LadderCharacter {
            rungs: vec![Rung {
                level: BigUint::one(),
                value: a0,
            }],
        }
    }

    pub fn from_rungs(rungs: Vec<Rung>) -> Result<Self, CharacterError> {
        if rungs.is_empty() {
            return Err(CharacterError::InvalidLadder("no rungs".into()));
        }
        if !rungs[0].level.is_one() {
            return Err(CharacterError::InvalidLadder(format!(
                "base level must be 1, got {}",
                rungs[0].level
            )));
        }
        for pair in rungs.windows(2) {
            let (lo, hi) = (&pair[0], &pair[1]);
            if hi.level <= lo.level || !(&hi.level % &lo.level).is_zero() {
                return Err(CharacterError::InvalidLadder(format!(
                    "levels must strictly increase along a divisibility chain: {} then {}",
                    lo.level, hi.level
                )));
            }
            let ratio = BigInt::from(&hi.level / &lo.level);
            if hi.value.scale(&ratio) != lo.value {
                return Err(CharacterError::InvalidLadder(format!(
                    "value {:?} at level {} is incompatible with value {:?} at level {}",
                    hi.value, hi.level, lo.value, lo.level
                )));
            }
        }
        Ok(LadderCharacter { rungs })
    }

    pub fn rungs(&self) -> &[Rung] {
        &self.rungs
    }

    pub fn top_level(&self) -> &BigUint {
        &self.rungs.last().expect("nonempty").level
    }

    pub fn top_value(&self) -> &UnitAngle {
        &self.rungs.last().expect("nonempty").value
    }

    /// Whether the chain covers denominator t (some level is a multiple).
    pub fn covers(&self, t: &BigUint) -> bool {
        (self.top_level() % t).is_zero()
    }

    /// Character value at x = s/t; errors when no level covers t.
    pub fn evaluate(&self, x: &BigRational) -> Result<UnitAngle, CharacterError> {
        let t = denominator(x);
        let rung = self
            .rungs
            .iter()
            .find(|r| (&r.level % &t).is_zero())
            .ok_or_else(|| CharacterError::LevelNotCovered {
                top: self.top_level().to_string(),
                denominator: t.to_string(),
            })?;
        let s = x.numer().clone();
        let multiplier = s * BigInt::from(&rung.level / &t);
        Ok(rung.value.scale(&multiplier))
    }

    /// Appends a rung at `level` = J · top with value (a_top + K)/J, K taken
    /// mod J. Every choice of K is compatible; distinct K give the J distinct
    /// refinements.
    pub fn extended(&self, level: BigUint, k: &BigUint) -> Result<Self, CharacterError> {
        let top = self.top_level();
        if (&level % top).is_zero() && level >= *top {
            let j = &level / top;
            if j.is_one() {
                return Ok(self.clone());
            }
            let k = k % &j;
            let j_rat = BigRational::from(BigInt::from(j));
            let turns =
                (self.top_value().turns() + BigRational::from(BigInt::from(k))) / j_rat;
            let mut rungs = self.rungs.clone();
            rungs.push(Rung {
                level,
                value: UnitAngle::from_turns(&turns),
            });
            Ok(LadderCharacter { rungs })
        } else {
            Err(CharacterError::NotDivisible {
                top: top.to_string(),
                new: level.to_string(),
            })
        }
    }

    /// Least extension covering denominator t, with K = 0 (the service
    /// extension: it adds no new steering, only domain).
    pub fn extended_to_cover(&self, t: &BigUint) -> Self {
        if self.covers(t) {
            return self.clone();
        }
        let level = self.top_level().lcm(t);
        self.extended(level, &BigUint::zero()).expect("lcm divides")
    }
}

/// A character of C(p^∞) presented as a ladder on p-power levels.
///
/// Base value 0 at level 1 makes the values well defined on circle classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LevelRepr")]
pub struct LevelCharacter {
    prime: u64,
    #[serde(flatten)]
    ladder: LadderCharacter,
}

#[derive(Deserialize)]
struct LevelRepr {
    prime: u64,
    rungs: Vec<Rung>,
}

impl TryFrom<LevelRepr> for LevelCharacter {
    type Error = CharacterError;
    fn try_from(repr: LevelRepr) -> Result<Self, CharacterError> {
        LevelCharacter::new(repr.prime, LadderCharacter::from_rungs(repr.rungs)?)
    }
}

impl LevelCharacter {
    pub fn new(prime: u64, ladder: LadderCharacter) -> Result<Self, CharacterError> {
        if !crate::groups::is_prime_u64(prime) {
            return Err(CharacterError::InvalidCharacter(format!(
                "{prime} is not prime"
            )));
        }
        if !ladder.rungs()[0].value.is_zero() {
            return Err(CharacterError::InvalidCharacter(
                "base value must be 0 on a torsion factor".into(),
            ));
        }
        let p = BigUint::from(prime);
        for rung in ladder.rungs() {
            let mut level = rung.level.clone();
            while (&level % &p).is_zero() {
                level /= &p;
            }
            if !level.is_one() {
                return Err(CharacterError::InvalidCharacter(format!(
                    "level {} is not a power of {prime}",
                    rung.level
                )));
            }
        }
        Ok(LevelCharacter { prime, ladder })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn ladder(&self) -> &LadderCharacter {
        &self.ladder
    }

    pub fn evaluate(&self, x: &UnitAngle) -> Result<UnitAngle, CharacterError> {
        self.ladder.evaluate(x.turns())
    }

    pub fn extended(&self, level: BigUint, k: &BigUint) -> Result<Self, CharacterError> {
        LevelCharacter::new(self.prime, self.ladder.extended(level, k)?)
    }

    pub fn extended_to_cover(&self, t: &BigUint) -> Self {
        LevelCharacter {
            prime: self.prime,
            ladder: self.ladder.extended_to_cover(t),
        }
    }
}

/// A character of a finite cyclic factor ℤ(n), determined by its value at
/// the generator 1/n. Well-definedness needs denominator(value) | n.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr")]
pub struct PointCharacter {
    pub modulus: u64,
    pub value: UnitAngle,
}

#[derive(Deserialize)]
struct PointRepr {
    modulus: u64,
    value: UnitAngle,
}

impl TryFrom<PointRepr> for PointCharacter {
    type Error = CharacterError;
    fn try_from(repr: PointRepr) -> Result<Self, CharacterError> {
        PointCharacter::new(repr.modulus, repr.value)
    }
}

impl PointCharacter {
    pub fn new(modulus: u64, value: UnitAngle) -> Result<Self, CharacterError> {
        if modulus < 2 {
            return Err(CharacterError::InvalidCharacter(format!(
                "modulus {modulus} < 2"
            )));
        }
        if !(BigUint::from(modulus) % denominator(value.turns())).is_zero() {
            return Err(CharacterError::InvalidCharacter(format!(
                "value {value:?} is not an order-{modulus} root"
            )));
        }
        Ok(PointCharacter { modulus, value })
    }

    pub fn evaluate(&self, x: &UnitAngle) -> Result<UnitAngle, CharacterError> {
        let scaled = x.turns() * BigRational::from(BigInt::from(self.modulus));
        if !scaled.is_integer() {
            return Err(CharacterError::InvalidCharacter(format!(
                "{x:?} is not an order-{} point",
                self.modulus
            )));
        }
        Ok(self.value.scale(&scaled.to_integer()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorCharacter {
    Ladder(LadderCharacter),
    Level(LevelCharacter),
    Point(PointCharacter),
}

impl FactorCharacter {
    fn evaluate(&self, index: u64, coord: &Coordinate) -> Result<UnitAngle, CharacterError> {
        let mismatch = |reason: &str| CharacterError::ComponentMismatch {
            index,
            reason: reason.into(),
        };
        match (self, coord) {
            (FactorCharacter::Ladder(l), Coordinate::Rational(r)) => l.evaluate(r),
            (FactorCharacter::Level(l), Coordinate::Angle(a)) => l.evaluate(a),
            (FactorCharacter::Point(p), Coordinate::Angle(a)) => p.evaluate(a),
            (FactorCharacter::Ladder(_), _) => {
                Err(mismatch("ladder component on a torsion coordinate"))
            }
            (_, Coordinate::Rational(_)) => {
                Err(mismatch("torsion component on a rational coordinate"))
            }
        }
    }
}

/// A character of the ambient group: factor characters on finitely many
/// indices, trivial elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ProductCharacter {
    components: BTreeMap<u64, FactorCharacter>,
}

impl ProductCharacter {
    pub fn trivial() -> Self {
        ProductCharacter::default()
    }

    pub fn new(
        components: impl IntoIterator<Item = (u64, FactorCharacter)>,
    ) -> Result<Self, CharacterError> {
        let mut map = BTreeMap::new();
        for (index, fc) in components {
            if map.insert(index, fc).is_some() {
                return Err(CharacterError::InvalidCharacter(format!(
                    "repeated component index {index}"
                )));
            }
        }
        Ok(ProductCharacter { components: map })
    }

    pub fn component(&self, index: u64) -> Option<&FactorCharacter> {
        self.components.get(&index)
    }

    pub fn components(&self) -> impl Iterator<Item = (&u64, &FactorCharacter)> {
        self.components.iter()
    }

    pub fn set_component(&mut self, index: u64, fc: FactorCharacter) {
        self.components.insert(index, fc);
    }

    pub fn evaluate(&self, x: &GroupElement) -> Result<UnitAngle, CharacterError> {
        let mut acc = UnitAngle::zero();
        for (index, coord) in x.support() {
            if let Some(fc) = self.components.get(index) {
                acc = &acc + &fc.evaluate(*index, coord)?;
            }
        }
        Ok(acc)
    }

    /// Like [`evaluate`](Self::evaluate), but grows ladder components with
    /// K = 0 service extensions whenever a denominator is not yet covered.
    /// Values on the previously covered domain are unchanged.
    pub fn evaluate_extending(&mut self, x: &GroupElement) -> Result<UnitAngle, CharacterError> {
        for (index, coord) in x.support() {
            let needed = match coord {
                Coordinate::Rational(r) => denominator(r),
                Coordinate::Angle(a) => denominator(a.turns()),
            };
            match self.components.get_mut(index) {
                Some(FactorCharacter::Ladder(l)) => {
                    if !l.covers(&needed) {
                        *l = l.extended_to_cover(&needed);
                    }
                }
                Some(FactorCharacter::Level(l)) => {
                    if !l.ladder().covers(&needed) {
                        *l = l.extended_to_cover(&needed);
                    }
                }
                _ => {}
            }
        }
        self.evaluate(x)
    }
}

#[derive(Serialize, Deserialize)]
struct ComponentEntry {
    index: u64,
    #[serde(flatten)]
    character: FactorCharacter,
}

impl Serialize for ProductCharacter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let entries: Vec<ComponentEntry> = self
            .components
            .iter()
            .map(|(i, fc)| ComponentEntry {
                index: *i,
                character: fc.clone(),
            })
            .collect();
        let mut st = s.serialize_struct("ProductCharacter", 1)?;
        st.serialize_field("components", &entries)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ProductCharacter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            components: Vec<ComponentEntry>,
        }
        let repr = Repr::deserialize(d)?;
        ProductCharacter::new(
            repr.components
                .into_iter()
                .map(|e| (e.index, e.character)),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// A point of the dual seen at finite precision: rational frequencies on ℚ
/// factors and integer multipliers on torsion factors, acting trivially off
/// a finite index set.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SamplePoint {
    components: BTreeMap<u64, PointComponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointComponent {
    /// x ↦ frac(f · x) on a rational coordinate.
    Frequency(#[serde(with = "crate::json::rational_string")] BigRational),
    /// x ↦ m · x; valid on any coordinate.
    Multiplier(#[serde(with = "crate::json::bigint_string")] BigInt),
}

impl SamplePoint {
    pub fn new(components: impl IntoIterator<Item = (u64, PointComponent)>) -> Self {
        SamplePoint {
            components: components.into_iter().collect(),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&u64, &PointComponent)> {
        self.components.iter()
    }

    pub fn is_trivial(&self) -> bool {
        self.components.is_empty()
    }

    pub fn evaluate(&self, x: &GroupElement) -> Result<UnitAngle, CharacterError> {
        let mut acc = UnitAngle::zero();
        for (index, coord) in x.support() {
            let Some(component) = self.components.get(index) else {
                continue;
            };
            let value = match (component, coord) {
                (PointComponent::Frequency(f), Coordinate::Rational(r)) => {
                    UnitAngle::from_turns(&frac(&(f * r)))
                }
                (PointComponent::Multiplier(m), Coordinate::Rational(r)) => {
                    UnitAngle::from_turns(&frac(&(r * BigRational::from(m.clone()))))
                }
                (PointComponent::Multiplier(m), Coordinate::Angle(a)) => a.scale(m),
                (PointComponent::Frequency(f), Coordinate::Angle(a)) => {
                    if f.is_integer() {
                        a.scale(&f.to_integer())
                    } else {
                        return Err(CharacterError::ComponentMismatch {
                            index: *index,
                            reason: "fractional frequency on a torsion coordinate".into(),
                        });
                    }
                }
            };
            acc = &acc + &value;
        }
        Ok(acc)
    }
}

#[derive(Serialize, Deserialize)]
struct SampleEntry {
    index: u64,
    #[serde(flatten)]
    component: PointComponent,
}

impl Serialize for SamplePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let entries: Vec<SampleEntry> = self
            .components
            .iter()
            .map(|(i, c)| SampleEntry {
                index: *i,
                component: c.clone(),
            })
            .collect();
        let mut st = s.serialize_struct("SamplePoint", 1)?;
        st.serialize_field("components", &entries)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for SamplePoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            components: Vec<SampleEntry>,
        }
        let repr = Repr::deserialize(d)?;
        Ok(SamplePoint::new(
            repr.components.into_iter().map(|e| (e.index, e.component)),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{AmbientGroup, FactorSignature};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn rung(level: u64, num: i64, den: i64) -> Rung {
        Rung {
            level: BigUint::from(level),
            value: UnitAngle::from_ratio(num, den),
        }
    }

    fn chain_1_2_6() -> LadderCharacter {
        LadderCharacter::from_rungs(vec![rung(1, 0, 1), rung(2, 1, 2), rung(6, 1, 6)]).unwrap()
    }

    #[test]
    fn ladder_evaluate_examples() {
        let g = chain_1_2_6();
        assert_eq!(g.evaluate(&rat(5, 6)).unwrap(), UnitAngle::from_ratio(5, 6));
        // Denominator 2 is covered twice; both rungs must agree.
        assert_eq!(g.evaluate(&rat(1, 2)).unwrap(), UnitAngle::from_ratio(1, 2));
        assert_eq!(g.evaluate(&rat(7, 2)).unwrap(), UnitAngle::from_ratio(1, 2));
        assert_eq!(g.evaluate(&rat(1, 3)).unwrap(), UnitAngle::from_ratio(1, 3));
        assert!(matches!(
            g.evaluate(&rat(1, 5)),
            Err(CharacterError::LevelNotCovered { .. })
        ));
    }

    #[test]
    fn ladder_rejects_incompatible_rungs() {
        assert!(LadderCharacter::from_rungs(vec![rung(1, 0, 1), rung(2, 1, 3)]).is_err());
        assert!(LadderCharacter::from_rungs(vec![rung(2, 1, 2)]).is_err());
        assert!(LadderCharacter::from_rungs(vec![rung(1, 0, 1), rung(3, 0, 1), rung(4, 0, 1)])
            .is_err());
    }

    #[test]
    fn extension_choices_enumerate_refinements() {
        let g = chain_1_2_6();
        let mut seen = Vec::new();
        for k in 0u32..3 {
            let ext = g.extended(BigUint::from(18u32), &BigUint::from(k)).unwrap();
            let v = ext.top_value().clone();
            // Compatibility with the level-6 value.
            assert_eq!(v.scale(&BigInt::from(3)), UnitAngle::from_ratio(1, 6));
            seen.push(v);
        }
        assert_eq!(seen[0], UnitAngle::from_ratio(1, 18));
        assert_eq!(seen[1], UnitAngle::from_ratio(7, 18));
        assert_eq!(seen[2], UnitAngle::from_ratio(13, 18));
        assert!(matches!(
            g.extended(BigUint::from(8u32), &BigUint::zero()),
            Err(CharacterError::NotDivisible { .. })
        ));
    }

    #[test]
    fn service_extension_is_frequency() {
        // With base a₀ the K = 0 tower acts as x ↦ x·a₀ wherever defined.
        let g = LadderCharacter::with_base(UnitAngle::from_ratio(1, 3));
        let g = g.extended_to_cover(&BigUint::from(2u32));
        assert_eq!(g.evaluate(&rat(1, 2)).unwrap(), UnitAngle::from_ratio(1, 6));
        let g = g.extended_to_cover(&BigUint::from(6u32));
        assert_eq!(
            g.evaluate(&rat(1, 6)).unwrap(),
            UnitAngle::from_ratio(1, 18)
        );
        assert_eq!(g.evaluate(&rat(5, 1)).unwrap(), UnitAngle::from_ratio(2, 3));
    }

    #[test]
    fn level_character_validation_and_evaluation() {
        let ladder =
            LadderCharacter::from_rungs(vec![rung(1, 0, 1), rung(4, 1, 4)]).unwrap();
        let chi = LevelCharacter::new(2, ladder.clone()).unwrap();
        assert_eq!(
            chi.evaluate(&UnitAngle::from_ratio(1, 2)).unwrap(),
            UnitAngle::from_ratio(1, 2)
        );
        assert!(chi.evaluate(&UnitAngle::from_ratio(1, 8)).is_err());
        assert!(LevelCharacter::new(6, ladder.clone()).is_err());
        assert!(LevelCharacter::new(3, ladder).is_err());
        let unpinned = LadderCharacter::with_base(UnitAngle::from_ratio(1, 3));
        assert!(LevelCharacter::new(2, unpinned).is_err());
    }

    #[test]
    fn product_evaluation_sums_components() {
        let group = AmbientGroup::explicit(vec![
            FactorSignature::Cyclic { n: 3 },
            FactorSignature::Cyclic { n: 2 },
        ])
        .unwrap();
        let chi = ProductCharacter::new([
            (
                0,
                FactorCharacter::Point(
                    PointCharacter::new(3, UnitAngle::from_ratio(1, 3)).unwrap(),
                ),
            ),
            (
                1,
                FactorCharacter::Point(
                    PointCharacter::new(2, UnitAngle::from_ratio(1, 2)).unwrap(),
                ),
            ),
        ])
        .unwrap();
        let x = GroupElement::new(
            &group,
            [
                (0, Coordinate::Angle(UnitAngle::from_ratio(1, 3))),
                (1, Coordinate::Angle(UnitAngle::from_ratio(1, 2))),
            ],
        )
        .unwrap();
        assert_eq!(chi.evaluate(&x).unwrap(), UnitAngle::from_ratio(5, 6));
        // Off-map indices contribute nothing.
        let y = GroupElement::singleton(&group, 1, Coordinate::Angle(UnitAngle::from_ratio(1, 2)))
            .unwrap();
        let partial = ProductCharacter::new([(
            0,
            FactorCharacter::Point(PointCharacter::new(3, UnitAngle::from_ratio(2, 3)).unwrap()),
        )])
        .unwrap();
        assert!(partial.evaluate(&y).unwrap().is_zero());
    }

    #[test]
    fn evaluate_extending_preserves_old_values() {
        let group = AmbientGroup::integers();
        let mut chi = ProductCharacter::new([(
            0,
            FactorCharacter::Ladder(LadderCharacter::with_base(UnitAngle::from_ratio(1, 4))),
        )])
        .unwrap();
        let one = GroupElement::singleton(&group, 0, Coordinate::Rational(rat(1, 1))).unwrap();
        let half = GroupElement::singleton(&group, 0, Coordinate::Rational(rat(1, 2))).unwrap();
        let before = chi.evaluate(&one).unwrap();
        assert!(chi.evaluate(&half).is_err());
        let at_half = chi.evaluate_extending(&half).unwrap();
        assert_eq!(at_half, UnitAngle::from_ratio(1, 8));
        assert_eq!(chi.evaluate(&one).unwrap(), before);
    }

    #[test]
    fn sample_point_evaluation() {
        let group = AmbientGroup::explicit(vec![
            FactorSignature::Rationals,
            FactorSignature::Cyclic { n: 4 },
        ])
        .unwrap();
        let x = GroupElement::new(
            &group,
            [
                (0, Coordinate::Rational(rat(3, 2))),
                (1, Coordinate::Angle(UnitAngle::from_ratio(1, 4))),
            ],
        )
        .unwrap();
        let point = SamplePoint::new([
            (0, PointComponent::Frequency(rat(1, 3))),
            (1, PointComponent::Multiplier(BigInt::from(3))),
        ]);
        // frac(3/2 · 1/3) + 3·(1/4) = 1/2 + 3/4 = 5/4 ≡ 1/4.
        assert_eq!(point.evaluate(&x).unwrap(), UnitAngle::from_ratio(1, 4));
        let bad = SamplePoint::new([(1, PointComponent::Frequency(rat(1, 3)))]);
        assert!(bad.evaluate(&x).is_err());
    }

    #[test]
    fn character_serde_round_trip() {
        let chi = ProductCharacter::new([
            (0, FactorCharacter::Ladder(chain_1_2_6())),
            (
                2,
                FactorCharacter::Point(
                    PointCharacter::new(4, UnitAngle::from_ratio(3, 4)).unwrap(),
                ),
            ),
        ])
        .unwrap();
        let text = crate::json::to_canonical_string(&chi).unwrap();
        let back: ProductCharacter = serde_json::from_str(&text).unwrap();
        assert_eq!(chi, back);
        // Tampered rung values must fail validation on parse.
        let bad = text.replace("\"1/6\"", "\"1/5\"");
        assert!(serde_json::from_str::<ProductCharacter>(&bad).is_err());
    }

    #[test]
    fn sample_point_serde_round_trip() {
        let point = SamplePoint::new([
            (0, PointComponent::Frequency(rat(2, 7))),
            (5, PointComponent::Multiplier(BigInt::from(-3))),
        ]);
        let text = crate::json::to_canonical_string(&point).unwrap();
        let back: SamplePoint = serde_json::from_str(&text).unwrap();
        assert_eq!(point, back);
    }
}
