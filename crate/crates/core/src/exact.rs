//! Exact circle arithmetic.
//!
//! Angles are rational numbers of *turns* in `[0, 1)` (one turn = 2π
//! radians). Circular distance is then a rational in `[0, 1/2]`, and because
//! the chord length `|e^{2πia} - e^{2πib}| = 2 sin(π d)` is strictly
//! increasing in the distance `d`, every chord comparison used by the
//! certificate checkers reduces to an exact rational comparison in the turn
//! domain. Floating point appears only in advisory report fields.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Reduced positive denominator of a rational.
pub fn denominator(x: &BigRational) -> BigUint {
    x.denom()
        .to_biguint()
        .expect("BigRational keeps a positive denominator")
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num
        .trim()
        .parse()
        .map_err(|e| format!("bad numerator {s:?}: {e}"))?;
    let den: BigInt = den
        .trim()
        .parse()
        .map_err(|e| format!("bad denominator {s:?}: {e}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A point of the circle group ℝ/ℤ with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct UnitAngle {
    turns: BigRational,
}

impl UnitAngle {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Reduces an arbitrary rational to its representative in `[0, 1)`.
    pub fn from_turns(turns: &BigRational) -> Self {
        UnitAngle { turns: frac(turns) }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_turns(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn turns(&self) -> &BigRational {
        &self.turns
    }

    pub fn is_zero(&self) -> bool {
        self.turns.is_zero()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_turns(&(&self.turns * BigRational::from(k.clone())))
    }

    /// Circular distance in turns, a rational in `[0, 1/2]`.
    pub fn circular_distance(&self, other: &UnitAngle) -> BigRational {
        let diff = (&self.turns - &other.turns).abs();
        let wrap = BigRational::one() - &diff;
        if diff <= wrap {
            diff
        } else {
            wrap
        }
    }

    /// Chord length `|e^{2πia} - e^{2πib}|` as an advisory float.
    pub fn chord_to(&self, other: &UnitAngle) -> f64 {
        chord_approx(&self.circular_distance(other))
    }
}

impl fmt::Debug for UnitAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}t", format_rational(&self.turns))
    }
}

impl Serialize for UnitAngle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.turns))
    }
}

impl<'de> Deserialize<'de> for UnitAngle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let r = parse_rational(&s).map_err(D::Error::custom)?;
        if r.is_negative() || r >= BigRational::one() {
            return Err(D::Error::custom(format!("angle {s:?} outside [0, 1)")));
        }
        Ok(UnitAngle { turns: r })
    }
}

impl Add for &UnitAngle {
    type Output = UnitAngle;
    fn add(self, rhs: &UnitAngle) -> UnitAngle {
        UnitAngle::from_turns(&(&self.turns + &rhs.turns))
    }
}

impl Sub for &UnitAngle {
    type Output = UnitAngle;
    fn sub(self, rhs: &UnitAngle) -> UnitAngle {
        UnitAngle::from_turns(&(&self.turns - &rhs.turns))
    }
}

impl Neg for &UnitAngle {
    type Output = UnitAngle;
    fn neg(self) -> UnitAngle {
        UnitAngle::from_turns(&(-&self.turns))
    }
}

impl Mul<&BigInt> for &UnitAngle {
    type Output = UnitAngle;
    fn mul(self, k: &BigInt) -> UnitAngle {
        self.scale(k)
    }
}

/// Circular distance between two angles, in turns.
pub fn circular_distance(a: &UnitAngle, b: &UnitAngle) -> BigRational {
    a.circular_distance(b)
}

/// Decides whether the chord between `a` and `b` is within the chord of
/// `bound_turns`. Because the chord is strictly increasing in circular
/// distance this is an exact rational comparison in the turn domain.
pub fn chord_within(a: &UnitAngle, b: &UnitAngle, bound_turns: &BigRational, strict: bool) -> bool {
    let d = a.circular_distance(b);
    if strict {
        d < *bound_turns
    } else {
        d <= *bound_turns
    }
}

/// Advisory chord length `2 sin(π d)` for a distance in turns.
pub fn chord_approx(d_turns: &BigRational) -> f64 {
    2.0 * (std::f64::consts::PI * rational_to_f64(d_turns)).sin()
}

/// `2 sin(π d)` is rational only for `d ∈ {0, 1/6, 1/4, 1/3, 1/2}` (then the
/// squared chord is `0, 1, 2, 3, 4`); everywhere else it is irrational.
fn chord_squared_special(d: &BigRational) -> Option<u8> {
    let table: [(i64, i64, u8); 5] = [(0, 1, 0), (1, 6, 1), (1, 4, 2), (1, 3, 3), (1, 2, 4)];
    for (num, den, sq) in table {
        if *d == BigRational::new(BigInt::from(num), BigInt::from(den)) {
            return Some(sq);
        }
    }
    None
}

fn arctan_recip_bounds(x: u64, precision_bits: u64) -> (BigRational, BigRational) {
    let x = BigInt::from(x);
    let xx = &x * &x;
    let eps = BigRational::new(BigInt::one(), BigInt::one() << precision_bits);
    let mut acc = BigRational::zero();
    let mut power = x; // x^{2k+1}
    let mut k: u64 = 0;
    loop {
        let term = BigRational::new(BigInt::one(), BigInt::from(2 * k + 1) * &power);
        if k % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
        power *= &xx;
        if term < eps {
            let next = BigRational::new(BigInt::one(), BigInt::from(2 * k + 3) * &power);
            // Alternating with decreasing terms: the limit sits between the
            // last two partial sums.
            return if k % 2 == 0 {
                (acc.clone() - next, acc)
            } else {
                (acc.clone(), acc + next)
            };
        }
        k += 1;
    }
}

/// Certified rational enclosure of π (Machin: π = 16 atan(1/5) − 4 atan(1/239)).
fn pi_bounds(precision_bits: u64) -> (BigRational, BigRational) {
    let (a5_lo, a5_hi) = arctan_recip_bounds(5, precision_bits + 6);
    let (a239_lo, a239_hi) = arctan_recip_bounds(239, precision_bits + 6);
    let sixteen = BigRational::from(BigInt::from(16));
    let four = BigRational::from(BigInt::from(4));
    (
        &sixteen * &a5_lo - &four * &a239_hi,
        &sixteen * &a5_hi - &four * &a239_lo,
    )
}

/// Certified enclosure of cos θ for rational θ ∈ [0, 4] via the alternating
/// Taylor series (terms decrease from k = 2 on in this range).
fn cos_bounds(theta: &BigRational, precision_bits: u64) -> (BigRational, BigRational) {
    debug_assert!(!theta.is_negative() && *theta <= BigRational::from(BigInt::from(4)));
    let tt = theta * theta;
    let eps = BigRational::new(BigInt::one(), BigInt::one() << precision_bits);
    let mut acc = BigRational::one();
    let mut term = BigRational::one(); // θ^{2k} / (2k)!
    let mut k: u64 = 0;
    loop {
        k += 1;
        term = term * &tt / BigRational::from(BigInt::from((2 * k - 1) * (2 * k)));
        if k % 2 == 1 {
            acc -= &term;
        } else {
            acc += &term;
        }
        if k >= 2 && term < eps {
            return (acc.clone() - &term, acc + &term);
        }
    }
}

/// Compares the chord `2 sin(π d)` (for a circular distance `d` in turns,
/// `0 ≤ d ≤ 1/2`) against a rational `c`, exactly.
///
/// Strategy: rational chords occur only at the five special distances, which
/// are compared directly on the squared chord; elsewhere the chord is
/// irrational, so a certified rational enclosure of
/// `chord² = 2 − 2 cos(2π d)` eventually separates from `c²`. A rational
/// sandwich (`4d < chord < 2πd` strictly inside the range) short-circuits
/// all but razor-thin comparisons.
pub fn chord_cmp(d_turns: &BigRational, c: &BigRational) -> Ordering {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    assert!(
        !d_turns.is_negative() && *d_turns <= half,
        "distance out of range: {d_turns}"
    );
    if c.is_negative() {
        return Ordering::Greater;
    }
    let c_sq = c * c;
    if let Some(sq) = chord_squared_special(d_turns) {
        return BigRational::from(BigInt::from(sq)).cmp(&c_sq);
    }
    // Now 0 < d < 1/2 and the chord is irrational, hence never equal to c.
    if c.is_zero() {
        return Ordering::Greater;
    }
    if *c >= BigRational::from(BigInt::from(2)) {
        return Ordering::Less;
    }
    let four_d = BigRational::from(BigInt::from(4)) * d_turns;
    if four_d >= *c {
        return Ordering::Greater; // chord > 4d ≥ c strictly inside (0, 1/2)
    }
    let pi_hi_crude = BigRational::new(BigInt::from(355), BigInt::from(113));
    if BigRational::from(BigInt::from(2)) * &pi_hi_crude * d_turns <= *c {
        return Ordering::Less; // chord < 2πd < 2·(355/113)·d ≤ c
    }
    let two = BigRational::from(BigInt::from(2));
    let mut precision = 64u64;
    loop {
        let (pi_lo, pi_hi) = pi_bounds(precision);
        let theta_lo = &two * &pi_lo * d_turns;
        let theta_hi = &two * &pi_hi * d_turns;
        // θ* = 2πd lies in (0, π); cos is decreasing there.
        let cos_hi = cos_bounds(&theta_lo, precision).1;
        let cos_lo = if theta_hi <= pi_lo {
            cos_bounds(&theta_hi, precision).0
        } else {
            -BigRational::one()
        };
        let chord_sq_lo = &two - &two * &cos_hi;
        let chord_sq_hi = &two - &two * &cos_lo;
        if chord_sq_lo > c_sq {
            return Ordering::Greater;
        }
        if chord_sq_hi < c_sq {
            return Ordering::Less;
        }
        precision *= 2;
        assert!(precision <= 1 << 20, "chord comparison failed to separate");
    }
}

/// `chord(d) < c`, decided exactly.
pub fn chord_lt(d_turns: &BigRational, c: &BigRational) -> bool {
    chord_cmp(d_turns, c) == Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn denominator_reduces_first() {
        assert_eq!(denominator(&rat(6, 4)), BigUint::from(2u32));
        assert_eq!(denominator(&rat(0, 5)), BigUint::from(1u32));
        assert_eq!(denominator(&rat(-7, 2)), BigUint::from(2u32));
    }

    #[test]
    fn angle_normalization() {
        assert_eq!(UnitAngle::from_ratio(7, 2), UnitAngle::from_ratio(1, 2));
        assert_eq!(UnitAngle::from_ratio(-1, 4), UnitAngle::from_ratio(3, 4));
        assert!(UnitAngle::from_ratio(0, 1).is_zero());
    }

    #[test]
    fn circular_distance_examples() {
        let d = circular_distance(&UnitAngle::zero(), &UnitAngle::from_ratio(1, 2));
        assert_eq!(d, rat(1, 2));
        let d = circular_distance(&UnitAngle::from_ratio(1, 8), &UnitAngle::from_ratio(7, 8));
        assert_eq!(d, rat(1, 4));
        let d = circular_distance(&UnitAngle::from_ratio(1, 12), &UnitAngle::from_ratio(11, 12));
        assert_eq!(d, rat(1, 6));
        assert!(d < rat(1, 5));
    }

    #[test]
    fn chord_within_boundary() {
        let a = UnitAngle::zero();
        let b = UnitAngle::from_ratio(1, 4);
        assert!(!chord_within(&a, &b, &rat(1, 4), true));
        assert!(chord_within(&a, &b, &rat(1, 4), false));
    }

    #[test]
    fn chord_special_values() {
        assert_eq!(chord_cmp(&rat(1, 6), &rat(1, 1)), Ordering::Equal);
        assert_eq!(chord_cmp(&rat(1, 2), &rat(2, 1)), Ordering::Equal);
        assert_eq!(chord_cmp(&rat(0, 1), &rat(0, 1)), Ordering::Equal);
        // chord(1/4) = √2
        assert_eq!(chord_cmp(&rat(1, 4), &rat(141, 100)), Ordering::Greater);
        assert_eq!(chord_cmp(&rat(1, 4), &rat(142, 100)), Ordering::Less);
    }

    #[test]
    fn chord_fast_paths() {
        assert_eq!(chord_cmp(&rat(1, 1000), &rat(1, 100)), Ordering::Less);
        assert_eq!(chord_cmp(&rat(1, 1000), &rat(1, 200)), Ordering::Greater);
    }

    #[test]
    fn chord_gray_zone_needs_refinement() {
        // chord(1/50) ≈ 0.1255810, 2π/50 ≈ 0.1256637: both targets fall in
        // the (4d, 2πd) gap, so only refinement separates them.
        assert_eq!(chord_cmp(&rat(1, 50), &rat(1255, 10000)), Ordering::Greater);
        assert_eq!(chord_cmp(&rat(1, 50), &rat(1256, 10000)), Ordering::Less);
        // chord(1/5) = 2 sin(36°) ≈ 1.17557
        assert_eq!(chord_cmp(&rat(1, 5), &rat(11755, 10000)), Ordering::Greater);
        assert_eq!(chord_cmp(&rat(1, 5), &rat(11756, 10000)), Ordering::Less);
    }

    #[test]
    fn pi_enclosure_is_tight() {
        let (lo, hi) = pi_bounds(128);
        assert!(lo < hi);
        let width = &hi - &lo;
        assert!(width < rat(1, 1_000_000_000_000_000_000));
        // π = 3.14159265358979323846...; pin the enclosure between two
        // rational anchors bracketing it.
        let below = rat(314159265358979323, 100000000000000000);
        let above = rat(314159265358979324, 100000000000000000);
        assert!(hi > below);
        assert!(lo < above);
    }

    #[test]
    fn serde_round_trip() {
        let a = UnitAngle::from_ratio(5, 6);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "\"5/6\"");
        let back: UnitAngle = serde_json::from_str(&s).unwrap();
        assert_eq!(a, back);
        assert!(serde_json::from_str::<UnitAngle>("\"3/2\"").is_err());
    }
}
