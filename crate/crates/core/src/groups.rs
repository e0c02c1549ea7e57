//! Discrete abelian ambient groups of the form ⊕_α Ω_α with Ω_α ∈ {ℚ, C(p^∞), ℤ(n)},
//! finitely supported elements over them, and deterministic element streams.
//!
//! Torsion coordinates live on the circle (rationals mod 1 with constrained
//! denominators); ℚ coordinates are plain rationals. Index sets are countable
//! and ordered (`u64`), either an explicit finite list or one uniform rule.

use crate::exact::{denominator, format_rational, UnitAngle};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("ambient groups differ")]
    AmbientMismatch,
    #[error("coordinate at index {index} invalid for {kind}: {value}")]
    InvalidCoordinate {
        index: u64,
        kind: String,
        value: String,
    },
    #[error("factor index {0} is outside the ambient group")]
    InvalidIndex(u64),
    #[error("invalid ambient group: {0}")]
    InvalidGroup(String),
    #[error("stream elements must be distinct (positions {0} and {1} coincide)")]
    DuplicateElements(usize, usize),
    #[error("invalid stream rule: {0}")]
    InvalidRule(String),
    #[error("budget exhausted after {searched} candidates")]
    BudgetExhausted { searched: usize },
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// k-th prime, zero-based: 2, 3, 5, 7, ...
pub fn nth_prime(k: usize) -> u64 {
    let mut found = 0usize;
    let mut n = 1u64;
    loop {
        n += 1;
        if is_prime_u64(n) {
            if found == k {
                return n;
            }
            found += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FactorSignature {
    /// The additive rationals ℚ (torsion free).
    Rationals,
    /// The Prüfer group C(p^∞): rationals mod 1 with p-power denominators.
    Pruefer { p: u64 },
    /// ℤ(n): rationals mod 1 with denominator dividing n, n ≥ 2.
    Cyclic { n: u64 },
}

impl FactorSignature {
    pub fn validate(&self) -> Result<(), GroupError> {
        match self {
            FactorSignature::Rationals => Ok(()),
            FactorSignature::Pruefer { p } => {
                if is_prime_u64(*p) {
                    Ok(())
                } else {
                    Err(GroupError::InvalidGroup(format!("{p} is not prime")))
                }
            }
            FactorSignature::Cyclic { n } => {
                if *n >= 2 {
                    Ok(())
                } else {
                    Err(GroupError::InvalidGroup(format!("cyclic order {n} < 2")))
                }
            }
        }
    }

    pub fn is_torsion(&self) -> bool {
        !matches!(self, FactorSignature::Rationals)
    }

    fn describe(&self) -> String {
        match self {
            FactorSignature::Rationals => "Q".into(),
            FactorSignature::Pruefer { p } => format!("C({p}^inf)"),
            FactorSignature::Cyclic { n } => format!("Z({n})"),
        }
    }

    /// Checks the denominator constraint for a (nonzero) coordinate.
    fn admits(&self, coord: &Coordinate) -> bool {
        match (self, coord) {
            (FactorSignature::Rationals, Coordinate::Rational(_)) => true,
            (FactorSignature::Pruefer { p }, Coordinate::Angle(a)) => {
                let mut d = denominator(a.turns());
                let p = BigUint::from(*p);
                while (&d % &p).is_zero() {
                    d /= &p;
                }
                d.is_one()
            }
            (FactorSignature::Cyclic { n }, Coordinate::Angle(a)) => {
                (BigUint::from(*n) % denominator(a.turns())).is_zero()
            }
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmbientGroup {
    /// Finitely many factors, indexed 0..factors.len().
    Explicit { factors: Vec<FactorSignature> },
    /// Every index in ℕ carries the same signature.
    Uniform { factor: FactorSignature },
}

impl AmbientGroup {
    pub fn explicit(factors: Vec<FactorSignature>) -> Result<Arc<Self>, GroupError> {
        let g = AmbientGroup::Explicit { factors };
        g.validate()?;
        Ok(Arc::new(g))
    }

    pub fn uniform(factor: FactorSignature) -> Result<Arc<Self>, GroupError> {
        let g = AmbientGroup::Uniform { factor };
        g.validate()?;
        Ok(Arc::new(g))
    }

    /// Single ℚ factor; the ambient group of ℤ-like examples.
    pub fn integers() -> Arc<Self> {
        AmbientGroup::explicit(vec![FactorSignature::Rationals]).expect("valid")
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        match self {
            AmbientGroup::Explicit { factors } => {
                if factors.is_empty() {
                    return Err(GroupError::InvalidGroup("no factors".into()));
                }
                factors.iter().try_for_each(FactorSignature::validate)
            }
            AmbientGroup::Uniform { factor } => factor.validate(),
        }
    }

    pub fn signature(&self, index: u64) -> Option<&FactorSignature> {
        match self {
            AmbientGroup::Explicit { factors } => factors.get(index as usize),
            AmbientGroup::Uniform { factor } => Some(factor),
        }
    }

    /// Number of factors when finite.
    pub fn finite_len(&self) -> Option<u64> {
        match self {
            AmbientGroup::Explicit { factors } => Some(factors.len() as u64),
            AmbientGroup::Uniform { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    Rational(#[serde(with = "crate::json::rational_string")] BigRational),
    Angle(UnitAngle),
}

impl Coordinate {
    pub fn zero_for(sig: &FactorSignature) -> Self {
        match sig {
            FactorSignature::Rationals => Coordinate::Rational(BigRational::zero()),
            _ => Coordinate::Angle(UnitAngle::zero()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coordinate::Rational(r) => r.is_zero(),
            Coordinate::Angle(a) => a.is_zero(),
        }
    }

    pub fn negate(&self) -> Self {
        match self {
            Coordinate::Rational(r) => Coordinate::Rational(-r),
            Coordinate::Angle(a) => Coordinate::Angle(-a),
        }
    }

    pub fn add(&self, other: &Coordinate) -> Option<Coordinate> {
        match (self, other) {
            (Coordinate::Rational(a), Coordinate::Rational(b)) => {
                Some(Coordinate::Rational(a + b))
            }
            (Coordinate::Angle(a), Coordinate::Angle(b)) => Some(Coordinate::Angle(a + b)),
            _ => None,
        }
    }

    pub fn scale(&self, k: &BigInt) -> Coordinate {
        match self {
            Coordinate::Rational(r) => Coordinate::Rational(r * BigRational::from(k.clone())),
            Coordinate::Angle(a) => Coordinate::Angle(a.scale(k)),
        }
    }

    /// Order of the coordinate in its factor.
    pub fn order(&self) -> Order {
        match self {
            Coordinate::Rational(r) if r.is_zero() => Order::Finite(BigUint::one()),
            Coordinate::Rational(_) => Order::Infinite,
            Coordinate::Angle(a) => Order::Finite(denominator(a.turns())),
        }
    }

    fn describe(&self) -> String {
        match self {
            Coordinate::Rational(r) => format_rational(r),
            Coordinate::Angle(a) => format!("{}", format_rational(a.turns())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Finite(#[serde(with = "crate::json::biguint_string")] BigUint),
    Infinite,
}

impl Order {
    pub fn at_least(&self, q: u64) -> bool {
        match self {
            Order::Infinite => true,
            Order::Finite(n) => *n >= BigUint::from(q),
        }
    }

    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }
}

/// A finitely supported element of the ambient group.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    group: Arc<AmbientGroup>,
    support: BTreeMap<u64, Coordinate>,
}

impl GroupElement {
    pub fn zero(group: &Arc<AmbientGroup>) -> Self {
        GroupElement {
            group: Arc::clone(group),
            support: BTreeMap::new(),
        }
    }

    pub fn new(
        group: &Arc<AmbientGroup>,
        entries: impl IntoIterator<Item = (u64, Coordinate)>,
    ) -> Result<Self, GroupError> {
        let mut support = BTreeMap::new();
        for (index, coord) in entries {
            let sig = group
                .signature(index)
                .ok_or(GroupError::InvalidIndex(index))?;
            if coord.is_zero() {
                continue;
            }
            if !sig.admits(&coord) {
                return Err(GroupError::InvalidCoordinate {
                    index,
                    kind: sig.describe(),
                    value: coord.describe(),
                });
            }
            if support.insert(index, coord).is_some() {
                return Err(GroupError::InvalidRule(format!(
                    "repeated coordinate index {index}"
                )));
            }
        }
        Ok(GroupElement {
            group: Arc::clone(group),
            support,
        })
    }

    pub fn singleton(
        group: &Arc<AmbientGroup>,
        index: u64,
        coord: Coordinate,
    ) -> Result<Self, GroupError> {
        Self::new(group, [(index, coord)])
    }

    pub fn group(&self) -> &Arc<AmbientGroup> {
        &self.group
    }

    pub fn support(&self) -> impl Iterator<Item = (&u64, &Coordinate)> {
        self.support.iter()
    }

    pub fn support_indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.support.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// Coordinate at `index`; the zero of the right kind off the support.
    pub fn project(&self, index: u64) -> Coordinate {
        let sig = self
            .group
            .signature(index)
            .expect("projection index must lie in the ambient group");
        self.support
            .get(&index)
            .cloned()
            .unwrap_or_else(|| Coordinate::zero_for(sig))
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        if self.group != other.group {
            return Err(GroupError::AmbientMismatch);
        }
        let mut support = self.support.clone();
        for (index, coord) in &other.support {
            match support.remove(index) {
                None => {
                    support.insert(*index, coord.clone());
                }
                Some(existing) => {
                    let sum = existing.add(coord).expect("matching coordinate kinds");
                    if !sum.is_zero() {
                        support.insert(*index, sum);
                    }
                }
            }
        }
        Ok(GroupElement {
            group: Arc::clone(&self.group),
            support,
        })
    }

    pub fn negate(&self) -> GroupElement {
        GroupElement {
            group: Arc::clone(&self.group),
            support: self
                .support
                .iter()
                .map(|(i, c)| (*i, c.negate()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        self.add(&other.negate())
    }

    pub fn scale(&self, k: &BigInt) -> GroupElement {
        let mut support = BTreeMap::new();
        for (i, c) in &self.support {
            let scaled = c.scale(k);
            if !scaled.is_zero() {
                support.insert(*i, scaled);
            }
        }
        GroupElement {
            group: Arc::clone(&self.group),
            support,
        }
    }

    /// Order of the element: infinite as soon as a ℚ coordinate is nonzero,
    /// otherwise the lcm of the torsion coordinate orders.
    pub fn element_order(&self) -> Order {
        let mut acc = BigUint::one();
        for coord in self.support.values() {
            match coord.order() {
                Order::Infinite => return Order::Infinite,
                Order::Finite(n) => acc = acc.lcm(&n),
            }
        }
        Order::Finite(acc)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, (i, c)) in self.support.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}:{}", c.describe())?;
        }
        write!(f, "}}")
    }
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            index: u64,
            #[serde(flatten)]
            value: &'a Coordinate,
        }
        use serde::ser::SerializeStruct;
        let entries: Vec<Entry> = self
            .support
            .iter()
            .map(|(i, c)| Entry {
                index: *i,
                value: c,
            })
            .collect();
        let mut st = s.serialize_struct("GroupElement", 1)?;
        st.serialize_field("support", &entries)?;
        st.end()
    }
}

/// Deterministic generator rules for the infinite input set F.
#[derive(Clone, Debug)]
pub enum StreamRule {
    Explicit(Vec<GroupElement>),
    /// k ↦ base^{k+1} in a ℚ factor.
    Geometric { base: u64, factor: u64 },
    /// k ↦ the canonical generator of factor k (1 for ℚ, 1/n for ℤ(n), 1/p for C(p^∞)).
    UnitGenerators,
    /// k ↦ 1/p_k in a ℚ factor, p_k the k-th prime.
    PrimeReciprocals { factor: u64 },
    /// k ↦ 1/base^{k+1} in a ℚ factor or in C(base^∞).
    PowerReciprocals { base: u64, factor: u64 },
}

/// A deterministic stream presenting the countable set F ⊆ Γ.
///
/// The k-th element is a pure function of the rule, elements are pairwise
/// distinct, and `budget` caps every exhaustive sweep made over the stream.
#[derive(Clone, Debug)]
pub struct ElementStream {
    group: Arc<AmbientGroup>,
    rule: StreamRule,
    budget: usize,
}

impl ElementStream {
    pub fn new(
        group: &Arc<AmbientGroup>,
        rule: StreamRule,
        budget: usize,
    ) -> Result<Self, GroupError> {
        if budget == 0 {
            return Err(GroupError::InvalidRule("budget must be positive".into()));
        }
        match &rule {
            StreamRule::Explicit(elements) => {
                if elements.is_empty() {
                    return Err(GroupError::InvalidRule("empty explicit set".into()));
                }
                for (pos, e) in elements.iter().enumerate() {
                    if e.group() != group {
                        return Err(GroupError::AmbientMismatch);
                    }
                    if let Some(prev) = elements[..pos].iter().position(|p| p == e) {
                        return Err(GroupError::DuplicateElements(prev, pos));
                    }
                }
            }
            StreamRule::Geometric { base, factor } => {
                if *base < 2 {
                    return Err(GroupError::InvalidRule(format!("geometric base {base} < 2")));
                }
                match group.signature(*factor) {
                    Some(FactorSignature::Rationals) => {}
                    Some(_) => {
                        return Err(GroupError::InvalidRule(
                            "geometric rule needs a rational factor".into(),
                        ))
                    }
                    None => return Err(GroupError::InvalidIndex(*factor)),
                }
            }
            StreamRule::UnitGenerators => {}
            StreamRule::PrimeReciprocals { factor } => match group.signature(*factor) {
                Some(FactorSignature::Rationals) => {}
                Some(_) => {
                    return Err(GroupError::InvalidRule(
                        "prime reciprocals need a rational factor".into(),
                    ))
                }
                None => return Err(GroupError::InvalidIndex(*factor)),
            },
            StreamRule::PowerReciprocals { base, factor } => {
                if *base < 2 {
                    return Err(GroupError::InvalidRule(format!("base {base} < 2")));
                }
                match group.signature(*factor) {
                    Some(FactorSignature::Rationals) => {}
                    Some(FactorSignature::Pruefer { p }) if p == base => {}
                    Some(_) => {
                        return Err(GroupError::InvalidRule(
                            "power reciprocals need a rational factor or the matching Prüfer factor"
                                .into(),
                        ))
                    }
                    None => return Err(GroupError::InvalidIndex(*factor)),
                }
            }
        }
        Ok(ElementStream {
            group: Arc::clone(group),
            rule,
            budget,
        })
    }

    pub fn group(&self) -> &Arc<AmbientGroup> {
        &self.group
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// The k-th element; `None` once an explicit list is exhausted.
    pub fn nth(&self, k: usize) -> Option<GroupElement> {
        match &self.rule {
            StreamRule::Explicit(elements) => elements.get(k).cloned(),
            StreamRule::Geometric { base, factor } => {
                let value = BigInt::from(*base).pow(k as u32 + 1);
                Some(
                    GroupElement::singleton(
                        &self.group,
                        *factor,
                        Coordinate::Rational(BigRational::from(value)),
                    )
                    .expect("validated rule"),
                )
            }
            StreamRule::UnitGenerators => {
                let index = k as u64;
                let sig = self.group.signature(index)?;
                let coord = match sig {
                    FactorSignature::Rationals => Coordinate::Rational(BigRational::one()),
                    FactorSignature::Cyclic { n } => {
                        Coordinate::Angle(UnitAngle::from_ratio(1, *n as i64))
                    }
                    FactorSignature::Pruefer { p } => {
                        Coordinate::Angle(UnitAngle::from_ratio(1, *p as i64))
                    }
                };
                Some(GroupElement::singleton(&self.group, index, coord).expect("validated rule"))
            }
            StreamRule::PrimeReciprocals { factor } => {
                let p = nth_prime(k);
                Some(
                    GroupElement::singleton(
                        &self.group,
                        *factor,
                        Coordinate::Rational(BigRational::new(BigInt::one(), BigInt::from(p))),
                    )
                    .expect("validated rule"),
                )
            }
            StreamRule::PowerReciprocals { base, factor } => {
                let den = BigInt::from(*base).pow(k as u32 + 1);
                let value = BigRational::new(BigInt::one(), den);
                let coord = match self.group.signature(*factor) {
                    Some(FactorSignature::Rationals) => Coordinate::Rational(value),
                    _ => Coordinate::Angle(UnitAngle::from_turns(&value)),
                };
                Some(GroupElement::singleton(&self.group, *factor, coord).expect("validated rule"))
            }
        }
    }

    /// Elements 0..budget (fewer if an explicit list runs out).
    pub fn iter(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.budget).map_while(|k| self.nth(k))
    }
}

/// One difference f_i − f_j produced by the diagonal sweep.
#[derive(Clone, Debug)]
pub struct DiffItem {
    pub element: GroupElement,
    pub minuend: usize,
    pub subtrahend: usize,
    /// True when an equal element appeared earlier in this sweep.
    pub duplicate: bool,
}

/// Diagonal sweep over (F − F) ∖ {0}: for s = 1, 2, ... emit f_s − f_i and
/// f_i − f_s for i < s. Deterministic and restartable; zero differences are
/// skipped, repeats are emitted but flagged.
pub struct DifferenceStream<'a> {
    stream: &'a ElementStream,
    cache: Vec<GroupElement>,
    seen: HashSet<GroupElement>,
    diagonal: usize,
    step: usize,
    exhausted: bool,
}

impl<'a> DifferenceStream<'a> {
    pub fn new(stream: &'a ElementStream) -> Self {
        DifferenceStream {
            stream,
            cache: Vec::new(),
            seen: HashSet::new(),
            diagonal: 1,
            step: 0,
            exhausted: false,
        }
    }

    fn ensure(&mut self, k: usize) -> bool {
        while self.cache.len() <= k {
            if self.cache.len() >= self.stream.budget() {
                return false;
            }
            match self.stream.nth(self.cache.len()) {
                Some(e) => self.cache.push(e),
                None => return false,
            }
        }
        true
    }
}

impl Iterator for DifferenceStream<'_> {
    type Item = DiffItem;

    fn next(&mut self) -> Option<DiffItem> {
        loop {
            if self.exhausted {
                return None;
            }
            let s = self.diagonal;
            if self.step >= 2 * s {
                self.diagonal += 1;
                self.step = 0;
                continue;
            }
            if !self.ensure(s) {
                self.exhausted = true;
                return None;
            }
            let i = self.step / 2;
            let (minuend, subtrahend) = if self.step % 2 == 0 { (s, i) } else { (i, s) };
            self.step += 1;
            let element = self.cache[minuend]
                .sub(&self.cache[subtrahend])
                .expect("same ambient group");
            if element.is_zero() {
                continue;
            }
            let duplicate = !self.seen.insert(element.clone());
            return Some(DiffItem {
                element,
                minuend,
                subtrahend,
                duplicate,
            });
        }
    }
}

/// Searches the first `budget` stream elements for a representation
/// y = f_a + f_b − f_c, sweeping triples diagonally (by max index, then
/// lexicographically). Returns the first witness.
pub fn triple_sum_contains(
    stream: &ElementStream,
    y: &GroupElement,
    budget: usize,
) -> Result<(GroupElement, GroupElement, GroupElement), GroupError> {
    if y.group() != stream.group() {
        return Err(GroupError::AmbientMismatch);
    }
    let elements: Vec<GroupElement> = (0..budget.min(stream.budget()))
        .map_while(|k| stream.nth(k))
        .collect();
    let mut searched = 0usize;
    for s in 0..elements.len() {
        for a in 0..=s {
            for b in 0..=s {
                for c in 0..=s {
                    if a.max(b).max(c) != s {
                        continue;
                    }
                    searched += 1;
                    let sum = elements[a]
                        .add(&elements[b])
                        .and_then(|t| t.sub(&elements[c]))
                        .expect("same ambient group");
                    if &sum == y {
                        return Ok((
                            elements[a].clone(),
                            elements[b].clone(),
                            elements[c].clone(),
                        ));
                    }
                }
            }
        }
    }
    Err(GroupError::BudgetExhausted { searched })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn integers_set(values: &[i64]) -> ElementStream {
        let group = AmbientGroup::integers();
        let elements = values
            .iter()
            .map(|v| {
                GroupElement::singleton(&group, 0, Coordinate::Rational(rat(*v, 1))).unwrap()
            })
            .collect();
        ElementStream::new(&group, StreamRule::Explicit(elements), 64).unwrap()
    }

    #[test]
    fn projection_and_zero_default() {
        let group = AmbientGroup::explicit(vec![
            FactorSignature::Rationals,
            FactorSignature::Cyclic { n: 3 },
        ])
        .unwrap();
        let x = GroupElement::new(
            &group,
            [
                (0, Coordinate::Rational(rat(5, 1))),
                (1, Coordinate::Angle(UnitAngle::from_ratio(1, 3))),
            ],
        )
        .unwrap();
        assert_eq!(x.project(0), Coordinate::Rational(rat(5, 1)));
        assert_eq!(
            x.project(1),
            Coordinate::Angle(UnitAngle::from_ratio(1, 3))
        );
        let y = GroupElement::singleton(&group, 0, Coordinate::Rational(rat(7, 2))).unwrap();
        assert_eq!(y.project(1), Coordinate::Angle(UnitAngle::zero()));
    }

    #[test]
    fn pruefer_self_sum_collapses() {
        let group = AmbientGroup::uniform(FactorSignature::Pruefer { p: 2 }).unwrap();
        let x =
            GroupElement::singleton(&group, 1, Coordinate::Angle(UnitAngle::from_ratio(1, 2)))
                .unwrap();
        let sum = x.add(&x).unwrap();
        assert!(sum.is_zero());
    }

    #[test]
    fn denominator_constraints_enforced() {
        let group = AmbientGroup::uniform(FactorSignature::Cyclic { n: 4 }).unwrap();
        assert!(GroupElement::singleton(
            &group,
            0,
            Coordinate::Angle(UnitAngle::from_ratio(1, 3))
        )
        .is_err());
        assert!(GroupElement::singleton(
            &group,
            0,
            Coordinate::Angle(UnitAngle::from_ratio(1, 4))
        )
        .is_ok());
        let pruefer = AmbientGroup::uniform(FactorSignature::Pruefer { p: 3 }).unwrap();
        assert!(GroupElement::singleton(
            &pruefer,
            0,
            Coordinate::Angle(UnitAngle::from_ratio(1, 6))
        )
        .is_err());
        assert!(GroupElement::singleton(
            &pruefer,
            0,
            Coordinate::Angle(UnitAngle::from_ratio(2, 9))
        )
        .is_ok());
    }

    #[test]
    fn ambient_mismatch_detected() {
        let g1 = AmbientGroup::integers();
        let g2 = AmbientGroup::uniform(FactorSignature::Cyclic { n: 2 }).unwrap();
        let a = GroupElement::singleton(&g1, 0, Coordinate::Rational(rat(1, 1))).unwrap();
        let b = GroupElement::singleton(&g2, 0, Coordinate::Angle(UnitAngle::from_ratio(1, 2)))
            .unwrap();
        assert!(matches!(a.add(&b), Err(GroupError::AmbientMismatch)));
    }

    #[test]
    fn element_orders() {
        let group = AmbientGroup::explicit(vec![
            FactorSignature::Cyclic { n: 6 },
            FactorSignature::Cyclic { n: 4 },
            FactorSignature::Rationals,
        ])
        .unwrap();
        let x = GroupElement::new(
            &group,
            [
                (0, Coordinate::Angle(UnitAngle::from_ratio(1, 6))),
                (1, Coordinate::Angle(UnitAngle::from_ratio(1, 4))),
            ],
        )
        .unwrap();
        assert_eq!(x.element_order(), Order::Finite(BigUint::from(12u32)));
        let y = GroupElement::singleton(&group, 2, Coordinate::Rational(rat(1, 1))).unwrap();
        assert_eq!(y.element_order(), Order::Infinite);
        assert_eq!(
            GroupElement::zero(&group).element_order(),
            Order::Finite(BigUint::one())
        );
    }

    #[test]
    fn difference_stream_contains_expected() {
        let stream = integers_set(&[0, 1, 3]);
        let diffs: Vec<i64> = DifferenceStream::new(&stream)
            .take(6)
            .map(|d| match d.element.project(0) {
                Coordinate::Rational(r) => {
                    assert!(r.is_integer());
                    r.numer().try_into().unwrap()
                }
                _ => unreachable!(),
            })
            .collect();
        for wanted in [1, 3, 2, -1, -3, -2] {
            assert!(diffs.contains(&wanted), "{wanted} missing from {diffs:?}");
        }
    }

    #[test]
    fn difference_stream_flags_duplicates() {
        let stream = integers_set(&[0, 2, 4]);
        let items: Vec<DiffItem> = DifferenceStream::new(&stream).collect();
        // 2−0 and 4−2 coincide; the later one must be flagged.
        assert!(items.iter().any(|d| d.duplicate));
    }

    #[test]
    fn triple_sum_examples() {
        let stream = integers_set(&[1, 3, 9]);
        let group = stream.group().clone();
        let y = GroupElement::singleton(&group, 0, Coordinate::Rational(rat(11, 1))).unwrap();
        let (a, b, c) = triple_sum_contains(&stream, &y, 16).unwrap();
        let values: Vec<i64> = [a, b, c]
            .iter()
            .map(|e| match e.project(0) {
                Coordinate::Rational(r) => r.numer().try_into().unwrap(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(values, vec![3, 9, 1]);

        let singleton = integers_set(&[1]);
        let one = GroupElement::singleton(&group, 0, Coordinate::Rational(rat(1, 1))).unwrap();
        assert!(triple_sum_contains(&singleton, &one, 4).is_ok());

        let no_fit = integers_set(&[2, 4]);
        let three = GroupElement::singleton(&group, 0, Coordinate::Rational(rat(3, 1))).unwrap();
        assert!(matches!(
            triple_sum_contains(&no_fit, &three, 8),
            Err(GroupError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn stream_rules_produce_expected_elements() {
        let z = AmbientGroup::integers();
        let geo = ElementStream::new(&z, StreamRule::Geometric { base: 3, factor: 0 }, 8).unwrap();
        let third = geo.nth(2).unwrap();
        assert_eq!(third.project(0), Coordinate::Rational(rat(27, 1)));

        let primes =
            ElementStream::new(&z, StreamRule::PrimeReciprocals { factor: 0 }, 8).unwrap();
        assert_eq!(
            primes.nth(3).unwrap().project(0),
            Coordinate::Rational(rat(1, 7))
        );

        let z3 = AmbientGroup::uniform(FactorSignature::Cyclic { n: 3 }).unwrap();
        let gens = ElementStream::new(&z3, StreamRule::UnitGenerators, 8).unwrap();
        assert_eq!(
            gens.nth(5).unwrap().project(5),
            Coordinate::Angle(UnitAngle::from_ratio(1, 3))
        );

        let c2 = AmbientGroup::uniform(FactorSignature::Pruefer { p: 2 }).unwrap();
        let powers =
            ElementStream::new(&c2, StreamRule::PowerReciprocals { base: 2, factor: 0 }, 8)
                .unwrap();
        assert_eq!(
            powers.nth(2).unwrap().project(0),
            Coordinate::Angle(UnitAngle::from_ratio(1, 8))
        );
    }

    #[test]
    fn explicit_stream_rejects_duplicates() {
        let group = AmbientGroup::integers();
        let one = GroupElement::singleton(&group, 0, Coordinate::Rational(rat(1, 1))).unwrap();
        let result = ElementStream::new(
            &group,
            StreamRule::Explicit(vec![one.clone(), one]),
            8,
        );
        assert!(matches!(result, Err(GroupError::DuplicateElements(0, 1))));
    }
}
