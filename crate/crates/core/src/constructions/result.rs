//! The assembled output: pairs (γ_n, γ_n + χ_n), two certificates, and
//! enough provenance to replay the build.
//!
//! [`ConstructionResult::check_invariants`] recomputes every structural
//! claim from the stored data: disjointness and distinctness of E and E′,
//! nonzero cluster differences with their recorded sample distances, the
//! per-case selection conditions, and certificate verification. Nothing is
//! trusted from the builder; a hand-edited result fails here.

use super::case2::IndependenceCheck;
use super::precision::PrecisionSpec;
use super::ConstructionError;
use crate::exact::chord_cmp;
use crate::groups::{AmbientGroup, Coordinate, GroupElement, GroupError, Order};
use crate::json::ElementRepr;
use crate::kronecker::{
    epsilon_turns, DualWitness, KroneckerCertificate, LadderStage, ProductStage,
};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    /// One rational projection infinite, denominators bounded: Hadamard
    /// frequencies, weak bound 1/(2(q−1)).
    Case1Bounded,
    /// One rational projection infinite, denominators unbounded: ladder
    /// steering, strict bound 1/(2q).
    Case1Unbounded,
    /// One Prüfer projection infinite: ladder steering through ℚ/ℤ, strict
    /// bound 1/(2q).
    Case1Pruefer,
    /// Infinitely many factors with elements of order ≥ q ≥ 3: one fresh
    /// factor per stage, weak bound 1/(2q).
    Case2,
    /// Fallback q = 2 on order-2 coordinates: weak bound 1/4, independence
    /// of the projected sets checked exhaustively.
    Case2OrderTwo,
}

impl CaseTag {
    pub fn is_case1(self) -> bool {
        matches!(
            self,
            CaseTag::Case1Bounded | CaseTag::Case1Unbounded | CaseTag::Case1Pruefer
        )
    }

    /// Certified arc bound in turns and whether it is strict.
    pub fn bound(self, q: u64) -> (BigRational, bool) {
        match self {
            CaseTag::Case1Bounded => (
                BigRational::new(BigInt::from(1), BigInt::from(2 * (q - 1))),
                false,
            ),
            CaseTag::Case1Unbounded | CaseTag::Case1Pruefer => (epsilon_turns(q), true),
            CaseTag::Case2 | CaseTag::Case2OrderTwo => (epsilon_turns(q), false),
        }
    }
}

/// Stage records of whichever engine ran, for both certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum BranchTrace {
    Hadamard {
        #[serde(with = "crate::json::rational_string")]
        frequency_e: BigRational,
        #[serde(with = "crate::json::rational_string")]
        frequency_eprime: BigRational,
        #[serde(with = "crate::json::biguint_string")]
        scale_e: BigUint,
        #[serde(with = "crate::json::biguint_string")]
        scale_eprime: BigUint,
    },
    Ladder {
        stages_e: Vec<LadderStage>,
        stages_eprime: Vec<LadderStage>,
    },
    Product {
        stages_e: Vec<ProductStage>,
        stages_eprime: Vec<ProductStage>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub case: CaseTag,
    /// The factor carrying the whole construction (case 1 only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<u64>,
    /// One steered factor per stage (case 2 only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub betas: Vec<u64>,
    /// Probed factors holding an element of order ≥ 3; the order-2 branch
    /// stays clear of them.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exceptional: Vec<u64>,
    pub seed: u64,
    pub rounds: usize,
    pub trace: BranchTrace,
}

/// One construction round: γ_n ∈ F, the difference χ_n it cannot be told
/// apart from at stage precision, and their sum γ_n + χ_n ∈ E′.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionPair {
    pub gamma: GroupElement,
    pub chi: GroupElement,
    pub sum: GroupElement,
    /// Position of γ_n in stream order.
    pub gamma_stream_index: usize,
    /// χ_n = f_minuend − f_subtrahend in stream order.
    pub chi_minuend: usize,
    pub chi_subtrahend: usize,
    /// The stage-n precision spec χ_n passed (m = n, seeded).
    pub spec: PrecisionSpec,
    /// Circular distances of χ_n to 0 at the spec's sample points.
    pub cluster_distances: Vec<BigRational>,
}

/// A projected set together with the exhaustive dependence search over it.
#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceCertificate {
    pub elements: Vec<GroupElement>,
    pub check: IndependenceCheck,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependencePair {
    pub e: IndependenceCertificate,
    pub eprime: IndependenceCertificate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionResult {
    pub group: Arc<AmbientGroup>,
    pub q: u64,
    /// Arc bound in turns shared by both certificates; the chord bound is
    /// 2 sin(π · bound_turns).
    pub bound_turns: BigRational,
    pub strict: bool,
    pub pairs: Vec<ConstructionPair>,
    pub e_certificate: KroneckerCertificate,
    pub eprime_certificate: KroneckerCertificate,
    /// Present exactly on the order-2 branch.
    pub independence: Option<IndependencePair>,
    pub provenance: Provenance,
}

/// Support restriction to a set of factor indices; the projection Π onto
/// ⊕_{β ∈ indices} Ω_β inside the same ambient group.
pub(crate) fn restrict(
    element: &GroupElement,
    indices: &BTreeSet<u64>,
) -> Result<GroupElement, GroupError> {
    let entries = element
        .support()
        .filter(|(i, _)| indices.contains(i))
        .map(|(i, c)| (*i, c.clone()));
    GroupElement::new(element.group(), entries)
}

fn fail(msg: impl Into<String>) -> ConstructionError {
    ConstructionError::InvariantViolated(msg.into())
}

impl ConstructionResult {
    pub fn e_points(&self) -> impl Iterator<Item = &GroupElement> {
        self.pairs.iter().map(|p| &p.gamma)
    }

    pub fn eprime_points(&self) -> impl Iterator<Item = &GroupElement> {
        self.pairs.iter().map(|p| &p.sum)
    }

    /// Full structural recheck; see the module docs.
    pub fn check_invariants(&self) -> Result<(), ConstructionError> {
        if self.pairs.is_empty() {
            return Err(ConstructionError::NoRounds);
        }
        let case = self.provenance.case;
        let floor = if case.is_case1() { 3 } else { 2 };
        if self.q < floor {
            return Err(ConstructionError::InsufficientQ(self.q, floor));
        }
        let (bound, strict) = case.bound(self.q);
        if self.bound_turns != bound || self.strict != strict {
            return Err(fail(format!(
                "recorded bound {} (strict: {}) does not match the case, expected {} (strict: {})",
                self.bound_turns, self.strict, bound, strict
            )));
        }
        if self.bound_turns > BigRational::new(BigInt::from(1), BigInt::from(4)) {
            return Err(fail("certified arc exceeds a quarter turn"));
        }
        if self.provenance.rounds != self.pairs.len() {
            return Err(fail(format!(
                "provenance records {} rounds but {} pairs are present",
                self.provenance.rounds,
                self.pairs.len()
            )));
        }

        for (n, pair) in self.pairs.iter().enumerate() {
            for (name, e) in [("gamma", &pair.gamma), ("chi", &pair.chi), ("sum", &pair.sum)] {
                if e.group() != &self.group {
                    return Err(fail(format!("pair {n}: {name} lives in a different group")));
                }
            }
            if pair.chi.is_zero() {
                return Err(fail(format!("pair {n}: χ is zero")));
            }
            if pair.gamma.add(&pair.chi)? != pair.sum {
                return Err(fail(format!("pair {n}: sum differs from γ + χ")));
            }
            if pair.spec.m() != n as u64 + 1 {
                return Err(fail(format!(
                    "pair {n}: precision spec has m = {}, expected the stage number {}",
                    pair.spec.m(),
                    n + 1
                )));
            }
            let distances = pair.spec.distances(&pair.chi)?;
            if distances != pair.cluster_distances {
                return Err(fail(format!(
                    "pair {n}: recorded sample distances do not match recomputation"
                )));
            }
            let chord_bound = pair.spec.chord_bound();
            if distances
                .iter()
                .any(|d| chord_cmp(d, &chord_bound) != Ordering::Less)
            {
                return Err(fail(format!(
                    "pair {n}: χ misses the stage chord bound 1/{}",
                    pair.spec.m()
                )));
            }
        }

        for i in 0..self.pairs.len() {
            for j in 0..self.pairs.len() {
                if i < j && self.pairs[i].gamma == self.pairs[j].gamma {
                    return Err(fail(format!("pairs {i} and {j} share the same γ")));
                }
                if i < j && self.pairs[i].sum == self.pairs[j].sum {
                    return Err(fail(format!("pairs {i} and {j} share the same γ + χ")));
                }
                if self.pairs[i].gamma == self.pairs[j].sum {
                    return Err(fail(format!(
                        "E and E′ intersect: γ_{i} equals γ_{j} + χ_{j}"
                    )));
                }
            }
        }

        self.check_certificate("E", &self.e_certificate, |p| &p.gamma)?;
        self.check_certificate("E′", &self.eprime_certificate, |p| &p.sum)?;

        match case {
            CaseTag::Case1Bounded | CaseTag::Case1Unbounded | CaseTag::Case1Pruefer => {
                self.check_case1(case)
            }
            CaseTag::Case2 | CaseTag::Case2OrderTwo => self.check_case2(case),
        }
    }

    fn check_certificate(
        &self,
        label: &str,
        cert: &KroneckerCertificate,
        point: impl Fn(&ConstructionPair) -> &GroupElement,
    ) -> Result<(), ConstructionError> {
        if cert.group != self.group {
            return Err(fail(format!("{label} certificate embeds a different group")));
        }
        if cert.bound_turns != self.bound_turns || cert.strict != self.strict {
            return Err(fail(format!("{label} certificate claims a different bound")));
        }
        if cert.points.len() != self.pairs.len() {
            return Err(fail(format!(
                "{label} certificate covers {} points for {} pairs",
                cert.points.len(),
                self.pairs.len()
            )));
        }
        for (n, (cp, pair)) in cert.points.iter().zip(&self.pairs).enumerate() {
            if &cp.element != point(pair) {
                return Err(fail(format!(
                    "{label} certificate point {n} is not the construction's element"
                )));
            }
        }
        let shape_ok = match (self.provenance.case, &cert.witness) {
            (CaseTag::Case1Bounded, DualWitness::Frequency { index, .. })
            | (CaseTag::Case1Unbounded, DualWitness::Ladder { index, .. })
            | (CaseTag::Case1Pruefer, DualWitness::Level { index, .. }) => {
                Some(*index) == self.provenance.factor
            }
            (CaseTag::Case2 | CaseTag::Case2OrderTwo, DualWitness::Product(_)) => true,
            _ => false,
        };
        if !shape_ok {
            return Err(fail(format!(
                "{label} certificate witness does not match the recorded case"
            )));
        }
        cert.verify()?;
        Ok(())
    }

    /// Distinctness condition (b) at the carrying factor: for n ≠ n′ the
    /// projections satisfy λ_n ≠ λ_{n′}, λ_n ≠ λ_{n′} + x_{n′}, and
    /// λ_n + x_n ≠ λ_{n′} + x_{n′}.
    fn check_case1(&self, case: CaseTag) -> Result<(), ConstructionError> {
        let alpha = self
            .provenance
            .factor
            .ok_or_else(|| fail("case 1 result records no carrying factor"))?;
        if !self.provenance.betas.is_empty() {
            return Err(fail("case 1 result records per-stage factors"));
        }
        let sig = self
            .group
            .signature(alpha)
            .ok_or(GroupError::InvalidIndex(alpha))?;
        let expected = match case {
            CaseTag::Case1Pruefer => sig.is_torsion(),
            _ => !sig.is_torsion(),
        };
        if !expected {
            return Err(ConstructionError::WrongFactor {
                index: alpha,
                expected: if case == CaseTag::Case1Pruefer {
                    "a Prüfer factor"
                } else {
                    "a rational factor"
                },
            });
        }
        let lambda: Vec<Coordinate> = self.pairs.iter().map(|p| p.gamma.project(alpha)).collect();
        let shifted: Vec<Coordinate> = self
            .pairs
            .iter()
            .map(|p| p.sum.project(alpha))
            .collect();
        for n in 0..self.pairs.len() {
            for m in 0..self.pairs.len() {
                if n == m {
                    continue;
                }
                if lambda[n] == lambda[m] || lambda[n] == shifted[m] || shifted[n] == shifted[m] {
                    return Err(ConstructionError::ConditionBViolated(n, m));
                }
            }
        }
        if self.independence.is_some() {
            return Err(fail("case 1 result carries an independence certificate"));
        }
        Ok(())
    }

    /// Per-stage factor conditions: ord(π_{β_n}(γ_n)) ≥ q, earlier stages'
    /// γ and all χ up to the stage vanish at β_n.
    fn check_case2(&self, case: CaseTag) -> Result<(), ConstructionError> {
        let betas = &self.provenance.betas;
        if betas.len() != self.pairs.len() {
            return Err(fail(format!(
                "{} stage factors recorded for {} pairs",
                betas.len(),
                self.pairs.len()
            )));
        }
        if self.provenance.factor.is_some() {
            return Err(fail("case 2 result records a carrying factor"));
        }
        let distinct: BTreeSet<u64> = betas.iter().copied().collect();
        if distinct.len() != betas.len() {
            return Err(fail("stage factors repeat"));
        }
        let two = Order::Finite(BigUint::from(2u32));
        for (n, (pair, beta)) in self.pairs.iter().zip(betas).enumerate() {
            let steering = pair.gamma.project(*beta);
            if !steering.order().at_least(self.q) {
                return Err(fail(format!(
                    "stage {n}: coordinate at factor {beta} has order below q = {}",
                    self.q
                )));
            }
            if case == CaseTag::Case2OrderTwo && steering.order() != two {
                return Err(fail(format!(
                    "stage {n}: order-2 branch steering coordinate has order ≠ 2"
                )));
            }
            for (m, earlier) in self.pairs.iter().enumerate().take(n) {
                if !earlier.gamma.project(*beta).is_zero() {
                    return Err(fail(format!("γ_{m} does not vanish at stage factor β_{n}")));
                }
            }
            for (m, upto) in self.pairs.iter().enumerate().take(n + 1) {
                if !upto.chi.project(*beta).is_zero() {
                    return Err(fail(format!("χ_{m} does not vanish at stage factor β_{n}")));
                }
            }
            if case == CaseTag::Case2OrderTwo && self.provenance.exceptional.contains(beta) {
                return Err(fail(format!(
                    "stage factor β_{n} = {beta} lies in the exceptional set"
                )));
            }
        }
        match (case, &self.independence) {
            (CaseTag::Case2, None) => Ok(()),
            (CaseTag::Case2, Some(_)) => {
                Err(fail("q ≥ 3 branch carries an independence certificate"))
            }
            (CaseTag::Case2OrderTwo, None) => {
                Err(fail("order-2 branch is missing its independence certificate"))
            }
            (CaseTag::Case2OrderTwo, Some(ind)) => {
                self.check_projected("Π(E)", &ind.e, &distinct, |p| &p.gamma)?;
                self.check_projected("Π(E′)", &ind.eprime, &distinct, |p| &p.sum)
            }
            _ => unreachable!("only case-2 results reach this check"),
        }
    }
}

impl ConstructionResult {
    fn check_projected(
        &self,
        label: &str,
        cert: &IndependenceCertificate,
        betas: &BTreeSet<u64>,
        point: impl Fn(&ConstructionPair) -> &GroupElement,
    ) -> Result<(), ConstructionError> {
        if cert.elements.len() != self.pairs.len() {
            return Err(fail(format!("{label} has the wrong number of elements")));
        }
        for (n, (el, pair)) in cert.elements.iter().zip(&self.pairs).enumerate() {
            if el != &restrict(point(pair), betas)? {
                return Err(fail(format!(
                    "{label} element {n} is not the stage-factor restriction"
                )));
            }
        }
        if !cert.check.independent {
            return Err(ConstructionError::DependenceFound(format!(
                "{label} admits a vanishing combination"
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PairRepr {
    gamma: ElementRepr,
    chi: ElementRepr,
    sum: ElementRepr,
    gamma_stream_index: usize,
    chi_minuend: usize,
    chi_subtrahend: usize,
    spec: PrecisionSpec,
    #[serde(with = "crate::json::rational_vec")]
    cluster_distances: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct IndependenceCertRepr {
    elements: Vec<ElementRepr>,
    check: IndependenceCheck,
}

#[derive(Serialize, Deserialize)]
struct IndependencePairRepr {
    e: IndependenceCertRepr,
    eprime: IndependenceCertRepr,
}

#[derive(Serialize, Deserialize)]
struct ResultRepr {
    kind: String,
    group: AmbientGroup,
    q: u64,
    #[serde(with = "crate::json::rational_string")]
    bound_turns: BigRational,
    strict: bool,
    pairs: Vec<PairRepr>,
    e_certificate: KroneckerCertificate,
    eprime_certificate: KroneckerCertificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    independence: Option<IndependencePairRepr>,
    provenance: Provenance,
}

/// Tag identifying a serialized [`ConstructionResult`].
pub const RESULT_KIND: &str = "construction-result";

impl Serialize for ConstructionResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pair_repr = |p: &ConstructionPair| PairRepr {
            gamma: ElementRepr::of(&p.gamma),
            chi: ElementRepr::of(&p.chi),
            sum: ElementRepr::of(&p.sum),
            gamma_stream_index: p.gamma_stream_index,
            chi_minuend: p.chi_minuend,
            chi_subtrahend: p.chi_subtrahend,
            spec: p.spec.clone(),
            cluster_distances: p.cluster_distances.clone(),
        };
        let ind_repr = |c: &IndependenceCertificate| IndependenceCertRepr {
            elements: c.elements.iter().map(ElementRepr::of).collect(),
            check: c.check.clone(),
        };
        ResultRepr {
            kind: RESULT_KIND.into(),
            group: (*self.group).clone(),
            q: self.q,
            bound_turns: self.bound_turns.clone(),
            strict: self.strict,
            pairs: self.pairs.iter().map(pair_repr).collect(),
            e_certificate: self.e_certificate.clone(),
            eprime_certificate: self.eprime_certificate.clone(),
            independence: self.independence.as_ref().map(|ind| IndependencePairRepr {
                e: ind_repr(&ind.e),
                eprime: ind_repr(&ind.eprime),
            }),
            provenance: self.provenance.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConstructionResult {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ResultRepr::deserialize(d)?;
        if repr.kind != RESULT_KIND {
            return Err(D::Error::custom(format!(
                "expected kind {RESULT_KIND:?}, found {:?}",
                repr.kind
            )));
        }
        repr.group.validate().map_err(D::Error::custom)?;
        let group = Arc::new(repr.group);
        let attach = |e: ElementRepr| e.attach(&group).map_err(D::Error::custom);
        let pairs = repr
            .pairs
            .into_iter()
            .map(|p| {
                Ok(ConstructionPair {
                    gamma: attach(p.gamma)?,
                    chi: attach(p.chi)?,
                    sum: attach(p.sum)?,
                    gamma_stream_index: p.gamma_stream_index,
                    chi_minuend: p.chi_minuend,
                    chi_subtrahend: p.chi_subtrahend,
                    spec: p.spec,
                    cluster_distances: p.cluster_distances,
                })
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        let attach_cert = |c: IndependenceCertRepr| -> Result<IndependenceCertificate, D::Error> {
            Ok(IndependenceCertificate {
                elements: c
                    .elements
                    .into_iter()
                    .map(attach)
                    .collect::<Result<Vec<_>, D::Error>>()?,
                check: c.check,
            })
        };
        let independence = repr
            .independence
            .map(|ind| {
                Ok(IndependencePair {
                    e: attach_cert(ind.e)?,
                    eprime: attach_cert(ind.eprime)?,
                })
            })
            .transpose()?;
        Ok(ConstructionResult {
            group,
            q: repr.q,
            bound_turns: repr.bound_turns,
            strict: repr.strict,
            pairs,
            e_certificate: repr.e_certificate,
            eprime_certificate: repr.eprime_certificate,
            independence,
            provenance: repr.provenance,
        })
    }
}
