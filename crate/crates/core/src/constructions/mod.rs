//! End-to-end construction of the pair (E, E′).
//!
//! Given a stream presenting an infinite F ⊆ Γ, the builders here produce
//! disjoint sets E = {γ_n} ⊆ F and E′ = {γ_n + χ_n} ⊆ F + F − F where every
//! χ_n is a difference of stream elements found Bohr-close to 0 at an
//! escalating precision, E and E′ each carry a weak ε-Kronecker certificate
//! (ε ≤ √2, i.e. at most a 1/4-turn arc), and [`non_i0_witness`] exhibits,
//! for any finite precision spec, an index n at which γ_n and γ_n + χ_n are
//! indistinguishable. That last property is what blocks E ∪ E′ from being I₀:
//! disjoint subsets of an I₀ set must have disjoint closures under the duals,
//! and the pairs (γ_n, γ_n + χ_n) refuse to separate at any precision.
//!
//! The case split follows the shape of F. If some coordinate projection
//! π_α(F) is infinite, interpolation happens inside the single factor Ω_α
//! ([`build_case1_q`], [`build_case1_cpinf`]); otherwise infinitely many
//! factors see F nontrivially and interpolation uses one fresh factor per
//! stage ([`build_case2`]). [`build_pair`] probes the stream and dispatches.

mod case1;
mod case2;
mod cluster;
mod dispatch;
mod precision;
mod probe;
mod result;
mod witness;

pub use case1::{build_case1_cpinf, build_case1_q};
pub use case2::{build_case2, independence_check, Combination, IndependenceCheck};
pub use cluster::{find_cluster_element, ClusterWitness};
pub use dispatch::{build_pair, BuildConfig, CaseAssumption};
pub use precision::{seeded_spec, seeded_targets, stage_seed, PrecisionSpec};
pub use probe::{probe_stream, FactorProbe, ProbeReport};
pub use result::{
    BranchTrace, CaseTag, ConstructionPair, ConstructionResult, IndependenceCertificate,
    IndependencePair, Provenance, RESULT_KIND,
};
pub use witness::{non_i0_witness, WitnessHit, WitnessReport};

use crate::characters::CharacterError;
use crate::groups::GroupError;
use crate::kronecker::{CertificateError, KroneckerError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("rounds must be at least 1")]
    NoRounds,
    #[error("budget exhausted after {searched} candidates while {task}")]
    BudgetExhausted { task: String, searched: u64 },
    #[error("distinctness condition (b) fails between stages {0} and {1}")]
    ConditionBViolated(usize, usize),
    #[error("projection to factor {index} looks finite: {distinct} distinct values over the probe window")]
    ImageFinite { index: u64, distinct: usize },
    #[error("probe cannot settle the case dispatch: {0}")]
    ProbeInconclusive(String),
    #[error("no admissible factor offers an element of order at least {q} within budget")]
    OrderTooSmall { q: u64 },
    #[error("factor {index} is not {expected}")]
    WrongFactor { index: u64, expected: &'static str },
    #[error("interpolation precision q = {0} must be at least {1} for this construction")]
    InsufficientQ(u64, u64),
    #[error("element {position} has infinite order")]
    InfiniteOrder { position: usize },
    #[error("selected elements admit a vanishing combination: {0}")]
    DependenceFound(String),
    #[error("construction invariant violated: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Kronecker(#[from] KroneckerError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
}
