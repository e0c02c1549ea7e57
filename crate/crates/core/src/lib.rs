//! Exact constructions of interpolation sets on discrete abelian groups.
//!
//! Given an infinite subset F of Γ = ⊕_α Ω_α (each Ω_α one of ℚ, C(p^∞), or
//! ℤ(n)), this crate builds pairs of weak ε-Kronecker sets E ⊆ F and
//! E′ ⊆ F + F − F whose union fails to be I₀, together with machine-checkable
//! certificates: explicit dual characters realizing interpolation targets and
//! finite-scale witnesses showing no single character can interpolate the
//! union beyond the claimed precision. All bound checks run in exact rational
//! arithmetic; floating point appears only in advisory chord approximations.

pub mod characters;
pub mod constructions;
pub mod exact;
pub mod groups;
pub mod json;
pub mod kronecker;

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

pub use characters::{
    CharacterError, FactorCharacter, LadderCharacter, LevelCharacter, PointCharacter,
    PointComponent, ProductCharacter, Rung, SamplePoint,
};
pub use constructions::{
    build_pair, non_i0_witness, BuildConfig, CaseAssumption, CaseTag, ConstructionError,
    ConstructionResult, PrecisionSpec, WitnessReport,
};
pub use exact::UnitAngle;
pub use groups::{
    AmbientGroup, Coordinate, DifferenceStream, ElementStream, FactorSignature, GroupElement,
    GroupError, Order, StreamRule,
};
pub use kronecker::{
    CertificateError, DualWitness, KroneckerCertificate, KroneckerError, SearchBudget,
};
