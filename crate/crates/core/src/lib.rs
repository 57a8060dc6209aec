//! Weight of evidence, Dempster updating, and a logic for reasoning about
//! priors, posteriors and evidence.
//!
//! The numeric layer ([`evidence`], [`lp`], [`interval`]) is generic over a
//! [`scalar::Scalar`]: exact [`Rational`]s or `f64`/`f32`. The logic layer
//! ([`semantics`], [`solver`], [`proofcheck`]) is exact throughout. The
//! aliases below fix the exact scalar.

pub mod evidence;
pub mod formula;
pub mod interval;
pub mod io;
pub mod lp;
pub mod proofcheck;
pub mod scalar;
pub mod semantics;
pub mod solver;

pub use formula::{classify, parse, Formula, HypFormula, Language, Rational, Signature};
pub use proofcheck::{check_proof, match_axiom, AxiomId, Proof, ProofVerdict};
pub use scalar::Scalar;
pub use semantics::{EvidentialStructure, Validity, World};
pub use solver::{certify, decide_sat, CandidateModel, Verdict};

pub type EvidenceSpace = evidence::EvidenceSpace<Rational>;
pub type Distribution = evidence::Distribution<Rational>;
pub type WeightTable = evidence::WeightTable<Rational>;
pub type WitnessVector = evidence::WitnessVector<Rational>;
pub type Realizability = evidence::Realizability<Rational>;
pub type LogLikelihood = evidence::LogLikelihood<Rational>;

pub type EvidenceSpaceF64 = evidence::EvidenceSpace<f64>;
pub type DistributionF64 = evidence::Distribution<f64>;
pub type WeightTableF64 = evidence::WeightTable<f64>;
