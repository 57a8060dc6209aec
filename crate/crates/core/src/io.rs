//! JSON documents for spaces, weight tables, distributions, structures,
//! solver verdicts and proofs.
//!
//! Every rational is a string, `"p/q"` or an integer. Documents carry the
//! signature by name and reject unknown fields. Conversions into the core
//! types run the full invariant checks.

use serde::de::{self, DeserializeOwned, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::evidence::{Distribution, EvidenceError, EvidenceSpace, WeightTable};
use crate::formula::{Rational, Signature, SignatureError};
use crate::proofcheck::{AxiomId, Justification, UnknownAxiom};
use crate::scalar::{format_rational, parse_rational};
use crate::semantics::{EvidentialStructure, StructureError, World};
use crate::solver::{CandidateModel, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Evidence(#[from] EvidenceError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Axiom(#[from] UnknownAxiom),
    #[error("unknown hypothesis {0:?}")]
    UnknownHypothesis(String),
    #[error("unknown observation {0:?}")]
    UnknownObservation(String),
    #[error("hypothesis list {found:?} does not match {expected:?}")]
    HypothesisMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
}

/// A rational written as a JSON string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rat(pub Rational);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map(Rat).map_err(de::Error::custom)
    }
}

fn rats(v: &[Rational]) -> Vec<Rat> {
    v.iter().cloned().map(Rat).collect()
}

fn unrat(v: Vec<Rat>) -> Vec<Rational> {
    v.into_iter().map(|r| r.0).collect()
}

fn matrix(m: &[Vec<Rational>]) -> Vec<Vec<Rat>> {
    m.iter().map(|r| rats(r)).collect()
}

fn unmatrix(m: Vec<Vec<Rat>>) -> Vec<Vec<Rational>> {
    m.into_iter().map(unrat).collect()
}

pub fn from_json<D: DeserializeOwned>(text: &str) -> Result<D, DocError> {
    Ok(serde_json::from_str(text)?)
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<S: Serialize>(doc: &S) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureDoc {
    pub hypotheses: Vec<String>,
    pub observations: Vec<String>,
}

impl SignatureDoc {
    pub fn from_signature(sig: &Signature) -> Self {
        SignatureDoc {
            hypotheses: sig.hypotheses().to_vec(),
            observations: sig.observations().to_vec(),
        }
    }

    pub fn into_signature(self) -> Result<Signature, DocError> {
        Ok(Signature::new(self.hypotheses, self.observations)?)
    }
}

/// `likelihood[h][o]`, one row per hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub hypotheses: Vec<String>,
    pub observations: Vec<String>,
    pub likelihood: Vec<Vec<Rat>>,
}

impl SpaceDoc {
    pub fn from_space(space: &EvidenceSpace<Rational>) -> Self {
        let sig = space.signature();
        SpaceDoc {
            hypotheses: sig.hypotheses().to_vec(),
            observations: sig.observations().to_vec(),
            likelihood: matrix(space.likelihoods()),
        }
    }

    pub fn into_space(self) -> Result<EvidenceSpace<Rational>, DocError> {
        let sig = Signature::new(self.hypotheses, self.observations)?;
        Ok(EvidenceSpace::new(sig, unmatrix(self.likelihood))?)
    }
}

/// `weights[o][h]`, one row per observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDoc {
    pub hypotheses: Vec<String>,
    pub observations: Vec<String>,
    pub weights: Vec<Vec<Rat>>,
}

impl TableDoc {
    pub fn from_table(table: &WeightTable<Rational>) -> Self {
        let sig = table.signature();
        TableDoc {
            hypotheses: sig.hypotheses().to_vec(),
            observations: sig.observations().to_vec(),
            weights: matrix(table.entries()),
        }
    }

    pub fn into_table(self) -> Result<WeightTable<Rational>, DocError> {
        let sig = Signature::new(self.hypotheses, self.observations)?;
        Ok(WeightTable::new(sig, unmatrix(self.weights))?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionDoc {
    pub hypotheses: Vec<String>,
    pub masses: Vec<Rat>,
}

impl DistributionDoc {
    pub fn new(hypotheses: &[String], d: &Distribution<Rational>) -> Self {
        DistributionDoc {
            hypotheses: hypotheses.to_vec(),
            masses: rats(d.masses()),
        }
    }

    /// The distribution, after checking its hypothesis list against
    /// `expected`.
    pub fn into_distribution(
        self,
        expected: &[String],
    ) -> Result<Distribution<Rational>, DocError> {
        if self.hypotheses != expected {
            return Err(DocError::HypothesisMismatch {
                expected: expected.to_vec(),
                found: self.hypotheses,
            });
        }
        Ok(Distribution::new(unrat(self.masses))?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub hypotheses: Vec<String>,
    pub observations: Vec<String>,
    /// `(hypothesis, observation)` pairs.
    pub states: Vec<(String, String)>,
    /// Prior masses in hypothesis order.
    pub priors: Vec<Vec<Rat>>,
    pub likelihood: Vec<Vec<Rat>>,
}

impl StructureDoc {
    pub fn from_structure(m: &EvidentialStructure) -> Self {
        let sig = m.signature();
        StructureDoc {
            hypotheses: sig.hypotheses().to_vec(),
            observations: sig.observations().to_vec(),
            states: m
                .states()
                .iter()
                .map(|&(h, o)| (sig.hypotheses()[h].clone(), sig.observations()[o].clone()))
                .collect(),
            priors: m.priors().iter().map(|p| rats(p.masses())).collect(),
            likelihood: matrix(m.space().likelihoods()),
        }
    }

    pub fn into_structure(self) -> Result<EvidentialStructure, DocError> {
        let sig = Signature::new(self.hypotheses, self.observations)?;
        let states = self
            .states
            .into_iter()
            .map(|(h, o)| {
                let hi = sig
                    .hypothesis_index(&h)
                    .ok_or(DocError::UnknownHypothesis(h))?;
                let oi = sig
                    .observation_index(&o)
                    .ok_or(DocError::UnknownObservation(o))?;
                Ok((hi, oi))
            })
            .collect::<Result<Vec<_>, DocError>>()?;
        let priors = self
            .priors
            .into_iter()
            .map(|p| Distribution::new(unrat(p)))
            .collect::<Result<Vec<_>, _>>()?;
        let space = EvidenceSpace::new(sig, unmatrix(self.likelihood))?;
        Ok(EvidentialStructure::new(space, states, priors)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldDoc {
    pub hypothesis: String,
    pub observation: String,
    /// Index into the structure's prior list.
    pub prior: usize,
}

impl WorldDoc {
    pub fn new(sig: &Signature, w: World) -> Self {
        WorldDoc {
            hypothesis: sig.hypotheses()[w.h].clone(),
            observation: sig.observations()[w.ob].clone(),
            prior: w.prior,
        }
    }

    pub fn resolve(&self, sig: &Signature) -> Result<World, DocError> {
        Ok(World {
            h: sig
                .hypothesis_index(&self.hypothesis)
                .ok_or_else(|| DocError::UnknownHypothesis(self.hypothesis.clone()))?,
            ob: sig
                .observation_index(&self.observation)
                .ok_or_else(|| DocError::UnknownObservation(self.observation.clone()))?,
            prior: self.prior,
        })
    }
}

/// Solver outcome. On `SAT` the witness is a one-state, one-prior
/// structure together with its world.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictDoc {
    pub verdict: String,
    pub delta: Rat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<StructureDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub world: Option<WorldDoc>,
}

impl VerdictDoc {
    pub fn new(v: &Verdict, delta: &Rational) -> Self {
        let (model, world) = match v {
            Verdict::Sat(m) => (
                Some(StructureDoc::from_structure(&m.structure())),
                Some(WorldDoc::new(m.space.signature(), m.world())),
            ),
            _ => (None, None),
        };
        VerdictDoc {
            verdict: v.label().to_string(),
            delta: Rat(delta.clone()),
            model,
            world,
        }
    }

    /// The witness of a `SAT` document as a candidate model.
    pub fn candidate(&self) -> Result<Option<CandidateModel>, DocError> {
        let (Some(model), Some(world)) = (&self.model, &self.world) else {
            return Ok(None);
        };
        let m = model.clone().into_structure()?;
        let w = world.resolve(m.signature())?;
        let prior = m
            .priors()
            .get(w.prior)
            .cloned()
            .ok_or(DocError::Structure(StructureError::NoPriors))?;
        Ok(Some(CandidateModel {
            space: m.space().clone(),
            prior,
            h: w.h,
            ob: w.ob,
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpDoc {
    pub mp: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ByDoc {
    Axiom(String),
    Mp(MpDoc),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofLineDoc {
    pub formula: String,
    pub by: ByDoc,
}

/// A proof file: the list of lines.
pub type ProofDoc = Vec<ProofLineDoc>;

/// Formula texts with resolved justifications.
pub fn proof_lines(doc: &[ProofLineDoc]) -> Result<Vec<(String, Justification)>, DocError> {
    doc.iter()
        .map(|l| {
            let by = match &l.by {
                ByDoc::Axiom(name) => Justification::Axiom(name.parse::<AxiomId>()?),
                ByDoc::Mp(MpDoc { mp: [i, j] }) => Justification::Mp(*i, *j),
            };
            Ok((l.formula.clone(), by))
        })
        .collect()
}
