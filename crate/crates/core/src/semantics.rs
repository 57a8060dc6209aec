//! Evidential structures and the satisfaction relation.
//!
//! A structure fixes an evidence space, a nonempty set of
//! (hypothesis, observation) states and a finite nonempty set of priors.
//! Worlds are the pairs of a state and a prior; they are enumerated on
//! demand and never stored.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::evidence::{Distribution, EvidenceSpace, WeightTable};
use crate::formula::{
    BasicTerm, Factor, Formula, Inequality, Polynomial, Rational, Signature, WellFormedError,
};

/// Variable assignment for open formulas.
pub type Valuation = BTreeMap<String, Rational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct World {
    pub h: usize,
    pub ob: usize,
    /// Index into the structure's prior list.
    pub prior: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("the state set is empty")]
    NoStates,
    #[error("the prior set is empty")]
    NoPriors,
    #[error("state ({0}, {1}) is outside the signature")]
    StateOutOfRange(usize, usize),
    #[error("prior {index} has {found} masses for {expected} hypotheses")]
    PriorLength {
        index: usize,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("posterior undefined at world {0:?}: the prior gives mass 0 to every hypothesis the observation supports")]
    UndefinedPosterior(World),
    #[error("variable {0:?} has no value")]
    UnboundVariable(String),
    #[error("quantified formulas cannot be evaluated")]
    Quantified,
    #[error("formula has free variables: {0:?}")]
    Open(Vec<String>),
    #[error(transparent)]
    WellFormed(#[from] WellFormedError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvidentialStructure {
    space: EvidenceSpace<Rational>,
    weights: WeightTable<Rational>,
    states: Vec<(usize, usize)>,
    priors: Vec<Distribution<Rational>>,
    /// `posteriors[k][o]`, `None` where undefined.
    posteriors: Vec<Vec<Option<Distribution<Rational>>>>,
}

impl EvidentialStructure {
    pub fn new(
        space: EvidenceSpace<Rational>,
        states: Vec<(usize, usize)>,
        priors: Vec<Distribution<Rational>>,
    ) -> Result<Self, StructureError> {
        let sig = space.signature();
        if states.is_empty() {
            return Err(StructureError::NoStates);
        }
        if priors.is_empty() {
            return Err(StructureError::NoPriors);
        }
        for &(h, o) in &states {
            if h >= sig.n_hyp() || o >= sig.n_obs() {
                return Err(StructureError::StateOutOfRange(h, o));
            }
        }
        for (index, p) in priors.iter().enumerate() {
            if p.len() != sig.n_hyp() {
                return Err(StructureError::PriorLength {
                    index,
                    expected: sig.n_hyp(),
                    found: p.len(),
                });
            }
        }
        let weights = space.tabulate();
        let posteriors = priors
            .par_iter()
            .map(|p| {
                (0..sig.n_obs())
                    .map(|o| space.posterior(p, o).ok())
                    .collect()
            })
            .collect();
        Ok(EvidentialStructure {
            space,
            weights,
            states,
            priors,
            posteriors,
        })
    }

    /// Every (hypothesis, observation) pair is a state.
    pub fn full(
        space: EvidenceSpace<Rational>,
        priors: Vec<Distribution<Rational>>,
    ) -> Result<Self, StructureError> {
        let sig = space.signature();
        let states = (0..sig.n_hyp())
            .flat_map(|h| (0..sig.n_obs()).map(move |o| (h, o)))
            .collect();
        Self::new(space, states, priors)
    }

    pub fn signature(&self) -> &Signature {
        self.space.signature()
    }

    pub fn space(&self) -> &EvidenceSpace<Rational> {
        &self.space
    }

    pub fn weights(&self) -> &WeightTable<Rational> {
        &self.weights
    }

    pub fn states(&self) -> &[(usize, usize)] {
        &self.states
    }

    pub fn priors(&self) -> &[Distribution<Rational>] {
        &self.priors
    }

    pub fn prior(&self, w: World) -> &Distribution<Rational> {
        &self.priors[w.prior]
    }

    /// States × priors, state-major.
    pub fn worlds(&self) -> impl Iterator<Item = World> + '_ {
        self.states.iter().flat_map(move |&(h, ob)| {
            (0..self.priors.len()).map(move |prior| World { h, ob, prior })
        })
    }

    pub fn posterior(&self, w: World) -> Result<Distribution<Rational>, SemanticsError> {
        self.posterior_ref(w).cloned()
    }

    fn posterior_ref(&self, w: World) -> Result<&Distribution<Rational>, SemanticsError> {
        self.posteriors[w.prior][w.ob]
            .as_ref()
            .ok_or(SemanticsError::UndefinedPosterior(w))
    }

    fn basic(&self, w: World, t: &BasicTerm) -> Result<Rational, SemanticsError> {
        let sig = self.signature();
        Ok(match t {
            BasicTerm::Prior(rho) => self.prior(w).measure(&rho.denote(sig)?),
            BasicTerm::Posterior(rho) => self.posterior_ref(w)?.measure(&rho.denote(sig)?),
            BasicTerm::Weight(ob, rho) => {
                let o = sig
                    .observation_index(ob)
                    .ok_or_else(|| WellFormedError::UnknownObservation(ob.clone()))?;
                let hs = rho.denote(sig)?;
                hs.iter().map(|h| self.weights.entry(o, h).clone()).sum()
            }
        })
    }

    /// Value of a polynomial term at `w` under `v`.
    pub fn eval_term(
        &self,
        w: World,
        v: &Valuation,
        t: &Polynomial,
    ) -> Result<Rational, SemanticsError> {
        let mut total = Rational::from_integer(0.into());
        for m in &t.monomials {
            let mut value = m.coeff.clone();
            for f in &m.factors {
                let x = match f {
                    Factor::Basic(b) => self.basic(w, b)?,
                    Factor::Var(name) => v
                        .get(name)
                        .cloned()
                        .ok_or_else(|| SemanticsError::UnboundVariable(name.clone()))?,
                };
                value *= x;
            }
            total += value;
        }
        Ok(total)
    }

    pub fn eval_inequality(
        &self,
        w: World,
        v: &Valuation,
        i: &Inequality,
    ) -> Result<bool, SemanticsError> {
        Ok(self.eval_term(w, v, &i.lhs)? >= i.bound)
    }

    /// Truth of a quantifier-free formula at a world. Every atom is
    /// evaluated, so an undefined posterior anywhere in the formula is
    /// reported even if the connectives would not need it.
    pub fn satisfies(&self, w: World, v: &Valuation, f: &Formula) -> Result<bool, SemanticsError> {
        let sig = self.signature();
        Ok(match f {
            Formula::Hyp(name) => sig.hypotheses()[w.h] == *name,
            Formula::Obs(name) => sig.observations()[w.ob] == *name,
            Formula::Ineq(i) => self.eval_inequality(w, v, i)?,
            Formula::Not(g) => !self.satisfies(w, v, g)?,
            Formula::And(a, b) => {
                let a = self.satisfies(w, v, a);
                let b = self.satisfies(w, v, b);
                a? & b?
            }
            Formula::Forall(..) => return Err(SemanticsError::Quantified),
        })
    }

    /// Checks `f` at every world. Worlds are evaluated in parallel; the
    /// reported world is the first one in enumeration order.
    pub fn valid_in(&self, f: &Formula) -> Result<Validity, SemanticsError> {
        f.check(self.signature())?;
        if f.has_quantifier() {
            return Err(SemanticsError::Quantified);
        }
        let free = f.free_variables();
        if !free.is_empty() {
            return Err(SemanticsError::Open(free.into_iter().collect()));
        }
        let worlds: Vec<World> = self.worlds().collect();
        let v = Valuation::new();
        let results: Vec<Result<bool, SemanticsError>> = worlds
            .par_iter()
            .map(|&w| self.satisfies(w, &v, f))
            .collect();
        for (w, r) in worlds.into_iter().zip(results) {
            match r {
                Ok(true) => {}
                Ok(false) => return Ok(Validity::Refuted(w)),
                Err(SemanticsError::UndefinedPosterior(_)) => return Ok(Validity::Undefined(w)),
                Err(e) => return Err(e),
            }
        }
        Ok(Validity::Valid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Refuted(World),
    /// Evaluation hit an undefined posterior at this world.
    Undefined(World),
}

impl Validity {
    pub fn is_valid(self) -> bool {
        self == Validity::Valid
    }
}
