//! Satisfiability of closed, quantifier-free, linear formulas.
//!
//! A formula is satisfiable iff it holds at one world of a one-state,
//! one-prior structure, so the search space is a likelihood matrix (rows in
//! the observation simplex), a prior (in the hypothesis simplex), and the
//! world's hypothesis and observation.
//!
//! The decision runs in three stages:
//!
//! 1. a rational grid over the likelihood rows and the prior, prefiltered
//!    in floating point;
//! 2. exact block-coordinate linear programming started from the grid
//!    points closest to satisfying the formula, which reaches witnesses on
//!    equality constraints that no grid contains;
//! 3. interval branch-and-bound, which either finds a box where the formula
//!    certainly holds or refutes every box with every atom relaxed by δ.
//!
//! Any witness is re-checked by [`certify`] through the semantics module
//! with exact arithmetic before `SAT` is reported.

mod bnb;
mod search;

use std::collections::HashMap;

use num_traits::{ToPrimitive, Zero};

use crate::evidence::{Distribution, EvidenceSpace};
use crate::formula::{
    classify, BasicTerm, Factor, Formula, HypothesisSet, Inequality, Language, Rational, Signature,
    WellFormedError,
};
use crate::scalar::Scalar;
use crate::semantics::{EvidentialStructure, SemanticsError, Valuation, World};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("satisfiability is decided only for closed quantifier-free linear formulas; this formula is in {0}")]
    NotLinear(Language),
    #[error("delta must be positive, got {0}")]
    NonPositiveDelta(String),
    #[error(transparent)]
    WellFormed(#[from] WellFormedError),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Robustness of `UNSAT` answers.
    pub delta: Rational,
    /// Upper bound on grid points evaluated in stage 1.
    pub grid_points: usize,
    /// Starting points for stage 2.
    pub polish_starts: usize,
    /// Rounds of block updates per starting point.
    pub polish_rounds: usize,
    /// Box budget for stage 3, shared by all observations.
    pub max_boxes: usize,
    /// Boxes narrower than this in every relevant coordinate are not split.
    pub min_width: Rational,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            delta: Rational::from_ratio(1, 1_000_000),
            grid_points: 20_000,
            polish_starts: 16,
            polish_rounds: 6,
            max_boxes: 10_000,
            min_width: Rational::new(1.into(), num_bigint::BigInt::from(1u64 << 40)),
        }
    }
}

impl SolverConfig {
    pub fn with_delta(delta: Rational) -> Self {
        SolverConfig {
            delta,
            ..Self::default()
        }
    }
}

/// A single-world model: a likelihood matrix, a prior, and the world's
/// hypothesis and observation.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateModel {
    pub space: EvidenceSpace<Rational>,
    pub prior: Distribution<Rational>,
    pub h: usize,
    pub ob: usize,
}

impl CandidateModel {
    /// The one-state, one-prior structure containing this world.
    pub fn structure(&self) -> EvidentialStructure {
        EvidentialStructure::new(
            self.space.clone(),
            vec![(self.h, self.ob)],
            vec![self.prior.clone()],
        )
        .expect("single state within the signature, prior of matching length")
    }

    pub fn world(&self) -> World {
        World {
            h: self.h,
            ob: self.ob,
            prior: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Sat(Box<CandidateModel>),
    /// No model satisfies the formula even with every atom relaxed by δ.
    Unsat(Rational),
    /// Neither a witness nor a δ-refutation was found within budget.
    Undecided(Rational),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "SAT",
            Verdict::Unsat(_) => "UNSAT",
            Verdict::Undecided(_) => "UNDECIDED",
        }
    }
}

/// One guess of the nondeterministic procedure: which hypothesis and
/// observation hold, and the truth value of each inequality atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomAbstraction {
    pub h: usize,
    pub ob: usize,
    pub polarity: Vec<bool>,
}

/// Re-evaluates `f` at the model's world with exact arithmetic.
pub fn certify(f: &Formula, m: &CandidateModel) -> Result<bool, SemanticsError> {
    m.structure().satisfies(m.world(), &Valuation::new(), f)
}

pub fn decide_sat(f: &Formula, sig: &Signature, delta: &Rational) -> Result<Verdict, SolverError> {
    decide_sat_with(f, sig, &SolverConfig::with_delta(delta.clone()))
}

pub fn decide_sat_with(
    f: &Formula,
    sig: &Signature,
    config: &SolverConfig,
) -> Result<Verdict, SolverError> {
    if !config.delta.is_pos() {
        return Err(SolverError::NonPositiveDelta(config.delta.to_string()));
    }
    let problem = Problem::compile(f, sig)?;
    let delta = config.delta.clone();

    let boolean_possible = (0..sig.n_obs()).any(|ob| {
        (0..sig.n_hyp()).any(|h| problem.skeleton.eval(h, ob, &|_| Tri::Unknown) != Tri::False)
    });
    if !boolean_possible {
        return Ok(Verdict::Unsat(delta));
    }
    if let Some(m) = search::run(&problem, f, config) {
        return Ok(Verdict::Sat(Box::new(m)));
    }
    Ok(match bnb::run(&problem, f, config) {
        bnb::Outcome::Sat(m) => Verdict::Sat(Box::new(m)),
        bnb::Outcome::Refuted => Verdict::Unsat(delta),
        bnb::Outcome::Exhausted => Verdict::Undecided(delta),
    })
}

/// All guesses under which the boolean skeleton is true. Exponential in
/// the number of inequality atoms.
pub fn atom_abstractions(
    f: &Formula,
    sig: &Signature,
) -> Result<Vec<AtomAbstraction>, SolverError> {
    let problem = Problem::compile(f, sig)?;
    let k = problem.atoms.len();
    assert!(k < 24, "too many inequality atoms to enumerate guesses");
    let mut out = Vec::new();
    for ob in 0..sig.n_obs() {
        for h in 0..sig.n_hyp() {
            for mask in 0u32..(1 << k) {
                let polarity: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
                let truth = |i: usize| Tri::from(polarity[i]);
                if problem.skeleton.eval(h, ob, &truth) == Tri::True {
                    out.push(AtomAbstraction { h, ob, polarity });
                }
            }
        }
    }
    Ok(out)
}

// ---- compiled form ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum TermKind {
    Prior,
    Posterior,
    Weight(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Term {
    pub kind: TermKind,
    pub set: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct Atom {
    pub coeffs: Vec<(Rational, usize)>,
    /// The same linear form grouped by measure: for each kind, one
    /// coefficient per hypothesis.
    pub groups: Vec<(TermKind, Vec<Rational>)>,
    pub bound: Rational,
    pub coeffs_f64: Vec<(f64, usize)>,
    pub bound_f64: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tri {
    False,
    Unknown,
    True,
}

impl From<bool> for Tri {
    fn from(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

impl Tri {
    fn not(self) -> Self {
        match self {
            Tri::False => Tri::True,
            Tri::True => Tri::False,
            Tri::Unknown => Tri::Unknown,
        }
    }

    fn and(self, other: Tri) -> Self {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Skel {
    Hyp(usize),
    Obs(usize),
    Atom(usize),
    Not(Box<Skel>),
    And(Box<Skel>, Box<Skel>),
}

impl Skel {
    /// Kleene evaluation at hypothesis `h`, observation `ob`.
    pub fn eval(&self, h: usize, ob: usize, atom: &dyn Fn(usize) -> Tri) -> Tri {
        match self {
            Skel::Hyp(i) => Tri::from(*i == h),
            Skel::Obs(i) => Tri::from(*i == ob),
            Skel::Atom(i) => atom(*i),
            Skel::Not(a) => a.eval(h, ob, atom).not(),
            Skel::And(a, b) => a.eval(h, ob, atom).and(b.eval(h, ob, atom)),
        }
    }

    /// `(cost of making this true, cost of making it false)` given per-atom
    /// costs for each polarity.
    pub fn cost(&self, h: usize, ob: usize, atom: &dyn Fn(usize) -> (f64, f64)) -> (f64, f64) {
        match self {
            Skel::Hyp(i) => flag_cost(*i == h),
            Skel::Obs(i) => flag_cost(*i == ob),
            Skel::Atom(i) => atom(*i),
            Skel::Not(a) => {
                let (t, f) = a.cost(h, ob, atom);
                (f, t)
            }
            Skel::And(a, b) => {
                let (at, af) = a.cost(h, ob, atom);
                let (bt, bf) = b.cost(h, ob, atom);
                (at + bt, af.min(bf))
            }
        }
    }

    /// Fills `target` with a cheapest polarity assignment that makes the
    /// skeleton take value `want`; atoms left `None` are unconstrained.
    pub fn assign(
        &self,
        want: bool,
        h: usize,
        ob: usize,
        atom: &dyn Fn(usize) -> (f64, f64),
        target: &mut [Option<bool>],
    ) {
        match self {
            Skel::Hyp(_) | Skel::Obs(_) => {}
            Skel::Atom(i) => target[*i] = Some(want),
            Skel::Not(a) => a.assign(!want, h, ob, atom, target),
            Skel::And(a, b) => {
                if want {
                    a.assign(true, h, ob, atom, target);
                    b.assign(true, h, ob, atom, target);
                } else {
                    let (_, af) = a.cost(h, ob, atom);
                    let (_, bf) = b.cost(h, ob, atom);
                    if af <= bf {
                        a.assign(false, h, ob, atom, target);
                    } else {
                        b.assign(false, h, ob, atom, target);
                    }
                }
            }
        }
    }
}

fn flag_cost(holds: bool) -> (f64, f64) {
    if holds {
        (0.0, f64::INFINITY)
    } else {
        (f64::INFINITY, 0.0)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub n_h: usize,
    pub n_o: usize,
    pub sig: Signature,
    pub terms: Vec<Term>,
    pub atoms: Vec<Atom>,
    pub skeleton: Skel,
    pub uses_prior: bool,
    pub uses_posterior: bool,
    /// Observations whose weight column appears in some term.
    pub weight_obs: Vec<bool>,
}

impl Problem {
    pub fn compile(f: &Formula, sig: &Signature) -> Result<Self, SolverError> {
        f.check(sig)?;
        let lang = classify(f);
        if lang == Language::FirstOrder {
            return Err(SolverError::NotLinear(lang));
        }
        let mut c = Compiler {
            sig,
            terms: Vec::new(),
            term_index: HashMap::new(),
            atoms: Vec::new(),
            atom_index: HashMap::new(),
        };
        let skeleton = c.skel(f)?;
        let uses_prior = c.terms.iter().any(|t| t.kind == TermKind::Prior);
        let uses_posterior = c.terms.iter().any(|t| t.kind == TermKind::Posterior);
        let mut weight_obs = vec![false; sig.n_obs()];
        for t in &c.terms {
            if let TermKind::Weight(o) = t.kind {
                weight_obs[o] = true;
            }
        }
        Ok(Problem {
            n_h: sig.n_hyp(),
            n_o: sig.n_obs(),
            sig: sig.clone(),
            terms: c.terms,
            atoms: c.atoms,
            skeleton,
            uses_prior,
            uses_posterior,
            weight_obs,
        })
    }

    /// Whether the likelihood matrix influences any atom.
    pub fn likelihood_matters(&self) -> bool {
        self.uses_posterior || self.weight_obs.iter().any(|&b| b)
    }

    pub fn prior_matters(&self) -> bool {
        self.uses_prior || self.uses_posterior
    }

    /// Whether column `o` of the likelihood matrix influences atoms when the
    /// world's observation is `ob`.
    pub fn column_matters(&self, o: usize, ob: usize) -> bool {
        self.weight_obs[o] || (self.uses_posterior && o == ob)
    }

    /// Term values in floating point, or `None` where a ratio is undefined.
    pub fn term_values_f64(&self, lik: &[Vec<f64>], prior: &[f64], ob: usize) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let v = match t.kind {
                TermKind::Prior => t.set.iter().map(|&h| prior[h]).sum(),
                TermKind::Weight(o) => {
                    let total: f64 = lik.iter().map(|r| r[o]).sum();
                    if total <= 0.0 {
                        return None;
                    }
                    t.set.iter().map(|&h| lik[h][o]).sum::<f64>() / total
                }
                TermKind::Posterior => {
                    let total: f64 = (0..self.n_h).map(|h| prior[h] * lik[h][ob]).sum();
                    if total <= 0.0 {
                        return None;
                    }
                    t.set.iter().map(|&h| prior[h] * lik[h][ob]).sum::<f64>() / total
                }
            };
            out.push(v);
        }
        Some(out)
    }

    pub fn atom_values_f64(&self, terms: &[f64]) -> Vec<f64> {
        self.atoms
            .iter()
            .map(|a| a.coeffs_f64.iter().map(|(c, t)| c * terms[*t]).sum())
            .collect()
    }

    /// Builds and certifies a model from exact likelihoods and prior,
    /// trying every hypothesis.
    pub fn try_model(
        &self,
        f: &Formula,
        lik: Vec<Vec<Rational>>,
        prior: Vec<Rational>,
        ob: usize,
        hyps: impl IntoIterator<Item = usize>,
    ) -> Option<CandidateModel> {
        let space = EvidenceSpace::new(self.sig.clone(), lik).ok()?;
        let prior = Distribution::new(prior).ok()?;
        for h in hyps {
            let m = CandidateModel {
                space: space.clone(),
                prior: prior.clone(),
                h,
                ob,
            };
            if certify(f, &m) == Ok(true) {
                return Some(m);
            }
        }
        None
    }
}

struct Compiler<'a> {
    sig: &'a Signature,
    terms: Vec<Term>,
    term_index: HashMap<Term, usize>,
    atoms: Vec<Atom>,
    atom_index: HashMap<Inequality, usize>,
}

impl Compiler<'_> {
    fn skel(&mut self, f: &Formula) -> Result<Skel, SolverError> {
        Ok(match f {
            Formula::Hyp(name) => Skel::Hyp(
                self.sig
                    .hypothesis_index(name)
                    .ok_or_else(|| WellFormedError::UnknownHypothesis(name.clone()))?,
            ),
            Formula::Obs(name) => Skel::Obs(
                self.sig
                    .observation_index(name)
                    .ok_or_else(|| WellFormedError::UnknownObservation(name.clone()))?,
            ),
            Formula::Ineq(i) => Skel::Atom(self.atom(i)?),
            Formula::Not(a) => Skel::Not(Box::new(self.skel(a)?)),
            Formula::And(a, b) => Skel::And(Box::new(self.skel(a)?), Box::new(self.skel(b)?)),
            Formula::Forall(..) => return Err(SolverError::NotLinear(Language::FirstOrder)),
        })
    }

    fn atom(&mut self, i: &Inequality) -> Result<usize, SolverError> {
        if let Some(&k) = self.atom_index.get(i) {
            return Ok(k);
        }
        let mut merged: Vec<(Rational, usize)> = Vec::new();
        for m in &i.lhs.monomials {
            let [Factor::Basic(b)] = m.factors.as_slice() else {
                return Err(SolverError::NotLinear(Language::FirstOrder));
            };
            let t = self.term(b)?;
            match merged.iter_mut().find(|(_, k)| *k == t) {
                Some((c, _)) => *c += &m.coeff,
                None => merged.push((m.coeff.clone(), t)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        let mut groups: Vec<(TermKind, Vec<Rational>)> = Vec::new();
        for (c, t) in &merged {
            let term = &self.terms[*t];
            let pos = match groups.iter().position(|(k, _)| *k == term.kind) {
                Some(pos) => pos,
                None => {
                    groups.push((term.kind, vec![Rational::zero(); self.sig.n_hyp()]));
                    groups.len() - 1
                }
            };
            for &h in &term.set {
                groups[pos].1[h] += c;
            }
        }
        let atom = Atom {
            groups,
            coeffs_f64: merged.iter().map(|(c, t)| (to_f64(c), *t)).collect(),
            bound_f64: to_f64(&i.bound),
            coeffs: merged,
            bound: i.bound.clone(),
        };
        self.atoms.push(atom);
        self.atom_index.insert(i.clone(), self.atoms.len() - 1);
        Ok(self.atoms.len() - 1)
    }

    fn term(&mut self, b: &BasicTerm) -> Result<usize, SolverError> {
        let set: HypothesisSet = b.hyp().denote(self.sig)?;
        let kind = match b {
            BasicTerm::Prior(_) => TermKind::Prior,
            BasicTerm::Posterior(_) => TermKind::Posterior,
            BasicTerm::Weight(o, _) => TermKind::Weight(
                self.sig
                    .observation_index(o)
                    .ok_or_else(|| WellFormedError::UnknownObservation(o.clone()))?,
            ),
        };
        let term = Term {
            kind,
            set: set.iter().collect(),
        };
        if let Some(&k) = self.term_index.get(&term) {
            return Ok(k);
        }
        self.terms.push(term.clone());
        self.term_index.insert(term, self.terms.len() - 1);
        Ok(self.terms.len() - 1)
    }
}

pub(crate) fn to_f64(q: &Rational) -> f64 {
    ToPrimitive::to_f64(q).unwrap_or(if q.is_neg() { f64::MIN } else { f64::MAX })
}
