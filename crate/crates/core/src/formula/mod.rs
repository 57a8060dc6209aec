//! Abstract syntax of the evidence logic.
//!
//! Three nested languages share one AST:
//!
//! * hypothesis formulas ([`HypFormula`]) built from hypothesis names,
//!   `true`, negation and conjunction;
//! * the full first-order language ([`Formula`]) with hypothesis and
//!   observation atoms, polynomial inequality atoms `p >= a`, negation,
//!   conjunction and universal quantification over real variables;
//! * its quantifier-free, variable-free linear fragment.
//!
//! Disjunction, implication, `exists`, and the comparison operators other
//! than `>=` are sugar. They are expanded by the parser and never appear in
//! the tree; [`classify`] reports the smallest language a formula lives in.

mod lexer;
mod parser;
mod render;

use std::collections::BTreeSet;

use num_rational::BigRational;

pub use lexer::{is_reserved, RESERVED};
pub use parser::{parse, parse_hyp, parse_term, ParseError, ParseErrorKind};

pub type Rational = BigRational;

/// Hypothesis and observation names of a language instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    hypotheses: Vec<String>,
    observations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("signature needs at least one hypothesis and one observation")]
    Empty,
    #[error("name {0:?} appears more than once")]
    Duplicate(String),
    #[error("{0:?} is not a valid name")]
    BadName(String),
}

impl Signature {
    pub fn new<S: Into<String>>(
        hypotheses: impl IntoIterator<Item = S>,
        observations: impl IntoIterator<Item = S>,
    ) -> Result<Self, SignatureError> {
        let hypotheses: Vec<String> = hypotheses.into_iter().map(Into::into).collect();
        let observations: Vec<String> = observations.into_iter().map(Into::into).collect();
        if hypotheses.is_empty() || observations.is_empty() {
            return Err(SignatureError::Empty);
        }
        let mut seen = BTreeSet::new();
        for name in hypotheses.iter().chain(&observations) {
            if !lexer::is_identifier(name) || is_reserved(name) {
                return Err(SignatureError::BadName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(SignatureError::Duplicate(name.clone()));
            }
        }
        Ok(Signature {
            hypotheses,
            observations,
        })
    }

    /// `h1..h{n_h}` and `ob1..ob{n_o}`.
    pub fn numbered(n_h: usize, n_o: usize) -> Result<Self, SignatureError> {
        Signature::new(
            (1..=n_h).map(|i| format!("h{i}")),
            (1..=n_o).map(|i| format!("ob{i}")),
        )
    }

    pub fn hypotheses(&self) -> &[String] {
        &self.hypotheses
    }

    pub fn observations(&self) -> &[String] {
        &self.observations
    }

    pub fn n_hyp(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn n_obs(&self) -> usize {
        self.observations.len()
    }

    pub fn hypothesis_index(&self, name: &str) -> Option<usize> {
        self.hypotheses.iter().position(|h| h == name)
    }

    pub fn observation_index(&self, name: &str) -> Option<usize> {
        self.observations.iter().position(|o| o == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.hypothesis_index(name).is_some() || self.observation_index(name).is_some()
    }
}

/// A formula of the hypothesis sublanguage (the `ρ` inside basic terms).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HypFormula {
    True,
    Atom(String),
    Not(Box<HypFormula>),
    And(Box<HypFormula>, Box<HypFormula>),
}

impl HypFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        HypFormula::Atom(name.into())
    }

    pub fn not(self) -> Self {
        HypFormula::Not(Box::new(self))
    }

    pub fn and(self, other: HypFormula) -> Self {
        HypFormula::And(Box::new(self), Box::new(other))
    }

    /// `¬(¬a ∧ ¬b)`.
    pub fn or(self, other: HypFormula) -> Self {
        self.not().and(other.not()).not()
    }

    /// Atom names in order of first occurrence.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            HypFormula::True => {}
            HypFormula::Atom(a) => {
                if !out.contains(&a.as_str()) {
                    out.push(a);
                }
            }
            HypFormula::Not(x) => x.collect_atoms(out),
            HypFormula::And(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Truth value under an assignment to atom names.
    pub fn eval_with(&self, truth: &dyn Fn(&str) -> bool) -> bool {
        match self {
            HypFormula::True => true,
            HypFormula::Atom(a) => truth(a),
            HypFormula::Not(x) => !x.eval_with(truth),
            HypFormula::And(a, b) => a.eval_with(truth) && b.eval_with(truth),
        }
    }

    /// Set of hypothesis indices the formula denotes: `⟦true⟧` is everything,
    /// an atom denotes itself, negation is complement, conjunction intersection.
    pub fn denote(&self, sig: &Signature) -> Result<HypothesisSet, WellFormedError> {
        self.check(sig)?;
        let members = sig
            .hypotheses()
            .iter()
            .map(|h| self.eval_with(&|a| a == h))
            .collect();
        Ok(HypothesisSet { members })
    }

    pub fn check(&self, sig: &Signature) -> Result<(), WellFormedError> {
        for a in self.atoms() {
            if sig.hypothesis_index(a).is_none() {
                return Err(WellFormedError::UnknownHypothesis(a.to_string()));
            }
        }
        Ok(())
    }

    /// Truth-table check that `self ⇔ other` holds under every assignment to
    /// the atoms of both formulas (atoms treated as independent propositions).
    pub fn equivalent(&self, other: &HypFormula) -> bool {
        let mut atoms = self.atoms();
        for a in other.atoms() {
            if !atoms.contains(&a) {
                atoms.push(a);
            }
        }
        if atoms.len() > 24 {
            return false;
        }
        (0u64..(1 << atoms.len())).all(|bits| {
            let truth = |name: &str| {
                let i = atoms.iter().position(|a| *a == name).unwrap_or(0);
                bits >> i & 1 == 1
            };
            self.eval_with(&truth) == other.eval_with(&truth)
        })
    }
}

/// A set of hypotheses, as a membership mask over signature order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HypothesisSet {
    members: Vec<bool>,
}

impl HypothesisSet {
    pub fn from_mask(members: Vec<bool>) -> Self {
        HypothesisSet { members }
    }

    pub fn from_indices(n_hyp: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut members = vec![false; n_hyp];
        for i in indices {
            members[i] = true;
        }
        HypothesisSet { members }
    }

    pub fn all(n_hyp: usize) -> Self {
        HypothesisSet {
            members: vec![true; n_hyp],
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.get(i).copied().unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, m)| **m)
            .map(|(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|m| **m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn complement(&self) -> Self {
        HypothesisSet {
            members: self.members.iter().map(|m| !m).collect(),
        }
    }
}

/// `Pr0(ρ)`, `Pr(ρ)` or `we(ob, ρ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicTerm {
    Prior(HypFormula),
    Posterior(HypFormula),
    Weight(String, HypFormula),
}

impl BasicTerm {
    pub fn hyp(&self) -> &HypFormula {
        match self {
            BasicTerm::Prior(r) | BasicTerm::Posterior(r) | BasicTerm::Weight(_, r) => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Basic(BasicTerm),
    Var(String),
}

/// `coeff * f1 * f2 * ...` with at least one factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: Rational,
    pub factors: Vec<Factor>,
}

impl Monomial {
    pub fn new(coeff: Rational, factors: Vec<Factor>) -> Self {
        Monomial { coeff, factors }
    }

    pub fn basic(coeff: Rational, term: BasicTerm) -> Self {
        Monomial {
            coeff,
            factors: vec![Factor::Basic(term)],
        }
    }

    /// Exactly one factor, and it is a basic term.
    pub fn is_linear(&self) -> bool {
        matches!(self.factors.as_slice(), [Factor::Basic(_)])
    }

    pub fn negated(&self) -> Self {
        Monomial {
            coeff: -self.coeff.clone(),
            factors: self.factors.clone(),
        }
    }
}

/// Sum of monomials. Constants never appear here: they live on the bound
/// side of an [`Inequality`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    pub monomials: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(monomials: Vec<Monomial>) -> Self {
        Polynomial { monomials }
    }

    pub fn is_linear(&self) -> bool {
        self.monomials.iter().all(Monomial::is_linear)
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn negated(&self) -> Self {
        Polynomial {
            monomials: self.monomials.iter().map(Monomial::negated).collect(),
        }
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        self.factors()
            .filter_map(|f| match f {
                Factor::Var(v) => Some(v.as_str()),
                Factor::Basic(_) => None,
            })
            .collect()
    }

    pub fn basic_terms(&self) -> impl Iterator<Item = &BasicTerm> {
        self.factors().filter_map(|f| match f {
            Factor::Basic(b) => Some(b),
            Factor::Var(_) => None,
        })
    }

    fn factors(&self) -> impl Iterator<Item = &Factor> {
        self.monomials.iter().flat_map(|m| m.factors.iter())
    }

    pub fn check(&self, sig: &Signature) -> Result<(), WellFormedError> {
        for m in &self.monomials {
            if m.factors.is_empty() {
                return Err(WellFormedError::ConstantMonomial);
            }
            for f in &m.factors {
                match f {
                    Factor::Var(v) => {
                        if sig.contains(v) || is_reserved(v) || !lexer::is_identifier(v) {
                            return Err(WellFormedError::BadVariable(v.clone()));
                        }
                    }
                    Factor::Basic(b) => {
                        if let BasicTerm::Weight(ob, _) = b {
                            if sig.observation_index(ob).is_none() {
                                return Err(WellFormedError::UnknownObservation(ob.clone()));
                            }
                        }
                        b.hyp().check(sig)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// `lhs >= bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub lhs: Polynomial,
    pub bound: Rational,
}

impl Inequality {
    pub fn new(lhs: Polynomial, bound: Rational) -> Self {
        Inequality { lhs, bound }
    }

    /// The reversed inequality `-lhs >= -bound`.
    pub fn flipped(&self) -> Self {
        Inequality {
            lhs: self.lhs.negated(),
            bound: -self.bound.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Hyp(String),
    Obs(String),
    Ineq(Inequality),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    /// `¬(¬a ∧ ¬b)`.
    pub fn or(self, other: Formula) -> Self {
        self.not().and(other.not()).not()
    }

    /// `¬(a ∧ ¬b)`.
    pub fn implies(self, other: Formula) -> Self {
        self.and(other.not()).not()
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(body))
    }

    /// `¬∀x¬φ`.
    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::forall(var, body.not()).not()
    }

    pub fn geq(lhs: Polynomial, bound: Rational) -> Self {
        Formula::Ineq(Inequality::new(lhs, bound))
    }

    /// `(p >= a) ∧ (-p >= -a)`.
    pub fn equation(lhs: Polynomial, bound: Rational) -> Self {
        let ge = Inequality::new(lhs, bound);
        let le = ge.flipped();
        Formula::Ineq(ge).and(Formula::Ineq(le))
    }

    /// If this is `¬(a ∧ ¬b)` (or the double-negated `¬(¬¬a ∧ ¬b)` that
    /// `¬a ∨ b` expands to), returns `(a, b)`.
    pub fn as_implication(&self) -> Option<(&Formula, &Formula)> {
        let Formula::Not(inner) = self else {
            return None;
        };
        let Formula::And(a, nb) = inner.as_ref() else {
            return None;
        };
        let Formula::Not(b) = nb.as_ref() else {
            return None;
        };
        if let Formula::Not(na) = a.as_ref() {
            if let Formula::Not(a2) = na.as_ref() {
                return Some((a2, b));
            }
        }
        Some((a, b))
    }

    /// If this is `(p >= a) ∧ (-p >= -a)`, returns `(p, a)`.
    pub fn as_equation(&self) -> Option<(&Polynomial, &Rational)> {
        let Formula::And(l, r) = self else {
            return None;
        };
        match (l.as_ref(), r.as_ref()) {
            (Formula::Ineq(ge), Formula::Ineq(le)) if *le == ge.flipped() => {
                Some((&ge.lhs, &ge.bound))
            }
            _ => None,
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Hyp(_) | Formula::Obs(_) => {}
            Formula::Ineq(i) => {
                for v in i.lhs.variables() {
                    if !bound.iter().any(|b| b == v) {
                        out.insert(v.to_string());
                    }
                }
            }
            Formula::Not(x) => x.collect_free(bound, out),
            Formula::And(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            Formula::Forall(..) => true,
            Formula::Not(x) => x.has_quantifier(),
            Formula::And(a, b) => a.has_quantifier() || b.has_quantifier(),
            _ => false,
        }
    }

    /// Inequality atoms in order of first occurrence, without duplicates.
    pub fn inequalities(&self) -> Vec<&Inequality> {
        let mut out: Vec<&Inequality> = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Ineq(i) = f {
                if !out.contains(&i) {
                    out.push(i);
                }
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut dyn FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Not(x) | Formula::Forall(_, x) => x.visit(f),
            Formula::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn basic_terms(&self) -> Vec<&BasicTerm> {
        let mut out = Vec::new();
        for i in self.inequalities() {
            out.extend(i.lhs.basic_terms());
        }
        out
    }

    pub fn mentions_posterior(&self) -> bool {
        self.basic_terms()
            .iter()
            .any(|b| matches!(b, BasicTerm::Posterior(_)))
    }

    /// Well-formedness against a signature: atoms name the right kind of
    /// primitive proposition, `we` names an observation, variables avoid
    /// signature and reserved names, monomials have at least one factor.
    pub fn check(&self, sig: &Signature) -> Result<(), WellFormedError> {
        match self {
            Formula::Hyp(h) => match sig.hypothesis_index(h) {
                Some(_) => Ok(()),
                None => Err(WellFormedError::UnknownHypothesis(h.clone())),
            },
            Formula::Obs(o) => match sig.observation_index(o) {
                Some(_) => Ok(()),
                None => Err(WellFormedError::UnknownObservation(o.clone())),
            },
            Formula::Ineq(i) => i.lhs.check(sig),
            Formula::Not(x) => x.check(sig),
            Formula::And(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
            Formula::Forall(v, body) => {
                if sig.contains(v) || is_reserved(v) || !lexer::is_identifier(v) {
                    return Err(WellFormedError::BadVariable(v.clone()));
                }
                body.check(sig)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WellFormedError {
    #[error("unknown hypothesis {0:?}")]
    UnknownHypothesis(String),
    #[error("unknown observation {0:?}")]
    UnknownObservation(String),
    #[error("{0:?} cannot be used as a variable")]
    BadVariable(String),
    #[error("monomial without factors")]
    ConstantMonomial,
}

/// The three nested languages, smallest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Language {
    /// Hypothesis atoms under `~` and `&` only.
    Hypothesis,
    /// Quantifier-free, variable-free, linear.
    Propositional,
    /// Everything else.
    FirstOrder,
}

impl Language {
    pub fn name(self) -> &'static str {
        match self {
            Language::Hypothesis => "L_h",
            Language::Propositional => "L^ev",
            Language::FirstOrder => "L^fo-ev",
        }
    }
}

impl std::fmt::Display for Language {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Smallest language containing `f`.
pub fn classify(f: &Formula) -> Language {
    fn only_hyp(f: &Formula) -> bool {
        match f {
            Formula::Hyp(_) => true,
            Formula::Not(x) => only_hyp(x),
            Formula::And(a, b) => only_hyp(a) && only_hyp(b),
            _ => false,
        }
    }
    if only_hyp(f) {
        return Language::Hypothesis;
    }
    let propositional = !f.has_quantifier()
        && f.inequalities()
            .iter()
            .all(|i| i.lhs.is_linear() && i.lhs.variables().is_empty());
    if propositional {
        Language::Propositional
    } else {
        Language::FirstOrder
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn sig() -> Signature {
        Signature::numbered(2, 2).unwrap()
    }

    #[test]
    fn signature_invariants() {
        assert_eq!(
            Signature::new(Vec::<String>::new(), vec!["o".into()]),
            Err(SignatureError::Empty)
        );
        assert_eq!(
            Signature::new(["a", "b"], ["a"]),
            Err(SignatureError::Duplicate("a".into()))
        );
        assert_eq!(
            Signature::new(["a", "a"], ["o"]),
            Err(SignatureError::Duplicate("a".into()))
        );
        assert_eq!(
            Signature::new(["true"], ["o"]),
            Err(SignatureError::BadName("true".into()))
        );
        assert_eq!(
            Signature::new(["Pr"], ["o"]),
            Err(SignatureError::BadName("Pr".into()))
        );
        assert!(Signature::new(["fair", "doubleheaded"], ["heads[100]"]).is_ok());
    }

    #[test]
    fn classify_examples() {
        let s = sig();
        let c = |t: &str| classify(&parse(t, &s).unwrap());
        assert_eq!(c("h1 | h2"), Language::Hypothesis);
        assert_eq!(
            c("Pr0(h1) + 3*we(ob1,h1) + 5*Pr(h1) >= 7"),
            Language::Propositional
        );
        assert_eq!(c("Pr(h1)*Pr0(h1) >= 0"), Language::FirstOrder);
        assert_eq!(c("forall x (x * Pr(h1) >= 0)"), Language::FirstOrder);
        assert_eq!(c("ob1 & h1"), Language::Propositional);
        assert_eq!(c("x*Pr(h1) >= 0"), Language::FirstOrder);
    }

    #[test]
    fn classify_is_monotone_under_extension() {
        let s = sig();
        let base = parse("Pr0(h1) >= 1/2 & h2", &s).unwrap();
        let quantified = Formula::forall("y", base.clone());
        let nonlinear = base.clone().and(parse("Pr(h1)*Pr(h2) >= 0", &s).unwrap());
        assert!(classify(&quantified) >= classify(&base));
        assert!(classify(&nonlinear) >= classify(&base));
        assert_eq!(classify(&quantified), Language::FirstOrder);
    }

    #[test]
    fn denotation() {
        let s = Signature::new(["fair", "doubleheaded"], ["heads"]).unwrap();
        let d = |t: &str| -> Vec<usize> {
            parse_hyp(t, &s)
                .unwrap()
                .denote(&s)
                .unwrap()
                .iter()
                .collect()
        };
        assert_eq!(d("true"), vec![0, 1]);
        assert_eq!(d("~fair"), vec![1]);
        assert_eq!(d("fair & ~fair"), Vec::<usize>::new());
        assert_eq!(d("fair | doubleheaded"), vec![0, 1]);
    }

    #[test]
    fn tautology_check() {
        let s = sig();
        let p = |t: &str| parse_hyp(t, &s).unwrap();
        assert!(p("h1 & h2").equivalent(&p("h2 & h1")));
        assert!(p("~~h1").equivalent(&p("h1")));
        assert!(p("h1 | ~h1").equivalent(&p("true")));
        // h1 | h2 is not a propositional tautology even though it is valid
        // under "exactly one hypothesis holds".
        assert!(!p("h1 | h2").equivalent(&p("true")));
    }

    #[test]
    fn free_variables_respect_binding() {
        let s = sig();
        let f = parse("forall x (x*Pr(h1) + y >= 0)", &s);
        // a bare variable is a monomial with a single variable factor
        let f = f.unwrap();
        assert_eq!(
            f.free_variables().into_iter().collect::<Vec<_>>(),
            vec!["y".to_string()]
        );
        assert!(!f.is_closed());
    }

    #[test]
    fn implication_and_equation_views() {
        let s = sig();
        let f = parse("h1 => ~h2", &s).unwrap();
        let (a, b) = f.as_implication().unwrap();
        assert_eq!(a, &Formula::Hyp("h1".into()));
        assert_eq!(b, &Formula::Hyp("h2".into()).not());
        let g = parse("~h1 | ~h2", &s).unwrap();
        assert_eq!(g.as_implication().unwrap().0, &Formula::Hyp("h1".into()));
        let e = parse("Pr(true) = 1", &s).unwrap();
        let (p, a) = e.as_equation().unwrap();
        assert_eq!(p.monomials.len(), 1);
        assert_eq!(a, &Rational::one());
        assert!(parse("Pr(h1) >= 1", &s).unwrap().as_equation().is_none());
    }
}
