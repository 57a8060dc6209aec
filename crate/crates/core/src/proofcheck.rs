//! Axiom-schema recognition and Hilbert-style derivation checking.
//!
//! Schema matching is syntactic on the parsed tree. The two open-ended
//! schemas are replaced by decidable, sound fragments:
//!
//! * `Taut` accepts formulas whose boolean skeleton is a propositional
//!   tautology, treating inequality atoms, hypothesis and observation atoms
//!   and quantified subformulas as opaque propositions;
//! * `Ineq` accepts constant comparisons that evaluate to true, and linear
//!   implications `φ1 ∧ … ∧ φk ⇒ ψ` whose validity over the reals is
//!   witnessed by a verified LP certificate, with every distinct factor
//!   treated as an unconstrained real.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::formula::{
    parse, BasicTerm, Factor, Formula, HypFormula, Inequality, Polynomial, Rational, Signature,
};
use crate::lp::{Program, ProgramOutcome, Rel};
use crate::scalar::Scalar;

/// Most distinct atoms a `Taut` skeleton may have before the truth table
/// is declared too large.
const MAX_SKELETON_ATOMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomId {
    Taut,
    Ineq,
    H1,
    H2,
    O1,
    O2,
    Pr1,
    Pr2,
    Pr3,
    Pr4,
    Po1,
    Po2,
    Po3,
    Po4,
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
}

impl AxiomId {
    pub const ALL: [AxiomId; 20] = [
        AxiomId::Taut,
        AxiomId::Ineq,
        AxiomId::H1,
        AxiomId::H2,
        AxiomId::O1,
        AxiomId::O2,
        AxiomId::Pr1,
        AxiomId::Pr2,
        AxiomId::Pr3,
        AxiomId::Pr4,
        AxiomId::Po1,
        AxiomId::Po2,
        AxiomId::Po3,
        AxiomId::Po4,
        AxiomId::E1,
        AxiomId::E2,
        AxiomId::E3,
        AxiomId::E4,
        AxiomId::E5,
        AxiomId::E6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::Taut => "Taut",
            AxiomId::Ineq => "Ineq",
            AxiomId::H1 => "H1",
            AxiomId::H2 => "H2",
            AxiomId::O1 => "O1",
            AxiomId::O2 => "O2",
            AxiomId::Pr1 => "Pr1",
            AxiomId::Pr2 => "Pr2",
            AxiomId::Pr3 => "Pr3",
            AxiomId::Pr4 => "Pr4",
            AxiomId::Po1 => "Po1",
            AxiomId::Po2 => "Po2",
            AxiomId::Po3 => "Po3",
            AxiomId::Po4 => "Po4",
            AxiomId::E1 => "E1",
            AxiomId::E2 => "E2",
            AxiomId::E3 => "E3",
            AxiomId::E4 => "E4",
            AxiomId::E5 => "E5",
            AxiomId::E6 => "E6",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown axiom {0:?}")]
pub struct UnknownAxiom(pub String);

impl FromStr for AxiomId {
    type Err = UnknownAxiom;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownAxiom(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Justification {
    Axiom(AxiomId),
    /// Modus ponens from the lines holding `φ` and `φ ⇒ ψ`, 1-based.
    Mp(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofLine {
    pub formula: Formula,
    pub by: Justification,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Proof {
    pub lines: Vec<ProofLine>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofVerdict {
    Accepted,
    /// `line` is 1-based.
    Rejected {
        line: usize,
        reason: String,
    },
}

impl ProofVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, ProofVerdict::Accepted)
    }
}

impl fmt::Display for ProofVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofVerdict::Accepted => f.write_str("accepted"),
            ProofVerdict::Rejected { line, reason } => {
                write!(f, "rejected at line {line}: {reason}")
            }
        }
    }
}

/// Whether `f` is an instance of schema `id` over `sig`. Ill-formed
/// formulas are never instances.
pub fn match_axiom(f: &Formula, id: AxiomId, sig: &Signature) -> bool {
    if f.check(sig).is_err() {
        return false;
    }
    match id {
        AxiomId::Taut => is_tautology(f),
        AxiomId::Ineq => is_constant_truth(f) || linear_implication_valid(f),
        AxiomId::H1 => *f == canonical_h1(sig),
        AxiomId::O1 => *f == canonical_o1(sig),
        AxiomId::H2 => exclusion(f, sig.hypotheses()),
        AxiomId::O2 => exclusion(f, sig.observations()),
        AxiomId::Pr1 => measure_axiom(f, 1, Measure::Prior, sig),
        AxiomId::Pr2 => measure_axiom(f, 2, Measure::Prior, sig),
        AxiomId::Pr3 => measure_axiom(f, 3, Measure::Prior, sig),
        AxiomId::Pr4 => measure_axiom(f, 4, Measure::Prior, sig),
        AxiomId::Po1 => measure_axiom(f, 1, Measure::Posterior, sig),
        AxiomId::Po2 => measure_axiom(f, 2, Measure::Posterior, sig),
        AxiomId::Po3 => measure_axiom(f, 3, Measure::Posterior, sig),
        AxiomId::Po4 => measure_axiom(f, 4, Measure::Posterior, sig),
        AxiomId::E1 => measure_axiom(f, 1, Measure::Weight, sig),
        AxiomId::E2 => measure_axiom(f, 2, Measure::Weight, sig),
        AxiomId::E3 => measure_axiom(f, 3, Measure::Weight, sig),
        AxiomId::E4 => measure_axiom(f, 4, Measure::Weight, sig),
        AxiomId::E5 => sig.observations().iter().any(|ob| {
            sig.hypotheses()
                .iter()
                .any(|h| *f == canonical_e5(sig, ob, h))
        }),
        AxiomId::E6 => match_e6(f, sig),
    }
}

/// Checks every line in order. Axiom lines must match their schema; an
/// `Mp(i, j)` line must have line `j` equal to `line i ⇒ this line`.
pub fn check_proof(p: &Proof, sig: &Signature) -> ProofVerdict {
    for (k, line) in p.lines.iter().enumerate() {
        let n = k + 1;
        let reject = |reason: String| ProofVerdict::Rejected { line: n, reason };
        if let Err(e) = line.formula.check(sig) {
            return reject(format!("ill-formed: {e}"));
        }
        match line.by {
            Justification::Axiom(id) => {
                if !match_axiom(&line.formula, id, sig) {
                    return reject(format!("not an instance of {id}"));
                }
            }
            Justification::Mp(i, j) => {
                if i == 0 || j == 0 {
                    return reject("line numbers start at 1".into());
                }
                if i >= n || j >= n {
                    return reject("forward reference".into());
                }
                let premise = &p.lines[i - 1].formula;
                let expected = premise.clone().implies(line.formula.clone());
                if p.lines[j - 1].formula != expected {
                    return reject(format!(
                        "line {j} is not the implication from line {i} to this line"
                    ));
                }
            }
        }
    }
    ProofVerdict::Accepted
}

/// Parses every line and checks the result. A line that does not parse is
/// rejected with the parse error as the reason.
pub fn check_proof_text(lines: &[(String, Justification)], sig: &Signature) -> ProofVerdict {
    let mut proof = Proof::default();
    for (k, (text, by)) in lines.iter().enumerate() {
        match parse(text, sig) {
            Ok(formula) => proof.lines.push(ProofLine { formula, by: *by }),
            Err(e) => {
                return ProofVerdict::Rejected {
                    line: k + 1,
                    reason: format!("parse error: {e}"),
                }
            }
        }
    }
    check_proof(&proof, sig)
}

// ---- canonical instances ----

fn parse_generated(text: &str, sig: &Signature) -> Formula {
    parse(text, sig).unwrap_or_else(|e| panic!("generated axiom {text:?} does not parse: {e}"))
}

/// `h1 ∨ … ∨ h_n` in signature order.
pub fn canonical_h1(sig: &Signature) -> Formula {
    parse_generated(&sig.hypotheses().join(" | "), sig)
}

/// `ob1 ∨ … ∨ ob_n` in signature order.
pub fn canonical_o1(sig: &Signature) -> Formula {
    parse_generated(&sig.observations().join(" | "), sig)
}

/// The prior/posterior link for observation `ob` and hypothesis `h`.
pub fn canonical_e5(sig: &Signature, ob: &str, h: &str) -> Formula {
    let sum: Vec<String> = sig
        .hypotheses()
        .iter()
        .map(|hi| format!("Pr({h})*Pr0({hi})*we({ob}, {hi})"))
        .collect();
    parse_generated(
        &format!("{ob} => (Pr0({h})*we({ob}, {h}) = {})", sum.join(" + ")),
        sig,
    )
}

/// The realizability axiom with bound variables `vars` (one per
/// observation). `None` if the names clash with the signature or repeat.
pub fn canonical_e6_with(sig: &Signature, vars: &[String]) -> Option<Formula> {
    if vars.len() != sig.n_obs() {
        return None;
    }
    let mut body: Vec<String> = vars.iter().map(|x| format!("{x} >= 0")).collect();
    for h in sig.hypotheses() {
        let row: Vec<String> = sig
            .observations()
            .iter()
            .zip(vars)
            .map(|(ob, x)| format!("we({ob}, {h})*{x}"))
            .collect();
        body.push(format!("{} = 1", row.join(" + ")));
    }
    let prefix: String = vars.iter().map(|x| format!("exists {x} ")).collect();
    let f = parse(&format!("{prefix}({})", body.join(" & ")), sig).ok()?;
    let mut seen = vars.to_vec();
    seen.sort();
    seen.dedup();
    (seen.len() == vars.len()).then_some(f)
}

/// The realizability axiom with variables `x1 … x_n`.
pub fn canonical_e6(sig: &Signature) -> Formula {
    let mut vars = Vec::new();
    let mut k = 1;
    while vars.len() < sig.n_obs() {
        let v = format!("x{k}");
        if !sig.contains(&v) {
            vars.push(v);
        }
        k += 1;
    }
    canonical_e6_with(sig, &vars).expect("fresh variable names")
}

/// E6 up to the names of its bound variables.
fn match_e6(f: &Formula, sig: &Signature) -> bool {
    let mut vars = Vec::new();
    let mut cur = f;
    // `exists x φ` is `¬∀x¬φ`.
    while let Formula::Not(inner) = cur {
        let Formula::Forall(x, body) = inner.as_ref() else {
            break;
        };
        let Formula::Not(next) = body.as_ref() else {
            break;
        };
        vars.push(x.clone());
        cur = next;
    }
    canonical_e6_with(sig, &vars).is_some_and(|g| g == *f)
}

/// `a ⇒ ¬b` for distinct names `a`, `b` of the list.
fn exclusion(f: &Formula, names: &[String]) -> bool {
    let Some((lhs, rhs)) = f.as_implication() else {
        return false;
    };
    let atom = |g: &Formula| match g {
        Formula::Hyp(n) | Formula::Obs(n) => Some(n.clone()),
        _ => None,
    };
    let Formula::Not(rhs) = rhs else {
        return false;
    };
    let (Some(a), Some(b)) = (atom(lhs), atom(rhs)) else {
        return false;
    };
    if a == b || !names.contains(&a) || !names.contains(&b) {
        return false;
    }
    *f == lhs.clone().implies(rhs.as_ref().clone().not())
}

// ---- probability and weight schemas ----

#[derive(Clone, Copy, PartialEq, Eq)]
enum Measure {
    Prior,
    Posterior,
    Weight,
}

/// Single-factor monomials of `poly` as `(coeff, ob, ρ)` for the given
/// measure, or `None` if any monomial has another shape.
fn measure_terms(
    poly: &Polynomial,
    measure: Measure,
) -> Option<Vec<(Rational, Option<String>, HypFormula)>> {
    poly.monomials
        .iter()
        .map(|m| {
            let [Factor::Basic(t)] = m.factors.as_slice() else {
                return None;
            };
            let (ob, rho) = match (measure, t) {
                (Measure::Prior, BasicTerm::Prior(r)) => (None, r),
                (Measure::Posterior, BasicTerm::Posterior(r)) => (None, r),
                (Measure::Weight, BasicTerm::Weight(ob, r)) => (Some(ob.clone()), r),
                _ => return None,
            };
            Some((m.coeff.clone(), ob, rho.clone()))
        })
        .collect()
}

fn measure_axiom(f: &Formula, which: u8, measure: Measure, sig: &Signature) -> bool {
    let (poly, bound) = match (which, f) {
        (2, Formula::Ineq(Inequality { lhs, bound })) => (lhs, bound),
        (2, _) => return false,
        _ => match f.as_equation() {
            Some(eq) => eq,
            None => return false,
        },
    };
    let Some(terms) = measure_terms(poly, measure) else {
        return false;
    };
    let Some(first) = terms.first() else {
        return false;
    };
    let ob = first.1.clone();
    if terms.iter().any(|t| t.1 != ob) {
        return false;
    }
    if let Some(ob) = &ob {
        if sig.observation_index(ob).is_none() {
            return false;
        }
    }
    let one = Rational::one();
    let minus_one = -Rational::one();
    match (which, terms.as_slice()) {
        (1, [(c, _, HypFormula::True)]) => c.is_one() && bound.is_one(),
        (2, [(c, _, _)]) => c.is_one() && bound.is_zero(),
        (3, [(c1, _, HypFormula::And(a, b)), (c2, _, HypFormula::And(a2, nb)), (c3, _, a3)]) => {
            *c1 == one
                && *c2 == one
                && *c3 == minus_one
                && bound.is_zero()
                && a == a2
                && **a == *a3
                && **nb == b.as_ref().clone().not()
        }
        (4, [(c1, _, r1), (c2, _, r2)]) => {
            *c1 == one && *c2 == minus_one && bound.is_zero() && r1.equivalent(r2)
        }
        _ => false,
    }
}

// ---- Taut ----

/// Opaque propositions of the boolean skeleton, in first-occurrence order.
fn skeleton_atoms<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::Not(g) => skeleton_atoms(g, out),
        Formula::And(a, b) => {
            skeleton_atoms(a, out);
            skeleton_atoms(b, out);
        }
        _ => {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
}

fn eval_skeleton(f: &Formula, atoms: &[&Formula], bits: u64) -> bool {
    match f {
        Formula::Not(g) => !eval_skeleton(g, atoms, bits),
        Formula::And(a, b) => eval_skeleton(a, atoms, bits) && eval_skeleton(b, atoms, bits),
        _ => {
            let i = atoms.iter().position(|a| *a == f).expect("collected atom");
            bits >> i & 1 == 1
        }
    }
}

fn is_tautology(f: &Formula) -> bool {
    let mut atoms = Vec::new();
    skeleton_atoms(f, &mut atoms);
    if atoms.len() > MAX_SKELETON_ATOMS {
        return false;
    }
    (0u64..1 << atoms.len()).all(|bits| eval_skeleton(f, &atoms, bits))
}

// ---- Ineq ----

/// A boolean combination of variable-free comparisons that evaluates to
/// true.
fn is_constant_truth(f: &Formula) -> bool {
    fn eval(f: &Formula) -> Option<bool> {
        match f {
            Formula::Ineq(i) if i.lhs.is_empty() => Some(Rational::zero() >= i.bound),
            Formula::Not(g) => eval(g).map(|b| !b),
            Formula::And(a, b) => Some(eval(a)? & eval(b)?),
            _ => None,
        }
    }
    eval(f) == Some(true)
}

/// A comparison `p >= a`, or `p < a` when negated.
struct Literal<'a> {
    ineq: &'a Inequality,
    negated: bool,
}

/// Splits a conjunction of inequality literals.
fn literals<'a>(f: &'a Formula, out: &mut Vec<Literal<'a>>) -> bool {
    match f {
        Formula::Ineq(i) => {
            out.push(Literal {
                ineq: i,
                negated: false,
            });
            true
        }
        Formula::Not(g) => match g.as_ref() {
            Formula::Ineq(i) => {
                out.push(Literal {
                    ineq: i,
                    negated: true,
                });
                true
            }
            _ => false,
        },
        Formula::And(a, b) => literals(a, out) && literals(b, out),
        _ => false,
    }
}

/// Columns for the distinct factors of linear polynomials.
#[derive(Default)]
struct Columns<'a> {
    index: HashMap<&'a Factor, usize>,
}

impl<'a> Columns<'a> {
    fn row(&mut self, p: &'a Polynomial) -> Option<Vec<(usize, Rational)>> {
        p.monomials
            .iter()
            .map(|m| {
                let [factor] = m.factors.as_slice() else {
                    return None;
                };
                let next = self.index.len();
                let j = *self.index.entry(factor).or_insert(next);
                Some((j, m.coeff.clone()))
            })
            .collect()
    }
}

/// `φ1 ∧ … ∧ φk ⇒ ψ1 ∧ … ∧ ψm` (or just `ψ1 ∧ … ∧ ψm`), all literals
/// linear, valid for every real assignment of the factors: for each goal,
/// the premises together with the negated goal have no real solution.
fn linear_implication_valid(f: &Formula) -> bool {
    if f.has_quantifier() {
        return false;
    }
    let mut premises = Vec::new();
    let mut goals = Vec::new();
    let shaped = match f.as_implication() {
        Some((a, b)) => literals(a, &mut premises) && literals(b, &mut goals),
        None => literals(f, &mut goals),
    };
    if !shaped || goals.is_empty() {
        return false;
    }
    let mut cols = Columns::default();
    let mut system = System::default();
    for lit in &premises {
        let Some(row) = cols.row(&lit.ineq.lhs) else {
            return false;
        };
        system.push(row, lit.ineq.bound.clone(), lit.negated);
    }
    let mut goal_rows = Vec::new();
    for lit in &goals {
        let Some(row) = cols.row(&lit.ineq.lhs) else {
            return false;
        };
        goal_rows.push((row, lit.ineq.bound.clone(), lit.negated));
    }
    let n = cols.index.len();
    goal_rows.into_iter().all(|(row, bound, negated)| {
        let mut s = system.clone();
        s.push(row, bound, !negated);
        s.infeasible(n)
    })
}

type SparseRow = Vec<(usize, Rational)>;

/// Rows `r·t >= b` and strict rows `r·t > b` over free reals.
#[derive(Clone, Default)]
struct System {
    weak: Vec<(SparseRow, Rational)>,
    strict: Vec<(SparseRow, Rational)>,
}

impl System {
    /// Adds `p >= a`, or `p < a` (as `-p > -a`) when `negated`.
    fn push(&mut self, row: SparseRow, bound: Rational, negated: bool) {
        if negated {
            let row = row.into_iter().map(|(j, c)| (j, -c)).collect();
            self.strict.push((row, -bound));
        } else {
            self.weak.push((row, bound));
        }
    }

    /// Decides infeasibility with a margin `e`: maximize `e` subject to the
    /// weak rows, `r·t - e >= b` for strict rows and `e <= 1`. The system is
    /// infeasible iff the LP is infeasible or its optimum is at most 0.
    /// Either answer is re-derived from the returned multipliers.
    fn infeasible(&self, n: usize) -> bool {
        let e = n;
        let width = n + 1;
        let mut rows: Vec<(Vec<Rational>, Rel, Rational)> = Vec::new();
        let dense = |row: &SparseRow, margin: bool| {
            let mut v = vec![Rational::zero(); width];
            for (j, c) in row {
                v[*j] += c;
            }
            if margin {
                v[e] = -Rational::one();
            }
            v
        };
        for (row, b) in &self.weak {
            rows.push((dense(row, false), Rel::Ge, b.clone()));
        }
        for (row, b) in &self.strict {
            rows.push((dense(row, true), Rel::Ge, b.clone()));
        }
        let mut cap_row = vec![Rational::zero(); width];
        cap_row[e] = Rational::one();
        rows.push((cap_row.clone(), Rel::Le, Rational::one()));

        let mut prog = Program::<Rational>::new(width);
        for j in 0..width {
            prog.set_free(j);
        }
        for (row, rel, b) in &rows {
            prog.add_row(row.clone(), *rel, b.clone());
        }
        prog.maximize(cap_row.clone());

        let combine = |y: &[Rational]| {
            let mut comb = vec![Rational::zero(); width];
            let mut rhs = Rational::zero();
            for ((row, _, b), yi) in rows.iter().zip(y) {
                for (acc, c) in comb.iter_mut().zip(row) {
                    *acc += yi * c;
                }
                rhs += yi * b;
            }
            (comb, rhs)
        };
        match prog.solve() {
            ProgramOutcome::Infeasible { farkas } => {
                // y >= 0 on `>=` rows, y <= 0 on `<=` rows, Σ y_i r_i = 0 and
                // Σ y_i b_i > 0 rule out every point.
                let signs = rows.iter().zip(&farkas).all(|((_, rel, _), y)| match rel {
                    Rel::Le => !y.is_pos(),
                    _ => !y.is_neg(),
                });
                let (comb, rhs) = combine(&farkas);
                signs && comb.iter().all(Zero::is_zero) && rhs.is_pos()
            }
            ProgramOutcome::Optimal { dual, .. } => {
                // y <= 0 on `>=` rows, y >= 0 on `<=` rows and Σ y_i r_i = e
                // bound e by Σ y_i b_i at every feasible point.
                let signs = rows.iter().zip(&dual).all(|((_, rel, _), y)| match rel {
                    Rel::Le => !y.is_neg(),
                    _ => !y.is_pos(),
                });
                let (comb, cap) = combine(&dual);
                signs && comb == cap_row && !cap.is_pos()
            }
            ProgramOutcome::Unbounded => false,
        }
    }
}
