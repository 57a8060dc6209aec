//! Branch-and-bound over the prior and the weight table.
//!
//! Every term of a linear formula is a function of the prior `p` and the
//! weight table `f(o, ·)`: weights read `f` directly, and the posterior at
//! the world's observation is the normalized vector `p_h f(ob, h)`. A box
//! assigns an interval to every prior mass and table entry. For each box:
//!
//! * an exact LP over likelihoods and column sums decides whether some
//!   evidence space has its weight table inside the box;
//! * every atom gets an interval enclosure, and the skeleton is evaluated
//!   in three-valued logic with each atom relaxed by δ;
//! * when atoms remain undecided, each assignment to them that makes the
//!   skeleton true is checked with an exact LP over the measures, which
//!   sees that shares of one measure sum to 1;
//! * without relaxation, a box whose skeleton is true for some hypothesis
//!   contains only models, and one of its points is certified.
//!
//! A box that fails any of the first three checks contains no δ-model.
//! Boxes are processed breadth-first in fixed-size batches. Each batch runs
//! in parallel and its results are merged in order, so the outcome does not
//! depend on scheduling.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;

use num_traits::{One, Zero};

use super::{CandidateModel, Problem, SolverConfig, TermKind, Tri};
use crate::formula::{Formula, Rational};
use crate::interval::Interval;
use crate::lp::{Program, ProgramOutcome, Rel};
use crate::scalar::Scalar;

const BATCH: usize = 64;

/// Most undecided atoms in a box for which assignments are enumerated.
const MAX_OPEN_ATOMS: usize = 10;

pub(super) enum Outcome {
    Sat(CandidateModel),
    Refuted,
    Exhausted,
}

type Iv = Interval<Rational>;

#[derive(Clone, Debug)]
struct Cell {
    prior: Vec<Iv>,
    /// `table[o][h]`
    table: Vec<Vec<Iv>>,
}

enum Step {
    Refuted,
    Sat(CandidateModel),
    Children(Vec<Cell>),
    Stuck,
}

pub(super) fn run(p: &Problem, f: &Formula, config: &SolverConfig) -> Outcome {
    let mut processed = 0usize;
    let mut exhausted = false;
    for ob in 0..p.n_o {
        let Some(root) = contract(root_cell(p)) else {
            continue;
        };
        let mut queue = VecDeque::from([root]);
        while !queue.is_empty() {
            if processed >= config.max_boxes {
                return Outcome::Exhausted;
            }
            let take = queue.len().min(BATCH).min(config.max_boxes - processed);
            let batch: Vec<Cell> = queue.drain(..take).collect();
            processed += batch.len();
            let steps: Vec<Step> = batch
                .into_par_iter()
                .map(|cell| process(p, f, config, ob, cell))
                .collect();
            for s in steps {
                match s {
                    Step::Refuted => {}
                    Step::Sat(m) => return Outcome::Sat(m),
                    Step::Children(cs) => queue.extend(cs),
                    Step::Stuck => exhausted = true,
                }
            }
        }
    }
    if exhausted {
        Outcome::Exhausted
    } else {
        Outcome::Refuted
    }
}

fn root_cell(p: &Problem) -> Cell {
    let prior = if p.prior_matters() {
        vec![Iv::unit(); p.n_h]
    } else {
        vec![Iv::point(Rational::from_ratio(1, p.n_h as i64)); p.n_h]
    };
    Cell {
        prior,
        table: vec![vec![Iv::unit(); p.n_h]; p.n_o],
    }
}

/// Tightens each simplex group against its sum-to-one constraint. Returns
/// `None` when a group cannot reach sum 1 inside the box.
fn contract(mut c: Cell) -> Option<Cell> {
    for row in c.table.iter_mut() {
        contract_group(row)?;
    }
    contract_group(&mut c.prior)?;
    Some(c)
}

fn contract_group(g: &mut [Iv]) -> Option<()> {
    for _ in 0..2 {
        let sum_lo: Rational = g.iter().map(|v| v.lo.clone()).sum();
        let sum_hi: Rational = g.iter().map(|v| v.hi.clone()).sum();
        let one = Rational::one();
        if sum_lo > one || sum_hi < one {
            return None;
        }
        for v in g.iter_mut() {
            let lo = &one - (&sum_hi - &v.hi);
            let hi = &one - (&sum_lo - &v.lo);
            if lo > v.lo {
                v.lo = lo;
            }
            if hi < v.hi {
                v.hi = hi;
            }
            if v.hi < v.lo {
                return None;
            }
        }
    }
    Some(())
}

/// A point of the box on every simplex: each group moves from its lower
/// corner towards its upper corner by the same fraction.
fn interpolate(g: &[Iv]) -> Vec<Rational> {
    let sum_lo: Rational = g.iter().map(|v| v.lo.clone()).sum();
    let sum_hi: Rational = g.iter().map(|v| v.hi.clone()).sum();
    let span = &sum_hi - &sum_lo;
    let t = if span.is_zero() {
        Rational::zero()
    } else {
        (Rational::one() - &sum_lo) / span
    };
    g.iter().map(|v| &v.lo + &t * v.width()).collect()
}

/// A likelihood matrix `lik[h][o]` whose weight table lies in the box, if
/// any exists.
///
/// The LP has a variable `μ(o, h)` per entry and `x_o` per column sum:
/// `Σ_o μ(o, h) = 1`, `Σ_h μ(o, h) = x_o` and `lo·x_o <= μ(o, h) <= hi·x_o`,
/// maximizing the smallest `x_o`. A solution with every `x_o > 0` is a
/// space, and every space with its table in the box is a solution.
fn realize(c: &Cell) -> Option<Vec<Vec<Rational>>> {
    let n_o = c.table.len();
    let n_h = c.prior.len();
    let mu = |o: usize, h: usize| o * n_h + h;
    let x = |o: usize| n_o * n_h + o;
    let t = n_o * n_h + n_o;
    let one = Rational::one;
    let mut lp = Program::new(t + 1);
    for h in 0..n_h {
        let row: Vec<(usize, Rational)> = (0..n_o).map(|o| (mu(o, h), one())).collect();
        lp.add_sparse(&row, Rel::Eq, one());
    }
    for o in 0..n_o {
        let mut row: Vec<(usize, Rational)> = (0..n_h).map(|h| (mu(o, h), one())).collect();
        row.push((x(o), -one()));
        lp.add_sparse(&row, Rel::Eq, Rational::zero());
        for h in 0..n_h {
            let v = &c.table[o][h];
            if v.lo.is_pos() {
                lp.add_sparse(
                    &[(mu(o, h), one()), (x(o), -v.lo.clone())],
                    Rel::Ge,
                    Rational::zero(),
                );
            }
            if v.hi < one() {
                lp.add_sparse(
                    &[(mu(o, h), one()), (x(o), -v.hi.clone())],
                    Rel::Le,
                    Rational::zero(),
                );
            }
        }
        lp.add_sparse(&[(x(o), one()), (t, -one())], Rel::Ge, Rational::zero());
    }
    lp.add_sparse(&[(t, one())], Rel::Le, one());
    let mut objective = vec![Rational::zero(); t + 1];
    objective[t] = one();
    lp.maximize(objective);
    match lp.solve() {
        ProgramOutcome::Optimal {
            x: sol, objective, ..
        } if objective.is_pos() => Some(
            (0..n_h)
                .map(|h| (0..n_o).map(|o| sol[mu(o, h)].clone()).collect())
                .collect(),
        ),
        _ => None,
    }
}

/// Posterior-style shares `v_h / Σ v` for every `h`, or `None` when the
/// sum is zero throughout the box.
fn shares(parts: &[Iv]) -> Option<Vec<Iv>> {
    if parts.iter().all(|v| v.hi.is_zero()) {
        return None;
    }
    Some(
        (0..parts.len())
            .map(|h| {
                let rest = parts
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != h)
                    .fold(Iv::zero(), |acc, (_, v)| acc.add(v));
                parts[h].share(&rest)
            })
            .collect(),
    )
}

/// Range of `Σ c_h x_h` over `x` in the probability simplex and the box.
/// The extremes are found greedily: start from the lower corner and pour
/// the remaining mass into the largest (smallest) coefficients first.
fn simplex_range(coef: &[Rational], boxed: &[Iv]) -> Option<Iv> {
    let base: Rational = boxed.iter().map(|v| v.lo.clone()).sum();
    let top: Rational = boxed.iter().map(|v| v.hi.clone()).sum();
    let one = Rational::one();
    if base > one || top < one {
        return None;
    }
    let mut order: Vec<usize> = (0..coef.len()).collect();
    order.sort_by(|&a, &b| coef[a].cmp(&coef[b]));
    let fill = |order: &mut dyn Iterator<Item = &usize>| {
        let mut rem = &one - &base;
        let mut value: Rational = coef.iter().zip(boxed).map(|(c, v)| c * &v.lo).sum();
        for &h in order {
            if rem.is_zero() {
                break;
            }
            let add = Rational::min_of(rem.clone(), boxed[h].width());
            value += &coef[h] * &add;
            rem -= add;
        }
        value
    };
    let lo = fill(&mut order.iter());
    let hi = fill(&mut order.iter().rev());
    Some(Iv::new(lo, hi))
}

/// Enclosures of the measures the atoms range over.
struct Measures<'a> {
    prior: &'a [Iv],
    posterior: Option<Vec<Iv>>,
    table: &'a [Vec<Iv>],
}

impl Measures<'_> {
    fn of(&self, kind: TermKind) -> &[Iv] {
        match kind {
            TermKind::Prior => self.prior,
            TermKind::Posterior => self.posterior.as_deref().expect("posterior used"),
            TermKind::Weight(o) => &self.table[o],
        }
    }
}

fn measures<'a>(p: &Problem, c: &'a Cell, ob: usize) -> Option<Measures<'a>> {
    let posterior = if p.uses_posterior {
        let joint: Vec<Iv> = (0..p.n_h)
            .map(|h| c.prior[h].mul(&c.table[ob][h]))
            .collect();
        Some(shares(&joint)?)
    } else {
        None
    };
    Some(Measures {
        prior: &c.prior,
        posterior,
        table: &c.table,
    })
}

fn atom_range(groups: &[(TermKind, Vec<Rational>)], m: &Measures) -> Option<Iv> {
    let mut total = Iv::zero();
    for (kind, coef) in groups {
        total = total.add(&simplex_range(coef, m.of(*kind))?);
    }
    Some(total)
}

/// Whether some point of the box's measures satisfies every atom of
/// `assignment` relaxed by δ: `>= bound − δ` when true, `<= bound + δ`
/// when false.
fn assignment_feasible(
    p: &Problem,
    m: &Measures,
    assignment: &[(usize, bool)],
    delta: &Rational,
) -> bool {
    let mut kinds: Vec<TermKind> = Vec::new();
    for &(i, _) in assignment {
        for (k, _) in &p.atoms[i].groups {
            if !kinds.contains(k) {
                kinds.push(*k);
            }
        }
    }
    let n_h = p.n_h;
    let mut lp = Program::new(kinds.len() * n_h);
    let one = Rational::one;
    for (b, kind) in kinds.iter().enumerate() {
        let boxed = m.of(*kind);
        let row: Vec<(usize, Rational)> = (0..n_h).map(|h| (b * n_h + h, one())).collect();
        lp.add_sparse(&row, Rel::Eq, one());
        for (h, v) in boxed.iter().enumerate() {
            if v.lo.is_pos() {
                lp.add_sparse(&[(b * n_h + h, one())], Rel::Ge, v.lo.clone());
            }
            if v.hi < one() {
                lp.add_sparse(&[(b * n_h + h, one())], Rel::Le, v.hi.clone());
            }
        }
    }
    for &(i, truth) in assignment {
        let atom = &p.atoms[i];
        let mut row = Vec::new();
        for (k, coef) in &atom.groups {
            let b = kinds.iter().position(|x| x == k).expect("collected above");
            row.extend(
                coef.iter()
                    .enumerate()
                    .map(|(h, c)| (b * n_h + h, c.clone())),
            );
        }
        if truth {
            lp.add_sparse(&row, Rel::Ge, &atom.bound - delta);
        } else {
            lp.add_sparse(&row, Rel::Le, &atom.bound + delta);
        }
    }
    !matches!(lp.solve(), ProgramOutcome::Infeasible { .. })
}

/// Whether some assignment to the undecided atoms makes the skeleton true
/// for some hypothesis and survives [`assignment_feasible`]. Too many
/// undecided atoms count as feasible.
fn any_assignment_feasible(
    p: &Problem,
    m: &Measures,
    ob: usize,
    relaxed: &dyn Fn(usize) -> Tri,
    delta: &Rational,
) -> bool {
    let mut cases: BTreeSet<Vec<(usize, bool)>> = BTreeSet::new();
    for h in 0..p.n_h {
        match p.skeleton.eval(h, ob, relaxed) {
            Tri::False => continue,
            Tri::True => return true,
            Tri::Unknown => {}
        }
        let open: Vec<usize> = (0..p.atoms.len())
            .filter(|&i| relaxed(i) == Tri::Unknown)
            .collect();
        if open.len() > MAX_OPEN_ATOMS {
            return true;
        }
        for mask in 0u32..(1 << open.len()) {
            let value = |i: usize| match open.iter().position(|&j| j == i) {
                Some(k) => Tri::from(mask >> k & 1 == 1),
                None => relaxed(i),
            };
            if p.skeleton.eval(h, ob, &value) == Tri::True {
                let case = open
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| (i, mask >> k & 1 == 1))
                    .collect();
                cases.insert(case);
            }
        }
    }
    cases
        .iter()
        .any(|case| assignment_feasible(p, m, case, delta))
}

fn process(p: &Problem, f: &Formula, config: &SolverConfig, ob: usize, cell: Cell) -> Step {
    let Some(m) = measures(p, &cell, ob) else {
        return Step::Refuted;
    };
    let Some(atoms) = p
        .atoms
        .iter()
        .map(|a| atom_range(&a.groups, &m))
        .collect::<Option<Vec<Iv>>>()
    else {
        return Step::Refuted;
    };
    let delta = &config.delta;
    let relaxed = |i: usize| {
        let a = &atoms[i];
        let bound = &p.atoms[i].bound;
        if a.hi < bound - delta {
            Tri::False
        } else if a.lo >= bound + delta {
            Tri::True
        } else {
            Tri::Unknown
        }
    };
    if !any_assignment_feasible(p, &m, ob, &relaxed, delta) {
        return Step::Refuted;
    }
    let Some(lik) = realize(&cell) else {
        return Step::Refuted;
    };
    let exact = |i: usize| {
        let a = &atoms[i];
        let bound = &p.atoms[i].bound;
        if a.hi < *bound {
            Tri::False
        } else if a.lo >= *bound {
            Tri::True
        } else {
            Tri::Unknown
        }
    };
    let sure: Vec<usize> = (0..p.n_h)
        .filter(|&h| p.skeleton.eval(h, ob, &exact) == Tri::True)
        .collect();
    if !sure.is_empty() {
        let prior = interpolate(&cell.prior);
        if let Some(model) = p.try_model(f, lik, prior, ob, sure) {
            return Step::Sat(model);
        }
    }
    split(p, config, ob, cell)
}

fn split(p: &Problem, config: &SolverConfig, ob: usize, cell: Cell) -> Step {
    let mut best: Option<(Rational, bool, usize, usize)> = None;
    let mut consider = |w: Rational, is_prior: bool, i: usize, j: usize| {
        if best.as_ref().map_or(true, |b| w > b.0) {
            best = Some((w, is_prior, i, j));
        }
    };
    if p.prior_matters() {
        for (h, v) in cell.prior.iter().enumerate() {
            consider(v.width(), true, h, 0);
        }
    }
    for o in 0..p.n_o {
        if p.column_matters(o, ob) {
            for h in 0..p.n_h {
                consider(cell.table[o][h].width(), false, o, h);
            }
        }
    }
    let Some((width, is_prior, i, j)) = best else {
        return Step::Stuck;
    };
    if width.is_zero() || width < config.min_width {
        return Step::Stuck;
    }
    let mut left = cell.clone();
    let mut right = cell;
    {
        let (l, r) = if is_prior {
            (&mut left.prior[i], &mut right.prior[i])
        } else {
            (&mut left.table[i][j], &mut right.table[i][j])
        };
        let mid = l.midpoint();
        l.hi = mid.clone();
        r.lo = mid;
    }
    let children: Vec<Cell> = [left, right].into_iter().filter_map(contract).collect();
    if children.is_empty() {
        Step::Refuted
    } else {
        Step::Children(children)
    }
}
