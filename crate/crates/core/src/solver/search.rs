//! Witness search: a rational grid prefiltered in floating point, then
//! exact block-coordinate linear programming from the most promising grid
//! points.
//!
//! The polishing stage works in the weight-table parametrization: prior
//! `μ`, weight rows `W[o]`, witness vector `x` with `Σ_o W[o][h]·x_o = 1`,
//! posterior `p` and normalizer `D` with `μ_h·W[ob][h] = D·p_h`. Every atom
//! is linear in `(μ, W, p)`, and each block below fixes enough variables to
//! make the couplings linear too. Elastic variables measure how far each
//! targeted atom is from its wanted truth value; their sum never increases
//! from block to block.

use rayon::prelude::*;

use num_traits::{One, Zero};

use super::{CandidateModel, Problem, TermKind, Tri};
use crate::formula::{Formula, Rational};
use crate::lp::{Program, ProgramOutcome, Rel};
use crate::scalar::Scalar;

const TOLERANCE: f64 = 1e-9;

/// Grid with `n` steps per unit: every row and the prior range over the
/// compositions of `n`.
struct Grid {
    n: usize,
    rows: Vec<Vec<usize>>,
    priors: Vec<Vec<usize>>,
    lik_free: bool,
    prior_free: bool,
    n_h: usize,
    n_o: usize,
}

impl Grid {
    fn new(p: &Problem, n: usize) -> Self {
        let lik_free = p.likelihood_matters();
        let prior_free = p.prior_matters();
        Grid {
            n,
            rows: if lik_free {
                compositions(p.n_o, n)
            } else {
                Vec::new()
            },
            priors: if prior_free {
                compositions(p.n_h, n)
            } else {
                Vec::new()
            },
            lik_free,
            prior_free,
            n_h: p.n_h,
            n_o: p.n_o,
        }
    }

    fn size(&self) -> Option<usize> {
        let mut total: usize = 1;
        if self.lik_free {
            for _ in 0..self.n_h {
                total = total.checked_mul(self.rows.len())?;
            }
        }
        if self.prior_free {
            total = total.checked_mul(self.priors.len())?;
        }
        Some(total)
    }

    /// Decodes point `idx` into row choices and a prior choice.
    fn decode(&self, mut idx: usize) -> (Vec<usize>, usize) {
        let mut prior = 0;
        if self.prior_free {
            prior = idx % self.priors.len();
            idx /= self.priors.len();
        }
        let mut rows = Vec::with_capacity(self.n_h);
        if self.lik_free {
            for _ in 0..self.n_h {
                rows.push(idx % self.rows.len());
                idx /= self.rows.len();
            }
        }
        (rows, prior)
    }

    fn point_f64(&self, idx: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let (rows, prior) = self.decode(idx);
        let n = self.n as f64;
        let lik = if self.lik_free {
            rows.iter()
                .map(|&r| self.rows[r].iter().map(|&k| k as f64 / n).collect())
                .collect()
        } else {
            vec![vec![1.0 / self.n_o as f64; self.n_o]; self.n_h]
        };
        let mu = if self.prior_free {
            self.priors[prior].iter().map(|&k| k as f64 / n).collect()
        } else {
            vec![1.0 / self.n_h as f64; self.n_h]
        };
        (lik, mu)
    }

    fn point_exact(&self, idx: usize) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let (rows, prior) = self.decode(idx);
        let n = self.n as i64;
        let lik = if self.lik_free {
            rows.iter()
                .map(|&r| {
                    self.rows[r]
                        .iter()
                        .map(|&k| Rational::from_ratio(k as i64, n))
                        .collect()
                })
                .collect()
        } else {
            vec![vec![Rational::from_ratio(1, self.n_o as i64); self.n_o]; self.n_h]
        };
        let mu = if self.prior_free {
            self.priors[prior]
                .iter()
                .map(|&k| Rational::from_ratio(k as i64, n))
                .collect()
        } else {
            vec![Rational::from_ratio(1, self.n_h as i64); self.n_h]
        };
        (lik, mu)
    }
}

fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    fn go(parts: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=total {
            prefix.push(k);
            go(parts - 1, total - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(parts, total, &mut Vec::new(), &mut out);
    out
}

/// Grid resolutions that fit the budget, coarsest first.
fn grids(p: &Problem, budget: usize) -> Vec<Grid> {
    let mut out = Vec::new();
    let mut used = 0usize;
    for n in 1.. {
        let g = Grid::new(p, n);
        let Some(size) = g.size() else { break };
        if n > 1 && used + size > budget {
            break;
        }
        used += size;
        let trivial = !g.lik_free && !g.prior_free;
        out.push(g);
        if trivial || n > 256 {
            break;
        }
    }
    out
}

fn atom_state(v: f64, bound: f64) -> Tri {
    if v >= bound + TOLERANCE {
        Tri::True
    } else if v < bound - TOLERANCE {
        Tri::False
    } else {
        Tri::Unknown
    }
}

/// A grid point worth polishing, with the atom polarities to aim for.
struct Start {
    score: f64,
    grid: usize,
    idx: usize,
    ob: usize,
    target: Vec<Option<bool>>,
}

/// Stages 1 and 2.
pub(super) fn run(
    p: &Problem,
    f: &Formula,
    config: &super::SolverConfig,
) -> Option<CandidateModel> {
    let grids = grids(p, config.grid_points);
    for g in &grids {
        let size = g.size().expect("sized when built");
        let found = (0..size).into_par_iter().find_map_first(|idx| {
            let (lik, mu) = g.point_f64(idx);
            for ob in 0..p.n_o {
                let Some(terms) = p.term_values_f64(&lik, &mu, ob) else {
                    continue;
                };
                let values = p.atom_values_f64(&terms);
                let state = |i: usize| atom_state(values[i], p.atoms[i].bound_f64);
                let hyps: Vec<usize> = (0..p.n_h)
                    .filter(|&h| p.skeleton.eval(h, ob, &state) != Tri::False)
                    .collect();
                if hyps.is_empty() {
                    continue;
                }
                let (lik_q, mu_q) = g.point_exact(idx);
                if let Some(m) = p.try_model(f, lik_q, mu_q, ob, hyps) {
                    return Some(m);
                }
            }
            None
        });
        if found.is_some() {
            return found;
        }
    }
    if p.atoms.is_empty() || config.polish_starts == 0 {
        return None;
    }

    let mut starts: Vec<Start> = grids
        .par_iter()
        .enumerate()
        .flat_map_iter(|(gi, g)| {
            let size = g.size().expect("sized when built");
            (0..size).flat_map(move |idx| {
                let (lik, mu) = g.point_f64(idx);
                (0..p.n_o).filter_map(move |ob| {
                    let terms = p.term_values_f64(&lik, &mu, ob)?;
                    let values = p.atom_values_f64(&terms);
                    let cost = |i: usize| {
                        let d = values[i] - p.atoms[i].bound_f64;
                        (d.min(0.0).abs(), d.max(0.0))
                    };
                    let (h, score) = (0..p.n_h)
                        .map(|h| (h, p.skeleton.cost(h, ob, &cost).0))
                        .min_by(|a, b| a.1.total_cmp(&b.1))?;
                    if !score.is_finite() {
                        return None;
                    }
                    let mut target = vec![None; p.atoms.len()];
                    p.skeleton.assign(true, h, ob, &cost, &mut target);
                    Some(Start {
                        score,
                        grid: gi,
                        idx,
                        ob,
                        target,
                    })
                })
            })
        })
        .collect();
    starts.sort_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then(b.grid.cmp(&a.grid))
            .then(a.idx.cmp(&b.idx))
            .then(a.ob.cmp(&b.ob))
    });
    starts.dedup_by(|a, b| {
        a.target == b.target && a.ob == b.ob && a.grid == b.grid && a.idx == b.idx
    });
    starts.truncate(config.polish_starts);

    starts.par_iter().find_map_first(|s| {
        let (lik, mu) = grids[s.grid].point_exact(s.idx);
        polish(p, f, lik, mu, s.ob, &s.target, config.polish_rounds)
    })
}

#[derive(Clone, Debug)]
struct State {
    mu: Vec<Rational>,
    /// `w[o][h]`
    w: Vec<Vec<Rational>>,
    x: Vec<Rational>,
    post: Vec<Rational>,
    d: Rational,
}

impl State {
    fn from_point(
        p: &Problem,
        lik: &[Vec<Rational>],
        mu: Vec<Rational>,
        ob: usize,
    ) -> Option<Self> {
        let x: Vec<Rational> = (0..p.n_o)
            .map(|o| lik.iter().map(|r| r[o].clone()).sum())
            .collect();
        if x.iter().any(|v| !v.is_pos()) {
            return None;
        }
        let w: Vec<Vec<Rational>> = (0..p.n_o)
            .map(|o| (0..p.n_h).map(|h| &lik[h][o] / &x[o]).collect())
            .collect();
        let d: Rational = (0..p.n_h).map(|h| &mu[h] * &w[ob][h]).sum();
        let post = if d.is_pos() {
            (0..p.n_h).map(|h| &mu[h] * &w[ob][h] / &d).collect()
        } else if p.uses_posterior {
            return None;
        } else {
            vec![Rational::from_ratio(1, p.n_h as i64); p.n_h]
        };
        Some(State { mu, w, x, post, d })
    }

    fn likelihoods(&self, p: &Problem) -> Vec<Vec<Rational>> {
        (0..p.n_h)
            .map(|h| (0..p.n_o).map(|o| &self.w[o][h] * &self.x[o]).collect())
            .collect()
    }
}

#[derive(Clone, Copy)]
struct Block {
    mu: bool,
    w: bool,
    post: bool,
    d: bool,
}

/// Affine expression over program variables.
#[derive(Default)]
struct Lin {
    terms: Vec<(usize, Rational)>,
    constant: Rational,
}

impl Lin {
    fn add_scaled(&mut self, v: &Val, c: &Rational) {
        match v {
            Val::Var(j) => self.terms.push((*j, c.clone())),
            Val::Fix(q) => self.constant += q * c,
        }
    }

    /// Adds `c·a·b`, where at most one of `a`, `b` is a variable.
    fn add_product(&mut self, a: &Val, b: &Val, c: &Rational) {
        match (a, b) {
            (Val::Fix(x), other) | (other, Val::Fix(x)) => self.add_scaled(other, &(c * x)),
            _ => unreachable!("blocks never make both factors variable"),
        }
    }
}

#[derive(Clone)]
enum Val {
    Var(usize),
    Fix(Rational),
}

fn polish(
    p: &Problem,
    f: &Formula,
    lik: Vec<Vec<Rational>>,
    mu: Vec<Rational>,
    ob: usize,
    target: &[Option<bool>],
    rounds: usize,
) -> Option<CandidateModel> {
    let mut st = State::from_point(p, &lik, mu, ob)?;
    let weights_matter = p.likelihood_matters();
    let mut blocks = vec![Block {
        mu: true,
        w: false,
        post: p.uses_posterior,
        d: false,
    }];
    if weights_matter {
        blocks.push(Block {
            mu: false,
            w: true,
            post: p.uses_posterior,
            d: false,
        });
        if p.uses_posterior {
            blocks.push(Block {
                mu: false,
                w: true,
                post: false,
                d: true,
            });
        }
    }
    for _ in 0..rounds {
        for &b in &blocks {
            if let Some(done) = step(p, &mut st, b, ob, target) {
                if done {
                    if let Some(m) = p.try_model(f, st.likelihoods(p), st.mu.clone(), ob, 0..p.n_h)
                    {
                        return Some(m);
                    }
                }
            } else {
                return None;
            }
            if weights_matter {
                rebalance(p, &mut st);
            }
        }
        if weights_matter && likelihood_step(p, &mut st, ob, target) {
            if let Some(m) = p.try_model(f, st.likelihoods(p), st.mu.clone(), ob, 0..p.n_h) {
                return Some(m);
            }
        }
    }
    None
}

/// A targeted atom with the prior fixed, as a linear form in the
/// likelihood matrix: `Σ coeffs·L + (constant − bound)·denominator`, whose
/// sign is the sign of `value − bound`.
struct Homogeneous {
    numerator: Vec<(usize, Rational)>,
    /// `None` when the atom reads only the prior.
    denominator: Option<Vec<(usize, Rational)>>,
    offset: Rational,
}

/// `None` unless the atom divides by at most one normalizer (one weight
/// column, or the posterior's).
fn homogenize(p: &Problem, i: usize, mu: &[Rational], ob: usize) -> Option<Homogeneous> {
    let n_h = p.n_h;
    let var = |h: usize, o: usize| h * p.n_o + o;
    let atom = &p.atoms[i];
    let mut constant = Rational::zero();
    let mut numerator = Vec::new();
    let mut denominator: Option<(TermKind, Vec<(usize, Rational)>)> = None;
    for (kind, coef) in &atom.groups {
        let (num, den): (Vec<(usize, Rational)>, Vec<(usize, Rational)>) = match kind {
            TermKind::Prior => {
                constant += (0..n_h).map(|h| &coef[h] * &mu[h]).sum::<Rational>();
                continue;
            }
            TermKind::Weight(o) => (
                (0..n_h).map(|h| (var(h, *o), coef[h].clone())).collect(),
                (0..n_h).map(|h| (var(h, *o), Rational::one())).collect(),
            ),
            TermKind::Posterior => (
                (0..n_h).map(|h| (var(h, ob), &coef[h] * &mu[h])).collect(),
                (0..n_h).map(|h| (var(h, ob), mu[h].clone())).collect(),
            ),
        };
        match &denominator {
            Some((k, _)) if k != kind => return None,
            _ => denominator = Some((*kind, den)),
        }
        numerator.extend(num);
    }
    Some(Homogeneous {
        numerator,
        denominator: denominator.map(|(_, d)| d),
        offset: constant - &atom.bound,
    })
}

/// One LP over the whole likelihood matrix with the prior fixed. Applies
/// only when every targeted atom homogenizes; returns whether all targets
/// are met afterwards.
fn likelihood_step(p: &Problem, st: &mut State, ob: usize, target: &[Option<bool>]) -> bool {
    let (n_h, n_o) = (p.n_h, p.n_o);
    let targeted: Vec<(usize, bool)> = target
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.map(|t| (i, t)))
        .collect();
    let Some(forms) = targeted
        .iter()
        .map(|&(i, _)| homogenize(p, i, &st.mu, ob))
        .collect::<Option<Vec<_>>>()
    else {
        return false;
    };
    let var = |h: usize, o: usize| h * n_o + o;
    let one = Rational::one;
    let mut prog = Program::<Rational>::new(n_h * n_o);
    let s = prog.add_var(false);
    let slack: Vec<usize> = targeted.iter().map(|_| prog.add_var(false)).collect();
    for h in 0..n_h {
        let row: Vec<(usize, Rational)> = (0..n_o).map(|o| (var(h, o), one())).collect();
        prog.add_sparse(&row, Rel::Eq, one());
    }
    // stay away from irrelevant columns and an undefined posterior
    for o in 0..n_o {
        let row: Vec<(usize, Rational)> = (0..n_h).map(|h| (var(h, o), one())).collect();
        prog.add_sparse(&row, Rel::Ge, &st.x[o] / Rational::from_ratio(4, 1));
    }
    if p.uses_posterior {
        let row: Vec<(usize, Rational)> =
            (0..n_h).map(|h| (var(h, ob), st.mu[h].clone())).collect();
        prog.add_sparse(
            &row,
            Rel::Ge,
            &st.d * &st.x[ob] / Rational::from_ratio(4, 1),
        );
    }
    prog.add_sparse(&[(s, one())], Rel::Le, one());
    for ((&(_, want), form), &v) in targeted.iter().zip(&forms).zip(&slack) {
        let mut row = form.numerator.clone();
        let rhs = match &form.denominator {
            Some(den) => {
                row.extend(den.iter().map(|(j, c)| (*j, c * &form.offset)));
                Rational::zero()
            }
            None => -form.offset.clone(),
        };
        if want {
            row.push((v, one()));
            prog.add_sparse(&row, Rel::Ge, rhs);
        } else {
            row.push((v, -one()));
            row.push((s, one()));
            prog.add_sparse(&row, Rel::Le, rhs);
        }
    }
    let mut objective = vec![Rational::zero(); prog.n_vars()];
    objective[s] = Rational::from_ratio(1, 2);
    for &v in &slack {
        objective[v] = -one();
    }
    prog.maximize(objective);
    let ProgramOutcome::Optimal { x: sol, .. } = prog.solve() else {
        return false;
    };
    let lik: Vec<Vec<Rational>> = (0..n_h)
        .map(|h| (0..n_o).map(|o| sol[var(h, o)].clone()).collect())
        .collect();
    let Some(next) = State::from_point(p, &lik, st.mu.clone(), ob) else {
        return false;
    };
    *st = next;
    let met = slack.iter().all(|&v| sol[v].is_zero());
    let strict_ok = targeted.iter().all(|&(_, want)| want) || sol[s].is_pos();
    met && strict_ok
}

/// Solves one block LP and updates the state. Returns whether every target
/// is met (strict ones with positive margin), or `None` if the LP failed.
fn step(p: &Problem, st: &mut State, b: Block, ob: usize, target: &[Option<bool>]) -> Option<bool> {
    let n_h = p.n_h;
    let n_o = p.n_o;
    let mut prog = Program::<Rational>::new(0);
    let family = |on: bool, values: &[Rational], prog: &mut Program<Rational>| -> Vec<Val> {
        values
            .iter()
            .map(|v| {
                if on {
                    Val::Var(prog.add_var(false))
                } else {
                    Val::Fix(v.clone())
                }
            })
            .collect()
    };
    let mu = family(b.mu, &st.mu, &mut prog);
    let w: Vec<Vec<Val>> = (0..n_o).map(|o| family(b.w, &st.w[o], &mut prog)).collect();
    let post = family(b.post, &st.post, &mut prog);
    let d = family(b.d, std::slice::from_ref(&st.d), &mut prog).remove(0);
    let s = prog.add_var(false);
    let targeted: Vec<(usize, bool)> = target
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.map(|t| (i, t)))
        .collect();
    let slack: Vec<usize> = targeted.iter().map(|_| prog.add_var(false)).collect();
    let width = prog.n_vars();
    let one = Rational::one();

    let add = |prog: &mut Program<Rational>, lin: Lin, rel: Rel, rhs: Rational| {
        let mut row = vec![Rational::zero(); width];
        for (j, c) in lin.terms {
            row[j] += c;
        }
        prog.add_row(row, rel, rhs - lin.constant);
    };
    let simplex = |prog: &mut Program<Rational>, vals: &[Val]| {
        let mut lin = Lin::default();
        for v in vals {
            lin.add_scaled(v, &one);
        }
        add(prog, lin, Rel::Eq, one.clone());
    };
    if b.mu {
        simplex(&mut prog, &mu);
    }
    if b.post {
        simplex(&mut prog, &post);
    }
    if b.w {
        for row in &w {
            simplex(&mut prog, row);
        }
        for h in 0..n_h {
            let mut lin = Lin::default();
            for o in 0..n_o {
                lin.add_scaled(&w[o][h], &st.x[o]);
            }
            add(&mut prog, lin, Rel::Eq, one.clone());
        }
    }
    if p.uses_posterior {
        for h in 0..n_h {
            let mut lin = Lin::default();
            lin.add_product(&mu[h], &w[ob][h], &one);
            lin.add_product(&d, &post[h], &-one.clone());
            add(&mut prog, lin, Rel::Eq, Rational::zero());
        }
    }
    if let Val::Var(j) = d {
        let floor = &st.d / Rational::from_ratio(4, 1);
        prog.add_sparse(&[(j, one.clone())], Rel::Ge, floor);
    }
    prog.add_sparse(&[(s, one.clone())], Rel::Le, one.clone());

    let term_lin = |k: usize, c: &Rational, lin: &mut Lin| {
        let t = &p.terms[k];
        for &h in &t.set {
            let v = match t.kind {
                TermKind::Prior => &mu[h],
                TermKind::Posterior => &post[h],
                TermKind::Weight(o) => &w[o][h],
            };
            lin.add_scaled(v, c);
        }
    };
    for (&(i, want), &v) in targeted.iter().zip(&slack) {
        let atom = &p.atoms[i];
        let mut lin = Lin::default();
        for (c, k) in &atom.coeffs {
            term_lin(*k, c, &mut lin);
        }
        if want {
            lin.terms.push((v, one.clone()));
            add(&mut prog, lin, Rel::Ge, atom.bound.clone());
        } else {
            lin.terms.push((v, -one.clone()));
            lin.terms.push((s, one.clone()));
            add(&mut prog, lin, Rel::Le, atom.bound.clone());
        }
    }
    let mut objective = vec![Rational::zero(); width];
    objective[s] = Rational::from_ratio(1, 2);
    for &v in &slack {
        objective[v] = -one.clone();
    }
    prog.maximize(objective);

    let ProgramOutcome::Optimal { x: sol, .. } = prog.solve() else {
        return None;
    };
    let read = |v: &Val| match v {
        Val::Var(j) => sol[*j].clone(),
        Val::Fix(q) => q.clone(),
    };
    if b.mu {
        st.mu = mu.iter().map(read).collect();
    }
    if b.w {
        st.w = w.iter().map(|r| r.iter().map(read).collect()).collect();
    }
    if b.post {
        st.post = post.iter().map(read).collect();
    }
    if b.d {
        st.d = read(&d);
    }
    let met = slack.iter().all(|&v| sol[v].is_zero());
    let strict_ok = targeted.iter().all(|&(_, want)| want) || sol[s].is_pos();
    Some(met && strict_ok)
}

/// Re-centres the witness vector `x` for the current weight rows, keeping
/// every entry as far from zero as possible.
fn rebalance(p: &Problem, st: &mut State) {
    let n_o = p.n_o;
    let mut prog = Program::<Rational>::new(n_o + 1);
    let t = n_o;
    for h in 0..p.n_h {
        let row: Vec<Rational> = (0..n_o)
            .map(|o| st.w[o][h].clone())
            .chain(std::iter::once(Rational::zero()))
            .collect();
        prog.add_row(row, Rel::Eq, Rational::one());
    }
    for o in 0..n_o {
        prog.add_sparse(
            &[(o, Rational::one()), (t, -Rational::one())],
            Rel::Ge,
            Rational::zero(),
        );
    }
    let mut objective = vec![Rational::zero(); n_o + 1];
    objective[t] = Rational::one();
    prog.maximize(objective);
    if let ProgramOutcome::Optimal { x, objective, .. } = prog.solve() {
        if objective.is_pos() {
            st.x = x[..n_o].to_vec();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(2, 4).len(), 5);
        assert_eq!(compositions(3, 4).len(), 15);
        assert!(compositions(3, 2)
            .iter()
            .all(|c| c.iter().sum::<usize>() == 2));
    }
}
