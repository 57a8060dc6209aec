//! Brute-force reference for small satisfiability instances.
//!
//! Every likelihood row and the prior range over the grid `{k/N}` of their
//! simplex, every (hypothesis, observation) pair is tried, and the formula
//! is evaluated with `i64` rationals by a separate evaluator written from
//! the definitions. With a positive `delta`, each inequality atom is
//! relaxed by `delta` in the direction that makes the formula easier to
//! satisfy.

use evlogic::formula::{BasicTerm, Factor};
use evlogic::{Formula, HypFormula, Rational, Signature};
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

pub type R = Ratio<i64>;

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    /// `lik[h][o]`
    pub lik: Vec<Vec<R>>,
    pub prior: Vec<R>,
    pub h: usize,
    pub ob: usize,
}

enum Term {
    Prior(Vec<bool>),
    Posterior(Vec<bool>),
    Weight(usize, Vec<bool>),
}

enum Node {
    Hyp(usize),
    Obs(usize),
    Ineq(Vec<(R, Term)>, R),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
}

pub fn small(q: &Rational) -> R {
    R::new(q.numer().to_i64().unwrap(), q.denom().to_i64().unwrap())
}

fn holds(rho: &HypFormula, sig: &Signature, h: usize) -> bool {
    match rho {
        HypFormula::True => true,
        HypFormula::Atom(a) => sig.hypotheses()[h] == *a,
        HypFormula::Not(x) => !holds(x, sig, h),
        HypFormula::And(a, b) => holds(a, sig, h) && holds(b, sig, h),
    }
}

fn members(rho: &HypFormula, sig: &Signature) -> Vec<bool> {
    (0..sig.n_hyp()).map(|h| holds(rho, sig, h)).collect()
}

fn lower(f: &Formula, sig: &Signature) -> Node {
    match f {
        Formula::Hyp(n) => Node::Hyp(sig.hypothesis_index(n).unwrap()),
        Formula::Obs(n) => Node::Obs(sig.observation_index(n).unwrap()),
        Formula::Ineq(i) => {
            let terms = i
                .lhs
                .monomials
                .iter()
                .map(|m| {
                    let [Factor::Basic(t)] = m.factors.as_slice() else {
                        panic!("the grid oracle handles linear atoms only");
                    };
                    let term = match t {
                        BasicTerm::Prior(r) => Term::Prior(members(r, sig)),
                        BasicTerm::Posterior(r) => Term::Posterior(members(r, sig)),
                        BasicTerm::Weight(o, r) => {
                            Term::Weight(sig.observation_index(o).unwrap(), members(r, sig))
                        }
                    };
                    (small(&m.coeff), term)
                })
                .collect();
            Node::Ineq(terms, small(&i.bound))
        }
        Formula::Not(g) => Node::Not(Box::new(lower(g, sig))),
        Formula::And(a, b) => Node::And(Box::new(lower(a, sig)), Box::new(lower(b, sig))),
        Formula::Forall(..) => panic!("the grid oracle handles quantifier-free formulas only"),
    }
}

fn term_value(t: &Term, p: &GridPoint) -> Option<R> {
    let n_h = p.prior.len();
    Some(match t {
        Term::Prior(set) => (0..n_h).filter(|&h| set[h]).map(|h| p.prior[h]).sum(),
        Term::Posterior(set) => {
            let joint: Vec<R> = (0..n_h).map(|h| p.prior[h] * p.lik[h][p.ob]).collect();
            let total: R = joint.iter().copied().sum();
            if total.is_zero() {
                return None;
            }
            (0..n_h).filter(|&h| set[h]).map(|h| joint[h]).sum::<R>() / total
        }
        Term::Weight(o, set) => {
            let total: R = (0..n_h).map(|h| p.lik[h][*o]).sum();
            (0..n_h)
                .filter(|&h| set[h])
                .map(|h| p.lik[h][*o])
                .sum::<R>()
                / total
        }
    })
}

/// `None` when a posterior in the formula is undefined at the point.
fn eval(n: &Node, p: &GridPoint, delta: R, positive: bool) -> Option<bool> {
    Some(match n {
        Node::Hyp(h) => p.h == *h,
        Node::Obs(o) => p.ob == *o,
        Node::Ineq(terms, bound) => {
            let mut v = R::zero();
            for (c, t) in terms {
                v += *c * term_value(t, p)?;
            }
            if positive {
                v >= *bound - delta
            } else {
                v >= *bound + delta
            }
        }
        Node::Not(g) => !eval(g, p, delta, !positive)?,
        Node::And(a, b) => {
            let a = eval(a, p, delta, positive);
            let b = eval(b, p, delta, positive);
            a? && b?
        }
    })
}

/// Numerators of the points of `{k/n}` on the `dim`-simplex.
fn compositions(dim: usize, n: i64) -> Vec<Vec<i64>> {
    if dim == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(dim - 1, n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// First satisfying grid point (in a fixed order), if any.
pub fn search(f: &Formula, sig: &Signature, step: i64, delta: R) -> Option<GridPoint> {
    let node = lower(f, sig);
    let (n_h, n_o) = (sig.n_hyp(), sig.n_obs());
    let to_r = |v: &Vec<i64>| v.iter().map(|&k| R::new(k, step)).collect::<Vec<R>>();
    let rows: Vec<Vec<R>> = compositions(n_o, step).iter().map(to_r).collect();
    let priors: Vec<Vec<R>> = compositions(n_h, step).iter().map(to_r).collect();
    // all likelihood matrices, as index tuples into `rows`
    let mut matrices: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n_h {
        matrices = matrices
            .into_iter()
            .flat_map(|m| {
                (0..rows.len()).map(move |r| {
                    let mut m = m.clone();
                    m.push(r);
                    m
                })
            })
            .collect();
    }
    matrices.into_par_iter().find_map_first(|m| {
        let lik: Vec<Vec<R>> = m.iter().map(|&r| rows[r].clone()).collect();
        let relevant = (0..n_o).all(|o| (0..n_h).any(|h| !lik[h][o].is_zero()));
        if !relevant {
            return None;
        }
        let mut p = GridPoint {
            lik,
            prior: priors[0].clone(),
            h: 0,
            ob: 0,
        };
        for prior in &priors {
            p.prior.clone_from(prior);
            for h in 0..n_h {
                for ob in 0..n_o {
                    p.h = h;
                    p.ob = ob;
                    if eval(&node, &p, delta, true) == Some(true) {
                        return Some(p);
                    }
                }
            }
        }
        None
    })
}

/// Exact satisfiability at some grid resolution among `steps`.
pub fn satisfiable_on_grids(f: &Formula, sig: &Signature, steps: &[i64]) -> Option<GridPoint> {
    steps.iter().find_map(|&s| search(f, sig, s, R::zero()))
}

pub fn to_rational(r: R) -> Rational {
    Rational::new((*r.numer()).into(), (*r.denom()).into())
}
