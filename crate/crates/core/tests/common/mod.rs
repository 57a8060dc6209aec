//! Seeded generators and the grid oracle shared by the integration tests.
#![allow(dead_code)]

pub mod grid;

use evlogic::evidence::{Distribution, EvidenceSpace};
use evlogic::formula::{BasicTerm, Factor, Inequality, Monomial, Polynomial};
use evlogic::{Formula, HypFormula, Rational, Scalar, Signature};
use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

pub fn big(n: u32) -> Rational {
    Rational::from_integer(BigInt::from(2u8).pow(n))
}

/// A probability vector with small integer weights. With `zeros`, some
/// entries are 0 (never all).
pub fn random_masses(rng: &mut impl Rng, n: usize, zeros: bool) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..n)
            .map(|_| {
                if zeros && rng.gen_bool(0.3) {
                    0
                } else {
                    rng.gen_range(1..=12)
                }
            })
            .collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.iter().map(|&x| q(x, total)).collect();
        }
    }
}

pub fn random_distribution(rng: &mut impl Rng, n: usize, zeros: bool) -> Distribution<Rational> {
    Distribution::new(random_masses(rng, n, zeros)).unwrap()
}

/// A space satisfying relevance: rows are redrawn until every column has
/// positive mass somewhere.
pub fn random_space(rng: &mut impl Rng, sig: &Signature, zeros: bool) -> EvidenceSpace<Rational> {
    loop {
        let rows: Vec<Vec<Rational>> = (0..sig.n_hyp())
            .map(|_| random_masses(rng, sig.n_obs(), zeros))
            .collect();
        if let Ok(space) = EvidenceSpace::new(sig.clone(), rows) {
            return space;
        }
    }
}

pub fn random_hyp(rng: &mut impl Rng, sig: &Signature, depth: u32) -> HypFormula {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    if leaf {
        if rng.gen_bool(0.15) {
            HypFormula::True
        } else {
            let i = rng.gen_range(0..sig.n_hyp());
            HypFormula::atom(sig.hypotheses()[i].clone())
        }
    } else if rng.gen_bool(0.4) {
        random_hyp(rng, sig, depth - 1).not()
    } else {
        random_hyp(rng, sig, depth - 1).and(random_hyp(rng, sig, depth - 1))
    }
}

pub fn random_basic(rng: &mut impl Rng, sig: &Signature, depth: u32) -> BasicTerm {
    let rho = random_hyp(rng, sig, depth);
    match rng.gen_range(0..3) {
        0 => BasicTerm::Prior(rho),
        1 => BasicTerm::Posterior(rho),
        _ => {
            let o = rng.gen_range(0..sig.n_obs());
            BasicTerm::Weight(sig.observations()[o].clone(), rho)
        }
    }
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    q(rng.gen_range(-20..=20), rng.gen_range(1..=9))
}

/// Polynomial over basic terms and the given variables. Without
/// variables and with `linear`, every monomial is a single basic term.
pub fn random_poly(
    rng: &mut impl Rng,
    sig: &Signature,
    vars: &[String],
    linear: bool,
) -> Polynomial {
    let n = rng.gen_range(0..=3);
    let monomials = (0..n)
        .map(|_| {
            let k = if linear { 1 } else { rng.gen_range(1..=3) };
            let factors = (0..k)
                .map(|_| {
                    if !linear && !vars.is_empty() && rng.gen_bool(0.3) {
                        Factor::Var(vars[rng.gen_range(0..vars.len())].clone())
                    } else {
                        Factor::Basic(random_basic(rng, sig, 2))
                    }
                })
                .collect();
            Monomial::new(random_rational(rng), factors)
        })
        .collect();
    Polynomial::new(monomials)
}

/// Any formula of the full language, over `sig`. Variables come from a
/// fixed pool so some occurrences are bound and some free.
pub fn random_formula(rng: &mut impl Rng, sig: &Signature, depth: u32) -> Formula {
    const POOL: [&str; 3] = ["x", "y", "z"];
    let vars: Vec<String> = POOL.iter().map(|s| s.to_string()).collect();
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..4) {
            0 => Formula::Hyp(sig.hypotheses()[rng.gen_range(0..sig.n_hyp())].clone()),
            1 => Formula::Obs(sig.observations()[rng.gen_range(0..sig.n_obs())].clone()),
            _ => {
                let linear = rng.gen_bool(0.5);
                Formula::Ineq(Inequality::new(
                    random_poly(rng, sig, &vars, linear),
                    random_rational(rng),
                ))
            }
        };
    }
    match rng.gen_range(0..5) {
        0 | 1 => random_formula(rng, sig, depth - 1).not(),
        2 | 3 => random_formula(rng, sig, depth - 1).and(random_formula(rng, sig, depth - 1)),
        _ => Formula::forall(
            vars[rng.gen_range(0..vars.len())].clone(),
            random_formula(rng, sig, depth - 1),
        ),
    }
}

/// A quantifier-free, variable-free formula with linear atoms.
pub fn random_ev_formula(rng: &mut impl Rng, sig: &Signature, depth: u32) -> Formula {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..4) {
            0 => Formula::Hyp(sig.hypotheses()[rng.gen_range(0..sig.n_hyp())].clone()),
            1 => Formula::Obs(sig.observations()[rng.gen_range(0..sig.n_obs())].clone()),
            _ => Formula::Ineq(Inequality::new(
                random_poly(rng, sig, &[], true),
                random_rational(rng),
            )),
        };
    }
    if rng.gen_bool(0.4) {
        random_ev_formula(rng, sig, depth - 1).not()
    } else {
        random_ev_formula(rng, sig, depth - 1).and(random_ev_formula(rng, sig, depth - 1))
    }
}
