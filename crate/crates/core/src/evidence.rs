//! Evidence spaces, the weight of evidence, Dempster combination, and the
//! characterization of which observation-by-hypothesis tables arise as
//! weight functions.
//!
//! Everything here is generic over [`Scalar`]; the crate root exposes the
//! exact rational instantiation under the plain names.

use std::cmp::Ordering;

use crate::formula::{HypothesisSet, Signature};
use crate::lp::{self, LpOutcome};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvidenceError {
    #[error("expected {expected} {what}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("entry ({row}, {col}) = {value} is outside [0, 1]")]
    OutOfRange {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("likelihoods for hypothesis {hypothesis:?} sum to {sum}, not 1")]
    RowSum { hypothesis: String, sum: String },
    #[error("observation {0:?} has zero likelihood under every hypothesis")]
    Irrelevant(String),
    #[error("mass {value} at position {index} is negative")]
    NegativeMass { index: usize, value: String },
    #[error("masses sum to {0}, not 1")]
    MassSum(String),
    #[error("unknown hypothesis {0:?}")]
    UnknownHypothesis(String),
    #[error("unknown observation {0:?}")]
    UnknownObservation(String),
    #[error("log-likelihood needs exactly two hypotheses, found {0}")]
    Arity(usize),
    #[error("hypothesis set is empty")]
    EmptySet,
    #[error("distributions have disjoint support; combination is undefined")]
    DisjointSupport,
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
}

/// One likelihood distribution over observations per hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceSpace<T> {
    sig: Signature,
    likelihood: Vec<Vec<T>>,
}

impl<T: Scalar> EvidenceSpace<T> {
    /// `likelihood[h][o]` is the probability of observation `o` under `h`.
    pub fn new(sig: Signature, likelihood: Vec<Vec<T>>) -> Result<Self, EvidenceError> {
        check_matrix(&likelihood, sig.n_hyp(), sig.n_obs(), "hypothesis rows")?;
        for (h, row) in likelihood.iter().enumerate() {
            let sum = sum(row.iter());
            if !sum.near(&T::one()) {
                return Err(EvidenceError::RowSum {
                    hypothesis: sig.hypotheses()[h].clone(),
                    sum: sum.to_string(),
                });
            }
        }
        for o in 0..sig.n_obs() {
            if !likelihood.iter().any(|row| row[o].is_pos()) {
                return Err(EvidenceError::Irrelevant(sig.observations()[o].clone()));
            }
        }
        Ok(EvidenceSpace { sig, likelihood })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn likelihoods(&self) -> &[Vec<T>] {
        &self.likelihood
    }

    /// `μ_h(o)`.
    pub fn likelihood(&self, h: usize, o: usize) -> &T {
        &self.likelihood[h][o]
    }

    pub fn hypothesis(&self, name: &str) -> Result<usize, EvidenceError> {
        self.sig
            .hypothesis_index(name)
            .ok_or_else(|| EvidenceError::UnknownHypothesis(name.to_string()))
    }

    pub fn observation(&self, name: &str) -> Result<usize, EvidenceError> {
        self.sig
            .observation_index(name)
            .ok_or_else(|| EvidenceError::UnknownObservation(name.to_string()))
    }

    /// `Σ_h μ_h(o)`, positive by relevance.
    pub fn column_sum(&self, o: usize) -> T {
        sum(self.likelihood.iter().map(|row| &row[o]))
    }

    /// Weight of evidence that `o` lends to the set `hs`.
    pub fn weight(&self, o: usize, hs: &HypothesisSet) -> T {
        let num = sum(hs.iter().map(|h| &self.likelihood[h][o]));
        num / self.column_sum(o)
    }

    pub fn weight_of(&self, o: usize, h: usize) -> T {
        self.likelihood[h][o].clone() / self.column_sum(o)
    }

    /// The row `w(o, ·)` as a distribution over hypotheses.
    pub fn weight_row(&self, o: usize) -> Distribution<T> {
        let total = self.column_sum(o);
        Distribution {
            masses: self
                .likelihood
                .iter()
                .map(|row| row[o].clone() / total.clone())
                .collect(),
        }
    }

    /// Generalized likelihood ratio `max_{h∈hs} μ_h(o) / max_h μ_h(o)`.
    pub fn shafer_weight(&self, o: usize, hs: &HypothesisSet) -> Result<T, EvidenceError> {
        let best = |it: &mut dyn Iterator<Item = usize>| {
            it.map(|h| self.likelihood[h][o].clone())
                .fold(None, |acc: Option<T>, v| {
                    Some(match acc {
                        Some(a) => T::max_of(a, v),
                        None => v,
                    })
                })
        };
        let num = best(&mut hs.iter()).ok_or(EvidenceError::EmptySet)?;
        let den = best(&mut (0..self.sig.n_hyp())).ok_or(EvidenceError::EmptySet)?;
        Ok(num / den)
    }

    /// `log2(μ_h(o) / μ_h̄(o))` for a two-hypothesis space, kept symbolic.
    pub fn log_likelihood(&self, o: usize, h: usize) -> Result<LogLikelihood<T>, EvidenceError> {
        if self.sig.n_hyp() != 2 {
            return Err(EvidenceError::Arity(self.sig.n_hyp()));
        }
        let a = &self.likelihood[h][o];
        let b = &self.likelihood[1 - h][o];
        Ok(match (a.is_pos(), b.is_pos()) {
            (true, true) => LogLikelihood::Finite(a.clone() / b.clone()),
            (true, false) => LogLikelihood::PosInfinity,
            (false, true) => LogLikelihood::NegInfinity,
            (false, false) => unreachable!("relevance rules out an all-zero column"),
        })
    }

    /// Prior updated by observation `o`: `prior ⊕ w(o, ·)`.
    pub fn posterior(
        &self,
        prior: &Distribution<T>,
        o: usize,
    ) -> Result<Distribution<T>, EvidenceError> {
        combine(prior, &self.weight_row(o))
    }

    pub fn tabulate(&self) -> WeightTable<T> {
        WeightTable {
            sig: self.sig.clone(),
            entries: (0..self.sig.n_obs())
                .map(|o| self.weight_row(o).masses)
                .collect(),
        }
    }
}

/// Symbolic base-2 logarithm of a likelihood ratio. `Finite` holds the
/// ratio itself; ordering compares ratios, never floating logarithms.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub enum LogLikelihood<T> {
    NegInfinity,
    Finite(T),
    PosInfinity,
}

impl<T: Scalar> LogLikelihood<T> {
    /// Numeric value, for display only.
    pub fn to_f64(&self) -> f64 {
        match self {
            LogLikelihood::NegInfinity => f64::NEG_INFINITY,
            LogLikelihood::PosInfinity => f64::INFINITY,
            LogLikelihood::Finite(r) => r.to_f64().log2(),
        }
    }

    pub fn compare(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl<T: Scalar> std::fmt::Display for LogLikelihood<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LogLikelihood::NegInfinity => f.write_str("-inf"),
            LogLikelihood::PosInfinity => f.write_str("+inf"),
            LogLikelihood::Finite(r) => write!(f, "log2({r})"),
        }
    }
}

/// Probability distribution over the hypotheses of a signature, indexed in
/// signature order.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    masses: Vec<T>,
}

impl<T: Scalar> Distribution<T> {
    pub fn new(masses: Vec<T>) -> Result<Self, EvidenceError> {
        for (index, m) in masses.iter().enumerate() {
            if m.is_neg() {
                return Err(EvidenceError::NegativeMass {
                    index,
                    value: m.to_string(),
                });
            }
        }
        let total = sum(masses.iter());
        if !total.near(&T::one()) {
            return Err(EvidenceError::MassSum(total.to_string()));
        }
        Ok(Distribution { masses })
    }

    pub fn uniform(n: usize) -> Self {
        let n_i64 = i64::try_from(n).expect("hypothesis count fits in i64");
        Distribution {
            masses: vec![T::from_ratio(1, n_i64); n],
        }
    }

    pub fn point(n: usize, at: usize) -> Self {
        Distribution {
            masses: (0..n)
                .map(|i| if i == at { T::one() } else { T::zero() })
                .collect(),
        }
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn mass(&self, h: usize) -> &T {
        &self.masses[h]
    }

    pub fn measure(&self, hs: &HypothesisSet) -> T {
        sum(hs.iter().map(|h| &self.masses[h]))
    }

    pub fn into_masses(self) -> Vec<T> {
        self.masses
    }
}

/// Dempster's rule: pointwise product, renormalized.
pub fn combine<T: Scalar>(
    m1: &Distribution<T>,
    m2: &Distribution<T>,
) -> Result<Distribution<T>, EvidenceError> {
    if m1.len() != m2.len() {
        return Err(EvidenceError::Dimension {
            what: "masses",
            expected: m1.len(),
            found: m2.len(),
        });
    }
    let products: Vec<T> = m1
        .masses
        .iter()
        .zip(&m2.masses)
        .map(|(a, b)| a.clone() * b.clone())
        .collect();
    let total = sum(products.iter());
    if !total.is_pos() {
        return Err(EvidenceError::DisjointSupport);
    }
    Ok(Distribution {
        masses: products.into_iter().map(|p| p / total.clone()).collect(),
    })
}

/// A candidate weight function, `entries[o][h]`. Whether it is one is
/// decided by [`check_weight_table`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable<T> {
    sig: Signature,
    entries: Vec<Vec<T>>,
}

impl<T: Scalar> WeightTable<T> {
    pub fn new(sig: Signature, entries: Vec<Vec<T>>) -> Result<Self, EvidenceError> {
        check_matrix(&entries, sig.n_obs(), sig.n_hyp(), "observation rows")?;
        Ok(WeightTable { sig, entries })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn entries(&self) -> &[Vec<T>] {
        &self.entries
    }

    pub fn entry(&self, o: usize, h: usize) -> &T {
        &self.entries[o][h]
    }
}

/// Positive solution `x` of `Σ_o f(o, h) x_o = 1` for every `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessVector<T> {
    pub x: Vec<T>,
}

impl<T: Scalar> WitnessVector<T> {
    /// Checks the witness equations against `table` exactly (within the
    /// scalar's tolerance for floats).
    pub fn verify(&self, table: &WeightTable<T>) -> bool {
        self.x.len() == table.sig.n_obs()
            && self.x.iter().all(Scalar::is_pos)
            && (0..table.sig.n_hyp()).all(|h| {
                let s = self.x.iter().enumerate().fold(T::zero(), |acc, (o, x)| {
                    acc + table.entries[o][h].clone() * x.clone()
                });
                s.near(&T::one())
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Realizability<T> {
    Realizable(WitnessVector<T>),
    NotRealizable(Rejection<T>),
}

impl<T> Realizability<T> {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Realizability::Realizable(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rejection<T> {
    /// Row `observation` is not a probability distribution over hypotheses.
    NotAMeasure { observation: usize, sum: T },
    /// No strictly positive `x` solves the witness equations. The
    /// certificate `u` has `Σ_h f(o, h) u_h >= 0` for every `o`,
    /// `Σ_h u_h <= 0`, and at least one of these strict.
    NoPositiveSolution { certificate: Vec<T> },
}

impl<T: Scalar> std::fmt::Display for Rejection<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rejection::NotAMeasure { observation, sum } => write!(
                f,
                "row {observation} sums to {sum}, so it is not a probability measure"
            ),
            Rejection::NoPositiveSolution { .. } => {
                f.write_str("no positive solution of the witness equations")
            }
        }
    }
}

/// Decides whether `table` is the weight function of some evidence space.
///
/// Each row must be a probability measure, and the system
/// `Σ_o f(o, h) x_o = 1` (one equation per hypothesis) must have a solution
/// with every `x_o > 0`. Strict positivity is what relevance needs: an
/// observation with `x_o = 0` would get zero likelihood everywhere.
pub fn check_weight_table<T: Scalar>(table: &WeightTable<T>) -> Realizability<T> {
    for (o, row) in table.entries.iter().enumerate() {
        let s = sum(row.iter());
        if !s.near(&T::one()) {
            return Realizability::NotRealizable(Rejection::NotAMeasure {
                observation: o,
                sum: s,
            });
        }
    }
    let n_h = table.sig.n_hyp();
    let n_o = table.sig.n_obs();
    // maximize t  s.t.  Σ_o f(o,h)(y_o + t) = 1,  y, t >= 0.
    let a: Vec<Vec<T>> = (0..n_h)
        .map(|h| {
            let mut row: Vec<T> = (0..n_o).map(|o| table.entries[o][h].clone()).collect();
            row.push(sum(row.iter()));
            row
        })
        .collect();
    let b = vec![T::one(); n_h];
    let mut c = vec![T::zero(); n_o + 1];
    c[n_o] = T::one();
    match lp::solve(&a, &b, &c).expect("rectangular by construction") {
        LpOutcome::Optimal { x, objective, dual } => {
            if objective.is_pos() {
                let t = x[n_o].clone();
                let x = x[..n_o].iter().map(|y| y.clone() + t.clone()).collect();
                Realizability::Realizable(WitnessVector { x })
            } else {
                Realizability::NotRealizable(Rejection::NoPositiveSolution { certificate: dual })
            }
        }
        LpOutcome::Infeasible { farkas } => {
            Realizability::NotRealizable(Rejection::NoPositiveSolution {
                certificate: farkas.into_iter().map(|v| -v).collect(),
            })
        }
        LpOutcome::Unbounded => {
            unreachable!("rows are nonnegative measures, so t is bounded")
        }
    }
}

/// Checks a [`Rejection::NoPositiveSolution`] certificate against `table`.
pub fn verify_certificate<T: Scalar>(table: &WeightTable<T>, u: &[T]) -> bool {
    if u.len() != table.sig.n_hyp() {
        return false;
    }
    let mut strict = false;
    for row in &table.entries {
        let s = row
            .iter()
            .zip(u)
            .fold(T::zero(), |acc, (f, u)| acc + f.clone() * u.clone());
        if s.is_neg() {
            return false;
        }
        strict |= s.is_pos();
    }
    let total = sum(u.iter());
    if total.is_pos() {
        return false;
    }
    strict || total.is_neg()
}

/// Builds a space with `μ_h(o) = f(o, h) · x_o`, whose weight table is `f`.
pub fn reconstruct<T: Scalar>(
    table: &WeightTable<T>,
    witness: &WitnessVector<T>,
) -> Result<EvidenceSpace<T>, EvidenceError> {
    let n_o = table.sig.n_obs();
    if witness.x.len() != n_o {
        return Err(EvidenceError::InvalidWitness(format!(
            "expected {n_o} entries, found {}",
            witness.x.len()
        )));
    }
    if let Some(o) = witness.x.iter().position(|x| !x.is_pos()) {
        return Err(EvidenceError::InvalidWitness(format!(
            "entry {o} is not positive"
        )));
    }
    let likelihood = (0..table.sig.n_hyp())
        .map(|h| {
            (0..n_o)
                .map(|o| table.entries[o][h].clone() * witness.x[o].clone())
                .collect()
        })
        .collect();
    EvidenceSpace::new(table.sig.clone(), likelihood)
        .map_err(|e| EvidenceError::InvalidWitness(e.to_string()))
}

fn sum<'a, T: Scalar>(it: impl Iterator<Item = &'a T>) -> T {
    it.fold(T::zero(), |acc, v| acc + v.clone())
}

fn check_matrix<T: Scalar>(
    m: &[Vec<T>],
    rows: usize,
    cols: usize,
    what: &'static str,
) -> Result<(), EvidenceError> {
    if m.len() != rows {
        return Err(EvidenceError::Dimension {
            what,
            expected: rows,
            found: m.len(),
        });
    }
    for (r, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(EvidenceError::Dimension {
                what: "entries per row",
                expected: cols,
                found: row.len(),
            });
        }
        for (c, v) in row.iter().enumerate() {
            if v.is_neg() || (v.clone() - T::one()).is_pos() {
                return Err(EvidenceError::OutOfRange {
                    row: r,
                    col: c,
                    value: v.to_string(),
                });
            }
        }
    }
    Ok(())
}
