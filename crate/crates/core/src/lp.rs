//! Dense two-phase primal simplex over any [`Scalar`].
//!
//! Problems are in standard form: maximize `c·x` subject to `A x = b`,
//! `x >= 0`. Bland's rule guarantees termination. With an exact scalar the
//! returned optimum, dual vector and infeasibility certificate are exact and
//! can be rechecked with [`verify_farkas`] and [`verify_dual`].

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    /// `dual` satisfies `Aᵀ dual >= c` and `b·dual = objective`.
    Optimal {
        x: Vec<T>,
        objective: T,
        dual: Vec<T>,
    },
    /// `Aᵀ farkas <= 0` and `b·farkas > 0`, so no `x >= 0` solves `A x = b`.
    Infeasible {
        farkas: Vec<T>,
    },
    Unbounded,
}

impl<T> LpOutcome<T> {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("constraint matrix is ragged: row {row} has {got} entries, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("right-hand side has {got} entries for {expected} rows")]
    RhsLength { got: usize, expected: usize },
    #[error("objective has {got} entries for {expected} columns")]
    ObjectiveLength { got: usize, expected: usize },
}

struct Tableau<T> {
    m: usize,
    /// Structural columns; columns `n..n+m` are artificials.
    n: usize,
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    /// Reduced costs `c_j - c_B B⁻¹ A_j`.
    reduced: Vec<T>,
    value: T,
}

impl<T: Scalar> Tableau<T> {
    fn width(&self) -> usize {
        self.n + self.m
    }

    fn set_objective(&mut self, cost: &[T]) {
        let mut reduced = cost.to_vec();
        let mut value = T::zero();
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = cost[bv].clone();
            if cb.is_zero() {
                continue;
            }
            for (j, r) in reduced.iter_mut().enumerate() {
                *r = r.clone() - cb.clone() * self.rows[i][j].clone();
            }
            value = value + cb * self.rhs[i].clone();
        }
        self.reduced = reduced;
        self.value = value;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[row] = self.rhs[row].clone() / p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.rows[i][col].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            self.rows[i][col] = T::zero();
            self.rhs[i] = self.rhs[i].clone() - f * pivot_rhs.clone();
        }
        let f = self.reduced[col].clone();
        if !f.is_zero() {
            for (v, pv) in self.reduced.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            self.reduced[col] = T::zero();
            self.value = self.value.clone() + f * pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Runs Bland's rule over columns `< allowed`. Returns `false` when the
    /// objective is unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(col) = (0..allowed).find(|&j| self.reduced[j].is_pos()) else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.m {
                let a = &self.rows[i][col];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (!(br < ratio) && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

/// Solves `max c·x  s.t.  A x = b, x >= 0`.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[T], c: &[T]) -> Result<LpOutcome<T>, LpError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m {
        return Err(LpError::RhsLength {
            got: b.len(),
            expected: m,
        });
    }
    for (row, r) in a.iter().enumerate() {
        if r.len() != n {
            return Err(LpError::Ragged {
                row,
                got: r.len(),
                expected: n,
            });
        }
    }

    // Normalize to b >= 0, remembering the row signs for the duals.
    let mut sign = vec![false; m];
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_negative();
        sign[i] = neg;
        let mut row: Vec<T> = a[i]
            .iter()
            .map(|v| if neg { -v.clone() } else { v.clone() })
            .collect();
        row.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
        rows.push(row);
        rhs.push(if neg { -b[i].clone() } else { b[i].clone() });
    }
    let mut t = Tableau {
        m,
        n,
        rows,
        rhs,
        basis: (n..n + m).collect(),
        reduced: Vec::new(),
        value: T::zero(),
    };

    let width = t.width();
    let mut phase1 = vec![T::zero(); width];
    for v in &mut phase1[n..] {
        *v = -T::one();
    }
    t.set_objective(&phase1);
    t.optimize(width);
    let unsigned = |v: Vec<T>| -> Vec<T> {
        v.into_iter()
            .zip(&sign)
            .map(|(y, &s)| if s { -y } else { y })
            .collect()
    };
    if t.value.is_neg() {
        // z_i = -1 - r_{n+i} is the phase-one dual; its negation certifies.
        let z: Vec<T> = (0..m)
            .map(|i| T::one() + t.reduced[n + i].clone())
            .collect();
        return Ok(LpOutcome::Infeasible {
            farkas: unsigned(z),
        });
    }

    // Drive zero-level artificials out of the basis where possible.
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(col) = (0..n).find(|&j| !t.rows[i][j].is_negligible()) {
                t.pivot(i, col);
            }
        }
    }

    let mut phase2 = c.to_vec();
    phase2.extend((0..m).map(|_| T::zero()));
    t.set_objective(&phase2);
    if !t.optimize(n) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![T::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs[i].clone();
        }
    }
    let dual: Vec<T> = (0..m).map(|i| -t.reduced[n + i].clone()).collect();
    Ok(LpOutcome::Optimal {
        x,
        objective: t.value.clone(),
        dual: unsigned(dual),
    })
}

/// `Aᵀ y <= 0` and `b·y > 0`.
pub fn verify_farkas<T: Scalar>(a: &[Vec<T>], b: &[T], y: &[T]) -> bool {
    if a.len() != y.len() || b.len() != y.len() {
        return false;
    }
    let n = a.first().map_or(0, Vec::len);
    let columns_ok = (0..n).all(|j| {
        let s = a.iter().zip(y).fold(T::zero(), |acc, (row, yi)| {
            acc + row[j].clone() * yi.clone()
        });
        !s.is_pos()
    });
    let by = dot(b, y);
    columns_ok && by.is_pos()
}

/// `Aᵀ y >= c` and `b·y = objective`: a certificate of optimality.
pub fn verify_dual<T: Scalar>(a: &[Vec<T>], b: &[T], c: &[T], y: &[T], objective: &T) -> bool {
    if a.len() != y.len() {
        return false;
    }
    let feasible = c.iter().enumerate().all(|(j, cj)| {
        let s = a.iter().zip(y).fold(T::zero(), |acc, (row, yi)| {
            acc + row[j].clone() * yi.clone()
        });
        !(cj.clone() - s).is_pos()
    });
    feasible && dot(b, y).near(objective)
}

pub fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter()
        .zip(v)
        .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

/// Relation of a row in a [`Program`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

/// Convenience front end: nonnegative and free variables, `<=`/`>=`/`=`
/// rows, maximization. Free variables are split, inequality rows get
/// slacks, and results are mapped back.
#[derive(Debug, Clone)]
pub struct Program<T> {
    free: Vec<bool>,
    rows: Vec<(Vec<T>, Rel, T)>,
    objective: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProgramOutcome<T> {
    /// `dual[i]` is the multiplier of row `i` (nonnegative for `<=` rows,
    /// nonpositive for `>=` rows).
    Optimal {
        x: Vec<T>,
        objective: T,
        dual: Vec<T>,
    },
    /// Multipliers `y` with `Σ y_i a_i` vanishing on free columns and `<= 0`
    /// on nonnegative ones, `y_i <= 0` on `<=` rows, `y_i >= 0` on `>=`
    /// rows, and `Σ y_i b_i > 0`.
    Infeasible {
        farkas: Vec<T>,
    },
    Unbounded,
}

impl<T: Scalar> Program<T> {
    pub fn new(n_vars: usize) -> Self {
        Program {
            free: vec![false; n_vars],
            rows: Vec::new(),
            objective: vec![T::zero(); n_vars],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.free.len()
    }

    pub fn add_var(&mut self, free: bool) -> usize {
        self.free.push(free);
        self.objective.push(T::zero());
        for (row, _, _) in &mut self.rows {
            row.push(T::zero());
        }
        self.free.len() - 1
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn maximize(&mut self, objective: Vec<T>) {
        assert_eq!(objective.len(), self.n_vars());
        self.objective = objective;
    }

    pub fn add_row(&mut self, coeffs: Vec<T>, rel: Rel, rhs: T) {
        assert_eq!(coeffs.len(), self.n_vars());
        self.rows.push((coeffs, rel, rhs));
    }

    /// Sparse variant of [`Program::add_row`].
    pub fn add_sparse(&mut self, terms: &[(usize, T)], rel: Rel, rhs: T) {
        let mut row = vec![T::zero(); self.n_vars()];
        for (j, v) in terms {
            row[*j] = row[*j].clone() + v.clone();
        }
        self.rows.push((row, rel, rhs));
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self) -> ProgramOutcome<T> {
        let n = self.n_vars();
        // column layout: x_j (or x_j⁺), then x_j⁻ for free j, then slacks.
        let mut neg_col = vec![None; n];
        let mut next = n;
        for j in 0..n {
            if self.free[j] {
                neg_col[j] = Some(next);
                next += 1;
            }
        }
        let mut slack_col = vec![None; self.rows.len()];
        for (i, (_, rel, _)) in self.rows.iter().enumerate() {
            if *rel != Rel::Eq {
                slack_col[i] = Some(next);
                next += 1;
            }
        }
        let width = next;
        let mut a = Vec::with_capacity(self.rows.len());
        let mut b = Vec::with_capacity(self.rows.len());
        for (i, (coeffs, rel, rhs)) in self.rows.iter().enumerate() {
            let mut row = vec![T::zero(); width];
            for j in 0..n {
                row[j] = coeffs[j].clone();
                if let Some(k) = neg_col[j] {
                    row[k] = -coeffs[j].clone();
                }
            }
            if let Some(k) = slack_col[i] {
                row[k] = match rel {
                    Rel::Le => T::one(),
                    _ => -T::one(),
                };
            }
            a.push(row);
            b.push(rhs.clone());
        }
        let mut c = vec![T::zero(); width];
        for j in 0..n {
            c[j] = self.objective[j].clone();
            if let Some(k) = neg_col[j] {
                c[k] = -self.objective[j].clone();
            }
        }
        match solve(&a, &b, &c).expect("program rows are rectangular") {
            LpOutcome::Optimal { x, objective, dual } => {
                let vals = (0..n)
                    .map(|j| match neg_col[j] {
                        Some(k) => x[j].clone() - x[k].clone(),
                        None => x[j].clone(),
                    })
                    .collect();
                ProgramOutcome::Optimal {
                    x: vals,
                    objective,
                    dual,
                }
            }
            LpOutcome::Infeasible { farkas } => ProgramOutcome::Infeasible { farkas },
            LpOutcome::Unbounded => ProgramOutcome::Unbounded,
        }
    }

    /// Checks a point against every row, within the scalar's tolerance.
    pub fn satisfied_by(&self, x: &[T]) -> bool {
        x.len() == self.n_vars()
            && x.iter()
                .zip(&self.free)
                .all(|(v, &free)| free || !v.is_neg())
            && self.rows.iter().all(|(coeffs, rel, rhs)| {
                let lhs = dot(coeffs, x);
                match rel {
                    Rel::Le => !(lhs - rhs.clone()).is_pos(),
                    Rel::Ge => !(rhs.clone() - lhs).is_pos(),
                    Rel::Eq => lhs.near(rhs),
                }
            })
    }
}
