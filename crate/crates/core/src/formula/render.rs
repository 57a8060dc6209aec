//! Canonical concrete syntax. Output parses back to the same tree.

use std::fmt::{self, Display, Formatter};

use num_traits::{One, Signed};

use super::{BasicTerm, Factor, Formula, HypFormula, Inequality, Monomial, Polynomial, Rational};

fn rational(q: &Rational, f: &mut Formatter<'_>) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl HypFormula {
    fn fmt_unary(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            HypFormula::And(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl Display for HypFormula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            HypFormula::True => f.write_str("true"),
            HypFormula::Atom(a) => f.write_str(a),
            HypFormula::Not(inner) => {
                f.write_str("~")?;
                inner.fmt_unary(f)
            }
            HypFormula::And(l, r) => {
                write!(f, "{l} & ")?;
                r.fmt_unary(f)
            }
        }
    }
}

impl Display for BasicTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            BasicTerm::Prior(r) => write!(f, "Pr0({r})"),
            BasicTerm::Posterior(r) => write!(f, "Pr({r})"),
            BasicTerm::Weight(ob, r) => write!(f, "we({ob}, {r})"),
        }
    }
}

impl Display for Factor {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Basic(t) => write!(f, "{t}"),
            Factor::Var(v) => f.write_str(v),
        }
    }
}

impl Monomial {
    /// Renders `|coeff| * factors`, leaving the sign to the caller.
    fn fmt_magnitude(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let c = self.coeff.abs();
        let mut first = true;
        if !c.is_one() || self.factors.is_empty() {
            rational(&c, f)?;
            first = false;
        }
        for factor in &self.factors {
            if !first {
                f.write_str("*")?;
            }
            write!(f, "{factor}")?;
            first = false;
        }
        Ok(())
    }
}

impl Display for Monomial {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.coeff.is_negative() {
            f.write_str("-")?;
        }
        self.fmt_magnitude(f)
    }
}

impl Display for Polynomial {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return f.write_str("0");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            match (i, m.coeff.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            m.fmt_magnitude(f)?;
        }
        Ok(())
    }
}

impl Display for Inequality {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} >= ", self.lhs)?;
        rational(&self.bound, f)
    }
}

impl Formula {
    fn fmt_unary(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Formula::And(..) | Formula::Ineq(_) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Hyp(h) => f.write_str(h),
            Formula::Obs(o) => f.write_str(o),
            Formula::Ineq(i) => write!(f, "{i}"),
            Formula::Not(inner) => {
                f.write_str("~")?;
                inner.fmt_unary(f)
            }
            Formula::And(l, r) => {
                match l.as_ref() {
                    Formula::Ineq(_) => write!(f, "({l})")?,
                    _ => write!(f, "{l}")?,
                }
                f.write_str(" & ")?;
                r.fmt_unary(f)
            }
            Formula::Forall(v, body) => {
                write!(f, "forall {v} ")?;
                body.fmt_unary(f)
            }
        }
    }
}
