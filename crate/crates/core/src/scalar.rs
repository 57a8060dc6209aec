//! Numeric scalar abstraction.
//!
//! The evidence calculus, the simplex routine and interval arithmetic are
//! written against [`Scalar`] so they run over exact rationals or over
//! floats. Only the exact instantiation gives exact answers: the float
//! instantiations compare against a small tolerance instead of zero.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Ordered field element used throughout the numeric core.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// Absolute slack used when comparing against zero. Zero for exact types.
    fn tolerance() -> Self;

    /// `num / den` in this scalar type.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Lossy conversion used for decimal display and float prefilters.
    fn to_f64(&self) -> f64;

    fn is_exact() -> bool {
        Self::tolerance().is_zero()
    }

    fn near(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= Self::tolerance()
    }

    /// Strictly above zero, beyond tolerance.
    fn is_pos(&self) -> bool {
        *self > Self::tolerance()
    }

    /// Strictly below zero, beyond tolerance.
    fn is_neg(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn is_negligible(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-12
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-6
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

/// Error returned when a rational literal cannot be parsed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?} (expected \"p/q\" or an integer)")]
pub struct RationalParseError(pub String);

/// Parses `"p/q"`, `"-p/q"` or an integer string into a reduced rational.
pub fn parse_rational(text: &str) -> Result<BigRational, RationalParseError> {
    let err = || RationalParseError(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| err())?;
    let den = BigInt::from_str(den).map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

/// Canonical `p/q` text (integers print without a denominator).
pub fn format_rational(q: &BigRational) -> String {
    q.to_string()
}

/// Decimal expansion of `q` truncated to `digits` places, computed exactly.
pub fn decimal_expansion(q: &BigRational, digits: usize) -> String {
    let neg = q.is_negative();
    let q = q.abs();
    let int = q.numer() / q.denom();
    let mut rem = q.numer() - &int * q.denom();
    let ten = BigInt::from(10);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if digits > 0 {
        out.push('.');
        for _ in 0..digits {
            rem *= &ten;
            let d = &rem / q.denom();
            rem -= &d * q.denom();
            out.push_str(&d.to_string());
        }
    }
    out
}
