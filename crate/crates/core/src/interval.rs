//! Closed intervals with outward-sound arithmetic. With an exact scalar no
//! rounding happens, so the bounds are tight for single operations.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        debug_assert!(!(hi < lo), "empty interval");
        Interval { lo, hi }
    }

    pub fn point(v: T) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn zero() -> Self {
        Self::point(T::zero())
    }

    pub fn unit() -> Self {
        Interval::new(T::zero(), T::one())
    }

    pub fn width(&self) -> T {
        self.hi.clone() - self.lo.clone()
    }

    pub fn midpoint(&self) -> T {
        (self.lo.clone() + self.hi.clone()) / T::from_ratio(2, 1)
    }

    pub fn contains(&self, v: &T) -> bool {
        !(v < &self.lo) && !(v > &self.hi)
    }

    pub fn add(&self, other: &Self) -> Self {
        Interval {
            lo: self.lo.clone() + other.lo.clone(),
            hi: self.hi.clone() + other.hi.clone(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        let a = self.lo.clone() * c.clone();
        let b = self.hi.clone() * c.clone();
        if c.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cands = [
            self.lo.clone() * other.lo.clone(),
            self.lo.clone() * other.hi.clone(),
            self.hi.clone() * other.lo.clone(),
            self.hi.clone() * other.hi.clone(),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            lo = T::min_of(lo, c.clone());
            hi = T::max_of(hi, c.clone());
        }
        Interval { lo, hi }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = T::max_of(self.lo.clone(), other.lo.clone());
        let hi = T::min_of(self.hi.clone(), other.hi.clone());
        if hi < lo {
            None
        } else {
            Some(Interval { lo, hi })
        }
    }

    /// Range of `a / (a + b)` for nonnegative `a ∈ self`, `b ∈ other`,
    /// over the points where `a + b > 0`. The ratio increases in `a` and
    /// decreases in `b`.
    pub fn share(&self, other: &Self) -> Self {
        let lo = if self.lo.is_zero() {
            T::zero()
        } else {
            self.lo.clone() / (self.lo.clone() + other.hi.clone())
        };
        let hi = if self.hi.is_zero() {
            T::zero()
        } else {
            self.hi.clone() / (self.hi.clone() + other.lo.clone())
        };
        Interval { lo, hi }
    }
}

impl<T: Scalar> std::fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn iv(a: (i64, i64), b: (i64, i64)) -> Interval<Rational> {
        Interval::new(q(a.0, a.1), q(b.0, b.1))
    }

    #[test]
    fn arithmetic() {
        let a = iv((-1, 1), (2, 1));
        let b = iv((3, 1), (4, 1));
        assert_eq!(a.mul(&b), iv((-4, 1), (8, 1)));
        assert_eq!(a.scale(&q(-1, 2)), iv((-1, 1), (1, 2)));
        assert_eq!(a.add(&b), iv((2, 1), (6, 1)));
        assert!(iv((0, 1), (1, 1)).intersect(&iv((2, 1), (3, 1))).is_none());
    }

    #[test]
    fn share_bounds_every_sample() {
        let a = iv((1, 4), (1, 2));
        let b = iv((0, 1), (1, 3));
        let s = a.share(&b);
        for i in 0..=4 {
            for j in 0..=4 {
                let x = q(1, 4) + q(i, 16);
                let y = q(j, 12);
                let r = x.clone() / (x + y);
                assert!(s.contains(&r), "{r} not in {s}");
            }
        }
        assert_eq!(s.hi, q(1, 1));
        let z = iv((0, 1), (0, 1)).share(&iv((1, 2), (1, 1)));
        assert_eq!(z, Interval::zero());
    }
}
