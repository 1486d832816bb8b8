//! Closed intervals with outward rounding.
//!
//! Every arithmetic result is widened by one ulp on each side, which is enough
//! because the underlying operations (including `sqrt`) are correctly rounded.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::RoundedFloat;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<F> {
    lo: F,
    hi: F,
}

impl<F: RoundedFloat> Interval<F> {
    pub fn new(lo: F, hi: F) -> Self {
        assert!(lo <= hi, "empty interval [{lo:?}, {hi:?}]");
        Interval { lo, hi }
    }

    pub fn point(x: F) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Encloses `num / den`.
    pub fn ratio(num: i64, den: i64) -> Self {
        let v = num as f64 / den as f64;
        let (lo, hi) = (F::from_f64_down(v), F::from_f64_up(v));
        Interval {
            lo: lo.step_down(),
            hi: hi.step_up(),
        }
    }

    pub fn int(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    pub fn lo(&self) -> F {
        self.lo
    }

    pub fn hi(&self) -> F {
        self.hi
    }

    pub fn mid(&self) -> F {
        let two = F::one() + F::one();
        self.lo + (self.hi - self.lo) / two
    }

    pub fn width(&self) -> F {
        self.hi - self.lo
    }

    pub fn contains(&self, x: F) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(F::zero())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lo >= F::zero()
    }

    pub fn is_nonpositive(&self) -> bool {
        self.hi <= F::zero()
    }

    fn widen(lo: F, hi: F) -> Self {
        Interval {
            lo: lo.step_down(),
            hi: hi.step_up(),
        }
    }

    pub fn sqr(self) -> Self {
        let (a, b) = (self.lo * self.lo, self.hi * self.hi);
        if self.contains_zero() {
            Interval {
                lo: F::zero(),
                hi: a.max(b).step_up(),
            }
        } else {
            Self::widen(a.min(b), a.max(b))
        }
    }

    /// Requires a nonnegative interval.
    pub fn sqrt(self) -> Self {
        assert!(self.lo >= F::zero(), "sqrt of {self:?}");
        Interval {
            lo: self.lo.sqrt().step_down().max(F::zero()),
            hi: self.hi.sqrt().step_up(),
        }
    }

    pub fn recip(self) -> Self {
        assert!(!self.contains_zero(), "reciprocal of {self:?}");
        Self::widen(F::one() / self.hi, F::one() / self.lo)
    }

    pub fn join(self, other: Self) -> Self {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Halves at the midpoint.
    pub fn bisect(self) -> (Self, Self) {
        let m = self.mid();
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }
}

impl<F: RoundedFloat> Add for Interval<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::widen(self.lo + o.lo, self.hi + o.hi)
    }
}

impl<F: RoundedFloat> Sub for Interval<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::widen(self.lo - o.hi, self.hi - o.lo)
    }
}

impl<F: RoundedFloat> Neg for Interval<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl<F: RoundedFloat> Mul for Interval<F> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(F::infinity(), F::min);
        let hi = c.iter().copied().fold(F::neg_infinity(), F::max);
        Self::widen(lo, hi)
    }
}

impl<F: RoundedFloat> Div for Interval<F> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        assert!(!o.contains_zero(), "division by {o:?}");
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        let lo = c.iter().copied().fold(F::infinity(), F::min);
        let hi = c.iter().copied().fold(F::neg_infinity(), F::max);
        Self::widen(lo, hi)
    }
}
