use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, Num, Signed, ToPrimitive};

/// Ordered field element: exact rationals or IEEE floats.
pub trait Scalar: Num + Signed + PartialOrd + Clone + Debug + Send + Sync + 'static {
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// Zero test used when choosing pivots. Exact for rationals.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-12
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-5
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Scalar for Ratio<i64> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl Scalar for Ratio<i128> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num as i128, den as i128)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Binary float with one-ulp steps, the primitive behind outward rounding.
pub trait RoundedFloat: Float + Debug + Send + Sync + 'static {
    fn step_up(self) -> Self;
    fn step_down(self) -> Self;
    fn from_f64_down(x: f64) -> Self;
    fn from_f64_up(x: f64) -> Self;
}

impl RoundedFloat for f64 {
    fn step_up(self) -> Self {
        self.next_up()
    }

    fn step_down(self) -> Self {
        self.next_down()
    }

    fn from_f64_down(x: f64) -> Self {
        x
    }

    fn from_f64_up(x: f64) -> Self {
        x
    }
}

impl RoundedFloat for f32 {
    fn step_up(self) -> Self {
        self.next_up()
    }

    fn step_down(self) -> Self {
        self.next_down()
    }

    fn from_f64_down(x: f64) -> Self {
        let y = x as f32;
        if (y as f64) > x {
            y.next_down()
        } else {
            y
        }
    }

    fn from_f64_up(x: f64) -> Self {
        let y = x as f32;
        if (y as f64) < x {
            y.next_up()
        } else {
            y
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_constants() {
        assert_eq!(Ratio::<i64>::from_ratio(6, 4), Ratio::new(3, 2));
        assert_eq!(Scalar::to_f64(&BigRational::from_int(-3)), -3.0);
        assert!(1e-13f64.is_negligible());
        assert!(!Ratio::<i64>::new(1, 1 << 40).is_negligible());
    }

    #[test]
    fn f32_conversion_brackets() {
        let x = 0.1f64;
        assert!((f32::from_f64_down(x) as f64) <= x);
        assert!((f32::from_f64_up(x) as f64) >= x);
    }
}
