use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Numeric type used for alignment costs, similarities and scores.
///
/// Anything with field arithmetic and a total-enough order works: `f32`,
/// `f64` and exact rationals such as [`num_rational::Rational64`].
pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug {
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// `num / den` built from integers, so exact types stay exact.
    fn ratio(num: usize, den: usize) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    /// Lossy conversion from a configuration value.
    fn from_real(x: f64) -> Self {
        Self::from_f64(x).expect("real value representable in scalar type")
    }

    fn to_real(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl<T> Scalar for T where T: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn ratio_is_exact_for_rationals() {
        assert_eq!(Rational64::ratio(499, 1000), Rational64::new(499, 1000));
        assert_eq!(f64::ratio(499, 1000), 0.499);
    }

    #[test]
    fn min_max() {
        assert_eq!(2.0f64.min_of(1.0), 1.0);
        assert_eq!(Rational64::from_count(3).max_of(Rational64::new(7, 2)), Rational64::new(7, 2));
    }
}
