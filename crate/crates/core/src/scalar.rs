//! Scalar abstractions.
//!
//! [`Scalar`] only needs field arithmetic and ordering, which is enough for
//! every exponent formula and lets them run on exact rationals. [`Real`] adds
//! the transcendental functions and FFT support needed by the solver.
//!
//! `Real` pulls in both `Float` and `Signed`; their `abs`/`signum` overlap, so
//! generic code spells those as `Float::abs(x)`.

use std::fmt::{Debug, Display, LowerExp};
use std::ops::Neg;

use num_traits::{Float, FloatConst, FromPrimitive, Num};
use rustfft::FftNum;

pub trait Scalar: Num + Neg<Output = Self> + FromPrimitive + Clone + PartialOrd + Debug {
    /// Small integer constant.
    fn int(k: i64) -> Self {
        Self::from_i64(k).expect("integer constant representable")
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::int(num) / Self::int(den)
    }
}

impl<T> Scalar for T where T: Num + Neg<Output = T> + FromPrimitive + Clone + PartialOrd + Debug {}

pub trait Real: Scalar + Float + FloatConst + FftNum + Display + LowerExp + Send + Sync + 'static {
    /// Lossy literal conversion.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite value")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn rational_constants_are_exact() {
        let third = Rational::ratio(1, 3);
        assert_eq!(third * Rational::int(3), Rational::int(1));
    }

    #[test]
    fn real_literals_round_trip() {
        assert_eq!(f64::lit(0.25).as_f64(), 0.25);
        assert_eq!(f32::lit(0.5), 0.5f32);
    }
}
