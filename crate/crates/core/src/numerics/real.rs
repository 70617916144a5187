use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Scalar type the closed-form engine is generic over.
///
/// Implemented for `f64` and [`DoubleDouble`](super::DoubleDouble). The
/// exact `P_T` expressions are alternating sums whose terms are many orders
/// of magnitude larger than the result at high SNR, so the extra precision
/// is what keeps them usable past ~30 dB.
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    /// Relative accuracy of arithmetic and elementary functions.
    const EPSILON: f64;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn erf(self) -> Self;
    /// Scaled complementary error function `exp(x^2) erfc(x)`.
    fn erfcx(self) -> Self;
    fn pi() -> Self;

    #[inline]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    #[inline]
    fn one() -> Self {
        Self::from_f64(1.0)
    }

    #[inline]
    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    #[inline]
    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    #[inline]
    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn erf(self) -> Self {
        super::special::erf(self)
    }
    #[inline]
    fn erfcx(self) -> Self {
        super::special::erfcx(self)
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
}
