//! Floating-point scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the codec arithmetic runs on: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Complementary error function.
    fn erfc(self) -> Self;

    /// Hyperbolic tangent with `odd_tanh(-x) == -odd_tanh(x)` bit for bit.
    fn odd_tanh(self) -> Self;

    /// Inverse hyperbolic tangent, exactly odd like [`odd_tanh`](Self::odd_tanh).
    fn odd_atanh(self) -> Self;

    /// Converts an `f64` literal or parameter into this scalar, rounding as needed.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }

    #[inline]
    fn odd_tanh(self) -> Self {
        libm::tanhf(self)
    }

    #[inline]
    fn odd_atanh(self) -> Self {
        libm::atanhf(self)
    }
}

impl Scalar for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }

    #[inline]
    fn odd_tanh(self) -> Self {
        libm::tanh(self)
    }

    #[inline]
    fn odd_atanh(self) -> Self {
        libm::atanh(self)
    }
}
