//! Scalar abstraction shared by the numeric core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point scalar the rate computations are generic over.
///
/// Implemented for `f32` and `f64`. The complementary error function is part
/// of the trait because `num_traits::Float` does not provide it and the
/// Q-function inversion needs it at full precision of the chosen type.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Complementary error function, `erfc(x) = 1 - erf(x)`.
    fn erfc(self) -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Conversion from a count or dimension.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}

impl Real for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

/// Converts a power ratio in decibels to linear scale, `10^(x/10)`.
#[inline]
pub fn db_to_linear<T: Real>(db: T) -> T {
    T::of(10.0).powf(db / T::of(10.0))
}

/// Inverse of [`db_to_linear`].
#[inline]
pub fn linear_to_db<T: Real>(linear: T) -> T {
    T::of(10.0) * linear.log10()
}
