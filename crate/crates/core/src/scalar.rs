//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt;

use nalgebra::RealField;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Elementary functions come from [`RealField`]; constants and conversions
/// from `num-traits`.
pub trait Real:
    RealField
    + Copy
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every `f64` is representable (possibly
    /// rounded) in the supported scalar types.
    #[inline]
    fn cst(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn from_i64_lossy(n: i64) -> Self {
        Self::from_i64(n).expect("i64 representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the scalar type.
    fn epsilon() -> Self;

    /// Largest magnitude used before a quantity is declared overflowed.
    fn overflow_guard() -> Self;

    /// Smallest positive normal value.
    fn min_positive() -> Self;
}

impl Real for f32 {
    fn epsilon() -> Self {
        f32::EPSILON
    }
    fn overflow_guard() -> Self {
        1e18
    }
    fn min_positive() -> Self {
        f32::MIN_POSITIVE
    }
}

impl Real for f64 {
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn overflow_guard() -> Self {
        1e150
    }
    fn min_positive() -> Self {
        f64::MIN_POSITIVE
    }
}

/// `(-1)^m` for any signed integer.
#[inline]
pub fn parity_sign<T: Real>(m: i64) -> T {
    if m.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}
