//! The floating-point scalar every numerical routine in this crate is generic over.

use std::fmt;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Real scalar: `f32` or `f64`.
///
/// The tolerances baked into the validation routines are sized for `f64`;
/// `f32` instantiations work but will trip the tighter invariant checks.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Default
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + serde::Serialize
    + serde::de::DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        <Self as FromPrimitive>::from_usize(x).expect("usize representable")
    }

    #[inline]
    fn from_i64_lossy(x: i64) -> Self {
        <Self as FromPrimitive>::from_i64(x).expect("i64 representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn magnitude(self) -> Self {
        Float::abs(self)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Total order on finite scalars; NaN compares equal to everything.
#[inline]
pub(crate) fn cmp_real<T: Real>(a: &T, b: &T) -> std::cmp::Ordering {
    a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
}

/// Lexicographic order on rows of reals.
pub(crate) fn cmp_rows<T: Real>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match cmp_real(x, y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}
