//! Scalar abstraction for backscatter values.
//!
//! Grids and filters are generic over the floating point type so that the
//! same code serves the on-disk `f32` rasters and `f64` reference checks.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, NumCast, ToPrimitive};

/// Linear-power backscatter sample: `f32` or `f64`.
pub trait Backscatter:
    Float + FromPrimitive + ToPrimitive + NumCast + Debug + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; used for thresholds and window means.
    fn from_f64_lossy(value: f64) -> Self;

    fn to_f64_lossless(self) -> f64;
}

impl Backscatter for f32 {
    #[inline]
    fn from_f64_lossy(value: f64) -> Self {
        value as f32
    }

    #[inline]
    fn to_f64_lossless(self) -> f64 {
        self as f64
    }
}

impl Backscatter for f64 {
    #[inline]
    fn from_f64_lossy(value: f64) -> Self {
        value
    }

    #[inline]
    fn to_f64_lossless(self) -> f64 {
        self
    }
}
