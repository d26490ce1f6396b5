//! Boxcar (uniform mean) speckle filter.

use std::ops::Deref;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::Plane;
use crate::scalar::Backscatter;

/// Output of [`boxcar_filter`]. Every value lies within the input range.
#[derive(Clone, Debug, PartialEq)]
pub struct DenoisedPlane<T>(Plane<T>);

impl<T> DenoisedPlane<T> {
    pub fn into_plane(self) -> Plane<T> {
        self.0
    }
}

impl<T> Deref for DenoisedPlane<T> {
    type Target = Plane<T>;

    fn deref(&self) -> &Plane<T> {
        &self.0
    }
}

/// Offsets `(before, after)` of a window of side `kernel_size` relative to
/// its anchor pixel. Even kernels extend one pixel further after the anchor
/// than before it: k = 8 covers `[r - 3, r + 4]`.
#[inline]
pub fn window_extent(kernel_size: usize) -> (usize, usize) {
    ((kernel_size - 1) / 2, kernel_size / 2)
}

/// Clipped window `[lo, hi]` around `center` along an axis of length `len`.
#[inline]
fn clipped(center: usize, len: usize, before: usize, after: usize) -> (usize, usize) {
    (center.saturating_sub(before), (center + after).min(len - 1))
}

/// Mean over each `kernel_size x kernel_size` window intersected with the
/// image. Border pixels are averaged over the valid pixels only, so the
/// edges are not pulled towards zero.
///
/// Runs in O(H·W) independent of the kernel using separable prefix sums
/// accumulated in `f64`. Rows are processed in parallel; the result does not
/// depend on the thread count.
pub fn boxcar_filter<T: Backscatter>(plane: &Plane<T>, kernel_size: usize) -> Result<DenoisedPlane<T>> {
    if kernel_size < 1 {
        return Err(Error::InvalidKernel { kernel_size });
    }
    let (width, height) = plane.dims();
    if kernel_size == 1 {
        return Ok(DenoisedPlane(plane.clone()));
    }
    let (before, after) = window_extent(kernel_size);
    let input = plane.as_slice();

    // Horizontal window sums.
    let mut row_sums = vec![0.0f64; width * height];
    row_sums
        .par_chunks_mut(width)
        .zip(input.par_chunks(width))
        .for_each_init(
            || vec![0.0f64; width + 1],
            |prefix, (out, row)| {
                for (c, v) in row.iter().enumerate() {
                    prefix[c + 1] = prefix[c] + v.to_f64_lossless();
                }
                for (c, o) in out.iter_mut().enumerate() {
                    let (lo, hi) = clipped(c, width, before, after);
                    *o = prefix[hi + 1] - prefix[lo];
                }
            },
        );

    // Vertical prefix over the horizontal sums: col_prefix[r * width + c]
    // holds the sum of row_sums for rows < r.
    let mut col_prefix = vec![0.0f64; (height + 1) * width];
    for r in 0..height {
        let (done, rest) = col_prefix.split_at_mut((r + 1) * width);
        let prev = &done[r * width..];
        let cur = &mut rest[..width];
        let sums = &row_sums[r * width..(r + 1) * width];
        for c in 0..width {
            cur[c] = prev[c] + sums[c];
        }
    }

    let (lo_val, hi_val) = plane.min_max();
    let mut out = vec![T::zero(); width * height];
    out.par_chunks_mut(width).enumerate().for_each(|(r, out_row)| {
        let (r0, r1) = clipped(r, height, before, after);
        let n_rows = (r1 - r0 + 1) as f64;
        let top = &col_prefix[r0 * width..(r0 + 1) * width];
        let bottom = &col_prefix[(r1 + 1) * width..(r1 + 2) * width];
        for (c, o) in out_row.iter_mut().enumerate() {
            let (c0, c1) = clipped(c, width, before, after);
            let count = n_rows * (c1 - c0 + 1) as f64;
            let mean = T::from_f64_lossy((bottom[c] - top[c]) / count);
            // Cancellation in the prefix differences can push a mean a few
            // ulps outside the input range.
            *o = mean.max(lo_val).min(hi_val);
        }
    });
    Ok(DenoisedPlane(Plane::new(width, height, out)?))
}
