use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Polarization;

/// Detector configuration. Defaults are the published settings for the VV
/// channel; no VH defaults exist, so VH users must supply their own
/// `threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorParams {
    /// Side of the square boxcar window, in pixels.
    pub kernel_size: usize,
    /// Linear backscatter level above which a denoised pixel is ground.
    pub threshold: f64,
    /// Water components smaller than this many pixels are removed.
    pub num_components: usize,
    /// Samples stored per pixel in the background model.
    #[serde(rename = "K", alias = "k")]
    pub samples: usize,
    /// A water observation is a flood when fewer than `k_min` stored samples are water.
    pub k_min: usize,
    /// Frames consumed to initialize the model.
    pub n_init: usize,
    pub channel: Polarization,
}

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams {
            kernel_size: 8,
            threshold: 0.03,
            num_components: 20,
            samples: 5,
            k_min: 1,
            n_init: 30,
            channel: Polarization::VV,
        }
    }
}

/// A single broken parameter invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamViolation {
    pub field: &'static str,
    pub reason: String,
}

impl DetectorParams {
    pub fn violations(&self) -> Vec<ParamViolation> {
        let mut out = Vec::new();
        let mut push = |field, reason: String| out.push(ParamViolation { field, reason });
        if self.kernel_size < 1 {
            push("kernel_size", "must be at least 1".into());
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            push("threshold", format!("must be a finite value > 0, got {}", self.threshold));
        }
        if self.num_components < 1 {
            push("num_components", "must be at least 1".into());
        }
        if self.samples < 1 {
            push("K", "must be at least 1".into());
        }
        if self.k_min < 1 || self.k_min > self.samples {
            push("k_min", format!("must satisfy 1 <= k_min <= K ({}), got {}", self.samples, self.k_min));
        }
        if self.n_init < 1 {
            push("n_init", "must be at least 1".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidParams(format!("{}: {}", v.field, v.reason))),
        }
    }
}
