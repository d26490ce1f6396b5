//! Synthetic SAR time series with known water geometry.
//!
//! Backscatter is piecewise constant (one level for water, one for ground)
//! times unit-mean Gamma speckle with `L` looks. The generator also returns
//! the exact water and flood masks, so detector output can be scored
//! without any manual labels.

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::DetectorParams;
use crate::raster::{BinaryMap, Class, FloodMask, Plane, Polarization, Raster, SarFrame};
use crate::rng::stream_rng;
use crate::scalar::Backscatter;

/// Axis-aligned rectangle or disc, in pixel coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum Region {
    Rect {
        row: usize,
        col: usize,
        height: usize,
        width: usize,
    },
    /// Pixels whose centre lies within `radius` of `(center_row, center_col)`.
    Disc {
        center_row: f64,
        center_col: f64,
        radius: f64,
    },
}

impl Region {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        match *self {
            Region::Rect {
                row: r0,
                col: c0,
                height,
                width,
            } => row >= r0 && row < r0 + height && col >= c0 && col < c0 + width,
            Region::Disc {
                center_row,
                center_col,
                radius,
            } => {
                let dr = row as f64 - center_row;
                let dc = col as f64 - center_col;
                dr * dr + dc * dc <= radius * radius
            }
        }
    }
}

/// A region under water for frames `start_frame..=end_frame` (1-based).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloodEvent {
    pub region: Region,
    pub start_frame: usize,
    pub end_frame: usize,
}

impl FloodEvent {
    pub fn active(&self, frame: usize) -> bool {
        (self.start_frame..=self.end_frame).contains(&frame)
    }
}

fn default_ground_level() -> f64 {
    0.055
}

fn default_water_level() -> f64 {
    0.005
}

fn default_start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap()
}

fn default_revisit_days() -> u32 {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub n_frames: usize,
    /// Mean linear backscatter of dry land.
    #[serde(default = "default_ground_level")]
    pub ground_level: f64,
    /// Mean linear backscatter of open water.
    #[serde(default = "default_water_level")]
    pub water_level: f64,
    #[serde(default)]
    pub permanent_regions: Vec<Region>,
    #[serde(default)]
    pub flood_events: Vec<FloodEvent>,
    /// Equivalent number of looks; `None` disables speckle.
    #[serde(default)]
    pub speckle_looks: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_start")]
    pub start: DateTime<Utc>,
    #[serde(default = "default_revisit_days")]
    pub revisit_days: u32,
}

impl SceneSpec {
    /// Scene with no water, no speckle and default levels.
    pub fn new(width: usize, height: usize, n_frames: usize) -> Self {
        SceneSpec {
            width,
            height,
            n_frames,
            ground_level: default_ground_level(),
            water_level: default_water_level(),
            permanent_regions: Vec::new(),
            flood_events: Vec::new(),
            speckle_looks: None,
            seed: 0,
            start: default_start(),
            revisit_days: default_revisit_days(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSpec(msg));
        if self.width == 0 || self.height == 0 || self.n_frames == 0 {
            return fail(format!("empty scene {}x{}x{}", self.width, self.height, self.n_frames));
        }
        if !(self.water_level.is_finite() && self.water_level >= 0.0) {
            return fail(format!("water_level {} must be finite and >= 0", self.water_level));
        }
        if !(self.ground_level.is_finite() && self.ground_level > self.water_level) {
            return fail(format!(
                "ground_level {} must be finite and above water_level {}",
                self.ground_level, self.water_level
            ));
        }
        if let Some(looks) = self.speckle_looks {
            if !(looks.is_finite() && looks >= 1.0) {
                return fail(format!("speckle_looks {looks} must be >= 1"));
            }
        }
        for (i, event) in self.flood_events.iter().enumerate() {
            if event.start_frame < 1 || event.start_frame > event.end_frame || event.end_frame > self.n_frames {
                return fail(format!(
                    "flood_events[{i}]: frames {}..={} not within 1..={}",
                    event.start_frame, event.end_frame, self.n_frames
                ));
            }
        }
        Ok(())
    }

    /// The detector threshold must separate the two levels.
    pub fn check_against(&self, params: &DetectorParams) -> Result<()> {
        if !(self.water_level < params.threshold && params.threshold < self.ground_level) {
            return Err(Error::InvalidSpec(format!(
                "threshold {} does not lie strictly between water_level {} and ground_level {}",
                params.threshold, self.water_level, self.ground_level
            )));
        }
        Ok(())
    }

    pub fn frame_id(&self, frame: usize) -> String {
        format!("frame_{frame:04}")
    }

    pub fn timestamp(&self, frame: usize) -> DateTime<Utc> {
        self.start + Duration::days(self.revisit_days as i64 * (frame as i64 - 1))
    }

    fn is_permanent(&self, row: usize, col: usize) -> bool {
        self.permanent_regions.iter().any(|r| r.contains(row, col))
    }

    fn is_flooded(&self, frame: usize, row: usize, col: usize) -> bool {
        self.flood_events
            .iter()
            .any(|e| e.active(frame) && e.region.contains(row, col))
    }
}

/// Reference masks, index `t - 1` for frame `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneTruth {
    pub water: Vec<BinaryMap>,
    /// Water that is not permanent.
    pub flood: Vec<FloodMask>,
}

/// Multiplicative speckle: `value · g`.
#[inline]
pub fn apply_speckle(value: f64, draw: f64) -> f64 {
    value * draw
}

/// Unit-mean Gamma variates with shape `L` and scale `1/L`.
#[derive(Clone, Copy, Debug)]
pub struct SpeckleModel {
    looks: f64,
    gamma: Gamma<f64>,
}

impl SpeckleModel {
    pub fn new(looks: f64) -> Result<Self> {
        if !(looks.is_finite() && looks >= 1.0) {
            return Err(Error::InvalidSpec(format!("speckle looks {looks} must be >= 1")));
        }
        let gamma = Gamma::new(looks, 1.0 / looks).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Ok(SpeckleModel { looks, gamma })
    }

    pub fn looks(&self) -> f64 {
        self.looks
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng)
    }
}

const SPECKLE_STREAM: u64 = 0x5eed_5bec;

/// Generates all frames and their reference masks. Each frame uses its own
/// generator keyed by `(seed, frame)`, so output is independent of the
/// thread count.
pub fn generate_sequence<T: Backscatter>(spec: &SceneSpec) -> Result<(Vec<SarFrame<T>>, SceneTruth)> {
    spec.validate()?;
    let speckle = spec.speckle_looks.map(SpeckleModel::new).transpose()?;
    let (w, h) = (spec.width, spec.height);
    let permanent: Vec<bool> = (0..w * h).map(|i| spec.is_permanent(i / w, i % w)).collect();

    let per_frame: Vec<(SarFrame<T>, BinaryMap, FloodMask)> = (1..=spec.n_frames)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(spec.seed, SPECKLE_STREAM, t as u64);
            let mut classes = Vec::with_capacity(w * h);
            let mut flooded = Vec::with_capacity(w * h);
            let mut values = Vec::with_capacity(w * h);
            for (i, &perm) in permanent.iter().enumerate() {
                let flood = !perm && spec.is_flooded(t, i / w, i % w);
                let water = perm || flood;
                let base = if water { spec.water_level } else { spec.ground_level };
                let value = match &speckle {
                    Some(model) => apply_speckle(base, model.draw(&mut rng)),
                    None => base,
                };
                classes.push(if water { Class::Water } else { Class::Ground });
                flooded.push(flood);
                values.push(T::from_f64_lossy(value));
            }
            let plane = Plane::new(w, h, values)?;
            let frame = SarFrame::new(Raster::single(Polarization::VV, plane), spec.timestamp(t), spec.frame_id(t))?;
            Ok((frame, BinaryMap::new(w, h, classes)?, FloodMask::new(w, h, flooded, t)?))
        })
        .collect::<Result<_>>()?;

    let mut frames = Vec::with_capacity(spec.n_frames);
    let mut truth = SceneTruth {
        water: Vec::with_capacity(spec.n_frames),
        flood: Vec::with_capacity(spec.n_frames),
    };
    for (frame, water, flood) in per_frame {
        frames.push(frame);
        truth.water.push(water);
        truth.flood.push(flood);
    }
    Ok((frames, truth))
}
