//! Per-pixel background model of past water/ground observations and the
//! streaming flood detector built on it.
//!
//! Each pixel keeps `K` binary samples. A new water observation is a flood
//! when fewer than `k_min` of the stored samples are water. Pixels that are
//! not flagged then overwrite one pseudo-randomly chosen sample with the new
//! observation; flagged pixels leave their samples untouched so that flood
//! water never leaks into the background.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::DetectorParams;
use crate::raster::{BinaryMap, Class, FloodMask, SarFrame};
use crate::rng::update_slot;
use crate::scalar::Backscatter;
use crate::segmentation::segment_water;

/// `K` water/ground samples per pixel, stored pixel-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BackgroundModel {
    width: usize,
    height: usize,
    samples: usize,
    data: Vec<Class>,
}

impl BackgroundModel {
    /// Model where every sample of pixel `i` equals `map[i]`.
    pub fn replicated(map: &BinaryMap, samples: usize) -> Result<Self> {
        if samples < 1 {
            return Err(Error::InvalidParams("K must be at least 1".into()));
        }
        let data = map
            .as_slice()
            .iter()
            .flat_map(|&c| std::iter::repeat_n(c, samples))
            .collect();
        Ok(BackgroundModel {
            width: map.width(),
            height: map.height(),
            samples,
            data,
        })
    }

    /// Builds a model from explicit per-pixel samples (pixel-major, `K` per pixel).
    pub fn from_samples(width: usize, height: usize, samples: usize, data: Vec<Class>) -> Result<Self> {
        if samples < 1 {
            return Err(Error::InvalidParams("K must be at least 1".into()));
        }
        if data.len() != width * height * samples {
            return Err(Error::InvalidFrame(format!(
                "model of {width}x{height}x{samples} needs {} samples, got {}",
                width * height * samples,
                data.len()
            )));
        }
        Ok(BackgroundModel {
            width,
            height,
            samples,
            data,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn samples_per_pixel(&self) -> usize {
        self.samples
    }

    pub fn pixel_samples(&self, pixel: usize) -> &[Class] {
        &self.data[pixel * self.samples..(pixel + 1) * self.samples]
    }

    pub fn as_slice(&self) -> &[Class] {
        &self.data
    }

    /// Number of water samples stored for `pixel`, in `0..=K`.
    #[inline]
    pub fn water_count(&self, pixel: usize) -> usize {
        self.pixel_samples(pixel).iter().filter(|c| c.is_water()).count()
    }

    fn check_dims(&self, dims: (usize, usize)) -> Result<()> {
        if dims != self.dims() {
            return Err(Error::dims(self.dims(), dims));
        }
        Ok(())
    }
}

/// Initializes the model from the warm-up maps by per-pixel temporal median.
///
/// On binary data the median is a majority vote. An exact tie resolves to
/// ground, so an ambiguous pixel can still be flagged by a later water
/// observation.
pub fn init_background(warmup: &[BinaryMap], samples: usize) -> Result<BackgroundModel> {
    let first = warmup.first().ok_or(Error::EmptyWarmup)?;
    let dims = first.dims();
    for (i, map) in warmup.iter().enumerate() {
        if map.dims() != dims {
            return Err(Error::dims(dims, map.dims()).at_frame(i + 1));
        }
    }
    let mut water = vec![0usize; dims.0 * dims.1];
    for map in warmup {
        for (count, class) in water.iter_mut().zip(map.as_slice()) {
            *count += class.is_water() as usize;
        }
    }
    let n = warmup.len();
    let median: Vec<Class> = water
        .iter()
        .map(|&w| if 2 * w > n { Class::Water } else { Class::Ground })
        .collect();
    BackgroundModel::replicated(&BinaryMap::new(dims.0, dims.1, median)?, samples)
}

/// Flags pixels observed as water while the model holds fewer than `k_min`
/// water samples. The model is only read.
pub fn classify_frame(model: &BackgroundModel, seg: &BinaryMap, k_min: usize, frame_index: usize) -> Result<FloodMask> {
    model.check_dims(seg.dims())?;
    let k = model.samples;
    let flooded = seg
        .as_slice()
        .par_iter()
        .zip(model.data.par_chunks(k))
        .map(|(class, stack)| class.is_water() && stack.iter().filter(|c| c.is_water()).count() < k_min)
        .collect();
    FloodMask::new(seg.width(), seg.height(), flooded, frame_index)
}

/// Writes each non-flooded observation into one slot of its pixel's stack.
/// The slot is a hash of `(seed, frame_index, pixel)`.
pub fn update_model(
    model: &mut BackgroundModel,
    seg: &BinaryMap,
    flood: &FloodMask,
    frame_index: usize,
    seed: u64,
) -> Result<()> {
    model.check_dims(seg.dims())?;
    model.check_dims(flood.dims())?;
    let k = model.samples;
    model
        .data
        .par_chunks_mut(k)
        .zip(seg.as_slice().par_iter().zip(flood.as_slice().par_iter()))
        .enumerate()
        .for_each(|(pixel, (stack, (&class, &flooded)))| {
            if !flooded {
                stack[update_slot(seed, frame_index, pixel, k)] = class;
            }
        });
    Ok(())
}

/// One frame fed to the detector, either raw or already segmented.
#[derive(Clone, Debug)]
pub enum DetectorInput<T> {
    Raw(SarFrame<T>),
    Segmented(BinaryMap),
}

impl<T> From<SarFrame<T>> for DetectorInput<T> {
    fn from(frame: SarFrame<T>) -> Self {
        DetectorInput::Raw(frame)
    }
}

impl<T> From<BinaryMap> for DetectorInput<T> {
    fn from(map: BinaryMap) -> Self {
        DetectorInput::Segmented(map)
    }
}

/// Streaming detector: buffers the first `n_init` maps, then classifies and
/// updates one frame per call.
#[derive(Clone, Debug)]
pub struct DetectorState {
    params: DetectorParams,
    seed: u64,
    /// 1-based index of the next frame.
    frame_cursor: usize,
    dims: Option<(usize, usize)>,
    warmup: Vec<BinaryMap>,
    model: Option<BackgroundModel>,
}

impl DetectorState {
    pub fn new(params: DetectorParams, seed: u64) -> Result<Self> {
        params.validate()?;
        Ok(DetectorState {
            params,
            seed,
            frame_cursor: 1,
            dims: None,
            warmup: Vec::new(),
            model: None,
        })
    }

    pub fn params(&self) -> &DetectorParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn frame_cursor(&self) -> usize {
        self.frame_cursor
    }

    pub fn model(&self) -> Option<&BackgroundModel> {
        self.model.as_ref()
    }

    pub fn is_initialized(&self) -> bool {
        self.model.is_some()
    }

    /// Feeds one segmented frame. Returns `None` while warming up.
    pub fn push_segmented(&mut self, seg: BinaryMap) -> Result<Option<FloodMask>> {
        let index = self.frame_cursor;
        let out = self.step(seg).map_err(|e| e.at_frame(index))?;
        self.frame_cursor += 1;
        Ok(out)
    }

    /// Segments `frame` with the detector's parameters, then feeds it.
    pub fn push_frame<T: Backscatter>(&mut self, frame: &SarFrame<T>) -> Result<Option<FloodMask>> {
        let seg = segment_water(frame, &self.params).map_err(|e| e.at_frame(self.frame_cursor))?;
        self.push_segmented(seg)
    }

    pub fn push<T: Backscatter>(&mut self, input: &DetectorInput<T>) -> Result<Option<FloodMask>> {
        match input {
            DetectorInput::Raw(frame) => self.push_frame(frame),
            DetectorInput::Segmented(seg) => self.push_segmented(seg.clone()),
        }
    }

    fn step(&mut self, seg: BinaryMap) -> Result<Option<FloodMask>> {
        match self.dims {
            Some(dims) if dims != seg.dims() => return Err(Error::dims(dims, seg.dims())),
            _ => self.dims = Some(seg.dims()),
        }
        let index = self.frame_cursor;
        match self.model.as_mut() {
            None => {
                self.warmup.push(seg);
                if self.warmup.len() == self.params.n_init {
                    let warmup = std::mem::take(&mut self.warmup);
                    self.model = Some(init_background(&warmup, self.params.samples)?);
                }
                Ok(None)
            }
            Some(model) => {
                let flood = classify_frame(model, &seg, self.params.k_min, index)?;
                update_model(model, &seg, &flood, index, self.seed)?;
                Ok(Some(flood))
            }
        }
    }
}

/// Masks for every frame after warm-up, plus the final detector state.
#[derive(Clone, Debug)]
pub struct DetectionRun {
    pub masks: Vec<FloodMask>,
    pub state: DetectorState,
}

/// Runs the detector over a whole sequence. Fails on the first bad frame,
/// reporting its 1-based index, or when the sequence is too short to
/// produce any mask.
pub fn run_detector<T, I>(params: &DetectorParams, seed: u64, inputs: I) -> Result<DetectionRun>
where
    T: Backscatter,
    I: IntoIterator,
    I::Item: Into<DetectorInput<T>>,
{
    let mut state = DetectorState::new(params.clone(), seed)?;
    let mut masks = Vec::new();
    for input in inputs {
        if let Some(mask) = state.push(&input.into())? {
            masks.push(mask);
        }
    }
    let count = state.frame_cursor - 1;
    if count < params.n_init + 1 {
        return Err(Error::TooFewFrames {
            count,
            required: params.n_init + 1,
        });
    }
    Ok(DetectionRun { masks, state })
}
