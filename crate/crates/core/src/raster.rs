//! Core grid types shared by every stage of the pipeline.
//!
//! All grids are row-major with the origin at the top-left corner; pixel
//! `(row, col)` lives at linear index `row * width + col`.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Backscatter;

/// Polarization channel of a Sentinel-1 style acquisition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    VV,
    VH,
}

impl Polarization {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarization::VV => "VV",
            Polarization::VH => "VH",
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarization {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "VV" | "vv" => Ok(Polarization::VV),
            "VH" | "vh" => Ok(Polarization::VH),
            other => Err(format!("unknown polarization {other:?}, expected VV or VH")),
        }
    }
}

/// Single-band grid of backscatter values.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Backscatter> Plane<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidFrame(format!("empty plane {width}x{height}")));
        }
        if data.len() != width * height {
            return Err(Error::InvalidFrame(format!(
                "plane of {width}x{height} needs {} values, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Plane { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        assert!(width > 0 && height > 0, "empty plane");
        Plane {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        assert!(width > 0 && height > 0, "empty plane");
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Plane { width, height, data }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    pub fn min_max(&self) -> (T, T) {
        self.data.iter().fold(
            (T::infinity(), T::neg_infinity()),
            |(lo, hi), &v| (lo.min(v), hi.max(v)),
        )
    }
}

impl<T> Plane<T> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }
}

/// Pixel grid with one or two labelled polarization planes, no acquisition
/// metadata. This is exactly what the raster file format stores.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster<T> {
    width: usize,
    height: usize,
    channels: Vec<Plane<T>>,
    labels: Vec<Polarization>,
}

impl<T: Backscatter> Raster<T> {
    /// Checks structure only: channel count, label uniqueness and plane size.
    pub fn new(channels: Vec<Plane<T>>, labels: Vec<Polarization>) -> Result<Self> {
        if channels.is_empty() || channels.len() > 2 {
            return Err(Error::InvalidFrame(format!(
                "expected 1 or 2 channels, got {}",
                channels.len()
            )));
        }
        if channels.len() != labels.len() {
            return Err(Error::InvalidFrame(format!(
                "{} channels but {} labels",
                channels.len(),
                labels.len()
            )));
        }
        if labels.len() == 2 && labels[0] == labels[1] {
            return Err(Error::InvalidFrame(format!("duplicate channel label {}", labels[0])));
        }
        let dims = channels[0].dims();
        if let Some(bad) = channels.iter().find(|p| p.dims() != dims) {
            return Err(Error::dims(dims, bad.dims()));
        }
        Ok(Raster {
            width: dims.0,
            height: dims.1,
            channels,
            labels,
        })
    }

    pub fn single(label: Polarization, plane: Plane<T>) -> Self {
        Raster {
            width: plane.width(),
            height: plane.height(),
            channels: vec![plane],
            labels: vec![label],
        }
    }

    /// First non-finite or negative value as `(label, linear index, value)`.
    pub fn first_invalid_value(&self) -> Option<(Polarization, usize, T)> {
        self.labels.iter().zip(&self.channels).find_map(|(&label, plane)| {
            plane
                .as_slice()
                .iter()
                .position(|v| !v.is_finite() || *v < T::zero())
                .map(|i| (label, i, plane.as_slice()[i]))
        })
    }
}

impl<T> Raster<T> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn channels(&self) -> &[Plane<T>] {
        &self.channels
    }

    pub fn labels(&self) -> &[Polarization] {
        &self.labels
    }

    pub fn channel(&self, label: Polarization) -> Option<&Plane<T>> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|i| &self.channels[i])
    }

    pub fn channel_mut(&mut self, label: Polarization) -> Option<&mut Plane<T>> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(move |i| &mut self.channels[i])
    }
}

/// One acquisition of the time series.
///
/// Values are linear power backscatter and are guaranteed finite and
/// non-negative; the detector's default threshold is only meaningful on a
/// linear scale, so dB inputs must be converted beforehand.
#[derive(Clone, Debug, PartialEq)]
pub struct SarFrame<T> {
    raster: Raster<T>,
    timestamp: DateTime<Utc>,
    frame_id: String,
}

impl<T: Backscatter> SarFrame<T> {
    pub fn new(raster: Raster<T>, timestamp: DateTime<Utc>, frame_id: impl Into<String>) -> Result<Self> {
        let frame_id = frame_id.into();
        if let Some((label, index, value)) = raster.first_invalid_value() {
            return Err(Error::InvalidFrame(format!(
                "frame {frame_id}: channel {label} pixel {index} has value {value:?}, \
                 backscatter must be finite and non-negative"
            )));
        }
        Ok(SarFrame {
            raster,
            timestamp,
            frame_id,
        })
    }
}

impl<T> SarFrame<T> {
    pub fn raster(&self) -> &Raster<T> {
        &self.raster
    }

    pub fn into_raster(self) -> Raster<T> {
        self.raster
    }

    pub fn width(&self) -> usize {
        self.raster.width
    }

    pub fn height(&self) -> usize {
        self.raster.height
    }

    pub fn labels(&self) -> &[Polarization] {
        &self.raster.labels
    }

    pub fn timestamp(&self) -> DateTime<Utc> {
        self.timestamp
    }

    pub fn frame_id(&self) -> &str {
        &self.frame_id
    }
}

/// Selects the plane for `label`. The returned plane is borrowed from the
/// frame, never resampled or mixed with the other channel.
pub fn extract_channel<T>(frame: &SarFrame<T>, label: Polarization) -> Result<&Plane<T>> {
    frame
        .raster
        .channel(label)
        .ok_or(Error::MissingChannel { label })
}

/// Water/ground cluster of a pixel. The discriminants are the values used
/// in the classification rule: water is 0, ground is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Class {
    Water = 0,
    Ground = 1,
}

impl Class {
    #[inline]
    pub fn is_water(self) -> bool {
        self == Class::Water
    }

    #[inline]
    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Class::Water),
            1 => Some(Class::Ground),
            _ => None,
        }
    }
}

/// Per-pixel water/ground segmentation of one frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryMap {
    width: usize,
    height: usize,
    values: Vec<Class>,
}

impl BinaryMap {
    pub fn new(width: usize, height: usize, values: Vec<Class>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::InvalidFrame(format!(
                "binary map of {width}x{height} needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        Ok(BinaryMap { width, height, values })
    }

    pub fn filled(width: usize, height: usize, class: Class) -> Self {
        BinaryMap {
            width,
            height,
            values: vec![class; width * height],
        }
    }

    /// Builds a map from a 0/1 grid (0 = water).
    pub fn from_bits(width: usize, height: usize, bits: &[u8]) -> Result<Self> {
        let values = bits
            .iter()
            .map(|&b| Class::from_bit(b).ok_or_else(|| Error::InvalidFrame(format!("bit value {b} not in {{0,1}}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn as_slice(&self) -> &[Class] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [Class] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Class {
        self.values[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, class: Class) {
        self.values[row * self.width + col] = class;
    }

    pub fn water_count(&self) -> usize {
        self.values.iter().filter(|c| c.is_water()).count()
    }

    /// Water pixels as a boolean mask, e.g. for writing to disk.
    pub fn water_mask(&self) -> Vec<bool> {
        self.values.iter().map(|c| c.is_water()).collect()
    }
}

/// Per-pixel flood output for frame `frame_index` (1-based sequence position).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FloodMask {
    width: usize,
    height: usize,
    flooded: Vec<bool>,
    frame_index: usize,
}

impl FloodMask {
    pub fn new(width: usize, height: usize, flooded: Vec<bool>, frame_index: usize) -> Result<Self> {
        if flooded.len() != width * height {
            return Err(Error::InvalidFrame(format!(
                "flood mask of {width}x{height} needs {} values, got {}",
                width * height,
                flooded.len()
            )));
        }
        Ok(FloodMask {
            width,
            height,
            flooded,
            frame_index,
        })
    }

    pub fn empty(width: usize, height: usize, frame_index: usize) -> Self {
        FloodMask {
            width,
            height,
            flooded: vec![false; width * height],
            frame_index,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn frame_index(&self) -> usize {
        self.frame_index
    }

    pub fn with_frame_index(mut self, frame_index: usize) -> Self {
        self.frame_index = frame_index;
        self
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.flooded
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.flooded[row * self.width + col]
    }

    pub fn flooded_count(&self) -> usize {
        self.flooded.iter().filter(|&&f| f).count()
    }
}
