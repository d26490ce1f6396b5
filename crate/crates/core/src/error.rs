use std::path::PathBuf;

use thiserror::Error;

use crate::io::FormatError;
use crate::raster::Polarization;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("channel {label} is not present in the frame")]
    MissingChannel { label: Polarization },

    #[error("invalid kernel size {kernel_size}, must be at least 1")]
    InvalidKernel { kernel_size: usize },

    #[error("dimension mismatch: expected {expected_width}x{expected_height}, found {width}x{height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },

    #[error("warm-up sequence is empty")]
    EmptyWarmup,

    #[error("list length mismatch: {left} predictions vs {right} references")]
    LengthMismatch { left: usize, right: usize },

    #[error("frame index mismatch: prediction for frame {pred} paired with reference for frame {truth}")]
    FrameIndexMismatch { pred: usize, truth: usize },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid detector parameters: {0}")]
    InvalidParams(String),

    #[error("invalid scene spec: {0}")]
    InvalidSpec(String),

    #[error("sequence has {count} frames, at least {required} are required")]
    TooFewFrames { count: usize, required: usize },

    #[error("frame {index}: {source}")]
    Frame {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn at_frame(self, index: usize) -> Self {
        Error::Frame {
            index,
            source: Box::new(self),
        }
    }

    pub(crate) fn dims(expected: (usize, usize), found: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            expected_width: expected.0,
            expected_height: expected.1,
            width: found.0,
            height: found.1,
        }
    }

    /// Innermost error, looking through frame context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Frame { source, .. } => source.root(),
            other => other,
        }
    }
}
