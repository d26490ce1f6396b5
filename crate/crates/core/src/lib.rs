//! Flood mapping over SAR image time series as per-pixel temporal anomaly
//! detection.
//!
//! Each frame is segmented into water and ground (boxcar speckle filter,
//! threshold, small-component removal). A per-pixel background model of
//! past water/ground observations then flags water that is unusual for the
//! location, which separates flooding from permanent water bodies.

pub mod anomaly;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod manifest;
pub mod params;
pub mod raster;
pub mod rng;
pub mod scalar;
pub mod segmentation;
pub mod synthetic;

pub use anomaly::{
    classify_frame, init_background, run_detector, update_model, BackgroundModel, DetectionRun, DetectorInput,
    DetectorState,
};
pub use error::{Error, Result};
pub use evaluation::{confusion_counts, summary_metrics, ConfusionCounts, SummaryMetrics};
pub use manifest::{parse_manifest, validate_sequence, FrameRef, SequenceManifest, ValidationReport, Violation};
pub use params::DetectorParams;
pub use raster::{extract_channel, BinaryMap, Class, FloodMask, Plane, Polarization, Raster, SarFrame};
pub use scalar::Backscatter;
pub use segmentation::{
    boxcar_filter, label_components, remove_small_water_components, segment_water, threshold_segment,
    ComponentLabeling, DenoisedPlane,
};
pub use synthetic::{generate_sequence, SceneSpec, SceneTruth};

pub type Plane32 = Plane<f32>;
pub type Plane64 = Plane<f64>;
pub type Raster32 = Raster<f32>;
pub type Raster64 = Raster<f64>;
pub type SarFrame32 = SarFrame<f32>;
pub type SarFrame64 = SarFrame<f64>;
pub type DenoisedPlane32 = DenoisedPlane<f32>;
pub type DenoisedPlane64 = DenoisedPlane<f64>;
