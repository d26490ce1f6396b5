//! Sequence manifests: the ordered frame list plus detector configuration.
//!
//! ```json
//! {
//!   "frames": [{"id": "s1_0001", "path": "frames/s1_0001.fr32", "timestamp": "2019-05-10T05:42:00Z"}],
//!   "params": {"kernel_size": 8, "threshold": 0.03, "num_components": 20, "K": 5, "k_min": 1, "n_init": 30, "channel": "VV"},
//!   "seed": 42
//! }
//! ```
//!
//! Every `params` field is optional. Relative frame paths are resolved
//! against the manifest's directory.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::anomaly::{DetectionRun, DetectorState};
use crate::error::{Error, Result};
use crate::io::{read_file, read_raster};
use crate::params::DetectorParams;
use crate::raster::{Polarization, SarFrame};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameRef {
    pub id: String,
    pub path: PathBuf,
    pub timestamp: DateTime<Utc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceManifest {
    pub frames: Vec<FrameRef>,
    #[serde(default)]
    pub params: DetectorParams,
    #[serde(default)]
    pub seed: u64,
}

/// One broken manifest or frame invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    InvalidParam { field: &'static str, reason: String },
    TooFewFrames { count: usize, required: usize },
    DuplicateFrameId { id: String, first_index: usize, index: usize },
    NonMonotonicTimestamps { previous_id: String, id: String },
    Unreadable { frame_id: String, path: PathBuf, message: String },
    InvalidValues { frame_id: String, message: String },
    DimensionMismatch { frame_id: String, expected: (usize, usize), found: (usize, usize) },
    ChannelMismatch { frame_id: String, expected: Vec<Polarization>, found: Vec<Polarization> },
    MissingChannel { frame_id: String, channel: Polarization },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidParam { field, reason } => write!(f, "params.{field}: {reason}"),
            Violation::TooFewFrames { count, required } => {
                write!(f, "frame count < n_init+1: {count} frames, {required} required")
            }
            Violation::DuplicateFrameId { id, first_index, index } => {
                write!(f, "duplicate frame id {id:?} at frames[{first_index}] and frames[{index}]")
            }
            Violation::NonMonotonicTimestamps { previous_id, id } => {
                write!(f, "non-monotonic timestamps: frame {id:?} is not after frame {previous_id:?}")
            }
            Violation::Unreadable { frame_id, path, message } => {
                write!(f, "frame {frame_id:?} ({}): {message}", path.display())
            }
            Violation::InvalidValues { frame_id, message } => write!(f, "frame {frame_id:?}: {message}"),
            Violation::DimensionMismatch { frame_id, expected, found } => write!(
                f,
                "frame {frame_id:?}: dimensions {}x{} differ from sequence dimensions {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::ChannelMismatch { frame_id, expected, found } => {
                write!(f, "frame {frame_id:?}: channels {found:?} differ from sequence channels {expected:?}")
            }
            Violation::MissingChannel { frame_id, channel } => {
                write!(f, "frame {frame_id:?}: segmentation channel {channel} is missing")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "manifest is valid");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Checks that need no file access.
fn structural_violations(manifest: &SequenceManifest) -> Vec<(String, Violation)> {
    let mut out = Vec::new();
    for v in manifest.params.violations() {
        out.push((
            format!("params.{}", v.field),
            Violation::InvalidParam {
                field: v.field,
                reason: v.reason,
            },
        ));
    }
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, frame) in manifest.frames.iter().enumerate() {
        if let Some(&first) = seen.get(frame.id.as_str()) {
            out.push((
                format!("frames[{i}].id"),
                Violation::DuplicateFrameId {
                    id: frame.id.clone(),
                    first_index: first,
                    index: i,
                },
            ));
        } else {
            seen.insert(&frame.id, i);
        }
    }
    for (i, pair) in manifest.frames.windows(2).enumerate() {
        if pair[1].timestamp <= pair[0].timestamp {
            out.push((
                format!("frames[{}].timestamp", i + 1),
                Violation::NonMonotonicTimestamps {
                    previous_id: pair[0].id.clone(),
                    id: pair[1].id.clone(),
                },
            ));
        }
    }
    let required = manifest.params.n_init + 1;
    if manifest.frames.len() < required {
        out.push((
            "frames".into(),
            Violation::TooFewFrames {
                count: manifest.frames.len(),
                required,
            },
        ));
    }
    out
}

/// Parses manifest JSON without checking invariants. Relative frame paths
/// are joined onto `base_dir`.
pub fn parse_manifest_unchecked(text: &str, base_dir: &Path) -> Result<SequenceManifest> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut manifest: SequenceManifest = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema {
            path: if path == "." { "<root>".into() } else { path },
            message: e.into_inner().to_string(),
        }
    })?;
    for frame in &mut manifest.frames {
        if frame.path.is_relative() {
            frame.path = base_dir.join(&frame.path);
        }
    }
    Ok(manifest)
}

/// Parses manifest JSON and rejects any broken parameter or ordering
/// invariant. Frame count and frame contents are left to [`validate_sequence`].
pub fn parse_manifest_str(text: &str, base_dir: &Path) -> Result<SequenceManifest> {
    let manifest = parse_manifest_unchecked(text, base_dir)?;
    if let Some((path, violation)) = structural_violations(&manifest)
        .into_iter()
        .find(|(_, v)| !matches!(v, Violation::TooFewFrames { .. }))
    {
        return Err(Error::Schema {
            path,
            message: violation.to_string(),
        });
    }
    Ok(manifest)
}

fn base_dir_of(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

pub fn parse_manifest(path: &Path) -> Result<SequenceManifest> {
    let text = String::from_utf8(read_file(path)?).map_err(|e| Error::Schema {
        path: "<root>".into(),
        message: format!("manifest is not UTF-8: {e}"),
    })?;
    parse_manifest_str(&text, base_dir_of(path))
}

pub fn load_manifest_unchecked(path: &Path) -> Result<SequenceManifest> {
    let text = String::from_utf8_lossy(&read_file(path)?).into_owned();
    parse_manifest_unchecked(&text, base_dir_of(path))
}

/// Reads one frame and attaches the manifest's id and timestamp.
pub fn load_frame(frame: &FrameRef) -> Result<SarFrame<f32>> {
    let raster = read_raster(&frame.path)?;
    SarFrame::new(raster, frame.timestamp, frame.id.clone())
}

/// Consistency of a frame with the first frame of the sequence.
fn frame_violation(
    reference: &mut Option<((usize, usize), Vec<Polarization>)>,
    frame: &SarFrame<f32>,
    channel: Polarization,
) -> Option<Violation> {
    let frame_id = frame.frame_id().to_string();
    let dims = (frame.width(), frame.height());
    let labels = frame.labels().to_vec();
    let (expected_dims, expected_labels) = reference.get_or_insert_with(|| (dims, labels.clone()));
    if dims != *expected_dims {
        Some(Violation::DimensionMismatch {
            frame_id,
            expected: *expected_dims,
            found: dims,
        })
    } else if labels != *expected_labels {
        Some(Violation::ChannelMismatch {
            frame_id,
            expected: expected_labels.clone(),
            found: labels,
        })
    } else if !labels.contains(&channel) {
        Some(Violation::MissingChannel { frame_id, channel })
    } else {
        None
    }
}

fn load_violation(frame: &FrameRef, err: Error) -> Violation {
    match err {
        Error::InvalidFrame(message) => Violation::InvalidValues {
            frame_id: frame.id.clone(),
            message,
        },
        other => Violation::Unreadable {
            frame_id: frame.id.clone(),
            path: frame.path.clone(),
            message: other.to_string(),
        },
    }
}

/// Lists every broken invariant of the manifest and its frames. An empty
/// report means [`run_manifest`] will accept the manifest.
pub fn validate_sequence(manifest: &SequenceManifest) -> ValidationReport {
    let mut violations: Vec<Violation> = structural_violations(manifest).into_iter().map(|(_, v)| v).collect();
    let mut reference = None;
    for frame in &manifest.frames {
        match load_frame(frame) {
            Ok(loaded) => violations.extend(frame_violation(&mut reference, &loaded, manifest.params.channel)),
            Err(e) => violations.push(load_violation(frame, e)),
        }
    }
    ValidationReport { violations }
}

/// Streams the manifest's frames through the detector. `on_frame` sees every
/// frame's 1-based index, id and mask (`None` during warm-up) as soon as it
/// is produced.
pub fn run_manifest_with<F>(manifest: &SequenceManifest, mut on_frame: F) -> Result<DetectorState>
where
    F: FnMut(usize, &FrameRef, Option<&crate::raster::FloodMask>) -> Result<()>,
{
    if let Some((path, violation)) = structural_violations(manifest).into_iter().next() {
        return match violation {
            Violation::TooFewFrames { count, required } => Err(Error::TooFewFrames { count, required }),
            v => Err(Error::Schema {
                path,
                message: v.to_string(),
            }),
        };
    }
    let mut state = DetectorState::new(manifest.params.clone(), manifest.seed)?;
    let mut reference = None;
    for (i, frame_ref) in manifest.frames.iter().enumerate() {
        let index = i + 1;
        let frame = load_frame(frame_ref).map_err(|e| e.at_frame(index))?;
        if let Some(v) = frame_violation(&mut reference, &frame, manifest.params.channel) {
            return Err(Error::InvalidFrame(v.to_string()).at_frame(index));
        }
        let mask = state.push_frame(&frame)?;
        on_frame(index, frame_ref, mask.as_ref())?;
    }
    Ok(state)
}

pub fn run_manifest(manifest: &SequenceManifest) -> Result<DetectionRun> {
    let mut masks = Vec::new();
    let state = run_manifest_with(manifest, |_, _, mask| {
        masks.extend(mask.cloned());
        Ok(())
    })?;
    Ok(DetectionRun { masks, state })
}
