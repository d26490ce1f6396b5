//! Pixel-wise scoring of flood masks against reference masks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::FloodMask;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn add(&mut self, pred: bool, truth: bool) {
        match (pred, truth) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        ConfusionCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

fn pair_counts(pred: &FloodMask, truth: &FloodMask) -> Result<ConfusionCounts> {
    if pred.dims() != truth.dims() {
        return Err(Error::dims(truth.dims(), pred.dims()).at_frame(pred.frame_index()));
    }
    if pred.frame_index() != truth.frame_index() {
        return Err(Error::FrameIndexMismatch {
            pred: pred.frame_index(),
            truth: truth.frame_index(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in pred.as_slice().iter().zip(truth.as_slice()) {
        c.add(p, t);
    }
    Ok(c)
}

/// Counts summed over paired frames.
pub fn confusion_counts(pred: &[FloodMask], truth: &[FloodMask]) -> Result<ConfusionCounts> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    pred.iter()
        .zip(truth)
        .try_fold(ConfusionCounts::default(), |acc, (p, t)| Ok(acc + pair_counts(p, t)?))
}

/// Scores; `None` where the ratio is 0/0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SummaryMetrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub iou: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn summary_metrics(c: &ConfusionCounts) -> SummaryMetrics {
    SummaryMetrics {
        precision: ratio(c.tp, c.tp + c.fp),
        recall: ratio(c.tp, c.tp + c.fn_),
        f1: ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_),
        iou: ratio(c.tp, c.tp + c.fp + c.fn_),
    }
}

/// Line-oriented `key=value` report; undefined metrics print as `undefined`.
pub fn format_report(c: &ConfusionCounts, m: &SummaryMetrics, frames: usize) -> String {
    let fmt = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), |v| format!("{v:.6}"));
    format!(
        "frames={frames}\ntp={}\nfp={}\nfn={}\ntn={}\nprecision={}\nrecall={}\nf1={}\niou={}\n",
        c.tp,
        c.fp,
        c.fn_,
        c.tn,
        fmt(m.precision),
        fmt(m.recall),
        fmt(m.f1),
        fmt(m.iou)
    )
}

/// JSON twin of [`format_report`]; undefined metrics are `null`.
pub fn json_report(c: &ConfusionCounts, m: &SummaryMetrics, frames: usize) -> serde_json::Value {
    serde_json::json!({
        "frames": frames,
        "tp": c.tp,
        "fp": c.fp,
        "fn": c.fn_,
        "tn": c.tn,
        "precision": m.precision,
        "recall": m.recall,
        "f1": m.f1,
        "iou": m.iou,
    })
}
