//! Per-pair stability index.
//!
//! Both predictions are projected onto a pivot box built from the two ground
//! truths, then compared one element at a time: center, extent, heading and
//! confidence. The box terms are averaged and weighted by the confidence term.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    iou_aligned_same_size, iou_centered_axis_aligned, iou_rotated, transform_unchecked,
    wrap_angle, Box3D,
};

/// Calibration ranges narrower than this are treated as degenerate.
pub const DEGENERATE_RANGE: f64 = 1e-9;

/// A matched prediction: box plus detection score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    #[serde(rename = "box")]
    pub bbox: Box3D,
    pub score: f64,
}

/// One ground truth at one timestamp, with its matched prediction if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedObservation {
    pub gt: Box3D,
    pub detection: Option<Detection>,
}

impl MatchedObservation {
    pub fn matched(gt: Box3D, bbox: Box3D, score: f64) -> Self {
        MatchedObservation {
            gt,
            detection: Some(Detection { bbox, score }),
        }
    }

    pub fn unmatched(gt: Box3D) -> Self {
        MatchedObservation {
            gt,
            detection: None,
        }
    }
}

/// Upper and lower confidence percentiles used to normalize score differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRange {
    pub hi: f64,
    pub lo: f64,
}

impl CalibrationRange {
    pub fn new(hi: f64, lo: f64) -> Result<Self> {
        if !hi.is_finite() || !lo.is_finite() || hi < lo {
            return Err(Error::InvalidArgument(format!(
                "calibration range requires finite hi >= lo, got hi={hi}, lo={lo}"
            )));
        }
        Ok(CalibrationRange { hi, lo })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Stability of one object across two timestamps.
///
/// `matched` is false when either side lacked a prediction; such pairs score 0
/// everywhere and are excluded from sub-indicator averages downstream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityScore {
    pub si: f64,
    pub si_c: f64,
    pub si_l: f64,
    pub si_e: f64,
    pub si_h: f64,
    pub matched: bool,
}

impl StabilityScore {
    pub const UNMATCHED: StabilityScore = StabilityScore {
        si: 0.0,
        si_c: 0.0,
        si_l: 0.0,
        si_e: 0.0,
        si_h: 0.0,
        matched: false,
    };
}

/// Knobs that only exist for negative controls in the property harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricOptions {
    /// Heading differences at or beyond this (radians) score 0.
    pub heading_cutoff: f64,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions {
            heading_cutoff: FRAC_PI_4,
        }
    }
}

/// Origin-centered, zero-yaw box with the geometric-mean extents of two GTs.
pub fn pivot_box(gt1: &Box3D, gt2: &Box3D) -> Result<Box3D> {
    gt1.validate()?;
    gt2.validate()?;
    Ok(pivot_unchecked(gt1, gt2))
}

fn pivot_unchecked(gt1: &Box3D, gt2: &Box3D) -> Box3D {
    Box3D::centered(
        (gt1.l * gt2.l).sqrt(),
        (gt1.w * gt2.w).sqrt(),
        (gt1.h * gt2.h).sqrt(),
    )
}

/// Expresses `pred` relative to the pivot, using its own GT as the anchor.
pub fn project_to_pivot(pred: &Box3D, gt: &Box3D, pivot: &Box3D) -> Result<Box3D> {
    crate::geometry::transform_box(pred, gt, pivot)
}

/// Localization term: IoU of two pivot-sized, zero-yaw boxes at the projected
/// centers.
pub fn si_localization(p1: &Box3D, p2: &Box3D, pivot: &Box3D) -> f64 {
    let offset = [p2.x - p1.x, p2.y - p1.y, p2.z - p1.z];
    iou_aligned_same_size(offset, pivot.extents())
}

/// Extent term: IoU of two origin-centered boxes with the projected extents.
pub fn si_extent(p1: &Box3D, p2: &Box3D) -> f64 {
    iou_centered_axis_aligned(p1.extents(), p2.extents())
}

/// Heading term, gated to 0 once the wrapped yaw difference reaches pi/4.
pub fn si_heading(p1: &Box3D, p2: &Box3D, pivot: &Box3D) -> f64 {
    si_heading_gated(p1, p2, pivot, FRAC_PI_4)
}

fn si_heading_gated(p1: &Box3D, p2: &Box3D, pivot: &Box3D, cutoff: f64) -> f64 {
    let delta = wrap_angle((p1.yaw - p2.yaw).abs()).abs();
    if delta >= cutoff {
        return 0.0;
    }
    // Only |delta| matters for two congruent co-centered rectangles.
    let turned = Box3D { yaw: delta, ..*pivot };
    iou_rotated(pivot, &turned)
}

/// Confidence term: `max(0, 1 - |c1 - c2| / (hi - lo))`.
///
/// A degenerate range scores 1 for (numerically) equal scores and 0 otherwise.
pub fn si_confidence(c1: f64, c2: f64, cal: &CalibrationRange) -> f64 {
    let diff = (c1 - c2).abs();
    let width = cal.width();
    if width < DEGENERATE_RANGE {
        return if diff < DEGENERATE_RANGE { 1.0 } else { 0.0 };
    }
    (1.0 - diff / width).max(0.0)
}

/// Stability index of one object observed at two timestamps.
pub fn stability_index(
    obs1: &MatchedObservation,
    obs2: &MatchedObservation,
    cal: &CalibrationRange,
) -> Result<StabilityScore> {
    stability_index_with(obs1, obs2, cal, &MetricOptions::default())
}

pub fn stability_index_with(
    obs1: &MatchedObservation,
    obs2: &MatchedObservation,
    cal: &CalibrationRange,
    opts: &MetricOptions,
) -> Result<StabilityScore> {
    obs1.gt.validate()?;
    obs2.gt.validate()?;
    let (Some(d1), Some(d2)) = (obs1.detection, obs2.detection) else {
        return Ok(StabilityScore::UNMATCHED);
    };
    d1.bbox.validate()?;
    d2.bbox.validate()?;

    let pivot = pivot_unchecked(&obs1.gt, &obs2.gt);
    let p1 = transform_unchecked(&d1.bbox, &obs1.gt, &pivot);
    let p2 = transform_unchecked(&d2.bbox, &obs2.gt, &pivot);

    let si_l = si_localization(&p1, &p2, &pivot);
    let si_e = si_extent(&p1, &p2);
    let si_h = si_heading_gated(&p1, &p2, &pivot, opts.heading_cutoff);
    let si_c = si_confidence(d1.score, d2.score, cal);
    Ok(StabilityScore {
        si: si_c * (si_l + si_e + si_h) / 3.0,
        si_c,
        si_l,
        si_e,
        si_h,
        matched: true,
    })
}
