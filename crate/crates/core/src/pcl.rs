//! Prediction-consistency loss math: augmentation records, de-augmentation,
//! per-object error vectors in the object's own frame, and the pairwise loss.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::association::{GroundTruthObject, Prediction};
use crate::error::{Error, Result};
use crate::geometry::Box3D;

/// Flip, rotation and scale applied to a training frame.
///
/// The center map is `M = diag(ix, iy, 1) * R(alpha) * s` with
/// `R(alpha) = [[cos, sin, 0], [-sin, cos, 0], [0, 0, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentationRecord {
    pub ix: f64,
    pub iy: f64,
    pub alpha: f64,
    pub s: f64,
}

impl AugmentationRecord {
    pub const IDENTITY: AugmentationRecord = AugmentationRecord {
        ix: 1.0,
        iy: 1.0,
        alpha: 0.0,
        s: 1.0,
    };

    pub fn new(flip_x: bool, flip_y: bool, alpha: f64, s: f64) -> Result<Self> {
        let sign = |f: bool| if f { -1.0 } else { 1.0 };
        let rec = AugmentationRecord {
            ix: sign(flip_x),
            iy: sign(flip_y),
            alpha,
            s,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| v == 1.0 || v == -1.0;
        if !unit(self.ix) || !unit(self.iy) {
            return Err(Error::InvalidArgument(format!(
                "flip indicators must be +1 or -1, got ({}, {})",
                self.ix, self.iy
            )));
        }
        if !self.alpha.is_finite() || !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need finite alpha and positive scale, got alpha={}, s={}",
                self.alpha, self.s
            )));
        }
        Ok(())
    }

    /// `M * (x, y)` for the horizontal components.
    fn forward(&self, x: f64, y: f64) -> (f64, f64) {
        let (sn, cs) = self.alpha.sin_cos();
        (
            self.ix * self.s * (cs * x + sn * y),
            self.iy * self.s * (-sn * x + cs * y),
        )
    }

    /// `M^-1 * (x, y)`.
    fn inverse(&self, x: f64, y: f64) -> (f64, f64) {
        let (sn, cs) = self.alpha.sin_cos();
        // Flips are their own inverse; R(alpha)^-1 is its transpose.
        let (u, v) = (self.ix * x / self.s, self.iy * y / self.s);
        (cs * u - sn * v, sn * u + cs * v)
    }
}

/// Applies `rec` to a prediction. Yaw becomes `ix * iy * yaw + alpha`, the
/// exact inverse of [`de_augment`].
pub fn apply_augmentation(p: &Prediction, rec: &AugmentationRecord) -> Prediction {
    let b = &p.bbox;
    let (x, y) = rec.forward(b.x, b.y);
    Prediction {
        bbox: Box3D {
            x,
            y,
            z: b.z * rec.s,
            l: b.l * rec.s,
            w: b.w * rec.s,
            h: b.h * rec.s,
            yaw: rec.ix * rec.iy * b.yaw + rec.alpha,
        },
        ..p.clone()
    }
}

/// Maps an augmented prediction back to the original frame.
pub fn de_augment(p: &Prediction, rec: &AugmentationRecord) -> Prediction {
    let b = &p.bbox;
    let (x, y) = rec.inverse(b.x, b.y);
    Prediction {
        bbox: Box3D {
            x,
            y,
            z: b.z / rec.s,
            l: b.l / rec.s,
            w: b.w / rec.s,
            h: b.h / rec.s,
            yaw: rec.ix * rec.iy * (b.yaw - rec.alpha),
        },
        ..p.clone()
    }
}

/// Error pattern of one de-augmented prediction against its GT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionErrors {
    pub e_c: f64,
    pub e_l: [f64; 3],
    pub e_e: [f64; 3],
    pub e_h: [f64; 2],
}

pub fn prediction_errors(p: &Prediction, gt: &GroundTruthObject) -> Result<PredictionErrors> {
    let g = &gt.bbox;
    if !(g.l > 0.0 && g.w > 0.0 && g.h > 0.0) {
        return Err(Error::InvalidBox(format!(
            "GT extents must be positive, got ({}, {}, {})",
            g.l, g.w, g.h
        )));
    }
    let b = &p.bbox;
    let (sn, cs) = g.yaw.sin_cos();
    let (dx, dy, dz) = (b.x - g.x, b.y - g.y, b.z - g.z);
    let (hs, hc) = (b.yaw - g.yaw).sin_cos();
    Ok(PredictionErrors {
        e_c: 1.0 - p.score,
        e_l: [cs * dx + sn * dy, -sn * dx + cs * dy, dz],
        e_e: [b.l / g.l, b.w / g.w, b.h / g.h],
        e_h: [hs, hc],
    })
}

/// Term weights for [`pcl_loss`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PclWeights {
    pub confidence: f64,
    pub localization: f64,
    pub extent: f64,
    pub heading: f64,
}

impl Default for PclWeights {
    fn default() -> Self {
        PclWeights {
            confidence: 1.0,
            localization: 1.0,
            extent: 1.0,
            heading: 1.0,
        }
    }
}

fn l1<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Mean over index-aligned pairs of squared confidence difference plus L1
/// distances of the three vector errors.
pub fn pcl_loss(a: &[PredictionErrors], b: &[PredictionErrors], w: &PclWeights) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidArgument("error collections are empty".into()));
    }
    let total: f64 = a
        .iter()
        .zip(b)
        .map(|(p, q)| {
            let dc = p.e_c - q.e_c;
            w.confidence * dc * dc
                + w.localization * l1(&p.e_l, &q.e_l)
                + w.extent * l1(&p.e_e, &q.e_e)
                + w.heading * l1(&p.e_h, &q.e_h)
        })
        .sum();
    Ok(total / a.len() as f64)
}

/// Uniform integer frame offset in `[-n, n]`.
pub fn sample_neighbor_offset<R: Rng + ?Sized>(n: u32, rng: &mut R) -> i64 {
    let n = i64::from(n);
    rng.random_range(-n..=n)
}

/// Reads one [`PredictionErrors`] per non-blank line.
pub fn read_errors(reader: impl BufRead) -> Result<Vec<PredictionErrors>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Record {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Record {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn load_errors(path: impl AsRef<Path>) -> Result<Vec<PredictionErrors>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_errors(BufReader::new(file))
}
