//! Synthetic trajectories with noise-injected predictions.
//!
//! Objects sit on a 25 m grid around the ego origin so their footprints never
//! touch, whatever the motion model. GT and noise draw from separate ChaCha
//! streams keyed by sequence index: changing a noise scale leaves the GT and
//! every other noise draw untouched.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::association::{GroundTruthObject, Prediction};
use crate::dataset::{Dataset, FrameRecord};
use crate::error::{Error, Result};
use crate::evaluator::{evaluate, EvaluationConfig};
use crate::geometry::Box3D;
use crate::property_lab::CurveTable;

const GRID_SPACING: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ObjectClass {
    Vehicle,
    Pedestrian,
    Cyclist,
}

impl ObjectClass {
    pub fn name(self) -> &'static str {
        match self {
            ObjectClass::Vehicle => "Vehicle",
            ObjectClass::Pedestrian => "Pedestrian",
            ObjectClass::Cyclist => "Cyclist",
        }
    }

    /// Typical `(l, w, h)` and cruising speed in m/s.
    fn template(self) -> ([f64; 3], f64) {
        match self {
            ObjectClass::Vehicle => ([4.6, 1.9, 1.6], 6.0),
            ObjectClass::Pedestrian => ([0.8, 0.8, 1.75], 1.4),
            ObjectClass::Cyclist => ([1.8, 0.7, 1.7], 4.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MotionModel {
    Static,
    /// Every object of a sequence shares one velocity, so spacing is kept.
    ConstantVelocity,
    /// Circles its grid anchor at the class speed with this yaw rate (rad/s).
    /// Slower rates are raised so the circle fits inside the object's cell.
    Turning { yaw_rate: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub sequences: usize,
    pub frames: usize,
    /// Capture interval in seconds.
    pub interval: f64,
    pub objects: usize,
    pub motion: MotionModel,
    /// Relative class weights.
    pub class_mix: Vec<(ObjectClass, f64)>,
    pub seed: u64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            sequences: 4,
            frames: 20,
            interval: 0.1,
            objects: 10,
            motion: MotionModel::Turning { yaw_rate: 0.5 },
            class_mix: vec![
                (ObjectClass::Vehicle, 0.6),
                (ObjectClass::Pedestrian, 0.25),
                (ObjectClass::Cyclist, 0.15),
            ],
            seed: 7,
        }
    }
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.interval > 0.0 && self.interval.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "capture interval must be positive, got {}",
                self.interval
            )));
        }
        if let MotionModel::Turning { yaw_rate } = self.motion {
            if !yaw_rate.is_finite() {
                return Err(Error::InvalidArgument("yaw rate must be finite".into()));
            }
        }
        let total: f64 = self.class_mix.iter().map(|c| c.1).sum();
        if self.class_mix.iter().any(|c| !(c.1 >= 0.0)) || !(total > 0.0) {
            return Err(Error::InvalidArgument(
                "class mix needs non-negative weights with a positive sum".into(),
            ));
        }
        Ok(())
    }
}

/// Per-element noise. Extent noise is multiplicative: each extent is scaled by
/// `exp(extent * N(0, 1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub center: f64,
    pub extent: f64,
    pub yaw: f64,
    pub score: f64,
    pub dropout: f64,
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            center: 0.0,
            extent: 0.0,
            yaw: 0.0,
            score: 0.0,
            dropout: 0.0,
            seed: 11,
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let scales = [self.center, self.extent, self.yaw, self.score];
        if scales.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "noise scales must be finite and non-negative, got {scales:?}"
            )));
        }
        if !(0.0..=1.0).contains(&self.dropout) {
            return Err(Error::InvalidArgument(format!(
                "dropout must lie in [0, 1], got {}",
                self.dropout
            )));
        }
        Ok(())
    }
}

struct Track {
    id: String,
    class: ObjectClass,
    extents: [f64; 3],
    anchor: [f64; 2],
    heading: f64,
    speed: f64,
    /// Signed yaw rate; zero unless turning.
    omega: f64,
    base_score: f64,
}

impl Track {
    fn at(&self, t: f64, drift: [f64; 2]) -> Box3D {
        let [l, w, h] = self.extents;
        let (x, y, yaw) = if self.omega == 0.0 {
            (self.anchor[0] + drift[0] * t, self.anchor[1] + drift[1] * t, self.heading)
        } else {
            let r = self.speed / self.omega;
            let yaw = self.heading + self.omega * t;
            // Circle centered on the anchor, traversed along the heading.
            let (s, c) = yaw.sin_cos();
            (self.anchor[0] + r * s, self.anchor[1] - r * c, yaw)
        };
        Box3D::new(x, y, 0.5 * h, l, w, h, yaw)
    }
}

fn pick_class(mix: &[(ObjectClass, f64)], rng: &mut ChaCha8Rng) -> ObjectClass {
    let total: f64 = mix.iter().map(|c| c.1).sum();
    let mut u = rng.random::<f64>() * total;
    for &(class, weight) in mix {
        if u < weight {
            return class;
        }
        u -= weight;
    }
    mix.iter().rev().find(|c| c.1 > 0.0).map(|c| c.0).expect("validated mix")
}

fn tracks(spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> Vec<Track> {
    let cols = (spec.objects as f64).sqrt().ceil().max(1.0) as usize;
    let rows = spec.objects.div_ceil(cols);
    (0..spec.objects)
        .map(|k| {
            let class = pick_class(&spec.class_mix, rng);
            let (dims, cruise) = class.template();
            let extents = dims.map(|d| d * rng.random_range(0.9..1.1));
            let anchor = [
                ((k % cols) as f64 - 0.5 * (cols - 1) as f64) * GRID_SPACING + 5.0,
                ((k / cols) as f64 - 0.5 * (rows - 1) as f64) * GRID_SPACING + 5.0,
            ];
            let heading = rng.random_range(-PI..PI);
            let speed = cruise * rng.random_range(0.8..1.2);
            let omega = match spec.motion {
                MotionModel::Turning { yaw_rate } if yaw_rate != 0.0 => {
                    // Keep the swept disc inside one cell.
                    let max_r = 0.5 * (GRID_SPACING - extents[0].hypot(extents[1])) - 0.5;
                    let rate = yaw_rate.abs().max(speed / max_r);
                    if rng.random_bool(0.5) {
                        rate
                    } else {
                        -rate
                    }
                }
                _ => 0.0,
            };
            Track {
                id: format!("obj_{k:04}"),
                class,
                extents,
                anchor,
                heading,
                speed,
                omega,
                base_score: rng.random_range(0.5..0.95),
            }
        })
        .collect()
}

/// Lidar-return count decaying with range and growing with box size.
pub fn synthetic_points(b: &Box3D) -> u64 {
    let d = b.x.hypot(b.y);
    (2000.0 * b.volume().sqrt() / (1.0 + (d / 10.0).powi(2))).round() as u64
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Noisy prediction for `gt`, or `None` when dropped. Every draw happens
/// regardless of the scales so the stream stays aligned across settings.
fn predict(gt: &Box3D, base: f64, noise: &NoiseSpec, rng: &mut ChaCha8Rng) -> Option<(Box3D, f64)> {
    let n: [f64; 8] = std::array::from_fn(|_| normal(rng));
    let dropped = rng.random::<f64>() < noise.dropout;
    let b = Box3D::new(
        gt.x + noise.center * n[0],
        gt.y + noise.center * n[1],
        gt.z + noise.center * n[2],
        gt.l * (noise.extent * n[3]).exp(),
        gt.w * (noise.extent * n[4]).exp(),
        gt.h * (noise.extent * n[5]).exp(),
        gt.yaw + noise.yaw * n[6],
    );
    let score = (base + noise.score * n[7]).clamp(0.0, 1.0);
    (!dropped).then_some((b, score))
}

fn generate_sequence(scenario: &ScenarioSpec, noise: &NoiseSpec, index: usize) -> Vec<FrameRecord> {
    let mut gt_rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    gt_rng.set_stream(index as u64);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(noise.seed);
    noise_rng.set_stream(index as u64);

    let tracks = tracks(scenario, &mut gt_rng);
    let drift = if scenario.motion == MotionModel::ConstantVelocity {
        let dir = gt_rng.random_range(-PI..PI);
        let speed = gt_rng.random_range(2.0..10.0);
        [speed * dir.cos(), speed * dir.sin()]
    } else {
        [0.0, 0.0]
    };
    let seq = format!("seq_{index:04}");

    (0..scenario.frames)
        .map(|f| {
            let t = f as f64 * scenario.interval;
            let mut gts = Vec::with_capacity(tracks.len());
            let mut preds = Vec::with_capacity(tracks.len());
            for tr in &tracks {
                let mut b = tr.at(t, drift);
                if drift != [0.0, 0.0] {
                    b.yaw = drift[1].atan2(drift[0]);
                }
                gts.push(GroundTruthObject {
                    object_id: tr.id.clone(),
                    class_label: tr.class.name().to_owned(),
                    bbox: b,
                    num_points: Some(synthetic_points(&b)),
                });
                if let Some((bbox, score)) = predict(&b, tr.base_score, noise, &mut noise_rng) {
                    preds.push(Prediction {
                        class_label: tr.class.name().to_owned(),
                        score,
                        bbox,
                    });
                }
            }
            FrameRecord {
                sequence_id: seq.clone(),
                frame_index: f as u64,
                timestamp: t,
                gts,
                preds,
            }
        })
        .collect()
}

/// Builds a dataset, one sequence per rayon task. Output depends only on the
/// two specs.
pub fn generate_dataset(scenario: &ScenarioSpec, noise: &NoiseSpec) -> Result<Dataset> {
    scenario.validate()?;
    noise.validate()?;
    let sequences: Vec<(String, Vec<FrameRecord>)> = (0..scenario.sequences)
        .into_par_iter()
        .map(|i| (format!("seq_{i:04}"), generate_sequence(scenario, noise, i)))
        .collect();
    let mut ds = Dataset {
        sequences: sequences.into_iter().collect(),
        ..Dataset::default()
    };
    ds.refresh_classes();
    Ok(ds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseAxis {
    Center,
    Extent,
    Yaw,
    Score,
    Dropout,
}

impl NoiseAxis {
    pub fn name(self) -> &'static str {
        match self {
            NoiseAxis::Center => "center",
            NoiseAxis::Extent => "extent",
            NoiseAxis::Yaw => "yaw",
            NoiseAxis::Score => "score",
            NoiseAxis::Dropout => "dropout",
        }
    }

    pub fn apply(self, noise: &NoiseSpec, value: f64) -> NoiseSpec {
        let mut out = *noise;
        match self {
            NoiseAxis::Center => out.center = value,
            NoiseAxis::Extent => out.extent = value,
            NoiseAxis::Yaw => out.yaw = value,
            NoiseAxis::Score => out.score = value,
            NoiseAxis::Dropout => out.dropout = value,
        }
        out
    }
}

impl fmt::Display for NoiseAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "center" => Ok(NoiseAxis::Center),
            "extent" => Ok(NoiseAxis::Extent),
            "yaw" => Ok(NoiseAxis::Yaw),
            "score" => Ok(NoiseAxis::Score),
            "dropout" => Ok(NoiseAxis::Dropout),
            _ => Err(Error::InvalidArgument(format!(
                "unknown noise axis `{s}` (expected center, extent, yaw, score or dropout)"
            ))),
        }
    }
}

/// Dataset-level means at one noise setting. `None` when nothing was scored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseRow {
    pub value: f64,
    pub si: Option<f64>,
    pub si_c: Option<f64>,
    pub si_l: Option<f64>,
    pub si_e: Option<f64>,
    pub si_h: Option<f64>,
    pub pairs: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    pub axis: NoiseAxis,
    pub rows: Vec<ResponseRow>,
}

impl ResponseCurve {
    /// Mean SI against the swept scale.
    pub fn si_curve(&self) -> CurveTable {
        CurveTable {
            metric: format!("si vs {} noise", self.axis),
            rows: self
                .rows
                .iter()
                .map(|r| (r.value, r.si.unwrap_or(f64::NAN)))
                .collect(),
        }
    }

    /// `sweep_value,metric_value` followed by the sub-indicators and pair count.
    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        let fixed = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_default();
        writeln!(w, "sweep_value,metric_value,si_c,si_l,si_e,si_h,pairs")?;
        for r in &self.rows {
            writeln!(
                w,
                "{:.6},{},{},{},{},{},{}",
                r.value,
                fixed(r.si),
                fixed(r.si_c),
                fixed(r.si_l),
                fixed(r.si_e),
                fixed(r.si_h),
                r.pairs
            )?;
        }
        Ok(())
    }
}

/// Evaluates the pipeline once per grid value, varying one noise scale.
pub fn response_sweep(
    scenario: &ScenarioSpec,
    noise: &NoiseSpec,
    axis: NoiseAxis,
    grid: &[f64],
    cfg: &EvaluationConfig,
) -> Result<ResponseCurve> {
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rows = sorted
        .iter()
        .map(|&value| {
            let ds = generate_dataset(scenario, &axis.apply(noise, value))?;
            let o = evaluate(&ds, cfg)?.overall;
            Ok(ResponseRow {
                value,
                si: o.si,
                si_c: o.si_c,
                si_l: o.si_l,
                si_e: o.si_e,
                si_h: o.si_h,
                pairs: o.pairs,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResponseCurve { axis, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::iou_rotated;

    fn small() -> ScenarioSpec {
        ScenarioSpec {
            sequences: 3,
            frames: 12,
            objects: 9,
            ..ScenarioSpec::default()
        }
    }

    #[test]
    fn shape_and_ids() {
        let ds = generate_dataset(&small(), &NoiseSpec::default()).unwrap();
        assert_eq!(ds.sequences.len(), 3);
        assert_eq!(ds.num_frames(), 36);
        assert_eq!(ds.num_gts(), 324);
        let frames = &ds.sequences["seq_0001"];
        let ids: Vec<_> = frames[0].gts.iter().map(|g| &g.object_id).collect();
        assert!(frames.iter().all(|f| f.gts.iter().map(|g| &g.object_id).eq(ids.iter().copied())));
        assert!((frames[5].timestamp - 0.5).abs() < 1e-12);
        assert!(frames[0].gts.iter().all(|g| g.num_points.is_some()));
    }

    #[test]
    fn objects_never_overlap() {
        for motion in [
            MotionModel::Static,
            MotionModel::ConstantVelocity,
            MotionModel::Turning { yaw_rate: 0.3 },
        ] {
            let spec = ScenarioSpec {
                motion,
                frames: 60,
                objects: 30,
                ..small()
            };
            let ds = generate_dataset(&spec, &NoiseSpec::default()).unwrap();
            for f in ds.frames() {
                for (i, a) in f.gts.iter().enumerate() {
                    for b in &f.gts[i + 1..] {
                        assert_eq!(iou_rotated(&a.bbox, &b.bbox), 0.0, "{motion:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn turning_changes_heading() {
        let ds = generate_dataset(&small(), &NoiseSpec::default()).unwrap();
        let f = &ds.sequences["seq_0000"];
        let (a, b) = (&f[0].gts[0].bbox, &f[5].gts[0].bbox);
        assert!((a.yaw - b.yaw).abs() > 0.1);
    }

    #[test]
    fn deterministic_per_seed() {
        let noise = NoiseSpec {
            center: 0.2,
            dropout: 0.1,
            ..NoiseSpec::default()
        };
        let a = generate_dataset(&small(), &noise).unwrap();
        assert_eq!(a, generate_dataset(&small(), &noise).unwrap());
        let other = NoiseSpec { seed: 99, ..noise };
        assert_ne!(a, generate_dataset(&small(), &other).unwrap());
    }

    #[test]
    fn dropout_extremes() {
        let none = generate_dataset(&small(), &NoiseSpec::default()).unwrap();
        assert!(none.frames().all(|f| f.preds.len() == f.gts.len()));
        let all = NoiseSpec {
            dropout: 1.0,
            ..NoiseSpec::default()
        };
        let ds = generate_dataset(&small(), &all).unwrap();
        assert!(ds.frames().all(|f| f.preds.is_empty()));
    }

    #[test]
    fn invalid_specs() {
        let bad = NoiseSpec {
            dropout: 1.5,
            ..NoiseSpec::default()
        };
        assert!(generate_dataset(&small(), &bad).is_err());
        let bad = ScenarioSpec {
            interval: 0.0,
            ..small()
        };
        assert!(generate_dataset(&bad, &NoiseSpec::default()).is_err());
        assert!("speed".parse::<NoiseAxis>().is_err());
        assert_eq!("yaw".parse::<NoiseAxis>().unwrap(), NoiseAxis::Yaw);
    }

    #[test]
    fn sweep_csv() {
        let curve = response_sweep(
            &small(),
            &NoiseSpec::default(),
            NoiseAxis::Center,
            &[0.2, 0.0],
            &EvaluationConfig::default(),
        )
        .unwrap();
        assert_eq!(curve.rows[0].value, 0.0);
        assert_eq!(curve.rows[0].si, Some(1.0));
        assert!(curve.rows[1].si.unwrap() < 1.0);
        let mut out = Vec::new();
        curve.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("sweep_value,metric_value,si_c,si_l,si_e,si_h,pairs\n0.000000,1.000000,"));
    }
}
