//! Numerical checks of the metric's properties.
//!
//! Holds the naive projected-IoU baseline, the IoU-vs-heading curves, and a
//! seeded suite that sweeps random configurations looking for counterexamples
//! to symmetry, marginal unimodality, the peak condition, scale invariance, the
//! heading cutoff, and agreement between IoU engines.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::io::{self, Write};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    iou_aligned_same_size, iou_centered_axis_aligned, iou_oracle, iou_rotated, transform_box,
    transform_unchecked, Box3D,
};
use crate::stability::{
    pivot_box, si_heading, stability_index_with, CalibrationRange, Detection, MatchedObservation,
    MetricOptions, StabilityScore,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

/// Baseline that carries one prediction into the other timestamp's GT frame
/// and takes a plain rotated IoU.
///
/// Forward maps `b1` through `g1 -> g2` and compares with `b2`; reverse maps
/// `b2` through `g2 -> g1` and compares with `b1`.
pub fn naive_metric(b1: &Box3D, b2: &Box3D, g1: &Box3D, g2: &Box3D, dir: Direction) -> Result<f64> {
    Ok(match dir {
        Direction::Forward => iou_rotated(&transform_box(b1, g1, g2)?, b2),
        Direction::Reverse => iou_rotated(b1, &transform_box(b2, g2, g1)?),
    })
}

/// Evenly spaced grid including both ends.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (steps - 1) as f64;
            (0..steps).map(|i| start + step * i as f64).collect()
        }
    }
}

/// Angles from `lo_deg` to `hi_deg` every `step_deg`, in radians.
pub fn degree_grid(lo_deg: f64, hi_deg: f64, step_deg: f64) -> Vec<f64> {
    let steps = ((hi_deg - lo_deg) / step_deg).round() as usize + 1;
    (0..steps)
        .map(|i| (lo_deg + step_deg * i as f64).to_radians())
        .collect()
}

/// Sweep values against metric values, ordered by sweep value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTable {
    pub metric: String,
    pub rows: Vec<(f64, f64)>,
}

impl CurveTable {
    fn from_fn(metric: impl Into<String>, grid: &[f64], f: impl Fn(f64) -> f64) -> Self {
        let mut rows: Vec<(f64, f64)> = grid.iter().map(|&v| (v, f(v))).collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        CurveTable {
            metric: metric.into(),
            rows,
        }
    }

    /// Sweep value of the first maximum.
    pub fn argmax(&self) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        for &(x, y) in &self.rows {
            if best.is_none_or(|(_, by)| y > by) {
                best = Some((x, y));
            }
        }
        best.map(|(x, _)| x)
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "sweep_value,metric_value")?;
        for (x, y) in &self.rows {
            writeln!(w, "{x:.6},{y:.6}")?;
        }
        Ok(())
    }
}

/// IoU of `{0,0,0,2,1,1,0}` against `{dx, dy, 0, 3, 1, 1, theta}` over the
/// heading grid.
pub fn property2_curve_offset(delta_x: f64, delta_y: f64, thetas: &[f64]) -> CurveTable {
    let a = Box3D::new(0.0, 0.0, 0.0, 2.0, 1.0, 1.0, 0.0);
    CurveTable::from_fn(format!("naive_iou dx={delta_x}"), thetas, |t| {
        iou_rotated(&a, &Box3D::new(delta_x, delta_y, 0.0, 3.0, 1.0, 1.0, t))
    })
}

/// The appendix configuration, with the 0.05 m lateral offset.
pub fn property2_curve(delta_x: f64, thetas: &[f64]) -> CurveTable {
    property2_curve_offset(delta_x, 0.05, thetas)
}

/// Heading term on the same configuration: both predictions sit on their GTs
/// and only the second one's heading moves.
pub fn si_heading_curve(delta_x: f64, thetas: &[f64]) -> CurveTable {
    let g1 = Box3D::new(0.0, 0.0, 0.0, 2.0, 1.0, 1.0, 0.0);
    let g2 = Box3D::new(delta_x, 0.05, 0.0, 3.0, 1.0, 1.0, 0.0);
    let pivot = pivot_box(&g1, &g2).expect("fixed boxes are valid");
    let p1 = transform_unchecked(&g1, &g1, &pivot);
    CurveTable::from_fn(format!("si_heading dx={delta_x}"), thetas, |t| {
        let b2 = Box3D { yaw: t, ..g2 };
        si_heading(&p1, &transform_unchecked(&b2, &g2, &pivot), &pivot)
    })
}

/// Raw IoU of a box with length-to-width ratio `lwr` against itself rotated.
pub fn heading_unimodality_curve(lwr: f64, thetas: &[f64]) -> Result<CurveTable> {
    if !(lwr > 0.0 && lwr.is_finite()) {
        return Err(Error::InvalidArgument(format!("lwr must be positive, got {lwr}")));
    }
    let a = Box3D::centered(lwr, 1.0, 1.0);
    Ok(CurveTable::from_fn(format!("iou lwr={lwr}"), thetas, |t| {
        iou_rotated(&a, &Box3D { yaw: t, ..a })
    }))
}

/// One perturbable element of the second observation's prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    X,
    Y,
    Z,
    L,
    W,
    H,
    Yaw,
    Score,
}

impl Element {
    pub const ALL: [Element; 8] = [
        Element::X,
        Element::Y,
        Element::Z,
        Element::L,
        Element::W,
        Element::H,
        Element::Yaw,
        Element::Score,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Element::X => "x",
            Element::Y => "y",
            Element::Z => "z",
            Element::L => "l",
            Element::W => "w",
            Element::H => "h",
            Element::Yaw => "yaw",
            Element::Score => "score",
        }
    }

    fn perturb(self, d: &Detection, delta: f64) -> Detection {
        let mut out = *d;
        let b = &mut out.bbox;
        match self {
            Element::X => b.x += delta,
            Element::Y => b.y += delta,
            Element::Z => b.z += delta,
            Element::L => b.l += delta,
            Element::W => b.w += delta,
            Element::H => b.h += delta,
            Element::Yaw => b.yaw += delta,
            Element::Score => out.score += delta,
        }
        out
    }

    /// Largest sweep half-width that keeps the box valid.
    fn max_span(self, d: &Detection, yaw_span: f64) -> f64 {
        match self {
            Element::X | Element::Y | Element::Z => 2.0,
            Element::L => 0.9 * d.bbox.l,
            Element::W => 0.9 * d.bbox.w,
            Element::H => 0.9 * d.bbox.h,
            Element::Yaw => yaw_span,
            Element::Score => 1.0,
        }
    }
}

/// Two GTs with a prediction on each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairConfig {
    pub gt1: Box3D,
    pub det1: Detection,
    pub gt2: Box3D,
    pub det2: Detection,
}

impl PairConfig {
    pub fn observations(&self) -> (MatchedObservation, MatchedObservation) {
        (
            MatchedObservation {
                gt: self.gt1,
                detection: Some(self.det1),
            },
            MatchedObservation {
                gt: self.gt2,
                detection: Some(self.det2),
            },
        )
    }

    pub fn score(&self, cal: &CalibrationRange, opts: &MetricOptions) -> StabilityScore {
        let (a, b) = self.observations();
        stability_index_with(&a, &b, cal, opts).expect("generated boxes are valid")
    }

    pub fn swapped(&self) -> PairConfig {
        PairConfig {
            gt1: self.gt2,
            det1: self.det2,
            gt2: self.gt1,
            det2: self.det1,
        }
    }

    /// Replaces the second prediction with the one that reproduces the first
    /// prediction's discrepancy exactly.
    pub fn stabilized(&self) -> PairConfig {
        let pivot = pivot_box(&self.gt1, &self.gt2).expect("generated boxes are valid");
        let on_pivot = transform_unchecked(&self.det1.bbox, &self.gt1, &pivot);
        PairConfig {
            det2: Detection {
                bbox: transform_unchecked(&on_pivot, &pivot, &self.gt2),
                score: self.det1.score,
            },
            ..*self
        }
    }

    pub fn with_scores_scaled(&self, k: f64) -> PairConfig {
        let mut out = *self;
        out.det1.score *= k;
        out.det2.score *= k;
        out
    }
}

fn random_gt(rng: &mut ChaCha8Rng) -> Box3D {
    Box3D::new(
        rng.random_range(-30.0..30.0),
        rng.random_range(-30.0..30.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(1.0..6.0),
        rng.random_range(0.5..3.0),
        rng.random_range(0.5..3.0),
        rng.random_range(-PI..PI),
    )
}

/// `b` moved by up to 1 m per axis, extents scaled by `[0.5, 2]`, yaw turned
/// by up to pi/3.
pub fn perturb_box(b: &Box3D, rng: &mut ChaCha8Rng) -> Box3D {
    let mut scale = || 2f64.powf(rng.random_range(-1.0..=1.0));
    let (sl, sw, sh) = (scale(), scale(), scale());
    Box3D::new(
        b.x + rng.random_range(-1.0..=1.0),
        b.y + rng.random_range(-1.0..=1.0),
        b.z + rng.random_range(-1.0..=1.0),
        b.l * sl,
        b.w * sw,
        b.h * sh,
        b.yaw + rng.random_range(-PI / 3.0..=PI / 3.0),
    )
}

/// Random GTs with perturbed predictions and scores in `[0, 1)`.
pub fn random_pair(rng: &mut ChaCha8Rng) -> PairConfig {
    let gt1 = random_gt(rng);
    let gt2 = random_gt(rng);
    let det1 = Detection {
        bbox: perturb_box(&gt1, rng),
        score: rng.random(),
    };
    let det2 = Detection {
        bbox: perturb_box(&gt2, rng),
        score: rng.random(),
    };
    PairConfig {
        gt1,
        det1,
        gt2,
        det2,
    }
}

/// A pair whose predictions match their GTs exactly, with equal scores.
pub fn perfect_pair(rng: &mut ChaCha8Rng) -> PairConfig {
    let gt1 = random_gt(rng);
    let gt2 = random_gt(rng);
    let score = rng.random();
    PairConfig {
        gt1,
        det1: Detection { bbox: gt1, score },
        gt2,
        det2: Detection { bbox: gt2, score },
    }
}

fn trial_rng(seed: u64, suite: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ suite.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(trial);
    rng
}

/// Knobs for [`run_property_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub trials: u64,
    /// Metric under test. Changing the cutoff is the negative control.
    pub metric: MetricOptions,
    /// Half-width of yaw sweeps in the unimodality suite.
    pub yaw_span: f64,
    pub sweep_steps: usize,
    pub oracle_trials: u64,
    pub oracle_samples: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 7,
            trials: 1000,
            metric: MetricOptions::default(),
            yaw_span: 3.1,
            sweep_steps: 41,
            oracle_trials: 20,
            oracle_samples: 1_000_000,
        }
    }
}

/// Outcome of one property over all its trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub checks: u64,
    /// Largest observed deviation from the property; its meaning depends on
    /// the property.
    pub max_deviation: f64,
    pub counterexample: Option<String>,
    pub note: Option<String>,
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} checks={} max_deviation={:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.checks,
            self.max_deviation
        )?;
        if let Some(n) = &self.note {
            write!(f, " ({n})")?;
        }
        if let Some(c) = &self.counterexample {
            write!(f, "\n  counterexample: {c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub trials: u64,
    pub results: Vec<PropertyResult>,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for SuiteSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed={} trials={}", self.seed, self.trials)?;
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        write!(f, "{}", if self.passed() { "all properties hold" } else { "FAILED" })
    }
}

/// Per-trial outcome: deviation plus a counterexample when the trial failed.
type Trial = (f64, Option<String>);

/// Runs `trial` over `0..n` in parallel and merges by trial index, keeping the
/// first counterexample.
fn run_trials(
    name: &str,
    n: u64,
    checks_per_trial: u64,
    trial: impl Fn(u64) -> Trial + Sync + Send,
) -> PropertyResult {
    let outcomes: Vec<Trial> = (0..n).into_par_iter().map(trial).collect();
    let max_deviation = outcomes.iter().map(|o| o.0).fold(0.0, f64::max);
    let counterexample = outcomes
        .iter()
        .enumerate()
        .find_map(|(i, o)| o.1.as_ref().map(|c| format!("trial {i}: {c}")));
    PropertyResult {
        name: name.to_owned(),
        passed: counterexample.is_none(),
        checks: n * checks_per_trial,
        max_deviation,
        counterexample,
        note: None,
    }
}

const UNIT_RANGE: CalibrationRange = CalibrationRange { hi: 1.0, lo: 0.0 };

pub fn check_symmetry(seed: u64, trials: u64, metric: &MetricOptions) -> PropertyResult {
    run_trials("symmetry", trials, 1, |t| {
        let pair = random_pair(&mut trial_rng(seed, 1, t));
        let a = pair.score(&UNIT_RANGE, metric).si;
        let b = pair.swapped().score(&UNIT_RANGE, metric).si;
        let dev = (a - b).abs();
        (dev, (dev > 1e-12).then(|| format!("{pair:?} si={a} swapped={b}")))
    })
}

/// Sweeps one element of the second prediction around a stable pair and
/// returns the first place the score increases away from the center.
pub fn unimodality_violation(
    base: &PairConfig,
    element: Element,
    span: f64,
    steps: usize,
    metric: &MetricOptions,
) -> Option<String> {
    let stable = base.stabilized();
    let grid = linspace(-span, span, steps);
    let values: Vec<f64> = grid
        .iter()
        .map(|&d| {
            let pair = PairConfig {
                det2: element.perturb(&stable.det2, d),
                ..stable
            };
            pair.score(&UNIT_RANGE, metric).si
        })
        .collect();
    let center = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)?;
    for i in 0..values.len().saturating_sub(1) {
        let (toward, away) = if i < center { (i + 1, i) } else { (i, i + 1) };
        if values[away] > values[toward] + 1e-9 {
            return Some(format!(
                "{} sweep: si({:.6})={} > si({:.6})={} on {stable:?}",
                element.name(),
                grid[away],
                values[away],
                grid[toward],
                values[toward]
            ));
        }
    }
    None
}

pub fn check_unimodality(
    seed: u64,
    trials: u64,
    yaw_span: f64,
    steps: usize,
    metric: &MetricOptions,
) -> PropertyResult {
    run_trials("unimodality", trials, 8 * steps as u64, |t| {
        let base = random_pair(&mut trial_rng(seed, 2, t)).stabilized();
        let found = Element::ALL.iter().find_map(|&e| {
            let span = e.max_span(&base.det2, yaw_span);
            unimodality_violation(&base, e, span, steps, metric)
        });
        (if found.is_some() { 1.0 } else { 0.0 }, found)
    })
}

pub fn check_peak(seed: u64, trials: u64, metric: &MetricOptions) -> PropertyResult {
    let magnitude = 1e-3;
    run_trials("peak", trials, 17, |t| {
        let pair = perfect_pair(&mut trial_rng(seed, 3, t));
        let si = pair.score(&UNIT_RANGE, metric).si;
        if si != 1.0 {
            return (1.0 - si, Some(format!("perfect pair scored {si}: {pair:?}")));
        }
        let mut worst: f64 = 0.0;
        for e in Element::ALL {
            for sign in [-1.0, 1.0] {
                let moved = PairConfig {
                    det2: e.perturb(&pair.det2, sign * magnitude),
                    ..pair
                };
                let si = moved.score(&UNIT_RANGE, metric).si;
                worst = worst.max(si);
                if si >= 1.0 - 1e-6 {
                    return (
                        si,
                        Some(format!("{} moved by {}: si={si} on {pair:?}", e.name(), sign * magnitude)),
                    );
                }
            }
        }
        (worst - (1.0 - 1e-6), None)
    })
}

/// Scaling every score and the calibration range by `k` leaves SI unchanged.
pub fn check_scale_invariance(seed: u64, trials: u64, metric: &MetricOptions) -> PropertyResult {
    run_trials("scale_invariance", trials, 4, |t| {
        let pair = random_pair(&mut trial_rng(seed, 4, t));
        let base = pair.score(&UNIT_RANGE, metric);
        let mut worst: f64 = 0.0;
        for k in [0.1, 0.5, 2.0, 10.0] {
            let cal = CalibrationRange { hi: k, lo: 0.0 };
            let s = pair.with_scores_scaled(k).score(&cal, metric);
            let dev = (s.si - base.si).abs();
            worst = worst.max(dev);
            if dev > 1e-9 {
                return (worst, Some(format!("k={k}: {} vs {} on {pair:?}", s.si, base.si)));
            }
        }
        (worst, None)
    })
}

/// Heading term is zero for every wrapped difference in `[pi/4, pi]`.
pub fn check_heading_cutoff(points: usize, metric: &MetricOptions) -> PropertyResult {
    let pivot = Box3D::centered(1.0, 1.0, 1.0);
    let grid = linspace(FRAC_PI_4, PI, points);
    run_trials("heading_cutoff", 1, points as u64, |_| {
        let mut worst: f64 = 0.0;
        for &d in &grid {
            for yaw in [d, -d, d + 2.0 * PI] {
                let gt = pivot;
                let det = |y: f64| Detection {
                    bbox: Box3D { yaw: y, ..gt },
                    score: 1.0,
                };
                let pair = PairConfig {
                    gt1: gt,
                    det1: det(0.0),
                    gt2: gt,
                    det2: det(yaw),
                };
                let si_h = pair.score(&UNIT_RANGE, metric).si_h;
                worst = worst.max(si_h);
                if si_h != 0.0 {
                    return (worst, Some(format!("delta={yaw}: si_h={si_h}")));
                }
            }
        }
        (worst, None)
    })
}

/// Same-size, same-yaw boxes offset in their own frame; co-centered boxes of
/// different sizes. The general engine must match both closed forms.
pub fn check_closed_forms(seed: u64, trials: u64) -> PropertyResult {
    run_trials("closed_forms", trials, 2, |t| {
        let rng = &mut trial_rng(seed, 5, t);
        let a = random_gt(rng);
        let off = [
            rng.random_range(-a.l..a.l) * 1.2,
            rng.random_range(-a.w..a.w) * 1.2,
            rng.random_range(-a.h..a.h) * 1.2,
        ];
        let (s, c) = a.yaw.sin_cos();
        let shifted = Box3D {
            x: a.x + c * off[0] - s * off[1],
            y: a.y + s * off[0] + c * off[1],
            z: a.z + off[2],
            ..a
        };
        let d1 = (iou_rotated(&a, &shifted) - iou_aligned_same_size(off, a.extents())).abs();

        let b = Box3D {
            l: a.l * 2f64.powf(rng.random_range(-1.0..1.0)),
            w: a.w * 2f64.powf(rng.random_range(-1.0..1.0)),
            h: a.h * 2f64.powf(rng.random_range(-1.0..1.0)),
            ..a
        };
        let d2 = (iou_rotated(&a, &b) - iou_centered_axis_aligned(a.extents(), b.extents())).abs();
        let dev = d1.max(d2);
        (dev, (dev > 1e-9).then(|| format!("{a:?} vs {shifted:?} / {b:?}: {d1}, {d2}")))
    })
}

pub fn check_oracle(seed: u64, trials: u64, samples: u64) -> PropertyResult {
    run_trials("oracle", trials, 1, |t| {
        let rng = &mut trial_rng(seed, 6, t);
        let a = random_gt(rng);
        let b = perturb_box(&a, rng);
        let exact = iou_rotated(&a, &b);
        let est = iou_oracle(&a, &b, samples, seed.wrapping_add(t));
        let dev = (exact - est).abs();
        (dev, (dev > 0.01).then(|| format!("{a:?} vs {b:?}: engine={exact} oracle={est}")))
    })
}

/// Searches for a naive-metric asymmetry above `threshold` while requiring SI
/// to stay exactly symmetric on every visited instance. Passes when the
/// asymmetry is found and SI never deviates.
pub fn check_naive_asymmetry(seed: u64, trials: u64, threshold: f64) -> PropertyResult {
    let metric = MetricOptions::default();
    let per_trial: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = random_pair(&mut trial_rng(seed, 7, t));
            let f = naive_metric(&p.det1.bbox, &p.det2.bbox, &p.gt1, &p.gt2, Direction::Forward);
            let r = naive_metric(&p.det1.bbox, &p.det2.bbox, &p.gt1, &p.gt2, Direction::Reverse);
            let naive = (f.expect("valid") - r.expect("valid")).abs();
            let si = (p.score(&UNIT_RANGE, &metric).si - p.swapped().score(&UNIT_RANGE, &metric).si).abs();
            (naive, si)
        })
        .collect();
    let naive_max = per_trial.iter().map(|v| v.0).fold(0.0, f64::max);
    let si_max = per_trial.iter().map(|v| v.1).fold(0.0, f64::max);
    let passed = naive_max > threshold && si_max == 0.0;
    PropertyResult {
        name: "naive_asymmetry".into(),
        passed,
        checks: trials,
        max_deviation: si_max,
        counterexample: (!passed)
            .then(|| format!("naive max asymmetry {naive_max}, SI max deviation {si_max}")),
        note: Some(format!("naive max asymmetry {naive_max:.4}")),
    }
}

pub fn run_property_suite(opts: &SuiteOptions) -> Result<SuiteSummary> {
    if opts.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if opts.sweep_steps < 3 {
        return Err(Error::InvalidArgument("sweeps need at least 3 steps".into()));
    }
    let (seed, n, m) = (opts.seed, opts.trials, &opts.metric);
    Ok(SuiteSummary {
        seed,
        trials: n,
        results: vec![
            check_symmetry(seed, n, m),
            check_unimodality(seed, n, opts.yaw_span, opts.sweep_steps, m),
            check_peak(seed, n, m),
            check_scale_invariance(seed, n, m),
            check_heading_cutoff(1000, m),
            check_closed_forms(seed, n),
            check_oracle(seed, opts.oracle_trials.min(n), opts.oracle_samples),
            check_naive_asymmetry(seed, n, 0.01),
        ],
    })
}
