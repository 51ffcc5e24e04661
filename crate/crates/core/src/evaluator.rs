//! Dataset-level evaluation.
//!
//! Two passes over the dataset. The first matches every frame and calibrates
//! per-class confidence percentiles from the matched scores; the second pairs
//! objects `delta_t` apart and scores each pair. Sequences are processed in
//! parallel and merged in sequence-id order, so the result does not depend on
//! the number of worker threads.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::association::{enumerate_pairs, match_frame, PairingConfig, StabilityPair};
use crate::dataset::{collect_confidences, Dataset, DatasetMatches};
use crate::error::{Error, Result};
use crate::stability::{stability_index, CalibrationRange, StabilityScore};

/// Bin edges for the four breakdown axes. Each list must be strictly
/// increasing; the last edge opens an overflow bin to infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownBins {
    pub distance: Vec<f64>,
    pub points: Vec<f64>,
    pub volume: Vec<f64>,
    pub lwr: Vec<f64>,
}

impl Default for BreakdownBins {
    fn default() -> Self {
        BreakdownBins {
            distance: (0..=8).map(|k| 10.0 * k as f64).collect(),
            points: vec![0.0, 1.0, 5.0, 25.0, 125.0, 625.0],
            volume: vec![0.0, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0],
            lwr: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
        }
    }
}

impl BreakdownBins {
    pub fn edges(&self, axis: BreakdownAxis) -> &[f64] {
        match axis {
            BreakdownAxis::Distance => &self.distance,
            BreakdownAxis::Points => &self.points,
            BreakdownAxis::Volume => &self.volume,
            BreakdownAxis::Lwr => &self.lwr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    pub delta_t: f64,
    pub min_iou: f64,
    /// Restrict evaluation to these classes.
    pub classes: Option<BTreeSet<String>>,
    pub percentile_hi: f64,
    pub percentile_lo: f64,
    /// Pairing tolerance in seconds; half the median capture interval if unset.
    pub frame_tolerance: Option<f64>,
    pub bins: BreakdownBins,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            delta_t: 0.5,
            min_iou: 1e-6,
            classes: None,
            percentile_hi: 0.99,
            percentile_lo: 0.01,
            frame_tolerance: None,
            bins: BreakdownBins::default(),
        }
    }
}

impl EvaluationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.delta_t > 0.0 && self.delta_t.is_finite()) {
            return bad(format!("delta_t must be positive, got {}", self.delta_t));
        }
        if !(0.0..=1.0).contains(&self.min_iou) {
            return bad(format!("min_iou must lie in [0, 1], got {}", self.min_iou));
        }
        let (hi, lo) = (self.percentile_hi, self.percentile_lo);
        if !((0.0..=1.0).contains(&hi) && (0.0..=1.0).contains(&lo) && hi > lo) {
            return bad(format!("percentiles need 0 <= lo < hi <= 1, got hi={hi}, lo={lo}"));
        }
        if let Some(t) = self.frame_tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("frame tolerance must be positive, got {t}"));
            }
        }
        for axis in BreakdownAxis::ALL {
            let edges = self.bins.edges(axis);
            if edges.is_empty()
                || edges.iter().any(|e| !e.is_finite())
                || edges.windows(2).any(|w| w[0] >= w[1])
            {
                return bad(format!(
                    "{} bin edges must be finite and strictly increasing",
                    axis.name()
                ));
            }
        }
        Ok(())
    }

    fn includes(&self, class: &str) -> bool {
        self.classes.as_ref().is_none_or(|c| c.contains(class))
    }
}

/// Linear-interpolation percentile of an ascending list; `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> Option<f64> {
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let i = (pos.floor() as usize).min(n - 1);
    let frac = pos - i as f64;
    Some(match sorted.get(i + 1) {
        Some(next) => sorted[i] + frac * (next - sorted[i]),
        None => sorted[i],
    })
}

/// Calibration range from an ascending score list. An empty list gives the
/// degenerate range `(0, 0)`.
pub fn calibrate(sorted: &[f64], hi: f64, lo: f64) -> CalibrationRange {
    match (percentile(sorted, hi), percentile(sorted, lo)) {
        (Some(h), Some(l)) => CalibrationRange { hi: h.max(l), lo: l },
        _ => CalibrationRange { hi: 0.0, lo: 0.0 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BreakdownAxis {
    Distance,
    Points,
    Volume,
    Lwr,
}

impl BreakdownAxis {
    pub const ALL: [BreakdownAxis; 4] = [
        BreakdownAxis::Distance,
        BreakdownAxis::Points,
        BreakdownAxis::Volume,
        BreakdownAxis::Lwr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BreakdownAxis::Distance => "distance",
            BreakdownAxis::Points => "points",
            BreakdownAxis::Volume => "volume",
            BreakdownAxis::Lwr => "lwr",
        }
    }

    /// Property of the pair's first ground truth; `None` means unknown.
    pub fn extract(self, pair: &StabilityPair) -> Option<f64> {
        let gt = &pair.obs1.gt;
        match self {
            BreakdownAxis::Distance => Some(gt.range()),
            BreakdownAxis::Points => pair.num_points.map(|n| n as f64),
            BreakdownAxis::Volume => Some(gt.volume()),
            BreakdownAxis::Lwr => Some(gt.l / gt.w),
        }
    }
}

/// One non-empty breakdown bin. `bin_lo`/`bin_hi` are `None` for unbounded
/// sides; both are `None` (and `unknown` set) for pairs lacking the property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub bin_lo: Option<f64>,
    pub bin_hi: Option<f64>,
    pub unknown: bool,
    pub mean_si: f64,
    pub count: u64,
}

/// Running sums for one breakdown axis. Slot 0 is the underflow bin, the
/// next `edges.len()` slots are `[e_i, e_{i+1})` with the last one open-ended,
/// and the final slot collects unknown values.
#[derive(Debug, Clone, PartialEq)]
struct BinTable {
    sums: Vec<f64>,
    counts: Vec<u64>,
}

impl BinTable {
    fn new(edges: &[f64]) -> Self {
        BinTable {
            sums: vec![0.0; edges.len() + 2],
            counts: vec![0; edges.len() + 2],
        }
    }

    fn slot(edges: &[f64], value: Option<f64>) -> usize {
        match value {
            None => edges.len() + 1,
            Some(v) if v.is_nan() => edges.len() + 1,
            Some(v) => edges.partition_point(|&e| e <= v),
        }
    }

    fn add(&mut self, edges: &[f64], value: Option<f64>, si: f64) {
        let k = Self::slot(edges, value);
        self.sums[k] += si;
        self.counts[k] += 1;
    }

    fn merge(&mut self, other: &BinTable) {
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    fn rows(&self, edges: &[f64]) -> Vec<BinRow> {
        let n = edges.len();
        (0..n + 2)
            .filter(|&k| self.counts[k] > 0)
            .map(|k| {
                let (bin_lo, bin_hi) = match k {
                    0 => (None, Some(edges[0])),
                    k if k <= n => (Some(edges[k - 1]), edges.get(k).copied()),
                    _ => (None, None),
                };
                BinRow {
                    bin_lo,
                    bin_hi,
                    unknown: k == n + 1,
                    mean_si: self.sums[k] / self.counts[k] as f64,
                    count: self.counts[k],
                }
            })
            .collect()
    }
}

/// Buckets scored pairs by a property of their first ground truth and reports
/// the mean SI per non-empty bin.
pub fn breakdown(
    scored: &[(StabilityPair, StabilityScore)],
    axis: BreakdownAxis,
    edges: &[f64],
) -> Vec<BinRow> {
    let mut table = BinTable::new(edges);
    for (pair, score) in scored {
        table.add(edges, axis.extract(pair), score.si);
    }
    table.rows(edges)
}

#[derive(Debug, Clone, Default, PartialEq)]
struct ClassAccumulator {
    pairs: u64,
    matched: u64,
    si: f64,
    si_c: f64,
    si_l: f64,
    si_e: f64,
    si_h: f64,
}

impl ClassAccumulator {
    fn add(&mut self, s: &StabilityScore) {
        self.pairs += 1;
        self.si += s.si;
        if s.matched {
            self.matched += 1;
            self.si_c += s.si_c;
            self.si_l += s.si_l;
            self.si_e += s.si_e;
            self.si_h += s.si_h;
        }
    }

    fn merge(&mut self, o: &ClassAccumulator) {
        self.pairs += o.pairs;
        self.matched += o.matched;
        self.si += o.si;
        self.si_c += o.si_c;
        self.si_l += o.si_l;
        self.si_e += o.si_e;
        self.si_h += o.si_h;
    }

    fn summary(&self, calibration: Option<CalibrationRange>) -> ClassSummary {
        let mean = |sum: f64, n: u64| (n > 0).then(|| sum / n as f64);
        ClassSummary {
            si: mean(self.si, self.pairs),
            si_c: mean(self.si_c, self.matched),
            si_l: mean(self.si_l, self.matched),
            si_e: mean(self.si_e, self.matched),
            si_h: mean(self.si_h, self.matched),
            pairs: self.pairs,
            invalid_pairs: self.pairs - self.matched,
            calibration,
        }
    }
}

/// Aggregates for one class (or all classes pooled).
///
/// `si` averages every pair, unmatched ones counting as 0. The sub-indicators
/// average only pairs matched on both sides. Means are `None` when there is
/// nothing to average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub si: Option<f64>,
    pub si_c: Option<f64>,
    pub si_l: Option<f64>,
    pub si_e: Option<f64>,
    pub si_h: Option<f64>,
    pub pairs: u64,
    pub invalid_pairs: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationRange>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdowns {
    pub distance: Vec<BinRow>,
    pub points: Vec<BinRow>,
    pub volume: Vec<BinRow>,
    pub lwr: Vec<BinRow>,
}

impl Breakdowns {
    pub fn get(&self, axis: BreakdownAxis) -> &[BinRow] {
        match axis {
            BreakdownAxis::Distance => &self.distance,
            BreakdownAxis::Points => &self.points,
            BreakdownAxis::Volume => &self.volume,
            BreakdownAxis::Lwr => &self.lwr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config: EvaluationConfig,
    pub digest: String,
    pub overall: ClassSummary,
    pub classes: BTreeMap<String, ClassSummary>,
    pub breakdowns: Breakdowns,
}

/// One scored pair, as written by the per-pair dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub seq: String,
    pub id: String,
    pub class: String,
    pub t1: f64,
    pub t2: f64,
    #[serde(flatten)]
    pub score: StabilityScore,
}

#[derive(Debug, Clone, PartialEq)]
struct SequenceTally {
    classes: BTreeMap<String, ClassAccumulator>,
    bins: [BinTable; 4],
    records: Vec<PairRecord>,
}

/// Matches every frame of every sequence.
pub fn match_dataset(ds: &Dataset, min_iou: f64) -> DatasetMatches {
    let seqs: Vec<(&String, &Vec<_>)> = ds.sequences.iter().collect();
    seqs.par_iter()
        .map(|(id, frames)| {
            let m = frames
                .iter()
                .map(|f| match_frame(&f.gts, &f.preds, min_iou))
                .collect();
            ((*id).clone(), m)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

pub fn evaluate(ds: &Dataset, cfg: &EvaluationConfig) -> Result<EvaluationReport> {
    evaluate_with_pairs(ds, cfg, false).map(|(r, _)| r)
}

/// Like [`evaluate`], optionally returning every scored pair in sequence order.
pub fn evaluate_with_pairs(
    ds: &Dataset,
    cfg: &EvaluationConfig,
    keep_pairs: bool,
) -> Result<(EvaluationReport, Vec<PairRecord>)> {
    cfg.validate()?;

    let matches = match_dataset(ds, cfg.min_iou);
    let calibration: BTreeMap<String, CalibrationRange> = collect_confidences(ds, &matches)
        .into_iter()
        .filter(|(class, _)| cfg.includes(class))
        .map(|(class, scores)| {
            let cal = calibrate(&scores, cfg.percentile_hi, cfg.percentile_lo);
            (class, cal)
        })
        .collect();

    let pairing = PairingConfig {
        delta_t: cfg.delta_t,
        tolerance: cfg.frame_tolerance,
    };
    let seqs: Vec<(&String, &Vec<_>)> = ds.sequences.iter().collect();
    let tallies = seqs
        .par_iter()
        .map(|(id, frames)| {
            score_sequence(id, frames, &matches[*id], &pairing, &calibration, cfg, keep_pairs)
        })
        .collect::<Result<Vec<_>>>()?;

    let edges = BreakdownAxis::ALL.map(|a| cfg.bins.edges(a));
    let mut classes: BTreeMap<String, ClassAccumulator> = calibration
        .keys()
        .map(|c| (c.clone(), ClassAccumulator::default()))
        .collect();
    let mut bins = edges.map(BinTable::new);
    let mut records = Vec::new();
    for tally in tallies {
        for (class, acc) in &tally.classes {
            classes.entry(class.clone()).or_default().merge(acc);
        }
        for (table, other) in bins.iter_mut().zip(&tally.bins) {
            table.merge(other);
        }
        records.extend(tally.records);
    }

    let mut overall = ClassAccumulator::default();
    for acc in classes.values() {
        overall.merge(acc);
    }
    let [distance, points, volume, lwr] =
        std::array::from_fn(|k| bins[k].rows(edges[k]));

    let report = EvaluationReport {
        config: cfg.clone(),
        digest: dataset_digest(ds),
        overall: overall.summary(None),
        classes: classes
            .iter()
            .map(|(c, acc)| (c.clone(), acc.summary(calibration.get(c).copied())))
            .collect(),
        breakdowns: Breakdowns {
            distance,
            points,
            volume,
            lwr,
        },
    };
    Ok((report, records))
}

fn score_sequence(
    id: &str,
    frames: &[crate::dataset::FrameRecord],
    matches: &[crate::association::FrameMatches],
    pairing: &PairingConfig,
    calibration: &BTreeMap<String, CalibrationRange>,
    cfg: &EvaluationConfig,
    keep_pairs: bool,
) -> Result<SequenceTally> {
    let edges = BreakdownAxis::ALL.map(|a| cfg.bins.edges(a));
    let mut tally = SequenceTally {
        classes: BTreeMap::new(),
        bins: edges.map(BinTable::new),
        records: Vec::new(),
    };
    let degenerate = CalibrationRange { hi: 0.0, lo: 0.0 };
    for pair in enumerate_pairs(frames, matches, pairing)? {
        if !cfg.includes(&pair.class_label) {
            continue;
        }
        let cal = calibration.get(&pair.class_label).unwrap_or(&degenerate);
        let score = stability_index(&pair.obs1, &pair.obs2, cal)?;
        tally
            .classes
            .entry(pair.class_label.clone())
            .or_default()
            .add(&score);
        for (k, axis) in BreakdownAxis::ALL.into_iter().enumerate() {
            tally.bins[k].add(edges[k], axis.extract(&pair), score.si);
        }
        if keep_pairs {
            tally.records.push(PairRecord {
                seq: id.to_owned(),
                id: pair.object_id,
                class: pair.class_label,
                t1: pair.t1,
                t2: pair.t2,
                score,
            });
        }
    }
    Ok(tally)
}

/// SHA-256 over the dataset's content in canonical order.
pub fn dataset_digest(ds: &Dataset) -> String {
    let mut h = Sha256::new();
    // Strings are length-prefixed; numbers go in as raw little-endian bits.
    let mut buf: Vec<u8> = Vec::new();
    for (seq, frames) in &ds.sequences {
        put(&mut h, seq.as_bytes());
        for f in frames {
            buf.clear();
            buf.extend(f.frame_index.to_le_bytes());
            buf.extend(f.timestamp.to_bits().to_le_bytes());
            buf.extend((f.gts.len() as u64).to_le_bytes());
            buf.extend((f.preds.len() as u64).to_le_bytes());
            put(&mut h, &buf);
            for g in &f.gts {
                put(&mut h, g.object_id.as_bytes());
                put(&mut h, g.class_label.as_bytes());
                buf.clear();
                for v in g.bbox.to_array() {
                    buf.extend(v.to_bits().to_le_bytes());
                }
                buf.push(g.num_points.is_some() as u8);
                buf.extend(g.num_points.unwrap_or(0).to_le_bytes());
                put(&mut h, &buf);
            }
            for p in &f.preds {
                put(&mut h, p.class_label.as_bytes());
                buf.clear();
                buf.extend(p.score.to_bits().to_le_bytes());
                for v in p.bbox.to_array() {
                    buf.extend(v.to_bits().to_le_bytes());
                }
                put(&mut h, &buf);
            }
        }
    }
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn put(h: &mut Sha256, bytes: &[u8]) {
    h.update((bytes.len() as u64).to_le_bytes());
    h.update(bytes);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::association::{GroundTruthObject, Prediction};
    use crate::dataset::FrameRecord;
    use crate::geometry::Box3D;
    use crate::stability::MatchedObservation;

    #[test]
    fn percentile_grid() {
        let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        let cal = calibrate(&grid, 0.99, 0.01);
        assert!((cal.hi - 0.99).abs() < 1e-12);
        assert!((cal.lo - 0.01).abs() < 1e-12);

        let cal = calibrate(&[0.3; 17], 0.99, 0.01);
        assert_eq!((cal.hi, cal.lo), (0.3, 0.3));

        let cal = calibrate(&[0.0, 1.0], 0.99, 0.01);
        assert!((cal.hi - 0.99).abs() < 1e-15);
        assert!((cal.lo - 0.01).abs() < 1e-15);

        assert_eq!(calibrate(&[], 0.99, 0.01), CalibrationRange { hi: 0.0, lo: 0.0 });
        assert_eq!(percentile(&[2.0, 4.0, 8.0], 1.0), Some(8.0));
        assert_eq!(percentile(&[2.0, 4.0, 8.0], 0.0), Some(2.0));
        assert_eq!(percentile(&[2.0, 4.0, 8.0], 0.75), Some(6.0));
    }

    fn pair_at(x: f64, l: f64, w: f64, points: Option<u64>) -> StabilityPair {
        let gt = Box3D::new(x, 0.0, 0.0, l, w, 1.5, 0.0);
        StabilityPair {
            object_id: "o".into(),
            class_label: "c".into(),
            t1: 0.0,
            t2: 0.5,
            obs1: MatchedObservation::unmatched(gt),
            obs2: MatchedObservation::unmatched(gt),
            num_points: points,
        }
    }

    fn score(si: f64) -> StabilityScore {
        StabilityScore {
            si,
            si_c: 1.0,
            si_l: si,
            si_e: si,
            si_h: si,
            matched: true,
        }
    }

    #[test]
    fn single_bin_breakdown() {
        let scored = vec![
            (pair_at(12.0, 4.0, 2.0, Some(10)), score(0.5)),
            (pair_at(15.0, 4.0, 2.0, Some(20)), score(0.7)),
        ];
        let rows = breakdown(&scored, BreakdownAxis::Distance, &[0.0, 10.0, 20.0]);
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].bin_lo, rows[0].bin_hi), (Some(10.0), Some(20.0)));
        assert!((rows[0].mean_si - 0.6).abs() < 1e-15);
        assert_eq!(rows[0].count, 2);
    }

    #[test]
    fn distance_overflow_and_underflow() {
        let scored = vec![
            (pair_at(10.0, 4.0, 2.0, None), score(1.0)),
            (pair_at(40.0, 4.0, 2.0, None), score(0.5)),
            (pair_at(70.0, 4.0, 2.0, None), score(0.2)),
        ];
        let rows = breakdown(&scored, BreakdownAxis::Distance, &[0.0, 30.0, 50.0]);
        let bounds: Vec<_> = rows.iter().map(|r| (r.bin_lo, r.bin_hi)).collect();
        assert_eq!(
            bounds,
            vec![(Some(0.0), Some(30.0)), (Some(30.0), Some(50.0)), (Some(50.0), None)]
        );
        let rows = breakdown(&scored, BreakdownAxis::Distance, &[20.0, 30.0]);
        assert_eq!((rows[0].bin_lo, rows[0].bin_hi), (None, Some(20.0)));
    }

    #[test]
    fn lwr_and_unknown_points() {
        let scored = vec![(pair_at(5.0, 4.0, 2.0, None), score(0.9))];
        let rows = breakdown(&scored, BreakdownAxis::Lwr, &BreakdownBins::default().lwr);
        assert_eq!((rows[0].bin_lo, rows[0].bin_hi), (Some(2.0), Some(3.0)));
        let rows = breakdown(&scored, BreakdownAxis::Points, &BreakdownBins::default().points);
        assert!(rows[0].unknown);
        assert_eq!((rows[0].bin_lo, rows[0].bin_hi), (None, None));
    }

    fn frame(t: f64, k: u64, pred: Option<Box3D>, score: f64) -> FrameRecord {
        let gt = Box3D::new(10.0 + t, 2.0, 0.0, 4.0, 2.0, 1.5, 0.2);
        FrameRecord {
            sequence_id: "s".into(),
            frame_index: k,
            timestamp: t,
            gts: vec![GroundTruthObject {
                object_id: "car".into(),
                class_label: "Vehicle".into(),
                bbox: gt,
                num_points: Some(300),
            }],
            preds: pred
                .map(|b| Prediction {
                    class_label: "Vehicle".into(),
                    score,
                    bbox: b,
                })
                .into_iter()
                .collect(),
        }
    }

    #[test]
    fn perfect_predictions_score_one() {
        let frames = (0..10).map(|k| {
            let t = k as f64 * 0.1;
            let gt = Box3D::new(10.0 + t, 2.0, 0.0, 4.0, 2.0, 1.5, 0.2);
            frame(t, k, Some(gt), 0.8)
        });
        let ds = Dataset::from_frames(frames).unwrap();
        let r = evaluate(&ds, &EvaluationConfig::default()).unwrap();
        let v = &r.classes["Vehicle"];
        assert_eq!(v.si, Some(1.0));
        assert_eq!(v.pairs, 5);
        assert_eq!(v.invalid_pairs, 0);
        assert_eq!(r.overall.si, Some(1.0));
    }

    #[test]
    fn missing_second_prediction_scores_zero() {
        let gt0 = Box3D::new(10.0, 2.0, 0.0, 4.0, 2.0, 1.5, 0.2);
        let ds = Dataset::from_frames([
            frame(0.0, 0, Some(gt0), 0.8),
            frame(0.5, 1, None, 0.8),
        ])
        .unwrap();
        let r = evaluate(&ds, &EvaluationConfig::default()).unwrap();
        let v = &r.classes["Vehicle"];
        assert_eq!(v.si, Some(0.0));
        assert_eq!(v.invalid_pairs, 1);
        assert_eq!(v.si_c, None);
    }

    #[test]
    fn empty_dataset_has_empty_markers() {
        let r = evaluate(&Dataset::default(), &EvaluationConfig::default()).unwrap();
        assert!(r.classes.is_empty());
        assert_eq!(r.overall.si, None);
        assert_eq!(r.overall.pairs, 0);
        assert!(r.breakdowns.distance.is_empty());
    }

    #[test]
    fn class_filter_and_config_validation() {
        let gt0 = Box3D::new(10.0, 2.0, 0.0, 4.0, 2.0, 1.5, 0.2);
        let ds = Dataset::from_frames([
            frame(0.0, 0, Some(gt0), 0.8),
            frame(0.5, 1, Some(gt0), 0.8),
        ])
        .unwrap();
        let cfg = EvaluationConfig {
            classes: Some(["Pedestrian".to_string()].into()),
            ..Default::default()
        };
        let r = evaluate(&ds, &cfg).unwrap();
        assert!(r.classes.is_empty());

        for bad in [
            EvaluationConfig { delta_t: 0.0, ..Default::default() },
            EvaluationConfig { percentile_hi: 0.01, percentile_lo: 0.99, ..Default::default() },
            EvaluationConfig { min_iou: 1.5, ..Default::default() },
        ] {
            assert!(evaluate(&ds, &bad).is_err());
        }
        let mut bins = EvaluationConfig::default();
        bins.bins.lwr = vec![3.0, 1.0];
        assert!(evaluate(&ds, &bins).is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let gt0 = Box3D::new(10.0, 2.0, 0.0, 4.0, 2.0, 1.5, 0.2);
        let a = Dataset::from_frames([frame(0.0, 0, Some(gt0), 0.8)]).unwrap();
        let b = Dataset::from_frames([frame(0.0, 0, Some(gt0), 0.81)]).unwrap();
        assert_eq!(dataset_digest(&a), dataset_digest(&a.clone()));
        assert_ne!(dataset_digest(&a), dataset_digest(&b));
        assert!(dataset_digest(&a).starts_with("sha256:"));
    }
}
