//! Per-frame GT/prediction matching and cross-frame pairing by object ID.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::dataset::FrameRecord;
use crate::error::{Error, Result};
use crate::geometry::{iou_rotated, Box3D};
use crate::hungarian::{minimize, CostMatrix};
use crate::stability::{Detection, MatchedObservation};

/// A labeled object with an identity that persists across frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthObject {
    #[serde(rename = "id")]
    pub object_id: String,
    #[serde(rename = "class")]
    pub class_label: String,
    #[serde(rename = "box")]
    pub bbox: Box3D,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_points: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    #[serde(rename = "class")]
    pub class_label: String,
    pub score: f64,
    #[serde(rename = "box")]
    pub bbox: Box3D,
}

impl Prediction {
    pub fn detection(&self) -> Detection {
        Detection {
            bbox: self.bbox,
            score: self.score,
        }
    }
}

/// For each GT of a frame (same order), the index of its matched prediction.
pub type FrameMatches = Vec<Option<usize>>;

/// Matches predictions to ground truths within each class.
///
/// Solves the rectangular assignment with cost `1 - IoU` and then drops any
/// assignment whose IoU is below `min_iou` or zero. Each prediction serves at
/// most one GT.
pub fn match_frame(
    gts: &[GroundTruthObject],
    preds: &[Prediction],
    min_iou: f64,
) -> FrameMatches {
    let mut out = vec![None; gts.len()];
    if gts.is_empty() || preds.is_empty() {
        return out;
    }

    let mut by_class: BTreeMap<&str, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, g) in gts.iter().enumerate() {
        by_class.entry(&g.class_label).or_default().0.push(i);
    }
    for (j, p) in preds.iter().enumerate() {
        if let Some(entry) = by_class.get_mut(p.class_label.as_str()) {
            entry.1.push(j);
        }
    }

    for (gi, pj) in by_class.values() {
        if gi.is_empty() || pj.is_empty() {
            continue;
        }
        let ious: Vec<f64> = gi
            .iter()
            .flat_map(|&g| pj.iter().map(move |&p| iou_rotated(&gts[g].bbox, &preds[p].bbox)))
            .collect();
        let cost = CostMatrix::new(gi.len(), pj.len(), ious.iter().map(|v| 1.0 - v).collect());
        for (r, c) in minimize(&cost).into_iter().enumerate() {
            if let Some(c) = c {
                let iou = ious[r * pj.len() + c];
                if iou > 0.0 && iou >= min_iou {
                    out[gi[r]] = Some(pj[c]);
                }
            }
        }
    }
    out
}

/// One object observed at two timestamps `delta_t` apart.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityPair {
    pub object_id: String,
    pub class_label: String,
    pub t1: f64,
    pub t2: f64,
    pub obs1: MatchedObservation,
    pub obs2: MatchedObservation,
    /// Point count of the first observation's GT, when labeled.
    pub num_points: Option<u64>,
}

/// Pairing parameters for one sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingConfig {
    pub delta_t: f64,
    /// Max |t2 - (t1 + delta_t)|. Defaults to half the median capture interval.
    pub tolerance: Option<f64>,
}

impl Default for PairingConfig {
    fn default() -> Self {
        PairingConfig {
            delta_t: 0.5,
            tolerance: None,
        }
    }
}

/// Median gap between consecutive timestamps, if there are at least two.
pub fn median_interval(sorted_times: &[f64]) -> Option<f64> {
    let mut gaps: Vec<f64> = sorted_times.windows(2).map(|w| w[1] - w[0]).collect();
    if gaps.is_empty() {
        return None;
    }
    gaps.sort_by(f64::total_cmp);
    let mid = gaps.len() / 2;
    Some(if gaps.len() % 2 == 1 {
        gaps[mid]
    } else {
        0.5 * (gaps[mid - 1] + gaps[mid])
    })
}

/// Enumerates every object pair `delta_t` apart in one sequence.
///
/// `matches[k]` belongs to `frames[k]`. Frames may arrive in any order; they are
/// visited by timestamp. Objects labeled in only one of the two frames are
/// skipped; an object whose prediction is missing on either side still yields a
/// pair (with that observation unmatched).
pub fn enumerate_pairs(
    frames: &[FrameRecord],
    matches: &[FrameMatches],
    cfg: &PairingConfig,
) -> Result<Vec<StabilityPair>> {
    if frames.len() != matches.len() {
        return Err(Error::LengthMismatch {
            left: frames.len(),
            right: matches.len(),
        });
    }
    if !(cfg.delta_t > 0.0 && cfg.delta_t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "delta_t must be positive, got {}",
            cfg.delta_t
        )));
    }
    let Some(first) = frames.first() else {
        return Ok(Vec::new());
    };
    let seq_err = |message: String| Error::Sequence {
        sequence: first.sequence_id.clone(),
        message,
    };

    let mut order: Vec<usize> = (0..frames.len()).collect();
    order.sort_by(|&a, &b| frames[a].timestamp.total_cmp(&frames[b].timestamp));
    let times: Vec<f64> = order.iter().map(|&k| frames[k].timestamp).collect();
    if let Some(w) = times.windows(2).find(|w| w[0] == w[1]) {
        return Err(seq_err(format!("duplicate timestamp {}", w[0])));
    }

    let mut lookups: Vec<HashMap<&str, usize>> = Vec::with_capacity(frames.len());
    for &k in &order {
        let f = &frames[k];
        if matches[k].len() != f.gts.len() {
            return Err(Error::LengthMismatch {
                left: f.gts.len(),
                right: matches[k].len(),
            });
        }
        let mut ids = HashMap::with_capacity(f.gts.len());
        for (i, g) in f.gts.iter().enumerate() {
            if ids.insert(g.object_id.as_str(), i).is_some() {
                return Err(seq_err(format!(
                    "duplicate object id `{}` in frame {}",
                    g.object_id, f.frame_index
                )));
            }
        }
        lookups.push(ids);
    }

    let Some(interval) = median_interval(&times) else {
        return Ok(Vec::new());
    };
    let tolerance = match cfg.tolerance {
        Some(t) => t,
        None => {
            let ratio = cfg.delta_t / interval;
            if ratio.round() < 1.0 || (ratio - ratio.round()).abs() > 1e-3 * ratio.max(1.0) {
                return Err(seq_err(format!(
                    "delta_t {} is not a whole multiple of the capture interval {interval}",
                    cfg.delta_t
                )));
            }
            0.5 * interval
        }
    };

    let observe = |frame: &FrameRecord, m: &FrameMatches, i: usize| MatchedObservation {
        gt: frame.gts[i].bbox,
        detection: m[i].map(|p| frame.preds[p].detection()),
    };

    let mut pairs = Vec::new();
    for (a, &ka) in order.iter().enumerate() {
        let target = times[a] + cfg.delta_t;
        let Some(b) = closest_index(&times, target).filter(|&b| {
            b > a && (times[b] - target).abs() <= tolerance
        }) else {
            continue;
        };
        let kb = order[b];
        let (fa, fb) = (&frames[ka], &frames[kb]);
        for (i, g) in fa.gts.iter().enumerate() {
            let Some(&j) = lookups[b].get(g.object_id.as_str()) else {
                continue;
            };
            if fb.gts[j].class_label != g.class_label {
                return Err(seq_err(format!(
                    "object `{}` changes class from `{}` to `{}`",
                    g.object_id, g.class_label, fb.gts[j].class_label
                )));
            }
            pairs.push(StabilityPair {
                object_id: g.object_id.clone(),
                class_label: g.class_label.clone(),
                t1: fa.timestamp,
                t2: fb.timestamp,
                obs1: observe(fa, &matches[ka], i),
                obs2: observe(fb, &matches[kb], j),
                num_points: g.num_points,
            });
        }
    }
    Ok(pairs)
}

fn closest_index(sorted: &[f64], target: f64) -> Option<usize> {
    let idx = sorted.partition_point(|&t| t < target);
    let candidates = [idx.checked_sub(1), (idx < sorted.len()).then_some(idx)];
    candidates
        .into_iter()
        .flatten()
        .min_by(|&a, &b| (sorted[a] - target).abs().total_cmp(&(sorted[b] - target).abs()))
}

#[cfg(test)]
mod tests {
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn gt(id: &str, class: &str, b: Box3D) -> GroundTruthObject {
        GroundTruthObject {
            object_id: id.into(),
            class_label: class.into(),
            bbox: b,
            num_points: None,
        }
    }

    fn pred(class: &str, score: f64, b: Box3D) -> Prediction {
        Prediction {
            class_label: class.into(),
            score,
            bbox: b,
        }
    }

    fn frame(t: f64, idx: u64, gts: Vec<GroundTruthObject>, preds: Vec<Prediction>) -> FrameRecord {
        FrameRecord {
            sequence_id: "s".into(),
            frame_index: idx,
            timestamp: t,
            gts,
            preds,
        }
    }

    fn car(x: f64) -> Box3D {
        Box3D::new(x, 0.0, 0.0, 4.0, 2.0, 1.5, 0.0)
    }

    #[test]
    fn single_overlap_matches() {
        let m = match_frame(
            &[gt("a", "car", car(0.0))],
            &[pred("car", 0.9, car(0.5))],
            1e-6,
        );
        assert_eq!(m, vec![Some(0)]);
    }

    #[test]
    fn no_predictions_leaves_unmatched() {
        assert_eq!(match_frame(&[gt("a", "car", car(0.0))], &[], 1e-6), vec![None]);
        assert!(match_frame(&[], &[pred("car", 0.9, car(0.0))], 1e-6).is_empty());
    }

    #[test]
    fn classes_do_not_cross() {
        let m = match_frame(
            &[gt("a", "car", car(0.0))],
            &[pred("truck", 0.9, car(0.0))],
            1e-6,
        );
        assert_eq!(m, vec![None]);
    }

    #[test]
    fn threshold_and_zero_overlap_are_dropped() {
        let gts = [gt("a", "car", car(0.0)), gt("b", "car", car(50.0))];
        let preds = [pred("car", 0.9, car(3.5)), pred("car", 0.9, car(20.0))];
        let m = match_frame(&gts, &preds, 0.5);
        assert_eq!(m, vec![None, None]);
        let m = match_frame(&gts, &preds, 1e-6);
        assert_eq!(m, vec![Some(0), None]);
    }

    #[test]
    fn optimal_assignment_beats_greedy() {
        // GT a overlaps both predictions; greedy would give p0 to a and leave b
        // with nothing, the optimum hands p1 to a and p0 to b.
        let gts = [gt("a", "car", car(0.0)), gt("b", "car", car(3.0))];
        let preds = [pred("car", 0.9, car(1.0)), pred("car", 0.9, car(-1.5))];
        let m = match_frame(&gts, &preds, 1e-6);
        assert_eq!(m, vec![Some(1), Some(0)]);
    }

    #[test]
    fn matches_never_reuse_predictions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let gts: Vec<_> = (0..rng.random_range(0..6))
                .map(|i| gt(&i.to_string(), "car", car(rng.random_range(-5.0..5.0))))
                .collect();
            let preds: Vec<_> = (0..rng.random_range(0..6))
                .map(|_| pred("car", 0.5, car(rng.random_range(-5.0..5.0))))
                .collect();
            let min_iou = rng.random_range(0.0..0.6);
            let m = match_frame(&gts, &preds, min_iou);
            let used: Vec<usize> = m.iter().flatten().copied().collect();
            let mut dedup = used.clone();
            dedup.sort_unstable();
            dedup.dedup();
            assert_eq!(used.len(), dedup.len());
            for (g, p) in m.iter().enumerate() {
                if let Some(p) = p {
                    assert!(iou_rotated(&gts[g].bbox, &preds[*p].bbox) >= min_iou);
                }
            }
        }
    }

    fn trajectory(n: usize, d: f64) -> Vec<FrameRecord> {
        (0..n)
            .map(|k| {
                frame(
                    k as f64 * d,
                    k as u64,
                    vec![gt("obj", "car", car(k as f64 * 0.1))],
                    vec![pred("car", 0.8, car(k as f64 * 0.1))],
                )
            })
            .collect()
    }

    fn all_matches(frames: &[FrameRecord]) -> Vec<FrameMatches> {
        frames
            .iter()
            .map(|f| match_frame(&f.gts, &f.preds, 1e-6))
            .collect()
    }

    #[test]
    fn pair_count_follows_trajectory_length() {
        let frames = trajectory(10, 0.1);
        let pairs = enumerate_pairs(&frames, &all_matches(&frames), &PairingConfig::default()).unwrap();
        assert_eq!(pairs.len(), 5);
        for p in &pairs {
            assert!((p.t2 - p.t1 - 0.5).abs() < 1e-9);
        }
        for (n, d, dt) in [(20usize, 0.1, 0.5), (7, 0.5, 0.5), (30, 0.05, 1.0)] {
            let frames = trajectory(n, d);
            let cfg = PairingConfig {
                delta_t: dt,
                tolerance: None,
            };
            let pairs = enumerate_pairs(&frames, &all_matches(&frames), &cfg).unwrap();
            assert_eq!(pairs.len(), n - (dt / d).round() as usize);
        }
    }

    #[test]
    fn single_frame_objects_are_skipped() {
        let mut frames = trajectory(6, 0.1);
        frames[0].gts.push(gt("ghost", "car", car(30.0)));
        let pairs = enumerate_pairs(&frames, &all_matches(&frames), &PairingConfig::default()).unwrap();
        assert!(pairs.iter().all(|p| p.object_id == "obj"));
        assert_eq!(pairs.len(), 1);
    }

    #[test]
    fn missing_prediction_yields_unmatched_side() {
        let mut frames = trajectory(6, 0.1);
        frames[5].preds.clear();
        let pairs = enumerate_pairs(&frames, &all_matches(&frames), &PairingConfig::default()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(pairs[0].obs1.detection.is_some());
        assert!(pairs[0].obs2.detection.is_none());
    }

    #[test]
    fn dropped_frames_do_not_shift_pairs() {
        let mut frames = trajectory(12, 0.1);
        frames.remove(7);
        let pairs = enumerate_pairs(&frames, &all_matches(&frames), &PairingConfig::default()).unwrap();
        // Starts 0..=6 have a partner, except t=0.2 whose partner (0.7) is gone.
        assert_eq!(pairs.len(), 6);
    }

    #[test]
    fn input_order_does_not_matter() {
        let frames = trajectory(15, 0.1);
        let mut shuffled = frames.clone();
        shuffled.reverse();
        shuffled.swap(2, 9);
        let a = enumerate_pairs(&frames, &all_matches(&frames), &PairingConfig::default()).unwrap();
        let b = enumerate_pairs(&shuffled, &all_matches(&shuffled), &PairingConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_duplicates_and_bad_gaps() {
        let mut frames = trajectory(6, 0.1);
        frames[3].timestamp = frames[2].timestamp;
        assert!(enumerate_pairs(&frames, &all_matches(&frames), &PairingConfig::default()).is_err());

        let mut frames = trajectory(6, 0.1);
        frames[2].gts.push(gt("obj", "car", car(20.0)));
        frames[2].preds.push(pred("car", 0.8, car(20.0)));
        assert!(enumerate_pairs(&frames, &all_matches(&frames), &PairingConfig::default()).is_err());

        let frames = trajectory(10, 0.3);
        assert!(enumerate_pairs(&frames, &all_matches(&frames), &PairingConfig::default()).is_err());
        let explicit = PairingConfig {
            delta_t: 0.5,
            tolerance: Some(0.15),
        };
        assert_eq!(
            enumerate_pairs(&frames, &all_matches(&frames), &explicit).unwrap().len(),
            8
        );
    }

    #[test]
    fn median_interval_cases() {
        assert_eq!(median_interval(&[]), None);
        assert_eq!(median_interval(&[1.0]), None);
        assert_eq!(median_interval(&[0.0, 0.1, 0.2, 0.5]), Some(0.1));
        assert_eq!(median_interval(&[0.0, 1.0, 3.0]), Some(1.5));
    }
}
