//! Line-delimited sequence files.
//!
//! One JSON object per line, one line per frame:
//!
//! ```text
//! {"seq":"s0","frame":0,"time":0.0,
//!  "gts":[{"id":"a","class":"Vehicle","box":[x,y,z,l,w,h,yaw],"num_points":120}],
//!  "preds":[{"class":"Vehicle","score":0.9,"box":[x,y,z,l,w,h,yaw]}]}
//! ```
//!
//! Lines of different sequences may interleave, but within a sequence frames
//! must appear with strictly increasing timestamps.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::association::{FrameMatches, GroundTruthObject, Prediction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    #[serde(rename = "seq")]
    pub sequence_id: String,
    #[serde(rename = "frame")]
    pub frame_index: u64,
    #[serde(rename = "time")]
    pub timestamp: f64,
    pub gts: Vec<GroundTruthObject>,
    pub preds: Vec<Prediction>,
}

impl FrameRecord {
    /// Checks field-level invariants, returning the offending field path.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !self.timestamp.is_finite() {
            return Err(format!("time: not finite ({})", self.timestamp));
        }
        let mut ids = HashSet::with_capacity(self.gts.len());
        for (i, g) in self.gts.iter().enumerate() {
            g.bbox.validate().map_err(|e| format!("gts[{i}].box: {e}"))?;
            if !ids.insert(g.object_id.as_str()) {
                return Err(format!("gts[{i}].id: duplicate object id `{}`", g.object_id));
            }
        }
        for (i, p) in self.preds.iter().enumerate() {
            p.bbox.validate().map_err(|e| format!("preds[{i}].box: {e}"))?;
            if !p.score.is_finite() {
                return Err(format!("preds[{i}].score: not finite ({})", p.score));
            }
        }
        Ok(())
    }
}

/// Frames grouped by sequence, each sequence ordered by timestamp.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub sequences: BTreeMap<String, Vec<FrameRecord>>,
    pub classes: BTreeSet<String>,
}

impl Dataset {
    /// Builds a dataset from frames in arbitrary order, sorting each sequence
    /// by timestamp and validating every frame.
    pub fn from_frames(frames: impl IntoIterator<Item = FrameRecord>) -> Result<Self> {
        let mut ds = Dataset::default();
        for f in frames {
            f.validate().map_err(|message| Error::Sequence {
                sequence: f.sequence_id.clone(),
                message: format!("frame {}: {message}", f.frame_index),
            })?;
            ds.sequences.entry(f.sequence_id.clone()).or_default().push(f);
        }
        for (id, frames) in ds.sequences.iter_mut() {
            frames.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
            check_sequence(id, frames)?;
        }
        ds.refresh_classes();
        Ok(ds)
    }

    pub fn refresh_classes(&mut self) {
        self.classes = self
            .frames()
            .flat_map(|f| {
                f.gts
                    .iter()
                    .map(|g| g.class_label.clone())
                    .chain(f.preds.iter().map(|p| p.class_label.clone()))
            })
            .collect();
    }

    pub fn frames(&self) -> impl Iterator<Item = &FrameRecord> {
        self.sequences.values().flatten()
    }

    pub fn num_frames(&self) -> usize {
        self.sequences.values().map(Vec::len).sum()
    }

    pub fn num_gts(&self) -> usize {
        self.frames().map(|f| f.gts.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }
}

fn check_sequence(id: &str, frames: &[FrameRecord]) -> Result<()> {
    let err = |message: String| Error::Sequence {
        sequence: id.to_owned(),
        message,
    };
    let mut indices = HashSet::with_capacity(frames.len());
    for w in frames.windows(2) {
        if w[0].timestamp >= w[1].timestamp {
            return Err(err(format!("duplicate timestamp {}", w[1].timestamp)));
        }
    }
    for f in frames {
        if !indices.insert(f.frame_index) {
            return Err(err(format!("duplicate frame index {}", f.frame_index)));
        }
    }
    Ok(())
}

/// How unknown keys in a record are handled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum UnknownKeys {
    /// Ignore them and report a warning.
    #[default]
    Warn,
    /// Reject the record.
    Reject,
}

/// A loaded dataset plus any non-fatal warnings.
#[derive(Debug, Clone, Default)]
pub struct Loaded {
    pub dataset: Dataset,
    pub warnings: Vec<String>,
}

/// Parses one record line. Returns the frame and the paths of ignored keys.
pub fn parse_record(line: &str) -> std::result::Result<(FrameRecord, Vec<String>), String> {
    let mut ignored = Vec::new();
    let mut de = serde_json::Deserializer::from_str(line);
    let frame: FrameRecord = {
        let mut track = |path: serde_ignored::Path| ignored.push(path.to_string());
        let tracked = serde_ignored::Deserializer::new(&mut de, &mut track);
        serde_path_to_error::deserialize(tracked).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                e.into_inner().to_string()
            } else {
                format!("{path}: {}", e.into_inner())
            }
        })?
    };
    de.end().map_err(|e| e.to_string())?;
    Ok((frame, ignored))
}

pub fn read_dataset(reader: impl BufRead, unknown: UnknownKeys) -> Result<Loaded> {
    let mut out = Loaded::default();
    // Last accepted (timestamp, line) per sequence, for monotonicity errors.
    let mut last: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    let mut seen_index: BTreeMap<String, HashSet<u64>> = BTreeMap::new();

    for (k, line) in reader.lines().enumerate() {
        let lineno = k + 1;
        let line = line.map_err(|e| Error::Record {
            line: lineno,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec_err = |message: String| Error::Record {
            line: lineno,
            message,
        };
        let (frame, ignored) = parse_record(&line).map_err(rec_err)?;
        if !ignored.is_empty() {
            match unknown {
                UnknownKeys::Reject => {
                    return Err(rec_err(format!("{}: unknown key", ignored[0])));
                }
                UnknownKeys::Warn => out
                    .warnings
                    .extend(ignored.iter().map(|p| format!("line {lineno}: ignored key {p}"))),
            }
        }
        frame.validate().map_err(rec_err)?;

        if let Some(&(t, prev)) = last.get(&frame.sequence_id) {
            if frame.timestamp <= t {
                return Err(rec_err(format!(
                    "time: {} does not follow {t} (line {prev}) in sequence `{}`",
                    frame.timestamp, frame.sequence_id
                )));
            }
        }
        if !seen_index
            .entry(frame.sequence_id.clone())
            .or_default()
            .insert(frame.frame_index)
        {
            return Err(rec_err(format!(
                "frame: duplicate index {} in sequence `{}`",
                frame.frame_index, frame.sequence_id
            )));
        }
        last.insert(frame.sequence_id.clone(), (frame.timestamp, lineno));
        out.dataset
            .sequences
            .entry(frame.sequence_id.clone())
            .or_default()
            .push(frame);
    }
    out.dataset.refresh_classes();
    Ok(out)
}

pub fn load_dataset(path: impl AsRef<Path>, unknown: UnknownKeys) -> Result<Loaded> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(BufReader::new(file), unknown)
}

/// Writes the canonical form: sequences in id order, frames by timestamp,
/// fields in declaration order.
pub fn write_dataset(ds: &Dataset, mut w: impl Write) -> std::io::Result<()> {
    for f in ds.frames() {
        serde_json::to_writer(&mut w, f)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_dataset(ds, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Per-sequence, per-frame match results aligned with `Dataset::sequences`.
pub type DatasetMatches = BTreeMap<String, Vec<FrameMatches>>;

/// Sorted scores of matched predictions for every class in the dataset.
///
/// Classes without any match map to an empty list.
pub fn collect_confidences(ds: &Dataset, matches: &DatasetMatches) -> BTreeMap<String, Vec<f64>> {
    let mut out: BTreeMap<String, Vec<f64>> =
        ds.classes.iter().map(|c| (c.clone(), Vec::new())).collect();
    for (seq, frames) in &ds.sequences {
        let Some(seq_matches) = matches.get(seq) else {
            continue;
        };
        for (f, m) in frames.iter().zip(seq_matches) {
            for (g, p) in f.gts.iter().zip(m) {
                if let Some(p) = p {
                    out.entry(g.class_label.clone())
                        .or_default()
                        .push(f.preds[*p].score);
                }
            }
        }
    }
    for v in out.values_mut() {
        v.sort_by(f64::total_cmp);
    }
    out
}
