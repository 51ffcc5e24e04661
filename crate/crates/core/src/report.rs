//! Report serialization. Output is byte-stable: fixed field order and every
//! float written with six decimals.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::evaluator::{BinRow, BreakdownAxis, ClassSummary, EvaluationReport, PairRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Pretty JSON with `{:.6}` floats.
pub struct FixedPointFormatter<'a> {
    inner: PrettyFormatter<'a>,
    pretty: bool,
}

impl FixedPointFormatter<'_> {
    pub fn pretty() -> Self {
        FixedPointFormatter {
            inner: PrettyFormatter::with_indent(b"  "),
            pretty: true,
        }
    }

    /// Single-line output, for line-delimited files.
    pub fn compact() -> Self {
        FixedPointFormatter {
            inner: PrettyFormatter::new(),
            pretty: false,
        }
    }
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                if self.pretty {
                    self.inner.$name(w $(, $arg)*)
                } else {
                    serde_json::ser::CompactFormatter.$name(w $(, $arg)*)
                }
            }
        )*
    };
}

impl Formatter for FixedPointFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.6}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{value:.6}")
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

fn to_writer_fixed<T: Serialize>(w: impl Write, value: &T, pretty: bool) -> io::Result<()> {
    let fmt = if pretty {
        FixedPointFormatter::pretty()
    } else {
        FixedPointFormatter::compact()
    };
    let mut ser = serde_json::Serializer::with_formatter(w, fmt);
    value.serialize(&mut ser).map_err(io::Error::other)
}

pub fn write_json(report: &EvaluationReport, mut w: impl Write) -> io::Result<()> {
    to_writer_fixed(&mut w, report, true)?;
    w.write_all(b"\n")
}

fn fixed(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn bound(v: Option<f64>, unknown: bool, open: &str) -> String {
    match (v, unknown) {
        (_, true) => "unknown".into(),
        (Some(v), _) => format!("{v:.6}"),
        (None, _) => open.into(),
    }
}

/// CSV with one section per table. Each section starts with a `# name` line,
/// then a header row; sections are separated by a blank line.
pub fn write_csv(report: &EvaluationReport, mut w: impl Write) -> io::Result<()> {
    let section = |w: &mut dyn Write, name: &str, header: &[&str], rows: Vec<Vec<String>>| {
        writeln!(w, "# {name}")?;
        let mut csv = csv::Writer::from_writer(Vec::new());
        csv.write_record(header).map_err(io::Error::other)?;
        for r in rows {
            csv.write_record(&r).map_err(io::Error::other)?;
        }
        let bytes = csv.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
        w.write_all(&bytes)
    };

    let cfg = &report.config;
    let list = |v: &[f64]| v.iter().map(|e| format!("{e:.6}")).collect::<Vec<_>>().join(" ");
    let config_rows = vec![
        vec!["delta_t".into(), format!("{:.6}", cfg.delta_t)],
        vec!["min_iou".into(), format!("{:.6}", cfg.min_iou)],
        vec![
            "classes".into(),
            cfg.classes
                .as_ref()
                .map(|c| c.iter().cloned().collect::<Vec<_>>().join(" "))
                .unwrap_or_default(),
        ],
        vec!["percentile_hi".into(), format!("{:.6}", cfg.percentile_hi)],
        vec!["percentile_lo".into(), format!("{:.6}", cfg.percentile_lo)],
        vec!["frame_tolerance".into(), fixed(cfg.frame_tolerance)],
        vec!["bins_distance".into(), list(&cfg.bins.distance)],
        vec!["bins_points".into(), list(&cfg.bins.points)],
        vec!["bins_volume".into(), list(&cfg.bins.volume)],
        vec!["bins_lwr".into(), list(&cfg.bins.lwr)],
        vec!["digest".into(), report.digest.clone()],
    ];
    section(&mut w, "config", &["key", "value"], config_rows)?;
    writeln!(w)?;

    let class_row = |name: &str, s: &ClassSummary| {
        vec![
            name.to_owned(),
            fixed(s.si),
            fixed(s.si_c),
            fixed(s.si_l),
            fixed(s.si_e),
            fixed(s.si_h),
            s.pairs.to_string(),
            s.invalid_pairs.to_string(),
        ]
    };
    let mut rows: Vec<Vec<String>> = report
        .classes
        .iter()
        .map(|(c, s)| class_row(c, s))
        .collect();
    rows.push(class_row("*", &report.overall));
    section(
        &mut w,
        "classes",
        &["class", "si", "si_c", "si_l", "si_e", "si_h", "pairs", "invalid_pairs"],
        rows,
    )?;

    for axis in BreakdownAxis::ALL {
        writeln!(w)?;
        let rows = report
            .breakdowns
            .get(axis)
            .iter()
            .map(|r: &BinRow| {
                vec![
                    bound(r.bin_lo, r.unknown, "-inf"),
                    bound(r.bin_hi, r.unknown, "inf"),
                    format!("{:.6}", r.mean_si),
                    r.count.to_string(),
                ]
            })
            .collect();
        section(
            &mut w,
            &format!("breakdown {}", axis.name()),
            &["bin_lo", "bin_hi", "mean_si", "count"],
            rows,
        )?;
    }
    Ok(())
}

pub fn emit_report(report: &EvaluationReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    match format {
        ReportFormat::Json => write_json(report, &mut w),
        ReportFormat::Csv => write_csv(report, &mut w),
    }
    .and_then(|_| w.flush())
    .map_err(|e| Error::io(path, e))
}

/// Line-delimited per-pair scores.
pub fn write_pair_dump(records: &[PairRecord], mut w: impl Write) -> io::Result<()> {
    for r in records {
        to_writer_fixed(&mut w, r, false)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn emit_pair_dump(records: &[PairRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_pair_dump(records, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::evaluator::{evaluate, EvaluationConfig};

    fn empty_report() -> EvaluationReport {
        evaluate(&Dataset::default(), &EvaluationConfig::default()).unwrap()
    }

    #[test]
    fn json_is_stable_and_fixed_point() {
        let r = empty_report();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_json(&r, &mut a).unwrap();
        write_json(&r, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains("\"delta_t\": 0.500000"), "{text}");
        assert!(text.contains("\"min_iou\": 0.000001"));
        assert!(text.contains("\"si\": null"));
        assert!(text.contains("\"distance\": []"));
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(parsed["classes"].as_object().unwrap().is_empty());
    }

    #[test]
    fn csv_sections_and_headers() {
        let mut out = Vec::new();
        write_csv(&empty_report(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("# config\nkey,value\ndelta_t,0.500000\n"));
        assert!(text.contains("# breakdown distance\nbin_lo,bin_hi,mean_si,count\n"));
        assert!(text.contains("# classes\nclass,si,si_c,si_l,si_e,si_h,pairs,invalid_pairs\n*,,,,,,0,0\n"));
    }

    #[test]
    fn emit_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let r = empty_report();
        for (name, fmt) in [("r.json", ReportFormat::Json), ("r.csv", ReportFormat::Csv)] {
            let p = dir.path().join(name);
            emit_report(&r, &p, fmt).unwrap();
            let first = std::fs::read(&p).unwrap();
            emit_report(&r, &p, fmt).unwrap();
            assert_eq!(first, std::fs::read(&p).unwrap());
        }
        let bad = dir.path().join("missing").join("r.json");
        let err = emit_report(&r, &bad, ReportFormat::Json).unwrap_err();
        assert!(err.to_string().contains("missing"));
    }
}
