mod args;

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use stabidx_core::dataset::{load_dataset, save_dataset, UnknownKeys};
use stabidx_core::evaluator::{evaluate_with_pairs, BreakdownBins, EvaluationConfig};
use stabidx_core::pcl::{load_errors, pcl_loss, PclWeights};
use stabidx_core::property_lab::{
    degree_grid, heading_unimodality_curve, linspace, property2_curve, si_heading_curve,
    run_property_suite, CurveTable, SuiteOptions,
};
use stabidx_core::report::{emit_pair_dump, emit_report, ReportFormat};
use stabidx_core::synthetic::{
    generate_dataset, response_sweep, MotionModel, NoiseAxis, NoiseSpec, ScenarioSpec,
};
use stabidx_core::{Error, MetricOptions};

use args::{Axis, Cli, Command, Format, MetricArgs, Motion, ScenarioArgs};

/// Exit status for a run that completed but found invalid data or a failing
/// property.
const EXIT_FAILURE: u8 = 1;
/// Exit status for bad invocations and missing inputs.
const EXIT_USAGE: u8 = 2;

enum Failure {
    Usage(String),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match &e {
            Error::Io { source, .. } if source.kind() == io::ErrorKind::NotFound => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Synth(a) => {
            let (scenario, noise) = scenario(&a.scenario, cli.seed);
            let ds = generate_dataset(&scenario, &noise)?;
            save_dataset(&ds, &a.out)?;
            eprintln!(
                "wrote {} frames, {} objects to {}",
                ds.num_frames(),
                ds.num_gts(),
                a.out.display()
            );
            Ok(())
        }
        Command::Sweep(a) => {
            let (scenario, noise) = scenario(&a.scenario, cli.seed);
            let cfg = eval_config(&a.metric)?;
            let curve = response_sweep(&scenario, &noise, axis(a.axis), &a.grid, &cfg)?;
            write_to(a.out.as_deref(), |w| curve.write_csv(w))
        }
        Command::Properties(a) => properties(a, cli.seed),
        Command::PclLoss(a) => {
            let errors_a = load_errors(&a.errors_a)?;
            let errors_b = load_errors(&a.errors_b)?;
            let [confidence, localization, extent, heading] = a.weights[..] else {
                return Err(Failure::Usage("--weights takes four values".into()));
            };
            let w = PclWeights {
                confidence,
                localization,
                extent,
                heading,
            };
            println!("{:.6}", pcl_loss(&errors_a, &errors_b, &w)?);
            Ok(())
        }
    }
}

fn require_file(path: &Path) -> CmdResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{}: no such file", path.display())))
    }
}

fn eval(a: &args::EvalArgs) -> CmdResult {
    require_file(&a.dataset)?;
    let unknown = if a.strict {
        UnknownKeys::Reject
    } else {
        UnknownKeys::Warn
    };
    let loaded = load_dataset(&a.dataset, unknown)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let cfg = eval_config(&a.metric)?;
    let (report, pairs) = evaluate_with_pairs(&loaded.dataset, &cfg, a.pair_dump.is_some())?;
    let format = match a.format {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    };
    emit_report(&report, &a.report, format)?;
    if let Some(path) = &a.pair_dump {
        emit_pair_dump(&pairs, path)?;
    }
    let si = report
        .overall
        .si
        .map_or_else(|| "n/a".to_owned(), |v| format!("{v:.6}"));
    eprintln!("{} pairs, SI {si}", report.overall.pairs);
    Ok(())
}

fn eval_config(m: &MetricArgs) -> Result<EvaluationConfig, Failure> {
    let [hi, lo] = m.percentiles[..] else {
        return Err(Failure::Usage("--percentiles takes `hi,lo`".into()));
    };
    let defaults = BreakdownBins::default();
    let pick = |v: &Option<Vec<f64>>, d: Vec<f64>| v.clone().unwrap_or(d);
    let cfg = EvaluationConfig {
        delta_t: m.dt,
        min_iou: m.min_iou,
        classes: m
            .classes
            .as_ref()
            .map(|c| c.iter().map(|s| s.trim().to_owned()).collect::<BTreeSet<_>>()),
        percentile_hi: hi,
        percentile_lo: lo,
        frame_tolerance: m.frame_tolerance,
        bins: BreakdownBins {
            distance: pick(&m.bins_distance, defaults.distance),
            points: pick(&m.bins_points, defaults.points),
            volume: pick(&m.bins_volume, defaults.volume),
            lwr: pick(&m.bins_lwr, defaults.lwr),
        },
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn scenario(a: &ScenarioArgs, seed: u64) -> (ScenarioSpec, NoiseSpec) {
    let motion = match a.motion {
        Motion::Static => MotionModel::Static,
        Motion::ConstantVelocity => MotionModel::ConstantVelocity,
        Motion::Turning => MotionModel::Turning {
            yaw_rate: a.yaw_rate,
        },
    };
    let scenario = ScenarioSpec {
        sequences: a.sequences,
        frames: a.frames,
        interval: a.interval,
        objects: a.objects,
        motion,
        seed,
        ..ScenarioSpec::default()
    };
    let noise = NoiseSpec {
        center: a.center_noise,
        extent: a.extent_noise,
        yaw: a.yaw_noise,
        score: a.score_noise,
        dropout: a.dropout,
        seed: seed.wrapping_add(1),
    };
    (scenario, noise)
}

fn axis(a: Axis) -> NoiseAxis {
    match a {
        Axis::Center => NoiseAxis::Center,
        Axis::Extent => NoiseAxis::Extent,
        Axis::Yaw => NoiseAxis::Yaw,
        Axis::Score => NoiseAxis::Score,
        Axis::Dropout => NoiseAxis::Dropout,
    }
}

fn properties(a: &args::PropertiesArgs, seed: u64) -> CmdResult {
    let opts = SuiteOptions {
        seed,
        trials: a.trials,
        metric: MetricOptions {
            heading_cutoff: a.heading_cutoff,
        },
        oracle_trials: a.oracle_trials,
        oracle_samples: a.oracle_samples,
        ..SuiteOptions::default()
    };
    if let Some(dir) = &a.curves {
        write_curves(dir, a.angle_step)?;
    }
    let summary = run_property_suite(&opts).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{summary}");
    if summary.passed() {
        Ok(())
    } else {
        Err(Failure::Invalid("property suite failed".into()))
    }
}

fn write_curves(dir: &Path, step_deg: f64) -> CmdResult {
    if !(step_deg > 0.0 && step_deg.is_finite()) {
        return Err(Failure::Usage(format!("--angle-step must be positive, got {step_deg}")));
    }
    std::fs::create_dir_all(dir).map_err(|e| Failure::Invalid(format!("{}: {e}", dir.display())))?;
    let narrow = degree_grid(-10.0, 10.0, step_deg);
    let mut curves: Vec<(String, CurveTable)> = Vec::new();
    for dx in [0.0, 0.25, 0.5] {
        curves.push((format!("property2_naive_dx{dx:.2}.csv"), property2_curve(dx, &narrow)));
        curves.push((format!("property2_si_heading_dx{dx:.2}.csv"), si_heading_curve(dx, &narrow)));
    }
    let steps = (90.0 / step_deg).round() as usize + 1;
    let wide = linspace(0.0, std::f64::consts::FRAC_PI_2, steps);
    for lwr in [1.0, 2.0, 5.0, 10.0] {
        let c = heading_unimodality_curve(lwr, &wide)?;
        curves.push((format!("heading_iou_lwr{lwr}.csv"), c));
    }
    for (name, curve) in curves {
        let path = dir.join(name);
        write_to(Some(&path), |w| curve.write_csv(w))?;
    }
    Ok(())
}

fn write_to(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CmdResult {
    let describe = |p: &Path, e: io::Error| Failure::Invalid(format!("{}: {e}", p.display()));
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| describe(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| describe(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w).and_then(|_| w.flush()).map_err(|e| describe(&PathBuf::from("<stdout>"), e))
        }
    }
}
