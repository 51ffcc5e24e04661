use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Temporal stability evaluation for 3D object detections.
///
/// Every flag can also be set through an environment variable named
/// `STABIDX_<FLAG>` (upper case, dashes as underscores).
#[derive(Debug, Parser)]
#[command(name = "stabidx", version)]
pub struct Cli {
    /// Worker threads; 0 uses one per core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0, env = "STABIDX_THREADS")]
    pub threads: usize,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 7, env = "STABIDX_SEED")]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a dataset and write a report.
    Eval(EvalArgs),
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
    /// Evaluate synthetic data across a grid of one noise scale.
    Sweep(SweepArgs),
    /// Run the property suite and optionally write the heading curves.
    Properties(PropertiesArgs),
    /// Consistency loss between two error collections.
    PclLoss(PclLossArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Motion {
    Static,
    ConstantVelocity,
    Turning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Center,
    Extent,
    Yaw,
    Score,
    Dropout,
}

/// Knobs shared by `eval` and `sweep`.
#[derive(Debug, Args)]
pub struct MetricArgs {
    /// Seconds between the two frames of a pair.
    #[arg(long, default_value_t = 0.5, env = "STABIDX_DT")]
    pub dt: f64,

    /// Minimum IoU for a prediction to match a GT.
    #[arg(long, default_value_t = 1e-6, env = "STABIDX_MIN_IOU")]
    pub min_iou: f64,

    /// Comma-separated classes to evaluate; all when omitted.
    #[arg(long, value_delimiter = ',', env = "STABIDX_CLASSES")]
    pub classes: Option<Vec<String>>,

    /// Confidence calibration percentiles as `hi,lo` fractions.
    #[arg(long, value_delimiter = ',', default_values_t = [0.99, 0.01], env = "STABIDX_PERCENTILES")]
    pub percentiles: Vec<f64>,

    /// Pairing tolerance in seconds; half the capture interval when omitted.
    #[arg(long, env = "STABIDX_FRAME_TOLERANCE")]
    pub frame_tolerance: Option<f64>,

    /// Distance bin edges in meters.
    #[arg(long, value_delimiter = ',', env = "STABIDX_BINS_DISTANCE")]
    pub bins_distance: Option<Vec<f64>>,

    /// Point-count bin edges.
    #[arg(long, value_delimiter = ',', env = "STABIDX_BINS_POINTS")]
    pub bins_points: Option<Vec<f64>>,

    /// Volume bin edges in cubic meters.
    #[arg(long, value_delimiter = ',', env = "STABIDX_BINS_VOLUME")]
    pub bins_volume: Option<Vec<f64>>,

    /// Length-to-width ratio bin edges.
    #[arg(long, value_delimiter = ',', env = "STABIDX_BINS_LWR")]
    pub bins_lwr: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Line-delimited dataset file.
    #[arg(long, env = "STABIDX_DATASET")]
    pub dataset: PathBuf,

    /// Report destination.
    #[arg(long, env = "STABIDX_REPORT")]
    pub report: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Json, env = "STABIDX_FORMAT")]
    pub format: Format,

    /// Also write every scored pair, one JSON object per line.
    #[arg(long, env = "STABIDX_PAIR_DUMP")]
    pub pair_dump: Option<PathBuf>,

    /// Reject records with unknown keys instead of warning.
    #[arg(long, env = "STABIDX_STRICT")]
    pub strict: bool,

    #[command(flatten)]
    pub metric: MetricArgs,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, default_value_t = 4, env = "STABIDX_SEQUENCES")]
    pub sequences: usize,

    #[arg(long, default_value_t = 20, env = "STABIDX_FRAMES")]
    pub frames: usize,

    #[arg(long, default_value_t = 10, env = "STABIDX_OBJECTS")]
    pub objects: usize,

    /// Capture interval in seconds.
    #[arg(long, default_value_t = 0.1, env = "STABIDX_INTERVAL")]
    pub interval: f64,

    #[arg(long, value_enum, default_value_t = Motion::Turning, env = "STABIDX_MOTION")]
    pub motion: Motion,

    /// Yaw rate for turning motion, rad/s.
    #[arg(long, default_value_t = 0.5, env = "STABIDX_YAW_RATE")]
    pub yaw_rate: f64,

    /// Center noise sigma in meters.
    #[arg(long, default_value_t = 0.0, env = "STABIDX_CENTER_NOISE")]
    pub center_noise: f64,

    /// Log-scale extent noise sigma.
    #[arg(long, default_value_t = 0.0, env = "STABIDX_EXTENT_NOISE")]
    pub extent_noise: f64,

    /// Yaw noise sigma in radians.
    #[arg(long, default_value_t = 0.0, env = "STABIDX_YAW_NOISE")]
    pub yaw_noise: f64,

    /// Score noise sigma.
    #[arg(long, default_value_t = 0.0, env = "STABIDX_SCORE_NOISE")]
    pub score_noise: f64,

    /// Probability that a prediction is dropped.
    #[arg(long, default_value_t = 0.0, env = "STABIDX_DROPOUT")]
    pub dropout: f64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Destination dataset file.
    #[arg(long, env = "STABIDX_OUT")]
    pub out: PathBuf,

    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Noise scale to sweep.
    #[arg(long, value_enum, env = "STABIDX_AXIS")]
    pub axis: Axis,

    /// Comma-separated values of the swept scale.
    #[arg(long, value_delimiter = ',', required = true, env = "STABIDX_GRID")]
    pub grid: Vec<f64>,

    /// CSV destination; stdout when omitted.
    #[arg(long, env = "STABIDX_OUT")]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub scenario: ScenarioArgs,

    #[command(flatten)]
    pub metric: MetricArgs,
}

#[derive(Debug, Args)]
pub struct PropertiesArgs {
    #[arg(long, default_value_t = 1000, env = "STABIDX_TRIALS")]
    pub trials: u64,

    /// Box pairs checked against the Monte-Carlo oracle.
    #[arg(long, default_value_t = 20, env = "STABIDX_ORACLE_TRIALS")]
    pub oracle_trials: u64,

    /// Samples per oracle estimate.
    #[arg(long, default_value_t = 1_000_000, env = "STABIDX_ORACLE_SAMPLES")]
    pub oracle_samples: u64,

    /// Heading cutoff of the metric under test, radians. Only for negative
    /// controls.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4, env = "STABIDX_HEADING_CUTOFF")]
    pub heading_cutoff: f64,

    /// Directory for curve CSVs.
    #[arg(long, env = "STABIDX_CURVES")]
    pub curves: Option<PathBuf>,

    /// Angle grid resolution for curves, degrees.
    #[arg(long, default_value_t = 0.25, env = "STABIDX_ANGLE_STEP")]
    pub angle_step: f64,
}

#[derive(Debug, Args)]
pub struct PclLossArgs {
    /// Line-delimited errors at the first timestamp.
    #[arg(long, env = "STABIDX_ERRORS_A")]
    pub errors_a: PathBuf,

    /// Line-delimited errors at the second timestamp, index-aligned.
    #[arg(long, env = "STABIDX_ERRORS_B")]
    pub errors_b: PathBuf,

    /// Term weights as `confidence,localization,extent,heading`.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0, 1.0], env = "STABIDX_WEIGHTS")]
    pub weights: Vec<f64>,
}
