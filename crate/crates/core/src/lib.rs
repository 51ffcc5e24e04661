//! Temporal stability evaluation for 3D object detections.
//!
//! The stability index (SI) scores how consistently a detector reports the same
//! object across two timestamps. Predictions are projected onto a pivot box
//! built from the two ground truths, compared element by element (center,
//! extent, heading, confidence) and aggregated as
//! `SI = SI_c * (SI_l + SI_e + SI_h) / 3`.
//!
//! Modules:
//! - [`geometry`]: boxes, the box-to-box transform, IoU engines
//! - [`stability`]: per-pair SI
//! - [`association`]: per-frame matching and cross-frame pairing
//! - [`dataset`]: the line-delimited sequence format
//! - [`evaluator`] and [`report`]: dataset-level aggregation and output
//! - [`pcl`]: prediction-consistency loss math
//! - [`property_lab`]: numerical property checks
//! - [`synthetic`]: synthetic trajectories and noise sweeps

pub mod association;
pub mod dataset;
pub mod error;
pub mod evaluator;
pub mod geometry;
pub mod hungarian;
pub mod pcl;
pub mod property_lab;
pub mod report;
pub mod stability;
pub mod synthetic;

pub use association::{
    enumerate_pairs, match_frame, FrameMatches, GroundTruthObject, PairingConfig, Prediction,
    StabilityPair,
};
pub use dataset::{load_dataset, save_dataset, Dataset, FrameRecord, Loaded, UnknownKeys};
pub use error::{Error, Result};
pub use evaluator::{evaluate, EvaluationConfig, EvaluationReport};
pub use geometry::{iou_oracle, iou_rotated, transform_box, wrap_angle, Box3D};
pub use pcl::{
    apply_augmentation, de_augment, pcl_loss, prediction_errors, AugmentationRecord, PclWeights,
    PredictionErrors,
};
pub use property_lab::{run_property_suite, CurveTable, SuiteOptions, SuiteSummary};
pub use report::{emit_report, ReportFormat};
pub use stability::{
    stability_index, CalibrationRange, Detection, MatchedObservation, MetricOptions,
    StabilityScore,
};
pub use synthetic::{generate_dataset, response_sweep, MotionModel, NoiseSpec, ScenarioSpec};
