//! Shared fixtures for the benchmarks.

use stabidx_core::synthetic::{generate_dataset, MotionModel, NoiseSpec, ScenarioSpec};
use stabidx_core::Dataset;

/// Turning traffic with moderate noise on every element and some dropout.
pub fn noisy_dataset(sequences: usize, frames: usize, objects: usize) -> Dataset {
    let scenario = ScenarioSpec {
        sequences,
        frames,
        objects,
        motion: MotionModel::Turning { yaw_rate: 0.5 },
        ..ScenarioSpec::default()
    };
    let noise = NoiseSpec {
        center: 0.1,
        extent: 0.05,
        yaw: 0.05,
        score: 0.05,
        dropout: 0.05,
        ..NoiseSpec::default()
    };
    generate_dataset(&scenario, &noise).expect("valid specs")
}
