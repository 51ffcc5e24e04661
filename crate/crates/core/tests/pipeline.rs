use stabidx_core::dataset::{load_dataset, save_dataset, UnknownKeys};
use stabidx_core::evaluator::{evaluate, evaluate_with_pairs, EvaluationConfig};
use stabidx_core::report::{write_csv, write_json};
use stabidx_core::synthetic::{
    generate_dataset, response_sweep, MotionModel, NoiseAxis, NoiseSpec, ScenarioSpec,
};

fn scenario() -> ScenarioSpec {
    ScenarioSpec {
        sequences: 6,
        frames: 25,
        objects: 16,
        seed: 3,
        ..ScenarioSpec::default()
    }
}

fn with_threads<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn clean_predictions_are_perfectly_stable() {
    for motion in [
        MotionModel::Static,
        MotionModel::ConstantVelocity,
        MotionModel::Turning { yaw_rate: 0.4 },
    ] {
        let spec = ScenarioSpec { motion, ..scenario() };
        let ds = generate_dataset(&spec, &NoiseSpec::default()).unwrap();
        let r = evaluate(&ds, &EvaluationConfig::default()).unwrap();
        assert_eq!(r.overall.pairs, 6 * 20 * 16);
        assert!(!r.classes.is_empty());
        for (class, s) in &r.classes {
            assert_eq!(s.si, Some(1.0), "{class} under {motion:?}");
            assert_eq!(s.invalid_pairs, 0);
        }
    }
}

#[test]
fn full_dropout_scores_zero() {
    let noise = NoiseSpec {
        dropout: 1.0,
        ..NoiseSpec::default()
    };
    let ds = generate_dataset(&scenario(), &noise).unwrap();
    let r = evaluate(&ds, &EvaluationConfig::default()).unwrap();
    assert_eq!(r.overall.si, Some(0.0));
    assert_eq!(r.overall.invalid_pairs, r.overall.pairs);
    assert_eq!(r.overall.si_l, None);
}

#[test]
fn score_noise_only_moves_confidence() {
    let curve = response_sweep(
        &scenario(),
        &NoiseSpec::default(),
        NoiseAxis::Score,
        &[0.0, 0.05, 0.1, 0.2],
        &EvaluationConfig::default(),
    )
    .unwrap();
    for r in &curve.rows {
        for v in [r.si_l, r.si_e, r.si_h] {
            assert!((v.unwrap() - 1.0).abs() <= 1e-12, "{r:?}");
        }
    }
    let si_c: Vec<f64> = curve.rows.iter().map(|r| r.si_c.unwrap()).collect();
    assert_eq!(si_c[0], 1.0);
    assert!(si_c.windows(2).all(|w| w[1] < w[0]), "{si_c:?}");
}

#[test]
fn each_box_element_is_decoupled() {
    let base = NoiseSpec::default();
    let cfg = EvaluationConfig::default();
    // (axis, sub-indicator that may move)
    for (axis, moving) in [(NoiseAxis::Center, 0), (NoiseAxis::Extent, 1), (NoiseAxis::Yaw, 2)] {
        let curve = response_sweep(&scenario(), &base, axis, &[0.1], &cfg).unwrap();
        let r = &curve.rows[0];
        let subs = [r.si_l.unwrap(), r.si_e.unwrap(), r.si_h.unwrap()];
        for (k, v) in subs.iter().enumerate() {
            if k == moving {
                assert!(*v < 1.0, "{axis} should lower indicator {k}: {r:?}");
            } else {
                assert!((v - 1.0).abs() <= 1e-12, "{axis} leaked into indicator {k}: {r:?}");
            }
        }
        assert_eq!(r.si_c, Some(1.0));
    }
}

#[test]
fn center_noise_lowers_si_monotonically() {
    let spec = ScenarioSpec {
        sequences: 10,
        frames: 30,
        objects: 40,
        ..scenario()
    };
    let curve = response_sweep(
        &spec,
        &NoiseSpec::default(),
        NoiseAxis::Center,
        &[0.0, 0.05, 0.1, 0.2, 0.4],
        &EvaluationConfig::default(),
    )
    .unwrap();
    assert!(curve.rows[0].pairs >= 10_000);
    let si: Vec<f64> = curve.rows.iter().map(|r| r.si.unwrap()).collect();
    assert!(si.windows(2).all(|w| w[1] < w[0]), "{si:?}");
}

#[test]
fn large_yaw_noise_saturates_heading_term() {
    let curve = response_sweep(
        &scenario(),
        &NoiseSpec::default(),
        NoiseAxis::Yaw,
        &[0.0, 0.2, 1.0, 3.0],
        &EvaluationConfig {
            min_iou: 0.0,
            ..EvaluationConfig::default()
        },
    )
    .unwrap();
    let si_h: Vec<f64> = curve.rows.iter().filter_map(|r| r.si_h).collect();
    assert_eq!(si_h[0], 1.0);
    assert!(si_h.windows(2).all(|w| w[1] < w[0]), "{si_h:?}");
    assert!(si_h[3] < 0.25, "{si_h:?}");
}

#[test]
fn output_is_independent_of_thread_count() {
    let noise = NoiseSpec {
        center: 0.2,
        extent: 0.05,
        yaw: 0.1,
        score: 0.05,
        dropout: 0.1,
        ..NoiseSpec::default()
    };
    let run = || {
        let ds = generate_dataset(&scenario(), &noise).unwrap();
        let (r, pairs) = evaluate_with_pairs(&ds, &EvaluationConfig::default(), true).unwrap();
        let mut json = Vec::new();
        write_json(&r, &mut json).unwrap();
        write_csv(&r, &mut json).unwrap();
        (json, pairs)
    };
    let one = with_threads(1, run);
    let four = with_threads(4, run);
    assert_eq!(one, four);
}

#[test]
fn saved_dataset_evaluates_identically() {
    let noise = NoiseSpec {
        center: 0.1,
        yaw: 0.05,
        dropout: 0.05,
        ..NoiseSpec::default()
    };
    let ds = generate_dataset(&scenario(), &noise).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.jsonl");
    save_dataset(&ds, &path).unwrap();
    let loaded = load_dataset(&path, UnknownKeys::Reject).unwrap();
    assert!(loaded.warnings.is_empty());
    assert_eq!(loaded.dataset, ds);
    let cfg = EvaluationConfig::default();
    assert_eq!(evaluate(&loaded.dataset, &cfg).unwrap(), evaluate(&ds, &cfg).unwrap());
}

#[test]
fn breakdowns_cover_every_pair() {
    let noise = NoiseSpec {
        center: 0.1,
        ..NoiseSpec::default()
    };
    let ds = generate_dataset(&scenario(), &noise).unwrap();
    let r = evaluate(&ds, &EvaluationConfig::default()).unwrap();
    for rows in [
        &r.breakdowns.distance,
        &r.breakdowns.points,
        &r.breakdowns.volume,
        &r.breakdowns.lwr,
    ] {
        assert_eq!(rows.iter().map(|b| b.count).sum::<u64>(), r.overall.pairs);
    }
    assert!(r.breakdowns.distance.len() > 1);
}
