//! The generic core run in `f32` against the `f64` reference.

use seamloc_core::geometry::{segment_intersection, Point2, Segment2};
use seamloc_core::pdr::{run_pdr, PdrConfig};
use seamloc_core::signal::{detect_steps, normalized_series, ImuSample, SignalConfig};
use seamloc_core::sim::{generate_walk, NoiseModel, WalkScript};
use seamloc_core::Environment;

#[test]
fn f32_walk_matches_f64() {
    let pts = vec![Point2::new(0.0, 0.0), Point2::new(9.0, 0.0), Point2::new(9.0, 6.0)];
    let script = WalkScript::new(pts, Environment::Outdoor);
    let (trace, _) = generate_walk(&script, &NoiseModel::calibrated(5), 100.0).unwrap();
    let narrow: Vec<ImuSample<f32>> = trace
        .samples()
        .iter()
        .map(|s| ImuSample {
            t: s.t as f32,
            accel: s.accel.map(|v| v as f32),
            gyro: s.gyro.map(|v| v as f32),
            mag: s.mag.map(|v| v as f32),
        })
        .collect();

    let steps64 = detect_steps(&normalized_series(trace.samples(), &SignalConfig::default()), &SignalConfig::default());
    let steps32 = detect_steps(&normalized_series(&narrow, &SignalConfig::<f32>::default()), &SignalConfig::default());
    assert_eq!(steps64.len(), steps32.len());
    assert!(steps64.iter().zip(&steps32).all(|(a, b)| a.sample == b.sample));

    let p64 = run_pdr(trace.samples(), &steps64, &PdrConfig::default());
    let p32 = run_pdr(&narrow, &steps32, &PdrConfig::<f32>::default());
    let (a, b) = (p64.last().unwrap().position, p32.last().unwrap().position);
    assert!(((a.x - b.x as f64).powi(2) + (a.y - b.y as f64).powi(2)).sqrt() < 1e-3);
}

#[test]
fn f32_intersection() {
    let s = |ax: f32, ay: f32, bx: f32, by: f32| Segment2::new(Point2::new(ax, ay), Point2::new(bx, by)).unwrap();
    let p = segment_intersection(&s(0.0, 0.0, 2.0, 2.0), &s(0.0, 2.0, 2.0, 0.0)).unwrap();
    assert!((p.x - 1.0).abs() < 1e-6 && (p.y - 1.0).abs() < 1e-6);
    assert!(segment_intersection(&s(0.0, 0.0, 1.0, 0.0), &s(0.0, 1.0, 1.0, 1.0)).is_none());
}
