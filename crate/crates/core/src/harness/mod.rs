//! Running the pipeline over files and simulated suites, and scoring it.

pub mod config;
pub mod eval;
pub mod fixtures;
pub mod formats;
pub mod track;

use rayon::prelude::*;

pub use config::{DivergencePolicy, EvalConfig, PipelineConfig};
pub use eval::{evaluate, Cdf, Confusion, EvalReport, GroupStats, Rates};
pub use track::{track, ActiveFilter, Event, EventLog, FilterKind, TrackerState};

use crate::error::Result;
use crate::geometry::FloorPlan;
use crate::sim::{scenario_suite, GroundTruth};

/// Simulates `n_trials` walks on `plan` with the noise and scenario from
/// `cfg`, tracks each one, and returns the logs paired with ground truth in
/// trial order. Trial `i` uses noise seed `cfg.noise.seed + i` and tracker
/// seed `cfg.seed + i`.
pub fn run_suite(plan: &FloorPlan<f64>, n_trials: usize, cfg: &PipelineConfig) -> Result<Vec<(EventLog, GroundTruth)>> {
    let walks = scenario_suite(plan, n_trials, &cfg.noise, &cfg.scenario)?;
    walks
        .into_par_iter()
        .enumerate()
        .map(|(i, (trace, truth))| {
            let trial_cfg = PipelineConfig {
                seed: cfg.seed.wrapping_add(i as u64),
                ..cfg.clone()
            };
            Ok((track(&trace, plan, &trial_cfg)?, truth))
        })
        .collect()
}
