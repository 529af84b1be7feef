//! Synthetic pedestrian walks with ground-truth labels.
//!
//! The accelerometer is phenomenological: each step is one period of a
//! 2 m/s^2 sinusoid in normalized acceleration, door manipulation is a 1.5 s
//! jiggle at 0.8 m/s^2, and pauses are rest. Gravity lies along device z.
//! Turns happen during the first fifth of a leg's first step as a constant
//! gyro rate, sized so trapezoidal integration recovers the exact turn.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{segment_intersection, zone_for_door, Door, Environment, FloorPlan, Point2, Segment2, DOOR_OPENING_WIDTH};
use crate::pdr::Pose;
use crate::scalar::wrap_angle;
use crate::signal::{ImuSample, Trace};

pub const GRAVITY: f64 = 9.81;
pub const STEP_AMPLITUDE: f64 = 2.0;
pub const DOOR_JIGGLE_AMPLITUDE: f64 = 0.8;
pub const DOOR_JIGGLE_PERIOD: f64 = 0.4;
pub const DOOR_JIGGLE_SECONDS: f64 = 1.5;
/// Horizontal and vertical geomagnetic field, microtesla.
pub const FIELD_HORIZONTAL: f64 = 20.0;
pub const FIELD_VERTICAL: f64 = 44.0;
const TURN_FRACTION: f64 = 0.2;
const MIN_SAMPLES_PER_STEP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DoorActionKind {
    OpenAndCross,
    /// Walks up to the door and reverses. `touch` adds the door jiggle.
    ApproachAndTurnBack { touch: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoorAction {
    pub waypoint: usize,
    pub door: Door<f64>,
    pub kind: DoorActionKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkScript {
    /// A single waypoint gives a trace of pure rest.
    pub waypoints: Vec<Point2<f64>>,
    /// steps per second
    pub cadence: f64,
    pub step_length_true: f64,
    /// Defaults to the direction of the first leg.
    pub initial_heading: Option<f64>,
    pub initial_env: Environment,
    pub door_actions: Vec<DoorAction>,
    /// `(waypoint index, seconds)`
    pub pauses: Vec<(usize, f64)>,
    /// Rest before the first step, seconds.
    pub lead_in: f64,
    pub group: String,
}

impl WalkScript {
    pub fn new(waypoints: Vec<Point2<f64>>, initial_env: Environment) -> Self {
        WalkScript {
            waypoints,
            cadence: 2.0,
            step_length_true: 0.75,
            initial_heading: None,
            initial_env,
            door_actions: Vec::new(),
            pauses: Vec::new(),
            lead_in: 0.5,
            group: String::from("default"),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.waypoints.is_empty() {
            return Err(Error::InvalidScript("no waypoints".into()));
        }
        if !self.waypoints[0].is_finite() {
            return Err(Error::InvalidScript("waypoint 0 is not finite".into()));
        }
        if !(self.cadence > 0.0) || !(self.step_length_true > 0.0) || !(self.lead_in >= 0.0) {
            return Err(Error::InvalidScript("cadence and step length must be positive".into()));
        }
        for (i, w) in self.waypoints.windows(2).enumerate() {
            if !w[0].is_finite() || !w[1].is_finite() {
                return Err(Error::InvalidScript(format!("waypoint {i} is not finite")));
            }
            if w[0] == w[1] {
                return Err(Error::InvalidScript(format!("waypoints {i} and {} coincide", i + 1)));
            }
        }
        let n = self.waypoints.len();
        if let Some(a) = self.door_actions.iter().find(|a| a.waypoint >= n) {
            return Err(Error::InvalidScript(format!("door action at missing waypoint {}", a.waypoint)));
        }
        if let Some(p) = self.pauses.iter().find(|p| p.0 >= n || !(p.1 >= 0.0)) {
            return Err(Error::InvalidScript(format!("bad pause {p:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// m/s^2 per axis
    pub accel_sigma: f64,
    /// rad/s per axis
    pub gyro_sigma: f64,
    /// rad/s on the yaw axis
    pub gyro_bias: f64,
    /// microtesla per axis
    pub mag_sigma: f64,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::none(0)
    }
}

impl NoiseModel {
    pub fn none(seed: u64) -> Self {
        NoiseModel {
            accel_sigma: 0.0,
            gyro_sigma: 0.0,
            gyro_bias: 0.0,
            mag_sigma: 0.0,
            seed,
        }
    }

    /// Consumer-phone grade: small accelerometer noise, an uncompensated
    /// gyro bias of a few mrad/s, magnetometer noise of ~0.05 rad in heading.
    pub fn calibrated(seed: u64) -> Self {
        NoiseModel {
            accel_sigma: 0.05,
            gyro_sigma: 0.01,
            gyro_bias: 0.004,
            mag_sigma: 1.0,
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        NoiseModel { seed, ..self }
    }

    fn validate(&self) -> Result<()> {
        let all = [self.accel_sigma, self.gyro_sigma, self.mag_sigma];
        if all.iter().any(|s| !(*s >= 0.0)) || !self.gyro_bias.is_finite() {
            return Err(Error::invalid_parameter("noise", "sigmas must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueCrossing {
    pub step: usize,
    pub door_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueTurnBack {
    /// Index of the first step after the reversal.
    pub step: usize,
    pub door_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub group: String,
    pub initial_pose: Pose<f64>,
    pub initial_env: Environment,
    /// Pose after each step.
    pub poses: Vec<Pose<f64>>,
    /// Time of each step's acceleration peak.
    pub step_times: Vec<f64>,
    pub door_open_intervals: Vec<(f64, f64)>,
    pub crossings: Vec<TrueCrossing>,
    pub turnbacks: Vec<TrueTurnBack>,
    /// Environment after each step.
    pub environments: Vec<Environment>,
    /// Total time spent not stepping (lead-in, pauses, door jiggles).
    pub rest_seconds: f64,
}

impl GroundTruth {
    pub fn final_position(&self) -> Point2<f64> {
        self.poses
            .last()
            .map(|p| p.position)
            .unwrap_or(self.initial_pose.position)
    }

    pub fn step_count(&self) -> usize {
        self.poses.len()
    }
}

struct Synth {
    fs: f64,
    samples: Vec<ImuSample<f64>>,
    rng: ChaCha8Rng,
    noise: NoiseModel,
    /// Trapezoid-integrated true heading.
    heading: f64,
    last_rate: Option<f64>,
}

impl Synth {
    fn t_next(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    fn gauss(&mut self, sigma: f64) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        sigma * z
    }

    fn push(&mut self, a_norm: f64, yaw_rate: f64) {
        let t = self.t_next();
        if let (Some(r0), Some(prev)) = (self.last_rate, self.samples.last()) {
            self.heading = wrap_angle(self.heading + 0.5 * (r0 + yaw_rate) * (t - prev.t));
        }
        self.last_rate = Some(yaw_rate);

        let n = self.noise;
        let accel = [
            self.gauss(n.accel_sigma),
            self.gauss(n.accel_sigma),
            GRAVITY + a_norm + self.gauss(n.accel_sigma),
        ];
        let gyro = [
            self.gauss(n.gyro_sigma),
            self.gauss(n.gyro_sigma),
            yaw_rate + n.gyro_bias + self.gauss(n.gyro_sigma),
        ];
        let (s, c) = self.heading.sin_cos();
        let mag = [
            FIELD_HORIZONTAL * c + self.gauss(n.mag_sigma),
            -FIELD_HORIZONTAL * s + self.gauss(n.mag_sigma),
            FIELD_VERTICAL + self.gauss(n.mag_sigma),
        ];
        self.samples.push(ImuSample { t, accel, gyro, mag });
    }

    fn rest(&mut self, seconds: f64) -> f64 {
        let n = (seconds * self.fs).round() as usize;
        for _ in 0..n {
            self.push(0.0, 0.0);
        }
        n as f64 / self.fs
    }

    /// Returns the `(start, end)` of the injected window.
    fn jiggle(&mut self) -> (f64, f64) {
        let n = (DOOR_JIGGLE_SECONDS * self.fs).round() as usize;
        let start = self.t_next();
        for j in 0..n {
            let tau = j as f64 / self.fs;
            self.push(DOOR_JIGGLE_AMPLITUDE * (std::f64::consts::TAU * tau / DOOR_JIGGLE_PERIOD).sin(), 0.0);
        }
        (start, start + n as f64 / self.fs)
    }
}

/// Synthesizes a trace for `script` at `sample_rate` Hz.
pub fn generate_walk(script: &WalkScript, noise: &NoiseModel, sample_rate: f64) -> Result<(Trace<f64>, GroundTruth)> {
    script.validate()?;
    noise.validate()?;
    if !(sample_rate >= 20.0) {
        return Err(Error::invalid_parameter("sample_rate", "must be at least 20 Hz"));
    }
    let sps = (sample_rate / script.cadence).round() as usize;
    if sps < MIN_SAMPLES_PER_STEP {
        return Err(Error::InvalidScript(format!(
            "{} samples per step is too few; raise the sample rate or lower the cadence",
            sps
        )));
    }
    let turn_samples = ((sps as f64 * TURN_FRACTION).floor() as usize).max(1);
    let step_len = script.step_length_true;

    let first_dir = match script.waypoints.get(1) {
        Some(&w1) => {
            let d = w1 - script.waypoints[0];
            d.y.atan2(d.x)
        }
        None => 0.0,
    };
    let initial_heading = wrap_angle(script.initial_heading.unwrap_or(first_dir));
    let mut synth = Synth {
        fs: sample_rate,
        samples: Vec::new(),
        rng: ChaCha8Rng::seed_from_u64(noise.seed),
        noise: *noise,
        heading: initial_heading,
        last_rate: None,
    };

    let initial_pose = Pose::new(script.waypoints[0], initial_heading);
    let mut truth = GroundTruth {
        group: script.group.clone(),
        initial_pose,
        initial_env: script.initial_env,
        poses: Vec::new(),
        step_times: Vec::new(),
        door_open_intervals: Vec::new(),
        crossings: Vec::new(),
        turnbacks: Vec::new(),
        environments: Vec::new(),
        rest_seconds: 0.0,
    };

    truth.rest_seconds += synth.rest(script.lead_in);
    let mut pos = script.waypoints[0];
    let mut heading = initial_heading;
    let mut env = script.initial_env;
    let mut pending_cross: Option<&Door<f64>> = None;

    for w in 0..script.waypoints.len() {
        for &(_, secs) in script.pauses.iter().filter(|p| p.0 == w) {
            truth.rest_seconds += synth.rest(secs);
        }
        for action in script.door_actions.iter().filter(|a| a.waypoint == w) {
            if let Some(d) = pending_cross {
                return Err(Error::InvalidScript(format!("door `{}` was never crossed", d.id)));
            }
            match action.kind {
                DoorActionKind::OpenAndCross => {
                    let iv = synth.jiggle();
                    truth.rest_seconds += iv.1 - iv.0;
                    truth.door_open_intervals.push(iv);
                    pending_cross = Some(&action.door);
                }
                DoorActionKind::ApproachAndTurnBack { touch } => {
                    if touch {
                        let iv = synth.jiggle();
                        truth.rest_seconds += iv.1 - iv.0;
                        truth.door_open_intervals.push(iv);
                    }
                    truth.turnbacks.push(TrueTurnBack {
                        step: truth.poses.len(),
                        door_id: action.door.id.clone(),
                    });
                }
            }
        }
        let Some(&target) = script.waypoints.get(w + 1) else {
            break;
        };

        let d = target - pos;
        let n_steps = ((d.norm() / step_len).round() as usize).max(1);
        let dir = d.y.atan2(d.x);
        let turn = wrap_angle(dir - heading);
        let turn_rate = turn * sample_rate / turn_samples as f64;
        let unit = Point2::from_angle(dir);

        for s in 0..n_steps {
            let t_start = synth.t_next();
            for j in 0..sps {
                let a = STEP_AMPLITUDE * (std::f64::consts::TAU * j as f64 / sps as f64).sin();
                let rate = if s == 0 && j < turn_samples { turn_rate } else { 0.0 };
                synth.push(a, rate);
            }
            heading = dir;
            let prev = pos;
            pos = pos + unit * step_len;

            if let Some(door) = pending_cross {
                let opening = zone_for_door(door, DOOR_OPENING_WIDTH)?;
                let crossed = Segment2::new(prev, pos)
                    .ok()
                    .and_then(|seg| segment_intersection(&opening.segment, &seg))
                    .is_some();
                if crossed {
                    truth.crossings.push(TrueCrossing {
                        step: truth.poses.len(),
                        door_id: door.id.clone(),
                    });
                    env = door.opposite(env);
                    pending_cross = None;
                }
            }

            truth.poses.push(Pose::new(pos, heading));
            truth.step_times.push(t_start + 0.25 * sps as f64 / sample_rate);
            truth.environments.push(env);
        }
    }
    if let Some(d) = pending_cross {
        return Err(Error::InvalidScript(format!("door `{}` was never crossed", d.id)));
    }

    // One trailing rest sample closes the last step's waveform.
    synth.push(0.0, 0.0);
    let trace = Trace::new(synth.samples)?;
    Ok((trace, truth))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Fraction of trials that approach the first door and turn back.
    pub turnback_fraction: f64,
    pub sample_rate: f64,
    pub cadence: f64,
    pub step_length: f64,
    /// Distance in front of a door where the perpendicular approach starts.
    pub pre_approach: f64,
    /// Distance in front of a door where the pedestrian opens it.
    pub approach: f64,
    /// Distance behind a door where the crossing leg ends.
    pub exit: f64,
    /// Distance in front of the door where turn-back trials reverse.
    pub turnback_distance: f64,
    pub turnback_touch: bool,
    pub lead_in: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            turnback_fraction: 0.0,
            sample_rate: 100.0,
            cadence: 2.0,
            step_length: 0.75,
            pre_approach: 3.375,
            approach: 0.375,
            exit: 6.375,
            turnback_distance: 1.875,
            turnback_touch: false,
            lead_in: 0.5,
        }
    }
}

pub const CROSSING_GROUP: &str = "crossing";
pub const TURNBACK_GROUP: &str = "turnback";

fn base_script(plan: &FloorPlan<f64>, cfg: &ScenarioConfig) -> Result<(WalkScript, Environment)> {
    let start = plan
        .start
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("floor plan has no start annotation".into()))?;
    if plan.doors.is_empty() {
        return Err(Error::InvalidInput("floor plan has no doors".into()));
    }
    let mut s = WalkScript::new(vec![start.pose.position], start.environment);
    s.cadence = cfg.cadence;
    s.step_length_true = cfg.step_length;
    s.initial_heading = Some(start.pose.heading);
    s.lead_in = cfg.lead_in;
    Ok((s, start.environment))
}

/// Walks through every door of the plan, in order: a perpendicular approach,
/// an open-and-cross action just in front of the door, and an exit leg.
pub fn crossing_script(plan: &FloorPlan<f64>, cfg: &ScenarioConfig) -> Result<WalkScript> {
    let (mut s, mut env) = base_script(plan, cfg)?;
    s.group = CROSSING_GROUP.into();
    for door in &plan.doors {
        let n = door.normal_towards(env);
        s.waypoints.push(door.center + n * cfg.pre_approach);
        s.waypoints.push(door.center + n * cfg.approach);
        s.door_actions.push(DoorAction {
            waypoint: s.waypoints.len() - 1,
            door: door.clone(),
            kind: DoorActionKind::OpenAndCross,
        });
        s.waypoints.push(door.center - n * cfg.exit);
        env = door.opposite(env);
    }
    Ok(s)
}

/// Approaches the first door, reverses in front of it and walks back to
/// the start.
pub fn turnback_script(plan: &FloorPlan<f64>, cfg: &ScenarioConfig) -> Result<WalkScript> {
    let (mut s, env) = base_script(plan, cfg)?;
    s.group = TURNBACK_GROUP.into();
    let door = &plan.doors[0];
    let n = door.normal_towards(env);
    let origin = s.waypoints[0];
    s.waypoints.push(door.center + n * cfg.pre_approach);
    s.waypoints.push(door.center + n * cfg.turnback_distance);
    s.door_actions.push(DoorAction {
        waypoint: s.waypoints.len() - 1,
        door: door.clone(),
        kind: DoorActionKind::ApproachAndTurnBack {
            touch: cfg.turnback_touch,
        },
    });
    s.waypoints.push(origin);
    Ok(s)
}

/// `n_trials` independently seeded walks. The first
/// `n_trials - round(n_trials * turnback_fraction)` trials cross every door;
/// the rest are turn-back walks. Trial `i` uses noise seed `noise.seed + i`.
pub fn scenario_suite(
    plan: &FloorPlan<f64>,
    n_trials: usize,
    noise: &NoiseModel,
    cfg: &ScenarioConfig,
) -> Result<Vec<(Trace<f64>, GroundTruth)>> {
    if !(0.0..=1.0).contains(&cfg.turnback_fraction) {
        return Err(Error::invalid_parameter("turnback_fraction", "must lie in [0, 1]"));
    }
    let n_turnback = (n_trials as f64 * cfg.turnback_fraction).round() as usize;
    let n_crossing = n_trials - n_turnback;
    let crossing = if n_crossing > 0 { Some(crossing_script(plan, cfg)?) } else { None };
    let turnback = if n_turnback > 0 { Some(turnback_script(plan, cfg)?) } else { None };

    (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let script = if i < n_crossing { crossing.as_ref() } else { turnback.as_ref() };
            let script = script.expect("script built for every used group");
            generate_walk(script, &noise.with_seed(noise.seed.wrapping_add(i as u64)), cfg.sample_rate)
        })
        .collect()
}
