//! The end-to-end tracker: steps and door events from the trace, heading
//! from the gyro (indoors) or the heading Kalman filter (outdoors), position
//! from the particle filter (indoors) or plain dead reckoning (outdoors), and
//! the crossing state machine choosing between the two.

use serde::{Deserialize, Serialize};

use super::config::{DivergencePolicy, PipelineConfig};
use crate::crossing::{CrossingState, SwitchEvent, ZoneMap};
use crate::error::{Error, Result};
use crate::filters::{kf_predict, kf_update, mag_heading, pf_init_in_plan, pf_step, HeadingKfState, ParticleSet};
use crate::geometry::{Environment, FloorPlan, Point2};
use crate::pdr::{integrate_heading, HeadingIntegrator, Pose};
use crate::signal::{detect_door_openings, detect_steps, normalized_series, Trace};

#[derive(Debug, Clone, PartialEq)]
pub enum ActiveFilter {
    Pf(ParticleSet<f64>),
    Kf(HeadingKfState<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Pf,
    Kf,
}

#[derive(Debug, Clone)]
pub struct TrackerState {
    pub pose: Pose<f64>,
    pub environment: Environment,
    pub active_filter: ActiveFilter,
    pub crossing: CrossingState<f64>,
    pub step_count: usize,
    seed: u64,
    reseeds: u64,
}

impl TrackerState {
    pub fn new(pose: Pose<f64>, environment: Environment, cfg: &PipelineConfig, plan: &FloorPlan<f64>) -> Self {
        let mut state = TrackerState {
            pose,
            environment,
            active_filter: ActiveFilter::Kf(HeadingKfState::new(pose.heading, &cfg.kf)),
            crossing: CrossingState::new(environment),
            step_count: 0,
            seed: cfg.seed,
            reseeds: 0,
        };
        state.active_filter = state.filter_for(environment, pose, cfg, plan);
        state
    }

    pub fn filter_kind(&self) -> FilterKind {
        match self.active_filter {
            ActiveFilter::Pf(_) => FilterKind::Pf,
            ActiveFilter::Kf(_) => FilterKind::Kf,
        }
    }

    fn next_seed(&mut self) -> u64 {
        let s = self.seed.wrapping_add(self.reseeds.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        self.reseeds += 1;
        s
    }

    fn filter_for(&mut self, env: Environment, pose: Pose<f64>, cfg: &PipelineConfig, plan: &FloorPlan<f64>) -> ActiveFilter {
        match env {
            Environment::Indoor => ActiveFilter::Pf(pf_init_in_plan(&pose, &cfg.pf, self.next_seed(), plan)),
            Environment::Outdoor => ActiveFilter::Kf(HeadingKfState::new(pose.heading, &cfg.kf)),
        }
    }

    /// Hands over to the other back-end. The new filter starts at the
    /// current pose estimate.
    pub fn on_switch(&mut self, ev: &SwitchEvent<f64>, cfg: &PipelineConfig, plan: &FloorPlan<f64>) -> Result<()> {
        if ev.from_env != self.environment {
            return Err(Error::StateInconsistency(format!(
                "switch through `{}` from {} while tracker is {}",
                ev.door_id, ev.from_env, self.environment
            )));
        }
        self.environment = ev.to_env;
        self.active_filter = self.filter_for(ev.to_env, self.pose, cfg, plan);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    Step {
        index: usize,
        t: f64,
        x: f64,
        y: f64,
        heading: f64,
        environment: Environment,
    },
    DoorOpen {
        t_start: f64,
        t_end: f64,
        zero_crossings: usize,
        /// First step at or after the end of the window.
        step: Option<usize>,
    },
    Switch {
        step: usize,
        t: f64,
        door_id: String,
        x: f64,
        y: f64,
        from: Environment,
        to: Environment,
    },
    FilterReset {
        step: usize,
        t: f64,
    },
}

impl Event {
    pub fn time(&self) -> f64 {
        match self {
            Event::Step { t, .. } | Event::Switch { t, .. } | Event::FilterReset { t, .. } => *t,
            Event::DoorOpen { t_end, .. } => *t_end,
        }
    }
}

/// Time-ordered output of one tracking run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub initial_pose: Pose<f64>,
    pub initial_env: Environment,
    pub events: Vec<Event>,
}

impl EventLog {
    pub fn final_position(&self) -> Point2<f64> {
        self.events
            .iter()
            .rev()
            .find_map(|e| match e {
                Event::Step { x, y, .. } => Some(Point2::new(*x, *y)),
                _ => None,
            })
            .unwrap_or(self.initial_pose.position)
    }

    pub fn step_count(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::Step { .. })).count()
    }

    pub fn switches(&self) -> impl Iterator<Item = (usize, &str)> {
        self.events.iter().filter_map(|e| match e {
            Event::Switch { step, door_id, .. } => Some((*step, door_id.as_str())),
            _ => None,
        })
    }

    pub fn path_csv(&self) -> String {
        let mut out = String::from("step,t,x,y,heading,environment\n");
        for e in &self.events {
            if let Event::Step {
                index,
                t,
                x,
                y,
                heading,
                environment,
            } = e
            {
                out.push_str(&format!("{index},{t},{x},{y},{heading},{environment}\n"));
            }
        }
        out
    }
}

/// Runs the full pipeline over `trace`. The start pose and environment come
/// from the plan's start annotation.
pub fn track(trace: &Trace<f64>, plan: &FloorPlan<f64>, cfg: &PipelineConfig) -> Result<EventLog> {
    cfg.validate()?;
    plan.validate()?;
    let start = plan
        .start
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("floor plan has no start annotation".into()))?;
    let samples = trace.samples();
    let zones = ZoneMap::new(&plan.doors, cfg.crossing.zone_width)?;

    let series = normalized_series(samples, &cfg.signal);
    let steps = detect_steps(&series, &cfg.signal);
    let door_events = detect_door_openings(&series, &cfg.signal, &steps);

    let mut door_at_step = vec![false; steps.len()];
    let mut events = Vec::new();
    for d in &door_events {
        let k = steps.partition_point(|s| s.t < d.t_end);
        if k < steps.len() {
            door_at_step[k] = true;
        }
        events.push(Event::DoorOpen {
            t_start: d.t_start,
            t_end: d.t_end,
            zero_crossings: d.zero_crossings,
            step: (k < steps.len()).then_some(k),
        });
    }

    let mut state = TrackerState::new(start.pose, start.environment, cfg, plan);
    let mut gyro = HeadingIntegrator::new(start.pose.heading, cfg.pdr.yaw_axis);
    let mut heading = start.pose.heading;
    let mut next_step = steps.iter().peekable();

    for (i, s) in samples.iter().enumerate() {
        if let Some((rate, dt)) = gyro.push(s) {
            match &mut state.active_filter {
                ActiveFilter::Pf(_) => heading = integrate_heading(heading, rate, dt)?,
                ActiveFilter::Kf(kf) => {
                    let mut next = kf_predict(kf, rate, dt, &cfg.kf)?;
                    if let Some(z) = mag_heading(s, &cfg.kf) {
                        next = kf_update(&next, z, &cfg.kf);
                    }
                    *kf = next;
                    heading = next.heading;
                }
            }
        }

        while let Some(step) = next_step.next_if(|st| st.sample == i) {
            let k = step.index;
            let prev = state.pose.position;
            let position = match &mut state.active_filter {
                ActiveFilter::Kf(_) => prev + Point2::from_angle(heading) * cfg.pdr.step_length,
                ActiveFilter::Pf(set) => match pf_step(set, heading, &cfg.pf, &cfg.pdr, plan) {
                    Ok(est) => est,
                    Err(Error::FilterDivergence { .. }) if cfg.divergence == DivergencePolicy::Fail => {
                        return Err(Error::FilterDivergence { step: Some(k) });
                    }
                    Err(Error::FilterDivergence { .. }) => {
                        log::debug!("particle filter diverged at step {k}; re-seeding");
                        events.push(Event::FilterReset { step: k, t: step.t });
                        let seed = state.next_seed();
                        let mut fresh = pf_init_in_plan(&Pose::new(prev, heading), &cfg.pf, seed, plan);
                        let est = match pf_step(&mut fresh, heading, &cfg.pf, &cfg.pdr, plan) {
                            Ok(est) => est,
                            Err(_) => {
                                let p = prev + Point2::from_angle(heading) * cfg.pdr.step_length;
                                let seed = state.next_seed();
                                fresh = pf_init_in_plan(&Pose::new(p, heading), &cfg.pf, seed, plan);
                                p
                            }
                        };
                        if let ActiveFilter::Pf(set) = &mut state.active_filter {
                            *set = fresh;
                        }
                        est
                    }
                    Err(e) => return Err(e),
                },
            };
            state.pose = Pose::new(position, heading);
            state.step_count += 1;
            events.push(Event::Step {
                index: k,
                t: step.t,
                x: position.x,
                y: position.y,
                heading: state.pose.heading,
                environment: state.environment,
            });

            state.crossing.arm_check(&state.pose, &plan.doors, &cfg.crossing);
            if let Some(sw) = state.crossing.observe_step(k, prev, position, door_at_step[k], &cfg.crossing, &zones) {
                state.on_switch(&sw, cfg, plan)?;
                events.push(Event::Switch {
                    step: k,
                    t: step.t,
                    door_id: sw.door_id.clone(),
                    x: sw.crossing_point.x,
                    y: sw.crossing_point.y,
                    from: sw.from_env,
                    to: sw.to_env,
                });
                if let ActiveFilter::Kf(kf) = &state.active_filter {
                    heading = kf.heading;
                }
            }
        }
    }

    // Stable: door events were pushed first, so they precede a step at the
    // same instant.
    events.sort_by(|a, b| a.time().total_cmp(&b.time()));
    Ok(EventLog {
        initial_pose: start.pose,
        initial_env: start.environment,
        events,
    })
}
