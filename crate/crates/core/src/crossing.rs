//! Door-crossing detection.
//!
//! Entering the crossing area around a door arms the detector for that door.
//! While armed, each step records two kinds of evidence: a door-opening
//! event reported at that step, and an intersection between the step segment
//! and the door's crossing zone. When both are present and at most
//! `coincidence_steps` apart (in either order) the environment switches to
//! the other side of the door and the detector disarms.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{in_crossing_area, segment_intersection, zone_for_door, CrossingZone, Door, Environment, Point2, Segment2};
use crate::pdr::Pose;
use crate::scalar::Scalar;

const HISTORY_CAP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossingConfig<T> {
    pub zone_width: T,
    pub area_radius: T,
    pub coincidence_steps: usize,
}

impl<T: Scalar> Default for CrossingConfig<T> {
    fn default() -> Self {
        CrossingConfig {
            zone_width: T::lit(5.0),
            area_radius: T::lit(5.0),
            coincidence_steps: 5,
        }
    }
}

impl<T: Scalar> CrossingConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.zone_width > T::zero()) || !(self.area_radius > T::zero()) {
            return Err(Error::invalid_parameter("crossing", "zone width and area radius must be positive"));
        }
        if self.coincidence_steps == 0 {
            return Err(Error::invalid_parameter("coincidence_steps", "must be at least 1"));
        }
        Ok(())
    }
}

/// Doors with their crossing zones, keyed by door id.
#[derive(Debug, Clone)]
pub struct ZoneMap<T> {
    doors: Vec<Door<T>>,
    zones: BTreeMap<String, CrossingZone<T>>,
}

impl<T: Scalar> ZoneMap<T> {
    pub fn new(doors: &[Door<T>], zone_width: T) -> Result<Self> {
        let zones = doors
            .iter()
            .map(|d| Ok((d.id.clone(), zone_for_door(d, zone_width)?)))
            .collect::<Result<_>>()?;
        Ok(ZoneMap {
            doors: doors.to_vec(),
            zones,
        })
    }

    pub fn doors(&self) -> &[Door<T>] {
        &self.doors
    }

    pub fn door(&self, id: &str) -> Option<&Door<T>> {
        self.doors.iter().find(|d| d.id == id)
    }

    pub fn zone(&self, id: &str) -> Option<&CrossingZone<T>> {
        self.zones.get(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Idle,
    Armed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence<T> {
    DoorOpen { step: usize },
    ZoneCrossing { step: usize, point: Point2<T> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent<T> {
    pub step_index: usize,
    pub door_id: String,
    pub crossing_point: Point2<T>,
    pub from_env: Environment,
    pub to_env: Environment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingState<T> {
    pub phase: Phase,
    pub armed_door: Option<String>,
    pub last_crossing: Option<(usize, Point2<T>)>,
    pub last_door_open: Option<usize>,
    pub environment: Environment,
    /// Most recent evidence, oldest first.
    pub pending_events: VecDeque<Evidence<T>>,
}

impl<T: Scalar> CrossingState<T> {
    pub fn new(environment: Environment) -> Self {
        CrossingState {
            phase: Phase::Idle,
            armed_door: None,
            last_crossing: None,
            last_door_open: None,
            environment,
            pending_events: VecDeque::new(),
        }
    }

    fn disarm(&mut self) {
        self.phase = Phase::Idle;
        self.armed_door = None;
        self.last_crossing = None;
        self.last_door_open = None;
        self.pending_events.clear();
    }

    fn remember(&mut self, ev: Evidence<T>) {
        if self.pending_events.len() == HISTORY_CAP {
            self.pending_events.pop_front();
        }
        self.pending_events.push_back(ev);
    }

    /// Arms on entering a door's crossing area (nearest door wins; equal
    /// distances go to the earlier door) and disarms on leaving it.
    pub fn arm_check(&mut self, pose: &Pose<T>, doors: &[Door<T>], cfg: &CrossingConfig<T>) {
        match self.phase {
            Phase::Idle => {
                let mut best: Option<(&Door<T>, T)> = None;
                for d in doors {
                    if !in_crossing_area(pose.position, d, cfg.area_radius) {
                        continue;
                    }
                    let dist = pose.position.distance(d.center);
                    if best.is_none_or(|(_, b)| dist < b) {
                        best = Some((d, dist));
                    }
                }
                if let Some((d, _)) = best {
                    self.phase = Phase::Armed;
                    self.armed_door = Some(d.id.clone());
                }
            }
            Phase::Armed => {
                let inside = self
                    .armed_door
                    .as_deref()
                    .and_then(|id| doors.iter().find(|d| d.id == id))
                    .is_some_and(|d| in_crossing_area(pose.position, d, cfg.area_radius));
                if !inside {
                    self.disarm();
                }
            }
        }
    }

    /// Feeds one step (the segment from `prev_pos` to `cur_pos`). No-op
    /// while idle.
    pub fn observe_step(
        &mut self,
        step_index: usize,
        prev_pos: Point2<T>,
        cur_pos: Point2<T>,
        door_opened_now: bool,
        cfg: &CrossingConfig<T>,
        zones: &ZoneMap<T>,
    ) -> Option<SwitchEvent<T>> {
        if self.phase != Phase::Armed {
            return None;
        }
        let door_id = self.armed_door.clone()?;

        let expired = |s: usize| s + cfg.coincidence_steps < step_index;
        if self.last_door_open.is_some_and(expired) {
            self.last_door_open = None;
        }
        if self.last_crossing.is_some_and(|(s, _)| expired(s)) {
            self.last_crossing = None;
        }

        if door_opened_now {
            self.last_door_open = Some(step_index);
            self.remember(Evidence::DoorOpen { step: step_index });
        }
        if let (Some(zone), Ok(path)) = (zones.zone(&door_id), Segment2::new(prev_pos, cur_pos)) {
            if let Some(point) = segment_intersection(&zone.segment, &path) {
                self.last_crossing = Some((step_index, point));
                self.remember(Evidence::ZoneCrossing { step: step_index, point });
            }
        }

        let (cross_step, point) = self.last_crossing?;
        let door_step = self.last_door_open?;
        if cross_step.abs_diff(door_step) > cfg.coincidence_steps {
            return None;
        }
        let door = zones.door(&door_id)?;
        let from_env = self.environment;
        let to_env = door.opposite(from_env);
        self.environment = to_env;
        self.disarm();
        Some(SwitchEvent {
            step_index,
            door_id,
            crossing_point: point,
            from_env,
            to_env,
        })
    }
}
