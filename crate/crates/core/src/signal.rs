//! Normalized acceleration and the threshold detectors built on it.
//!
//! A step is a rise above `step_hi` followed, after a zero crossing, by a
//! fall below `step_lo`. A door opening is a stretch of at most
//! `door_window` seconds where the signal leaves the `door_lo..door_hi` band
//! and crosses zero repeatedly without ever reaching step levels.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImuSample<T> {
    /// Seconds, strictly increasing within a trace.
    pub t: T,
    /// m/s^2
    pub accel: [T; 3],
    /// rad/s
    pub gyro: [T; 3],
    /// microtesla
    pub mag: [T; 3],
}

impl<T: Scalar> ImuSample<T> {
    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self
                .accel
                .iter()
                .chain(&self.gyro)
                .chain(&self.mag)
                .all(|v| v.is_finite())
    }
}

/// A validated sequence of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    samples: Vec<ImuSample<T>>,
}

impl<T: Scalar> Trace<T> {
    pub fn new(samples: Vec<ImuSample<T>>) -> Result<Self> {
        for (i, s) in samples.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::invariant("trace.finite", format!("sample {i} has a non-finite value")));
            }
            if i > 0 && s.t <= samples[i - 1].t {
                return Err(Error::invariant(
                    "trace.monotonic_time",
                    format!("sample {i}: t = {} does not exceed {}", s.t, samples[i - 1].t),
                ));
            }
        }
        Ok(Trace { samples })
    }

    pub fn empty() -> Self {
        Trace { samples: Vec::new() }
    }

    pub fn samples(&self) -> &[ImuSample<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<ImuSample<T>> {
        self.samples
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalConfig<T> {
    pub gravity: T,
    pub step_hi: T,
    pub step_lo: T,
    pub door_hi: T,
    pub door_lo: T,
    /// Minimum spacing between step events, seconds.
    pub step_refractory: T,
    /// Door-opening window length, seconds.
    pub door_window: T,
    pub door_min_zero_crossings: usize,
    /// Samples with |a_norm| at or below this do not change the sign used
    /// for zero-crossing counts.
    pub zero_crossing_deadband: T,
    /// Moving-average width in samples; 0 or 1 disables smoothing.
    pub smoothing_window: usize,
}

impl<T: Scalar> Default for SignalConfig<T> {
    fn default() -> Self {
        SignalConfig {
            gravity: T::lit(9.81),
            step_hi: T::lit(1.5),
            step_lo: T::lit(-1.5),
            door_hi: T::lit(0.5),
            door_lo: T::lit(-0.5),
            step_refractory: T::lit(0.3),
            door_window: T::lit(1.5),
            door_min_zero_crossings: 2,
            zero_crossing_deadband: T::lit(0.25),
            smoothing_window: 0,
        }
    }
}

impl<T: Scalar> SignalConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        if !(self.gravity > z) {
            return Err(Error::invalid_parameter("gravity", "must be positive"));
        }
        if !(self.door_hi > z && self.door_hi < self.step_hi) {
            return Err(Error::invalid_parameter("door_hi", "must satisfy 0 < door_hi < step_hi"));
        }
        if !(self.door_lo < z && self.door_lo > self.step_lo) {
            return Err(Error::invalid_parameter("door_lo", "must satisfy step_lo < door_lo < 0"));
        }
        if !(self.step_refractory > z) || !(self.door_window > z) {
            return Err(Error::invalid_parameter("window", "refractory and door window must be positive"));
        }
        if self.door_min_zero_crossings == 0 {
            return Err(Error::invalid_parameter("door_min_zero_crossings", "must be at least 1"));
        }
        if !(self.zero_crossing_deadband >= z && self.zero_crossing_deadband < self.door_hi) {
            return Err(Error::invalid_parameter("zero_crossing_deadband", "must lie in [0, door_hi)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepEvent<T> {
    pub index: usize,
    /// Sample index of the step's positive peak.
    pub sample: usize,
    pub t: T,
    pub peak: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoorOpenEvent<T> {
    pub t_start: T,
    pub t_end: T,
    pub zero_crossings: usize,
}

/// Acceleration magnitude minus gravity.
pub fn normalize_accel<T: Scalar>(sample: &ImuSample<T>, cfg: &SignalConfig<T>) -> T {
    let [ax, ay, az] = sample.accel;
    (ax * ax + ay * ay + az * az).sqrt() - cfg.gravity
}

/// `(t, a_norm)` for every sample, smoothed if the config asks for it.
pub fn normalized_series<T: Scalar>(samples: &[ImuSample<T>], cfg: &SignalConfig<T>) -> Vec<(T, T)> {
    let raw: Vec<T> = samples.iter().map(|s| normalize_accel(s, cfg)).collect();
    let values = if cfg.smoothing_window > 1 {
        moving_average(&raw, cfg.smoothing_window)
    } else {
        raw
    };
    samples.iter().map(|s| s.t).zip(values).collect()
}

/// Trailing moving average; the first samples average what is available.
pub fn moving_average<T: Scalar>(values: &[T], width: usize) -> Vec<T> {
    let width = width.max(1);
    let mut out = Vec::with_capacity(values.len());
    let mut sum = T::zero();
    for (i, &v) in values.iter().enumerate() {
        sum = sum + v;
        if i >= width {
            sum = sum - values[i - width];
        }
        let n = (i + 1).min(width);
        out.push(sum / T::lit(n as f64));
    }
    out
}

#[derive(Debug, Clone, Copy)]
enum StepPhase<T> {
    Idle,
    /// Above `step_hi`, no zero crossing yet.
    Rising { sample: usize, peak: T },
    /// Crossed zero after the peak, waiting for `step_lo`.
    Falling { sample: usize, peak: T },
}

pub fn detect_steps<T: Scalar>(series: &[(T, T)], cfg: &SignalConfig<T>) -> Vec<StepEvent<T>> {
    let mut steps: Vec<StepEvent<T>> = Vec::new();
    let mut phase = StepPhase::Idle;

    for (i, &(_, a)) in series.iter().enumerate() {
        let mut fired = None;
        phase = match phase {
            StepPhase::Idle if a > cfg.step_hi => StepPhase::Rising { sample: i, peak: a },
            StepPhase::Idle => StepPhase::Idle,
            StepPhase::Rising { sample, peak } => {
                if a > peak {
                    StepPhase::Rising { sample: i, peak: a }
                } else if a < cfg.step_lo {
                    fired = Some((sample, peak));
                    StepPhase::Idle
                } else if a <= T::zero() {
                    StepPhase::Falling { sample, peak }
                } else {
                    StepPhase::Rising { sample, peak }
                }
            }
            StepPhase::Falling { sample, peak } => {
                if a > cfg.step_hi {
                    StepPhase::Rising { sample: i, peak: a }
                } else if a < cfg.step_lo {
                    fired = Some((sample, peak));
                    StepPhase::Idle
                } else {
                    StepPhase::Falling { sample, peak }
                }
            }
        };

        if let Some((sample, peak)) = fired {
            let t = series[sample].0;
            let clear = steps
                .last()
                .is_none_or(|last| t - last.t >= cfg.step_refractory);
            if clear {
                steps.push(StepEvent {
                    index: steps.len(),
                    sample,
                    t,
                    peak,
                });
            }
        }
    }
    steps
}

/// Sliding max (or min, with `greater = false`) over windows `[i, end[i]]`
/// where `end` is non-decreasing.
fn sliding_extreme<T: Scalar>(values: &[T], ends: &[usize], greater: bool) -> Vec<T> {
    let better = |x: T, y: T| if greater { x >= y } else { x <= y };
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    let mut out = Vec::with_capacity(ends.len());
    for (i, &end) in ends.iter().enumerate() {
        while next <= end {
            while dq.back().is_some_and(|&b| better(values[next], values[b])) {
                dq.pop_back();
            }
            dq.push_back(next);
            next += 1;
        }
        while dq.front().is_some_and(|&f| f < i) {
            dq.pop_front();
        }
        out.push(values[*dq.front().expect("window non-empty")]);
    }
    out
}

/// Counts zero crossings inside sample windows, ignoring samples in the
/// deadband. A crossing counts only when both of its sides lie in the window.
struct ZeroCrossings {
    /// `flips[j]` is the number of sign flips at samples `< j`.
    flips: Vec<usize>,
    /// First significant sample at or after `i`.
    next_significant: Vec<usize>,
    /// First flip at or after `i`.
    next_flip: Vec<usize>,
}

impl ZeroCrossings {
    fn new<T: Scalar>(values: &[T], deadband: T) -> Self {
        let n = values.len();
        let mut flips = vec![0; n + 1];
        let mut is_flip = vec![false; n];
        let mut sign = 0i8;
        for (j, &v) in values.iter().enumerate() {
            let s = if v > deadband {
                1
            } else if v < -deadband {
                -1
            } else {
                0
            };
            if s != 0 {
                if sign != 0 && s != sign {
                    is_flip[j] = true;
                }
                sign = s;
            }
            flips[j + 1] = flips[j] + usize::from(is_flip[j]);
        }
        let mut next_significant = vec![n; n + 1];
        let mut next_flip = vec![n; n + 1];
        for j in (0..n).rev() {
            next_significant[j] = if values[j].abs() > deadband { j } else { next_significant[j + 1] };
            next_flip[j] = if is_flip[j] { j } else { next_flip[j + 1] };
        }
        ZeroCrossings {
            flips,
            next_significant,
            next_flip,
        }
    }

    fn count(&self, start: usize, end: usize) -> usize {
        let total = self.flips[end + 1] - self.flips[start];
        if total == 0 {
            return 0;
        }
        // The first flip's opposite-sign sample may precede the window.
        let first = self.next_flip[start];
        if self.next_significant[start] == first {
            total - 1
        } else {
            total
        }
    }
}

pub fn detect_door_openings<T: Scalar>(
    series: &[(T, T)],
    cfg: &SignalConfig<T>,
    steps: &[StepEvent<T>],
) -> Vec<DoorOpenEvent<T>> {
    let n = series.len();
    if n < 2 {
        return Vec::new();
    }
    let slack = T::lit(1e-9).max(T::epsilon() * series[n - 1].0.abs() * T::lit(4.0));
    let t_last = series[n - 1].0;

    // Window i covers samples i..=ends[i]; only full-length windows qualify.
    let mut ends = Vec::with_capacity(n);
    let mut e = 0;
    for i in 0..n {
        e = e.max(i);
        while e + 1 < n && series[e + 1].0 - series[i].0 <= cfg.door_window + slack {
            e += 1;
        }
        ends.push(e);
    }
    let values: Vec<T> = series.iter().map(|&(_, a)| a).collect();
    let max = sliding_extreme(&values, &ends, true);
    let min = sliding_extreme(&values, &ends, false);
    let crossings = ZeroCrossings::new(&values, cfg.zero_crossing_deadband);

    let mut step_prefix = vec![0usize; n + 1];
    {
        let mut marks = vec![0usize; n];
        for s in steps {
            if s.sample < n {
                marks[s.sample] += 1;
            }
        }
        for j in 0..n {
            step_prefix[j + 1] = step_prefix[j] + marks[j];
        }
    }

    let mut windows: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        if t_last - series[i].0 < cfg.door_window - slack {
            break;
        }
        let end = ends[i];
        let in_band = max[i] >= cfg.door_hi || min[i] <= cfg.door_lo;
        let below_steps = max[i] < cfg.step_hi && min[i] > cfg.step_lo;
        let no_step = step_prefix[end + 1] == step_prefix[i];
        if in_band && below_steps && no_step && crossings.count(i, end) >= cfg.door_min_zero_crossings {
            match windows.last_mut() {
                Some(last) if i <= last.1 => last.1 = last.1.max(end),
                _ => windows.push((i, end)),
            }
        }
    }

    windows
        .into_iter()
        .map(|(s, e)| DoorOpenEvent {
            t_start: series[s].0,
            t_end: series[e].0,
            zero_crossings: crossings.count(s, e),
        })
        .collect()
}
