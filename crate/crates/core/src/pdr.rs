//! Step-and-heading dead reckoning with a fixed step length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scalar::{wrap_angle, Scalar};
use crate::signal::{ImuSample, StepEvent};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose<T> {
    pub position: Point2<T>,
    /// Radians counterclockwise from +x, in `(-pi, pi]`.
    pub heading: T,
}

impl<T: Scalar> Pose<T> {
    pub fn new(position: Point2<T>, heading: T) -> Self {
        Pose {
            position,
            heading: wrap_angle(heading),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YawAxis {
    X,
    Y,
    #[default]
    Z,
}

impl YawAxis {
    pub fn index(self) -> usize {
        match self {
            YawAxis::X => 0,
            YawAxis::Y => 1,
            YawAxis::Z => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdrConfig<T> {
    pub step_length: T,
    pub initial_pose: Pose<T>,
    pub yaw_axis: YawAxis,
}

impl<T: Scalar> Default for PdrConfig<T> {
    fn default() -> Self {
        PdrConfig {
            step_length: T::lit(0.75),
            initial_pose: Pose::default(),
            yaw_axis: YawAxis::Z,
        }
    }
}

impl<T: Scalar> PdrConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_length > T::zero()) || !self.step_length.is_finite() {
            return Err(Error::invalid_parameter("step_length", "must be positive"));
        }
        Ok(())
    }
}

pub fn integrate_heading<T: Scalar>(heading: T, gyro_yaw_rate: T, dt: T) -> Result<T> {
    if !(dt > T::zero()) {
        return Err(Error::invalid_parameter("dt", format!("must be positive, got {dt}")));
    }
    Ok(wrap_angle(heading + gyro_yaw_rate * dt))
}

pub fn propagate_step<T: Scalar>(pose: &Pose<T>, cfg: &PdrConfig<T>) -> Pose<T> {
    Pose {
        position: pose.position + Point2::from_angle(pose.heading) * cfg.step_length,
        heading: pose.heading,
    }
}

/// Trapezoidal yaw integration over successive gyro samples.
#[derive(Debug, Clone, Copy)]
pub struct HeadingIntegrator<T> {
    heading: T,
    last: Option<(T, T)>,
    axis: YawAxis,
}

impl<T: Scalar> HeadingIntegrator<T> {
    pub fn new(heading: T, axis: YawAxis) -> Self {
        HeadingIntegrator {
            heading: wrap_angle(heading),
            last: None,
            axis,
        }
    }

    pub fn heading(&self) -> T {
        self.heading
    }

    pub fn set_heading(&mut self, heading: T) {
        self.heading = wrap_angle(heading);
    }

    /// Feeds one sample and returns the trapezoid-averaged rate and `dt`
    /// since the previous sample, if there was one.
    pub fn push(&mut self, sample: &ImuSample<T>) -> Option<(T, T)> {
        let rate = sample.gyro[self.axis.index()];
        let out = self.last.map(|(t0, r0)| ((r0 + rate) * T::lit(0.5), sample.t - t0));
        if let Some((avg, dt)) = out {
            // Trace validation guarantees dt > 0.
            self.heading = integrate_heading(self.heading, avg, dt).unwrap_or(self.heading);
        }
        self.last = Some((sample.t, rate));
        out
    }
}

/// Dead-reckoned pose at every step event.
pub fn run_pdr<T: Scalar>(samples: &[ImuSample<T>], steps: &[StepEvent<T>], cfg: &PdrConfig<T>) -> Vec<Pose<T>> {
    let mut integrator = HeadingIntegrator::new(cfg.initial_pose.heading, cfg.yaw_axis);
    let mut pose = Pose::new(cfg.initial_pose.position, cfg.initial_pose.heading);
    let mut path = Vec::with_capacity(steps.len());
    let mut next = steps.iter().peekable();
    for (i, s) in samples.iter().enumerate() {
        integrator.push(s);
        while next.peek().is_some_and(|st| st.sample == i) {
            next.next();
            pose.heading = integrator.heading();
            pose = propagate_step(&pose, cfg);
            path.push(pose);
        }
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn heading_integration() {
        assert!((integrate_heading(0.0, FRAC_PI_2, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let h = integrate_heading(PI - 0.1, 0.2, 1.0).unwrap();
        assert!((h - (-PI + 0.1)).abs() < 1e-12);
        assert_eq!(integrate_heading(0.3, 0.0, 0.5).unwrap(), 0.3);
        assert!(integrate_heading(0.0, 1.0, 0.0).is_err());
        assert!(integrate_heading(0.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn step_propagation() {
        let cfg = PdrConfig::<f64>::default();
        let p = propagate_step(&Pose::new(Point2::origin(), 0.0), &cfg);
        assert_eq!(p.position, Point2::new(0.75, 0.0));
        let p = propagate_step(&Pose::new(Point2::origin(), FRAC_PI_2), &cfg);
        assert!(p.position.distance(Point2::new(0.0, 0.75)) < 1e-15);

        let mut pose = Pose::new(Point2::origin(), 0.0);
        for h in [0.0, FRAC_PI_2, PI, -FRAC_PI_2] {
            pose.heading = h;
            pose = propagate_step(&pose, &cfg);
        }
        assert!(pose.position.norm() < 1e-12);
    }

    fn still(n: usize, rate: f64) -> Vec<ImuSample<f64>> {
        (0..n)
            .map(|i| ImuSample {
                t: i as f64 * 0.01,
                accel: [0.0, 0.0, 9.81],
                gyro: [0.0, 0.0, rate],
                mag: [0.0; 3],
            })
            .collect()
    }

    fn steps_every(n_samples: usize, every: usize) -> Vec<StepEvent<f64>> {
        (0..n_samples / every)
            .map(|k| StepEvent {
                index: k,
                sample: k * every + every / 2,
                t: (k * every + every / 2) as f64 * 0.01,
                peak: 2.0,
            })
            .collect()
    }

    #[test]
    fn straight_line() {
        let samples = still(1000, 0.0);
        let steps = steps_every(1000, 50);
        let path = run_pdr(&samples, &steps, &PdrConfig::default());
        assert_eq!(path.len(), 20);
        assert!((path.last().unwrap().position.x - 15.0).abs() < 1e-12);
    }

    #[test]
    fn constant_bias_accumulates_linearly() {
        let b = 0.02;
        let samples = still(2000, b);
        let steps = steps_every(2000, 50);
        let path = run_pdr(&samples, &steps, &PdrConfig::default());
        let last = steps.last().unwrap();
        assert!((path.last().unwrap().heading - b * last.t).abs() < 1e-9);
    }

    #[test]
    fn integrator_yaw_axis() {
        let mut s = still(3, 0.0);
        for x in &mut s {
            x.gyro = [1.0, 0.0, 0.0];
        }
        let mut integ = HeadingIntegrator::new(0.0, YawAxis::X);
        for x in &s {
            integ.push(x);
        }
        assert!((integ.heading() - 0.02).abs() < 1e-12);
    }
}
