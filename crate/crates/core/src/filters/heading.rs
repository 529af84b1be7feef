use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Scalar};
use crate::signal::ImuSample;

/// State `[heading, gyro_bias]` with its 2x2 covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadingKfState<T> {
    pub heading: T,
    pub gyro_bias: T,
    pub covariance: [[T; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KfConfig<T> {
    /// rad^2/s
    pub q_heading: T,
    /// (rad/s)^2/s
    pub q_bias: T,
    /// rad^2
    pub r_mag: T,
    pub declination: T,
    /// Below this horizontal field (microtesla) the magnetometer heading is
    /// not trusted.
    pub min_horizontal_field: T,
    pub init_heading_var: T,
    pub init_bias_var: T,
}

impl<T: Scalar> Default for KfConfig<T> {
    fn default() -> Self {
        KfConfig {
            q_heading: T::lit(1e-3),
            q_bias: T::lit(1e-6),
            r_mag: T::lit(0.05),
            declination: T::zero(),
            min_horizontal_field: T::one(),
            init_heading_var: T::lit(0.01),
            init_bias_var: T::lit(1e-4),
        }
    }
}

impl<T: Scalar> KfConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("q_heading", self.q_heading),
            ("q_bias", self.q_bias),
            ("r_mag", self.r_mag),
        ] {
            if !(v > T::zero()) {
                return Err(Error::invalid_parameter(name, "noise terms must be positive"));
            }
        }
        if !(self.init_heading_var >= T::zero()) || !(self.init_bias_var >= T::zero()) {
            return Err(Error::invalid_parameter("init_var", "must be non-negative"));
        }
        Ok(())
    }
}

impl<T: Scalar> HeadingKfState<T> {
    pub fn new(heading: T, cfg: &KfConfig<T>) -> Self {
        HeadingKfState {
            heading: wrap_angle(heading),
            gyro_bias: T::zero(),
            covariance: [[cfg.init_heading_var, T::zero()], [T::zero(), cfg.init_bias_var]],
        }
    }

    /// Symmetric within `tol` and both eigenvalues at least `-tol`.
    pub fn covariance_is_psd(&self, tol: T) -> bool {
        let [[a, b], [c, d]] = self.covariance;
        if (b - c).abs() > tol {
            return false;
        }
        let half_trace = (a + d) * T::lit(0.5);
        let disc = (((a - d) * T::lit(0.5)).powi(2) + b * c).max(T::zero()).sqrt();
        half_trace - disc >= -tol
    }
}

/// Horizontal-device magnetometer heading, or `None` when the horizontal
/// field is too weak to trust.
pub fn mag_heading<T: Scalar>(sample: &ImuSample<T>, cfg: &KfConfig<T>) -> Option<T> {
    let [mx, my, _] = sample.mag;
    if mx.hypot(my) < cfg.min_horizontal_field {
        return None;
    }
    Some(wrap_angle((-my).atan2(mx) + cfg.declination))
}

pub fn kf_predict<T: Scalar>(
    state: &HeadingKfState<T>,
    gyro_yaw_rate: T,
    dt: T,
    cfg: &KfConfig<T>,
) -> Result<HeadingKfState<T>> {
    if !(dt > T::zero()) {
        return Err(Error::invalid_parameter("dt", format!("must be positive, got {dt}")));
    }
    let [[p00, p01], [p10, p11]] = state.covariance;
    // F = [[1, -dt], [0, 1]]
    let n00 = p00 - dt * (p01 + p10) + dt * dt * p11 + cfg.q_heading * dt;
    let n01 = p01 - dt * p11;
    let n11 = p11 + cfg.q_bias * dt;
    Ok(HeadingKfState {
        heading: wrap_angle(state.heading + (gyro_yaw_rate - state.gyro_bias) * dt),
        gyro_bias: state.gyro_bias,
        covariance: [[n00, n01], [n01, n11]],
    })
}

/// Measurement update with `H = [1, 0]`. The innovation is the wrapped
/// angle difference, so `z` and `z + 2 pi` give the same posterior.
pub fn kf_update<T: Scalar>(state: &HeadingKfState<T>, measured_heading: T, cfg: &KfConfig<T>) -> HeadingKfState<T> {
    let [[p00, p01], [_, p11]] = state.covariance;
    let s = p00 + cfg.r_mag;
    if !(s > T::zero()) || !s.is_finite() {
        return *state;
    }
    let innovation = wrap_angle(measured_heading - state.heading);
    let k0 = p00 / s;
    let k1 = p01 / s;
    // P - P H^T H P / S, written out so it stays symmetric.
    let n00 = p00 - p00 * p00 / s;
    let n01 = p01 - p00 * p01 / s;
    let n11 = p11 - p01 * p01 / s;
    HeadingKfState {
        heading: wrap_angle(state.heading + k0 * innovation),
        gyro_bias: state.gyro_bias + k1 * innovation,
        covariance: [[n00, n01], [n01, n11]],
    }
}
