//! Correction back-ends: a wall-constrained particle filter for indoor
//! tracking and a heading/gyro-bias Kalman filter for outdoor tracking.

mod heading;
mod particle;

pub use heading::{kf_predict, kf_update, mag_heading, HeadingKfState, KfConfig};
pub use particle::{pf_init, pf_init_in_plan, pf_step, Particle, ParticleSet, PfConfig};
