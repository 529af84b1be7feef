//! Offline seamless-localization engine for pedestrians carrying a phone.
//!
//! Inertial traces are turned into step and door-opening events, dead
//! reckoned with a fixed step length, corrected by a wall-constrained particle
//! filter indoors or a gyro/magnetometer heading Kalman filter outdoors, and
//! watched by a door-crossing state machine that switches the environment
//! when a zone crossing and a door opening coincide within a few steps.
//!
//! The math modules are generic over [`Scalar`] (`f32` or `f64`). The
//! simulator and the harness work in `f64`; the aliases below name the
//! concrete types they use.

pub mod crossing;
pub mod error;
pub mod filters;
pub mod fingerprint;
pub mod geometry;
pub mod harness;
pub mod pdr;
pub mod scalar;
pub mod signal;
pub mod sim;

pub use error::{Error, Result};
pub use geometry::Environment;
pub use scalar::Scalar;

pub type Point = geometry::Point2<f64>;
pub type Segment = geometry::Segment2<f64>;
pub type Door = geometry::Door<f64>;
pub type CrossingZone = geometry::CrossingZone<f64>;
pub type FloorPlan = geometry::FloorPlan<f64>;
pub type Pose = pdr::Pose<f64>;
pub type PdrConfig = pdr::PdrConfig<f64>;
pub type ImuSample = signal::ImuSample<f64>;
pub type Trace = signal::Trace<f64>;
pub type SignalConfig = signal::SignalConfig<f64>;
pub type StepEvent = signal::StepEvent<f64>;
pub type DoorOpenEvent = signal::DoorOpenEvent<f64>;
pub type PfConfig = filters::PfConfig<f64>;
pub type ParticleSet = filters::ParticleSet<f64>;
pub type KfConfig = filters::KfConfig<f64>;
pub type HeadingKfState = filters::HeadingKfState<f64>;
pub type CrossingConfig = crossing::CrossingConfig<f64>;
pub type CrossingState = crossing::CrossingState<f64>;
pub type SwitchEvent = crossing::SwitchEvent<f64>;
pub type RadioMap = fingerprint::RadioMap<f64>;
pub type Fingerprint = fingerprint::Fingerprint<f64>;
pub type WknnConfig = fingerprint::WknnConfig<f64>;

pub type Point32 = geometry::Point2<f32>;
pub type Segment32 = geometry::Segment2<f32>;
pub type Pose32 = pdr::Pose<f32>;
pub type RadioMap32 = fingerprint::RadioMap<f32>;
