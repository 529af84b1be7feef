use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{segment_hits_walls, FloorPlan, Point2, Segment2};
use crate::pdr::{Pose, PdrConfig};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle<T> {
    pub position: Point2<T>,
    pub weight: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PfConfig<T> {
    pub particle_count: usize,
    /// Per-step length noise, meters.
    pub step_sigma: T,
    /// Per-step heading noise, radians.
    pub heading_sigma: T,
    pub init_sigma: T,
    /// Resample when the effective sample size drops below this fraction
    /// of the particle count.
    pub resample_threshold: T,
}

impl<T: Scalar> Default for PfConfig<T> {
    fn default() -> Self {
        PfConfig {
            particle_count: 1000,
            step_sigma: T::lit(0.1),
            heading_sigma: T::lit(0.087),
            init_sigma: T::lit(0.5),
            resample_threshold: T::lit(0.5),
        }
    }
}

impl<T: Scalar> PfConfig<T> {
    /// Zero sigmas are accepted: they reduce the filter to plain dead
    /// reckoning.
    pub fn validate(&self) -> Result<()> {
        if self.particle_count == 0 {
            return Err(Error::invalid_parameter("particle_count", "must be at least 1"));
        }
        for (name, v) in [
            ("step_sigma", self.step_sigma),
            ("heading_sigma", self.heading_sigma),
            ("init_sigma", self.init_sigma),
        ] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::invalid_parameter(name, "must be finite and non-negative"));
            }
        }
        if !(self.resample_threshold > T::zero() && self.resample_threshold <= T::one()) {
            return Err(Error::invalid_parameter("resample_threshold", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet<T> {
    pub particles: Vec<Particle<T>>,
    pub rng_seed: u64,
    rng: ChaCha8Rng,
}

impl<T: Scalar> ParticleSet<T> {
    pub fn weighted_mean(&self) -> Point2<T> {
        self.particles
            .iter()
            .fold(Point2::origin(), |acc, p| acc + p.position * p.weight)
    }

    pub fn effective_sample_size(&self) -> T {
        let s = self.particles.iter().fold(T::zero(), |acc, p| acc + p.weight * p.weight);
        T::one() / s
    }

    pub fn weight_sum(&self) -> T {
        self.particles.iter().fold(T::zero(), |acc, p| acc + p.weight)
    }

    fn gaussian(&mut self, sigma: T) -> T {
        let z: f64 = self.rng.sample(StandardNormal);
        sigma * T::lit(z)
    }

    fn systematic_resample(&mut self) {
        let n = self.particles.len();
        let step = T::one() / T::lit(n as f64);
        let mut u = T::lit(self.rng.random::<f64>()) * step;
        let mut cumulative = self.particles[0].weight;
        let mut j = 0;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            while u > cumulative && j + 1 < n {
                j += 1;
                cumulative = cumulative + self.particles[j].weight;
            }
            out.push(Particle {
                position: self.particles[j].position,
                weight: step,
            });
            u = u + step;
        }
        self.particles = out;
    }
}

/// Isotropic Gaussian cloud around `pose0` with uniform weights.
pub fn pf_init<T: Scalar>(pose0: &Pose<T>, cfg: &PfConfig<T>, seed: u64) -> ParticleSet<T> {
    let mut set = ParticleSet {
        particles: Vec::with_capacity(cfg.particle_count),
        rng_seed: seed,
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    let w = T::one() / T::lit(cfg.particle_count as f64);
    for _ in 0..cfg.particle_count {
        let dx = set.gaussian(cfg.init_sigma);
        let dy = set.gaussian(cfg.init_sigma);
        set.particles.push(Particle {
            position: pose0.position + Point2::new(dx, dy),
            weight: w,
        });
    }
    set
}

/// Like [`pf_init`], but a draw separated from `pose0` by a wall is redrawn
/// (a few times, then placed at `pose0` itself), so no particle starts on
/// the wrong side of a wall.
pub fn pf_init_in_plan<T: Scalar>(pose0: &Pose<T>, cfg: &PfConfig<T>, seed: u64, plan: &FloorPlan<T>) -> ParticleSet<T> {
    const MAX_DRAWS: usize = 16;
    let mut set = pf_init(pose0, &PfConfig { particle_count: 0, ..*cfg }, seed);
    let w = T::one() / T::lit(cfg.particle_count as f64);
    for _ in 0..cfg.particle_count {
        let mut position = pose0.position;
        for _ in 0..MAX_DRAWS {
            let dx = set.gaussian(cfg.init_sigma);
            let dy = set.gaussian(cfg.init_sigma);
            let candidate = pose0.position + Point2::new(dx, dy);
            let blocked = Segment2::new(pose0.position, candidate)
                .map(|s| segment_hits_walls(&s, plan))
                .unwrap_or(false);
            if !blocked {
                position = candidate;
                break;
            }
        }
        set.particles.push(Particle { position, weight: w });
    }
    set
}

/// Advances every particle by one noisy step along `heading`, zeroes the
/// weight of particles whose move crosses a wall, renormalizes, and
/// resamples when the effective sample size is low.
///
/// Returns the weighted-mean position computed before resampling. If every
/// particle hits a wall the set is left as it was and
/// [`Error::FilterDivergence`] is returned.
pub fn pf_step<T: Scalar>(
    set: &mut ParticleSet<T>,
    heading: T,
    cfg: &PfConfig<T>,
    pdr_cfg: &PdrConfig<T>,
    plan: &FloorPlan<T>,
) -> Result<Point2<T>> {
    let n = set.particles.len();
    let mut moved = Vec::with_capacity(n);
    for i in 0..n {
        let p = set.particles[i];
        let len = pdr_cfg.step_length + set.gaussian(cfg.step_sigma);
        let h = heading + set.gaussian(cfg.heading_sigma);
        let to = p.position + Point2::from_angle(h) * len;
        let blocked = p.weight > T::zero()
            && Segment2::new(p.position, to)
                .map(|s| segment_hits_walls(&s, plan))
                .unwrap_or(false);
        moved.push(Particle {
            position: to,
            weight: if blocked { T::zero() } else { p.weight },
        });
    }

    let total = moved.iter().fold(T::zero(), |acc, p| acc + p.weight);
    if !(total > T::zero()) || !total.is_finite() {
        return Err(Error::FilterDivergence { step: None });
    }
    for p in &mut moved {
        p.weight = p.weight / total;
    }
    set.particles = moved;
    let estimate = set.weighted_mean();

    if set.effective_sample_size() < cfg.resample_threshold * T::lit(n as f64) {
        set.systematic_resample();
    }
    Ok(estimate)
}
