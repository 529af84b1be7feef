use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::crossing::CrossingConfig;
use crate::error::{Error, Result};
use crate::filters::{KfConfig, PfConfig};
use crate::fingerprint::WknnConfig;
use crate::pdr::PdrConfig;
use crate::signal::SignalConfig;
use crate::sim::{NoiseModel, ScenarioConfig};

/// What the tracker does when every particle hits a wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergencePolicy {
    /// Re-seed the cloud at the last estimate and retry the step; if that
    /// also fails, take a dead-reckoned step and re-seed there.
    #[default]
    Reinitialize,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// A switch counts as a true positive when it lands within this many
    /// steps of the true crossing.
    pub match_window: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { match_window: 5 }
    }
}

/// Every tunable of the pipeline. Loaded from TOML; missing sections and
/// fields take their defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub signal: SignalConfig<f64>,
    /// The initial pose is taken from the floor plan's start annotation.
    pub pdr: PdrConfig<f64>,
    pub pf: PfConfig<f64>,
    pub kf: KfConfig<f64>,
    pub crossing: CrossingConfig<f64>,
    pub fingerprint: WknnConfig<f64>,
    pub divergence: DivergencePolicy,
    pub eval: EvalConfig,
    pub noise: NoiseModel,
    pub scenario: ScenarioConfig,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.signal.validate()?;
        self.pdr.validate()?;
        self.pf.validate()?;
        self.kf.validate()?;
        self.crossing.validate()?;
        if self.fingerprint.k == 0 {
            return Err(Error::invalid_parameter("k", "must be at least 1"));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| super::formats::toml_error(path, text, &e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = super::formats::read_text(path)?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
