//! Experiment configuration, read from JSON.
//!
//! Every field has a default, so `{}` is a valid config:
//!
//! ```json
//! {
//!   "gen": { "qubit_count": 5, "segment_count": 8, "gates_per_segment": { "start": 4, "end": 8 } },
//!   "thresholds": { "p_bug_early": 0.1 },
//!   "locator": { "lookback_run_length": 3 },
//!   "trials": 100,
//!   "delta": 0.05,
//!   "master_seed": 1,
//!   "max_attempts": 100
//! }
//! ```

use serde::{Deserialize, Serialize};

use segloc_core::mutation::{GenSpec, GenSpecError};
use segloc_core::segment_test::ThresholdError;
use segloc_core::{LocatorConfig, TestThresholds};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocatorSettings {
    pub lookback_run_length: usize,
    /// Defaults to the segment count.
    pub max_restarts: Option<usize>,
    pub shot_budget: Option<u64>,
}

impl Default for LocatorSettings {
    fn default() -> Self {
        let d = LocatorConfig::default();
        Self {
            lookback_run_length: d.lookback_run_length,
            max_restarts: d.max_restarts,
            shot_budget: d.shot_budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Program shape. `gen.seed` is not used; trials derive their randomness
    /// from `master_seed`.
    pub gen: GenSpec,
    pub thresholds: TestThresholds,
    pub locator: LocatorSettings,
    pub trials: usize,
    /// Total variation distance a prefix must exceed to count as buggy.
    pub delta: f64,
    pub master_seed: u64,
    /// Injection attempts per trial before the trial is skipped.
    pub max_attempts: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            gen: GenSpec::default(),
            thresholds: TestThresholds::default(),
            locator: LocatorSettings::default(),
            trials: 100,
            delta: 0.05,
            master_seed: 0,
            max_attempts: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("gen: {0}")]
    Gen(#[from] GenSpecError),
    #[error("thresholds: {0}")]
    Thresholds(#[from] ThresholdError),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("delta must lie in [0, 1)")]
    BadDelta,
    #[error("max_attempts must be at least 1")]
    NoAttempts,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.gen.validate()?;
        self.thresholds.validate()?;
        if self.trials == 0 {
            return Err(ConfigError::NoTrials);
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(ConfigError::BadDelta);
        }
        if self.max_attempts == 0 {
            return Err(ConfigError::NoAttempts);
        }
        Ok(())
    }

    pub fn locator_config(&self) -> LocatorConfig {
        LocatorConfig {
            lookback_run_length: self.locator.lookback_run_length,
            thresholds: self.thresholds,
            max_restarts: self.locator.max_restarts,
            shot_budget: self.locator.shot_budget,
        }
    }
}
