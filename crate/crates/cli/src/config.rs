//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "algorithms": ["robust_moss", "moss"],
//!   "horizon": 10000,
//!   "means": [-0.3, 0.0, 0.3],
//!   "noise": { "kind": "gpd_symmetric", "shape": 0.33, "scale": 0.32 },
//!   "u": 1.0, "eps": 1.0, "a": 1.1, "eta": 2.2,
//!   "runs": 200
//! }
//! ```
//!
//! Optional keys: `arms` (checked against `means`), `master_seed`,
//! `quantiles`, `grid_points`, `output`, `write_runs`.

use std::path::{Path, PathBuf};

use robust_moss::simulator::{BatchConfig, DEFAULT_MASTER_SEED, DEFAULT_QUANTILES};
use robust_moss::{
    moment_bound_check, recording_grid, ArmModel, Noise, Policy, PolicyKind, ProblemParams,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Relative slack allowed when comparing an arm's moment to `u`.
const MOMENT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithms: Vec<PolicyKind>,
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arms: Option<usize>,
    pub means: Vec<f64>,
    pub noise: Noise,
    pub u: f64,
    pub eps: f64,
    pub a: f64,
    pub eta: f64,
    pub runs: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default = "default_quantiles")]
    pub quantiles: Vec<f64>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub write_runs: bool,
}

fn default_seed() -> u64 {
    DEFAULT_MASTER_SEED
}

fn default_quantiles() -> Vec<f64> {
    DEFAULT_QUANTILES.to_vec()
}

fn default_grid_points() -> usize {
    200
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads and validates a configuration file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        let config = Self::from_json(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn arm_count(&self) -> usize {
        self.means.len()
    }

    pub fn params(&self) -> Result<ProblemParams, CliError> {
        Ok(ProblemParams::new(
            self.horizon,
            self.arm_count(),
            self.u,
            self.eps,
            self.a,
            self.eta,
        )?)
    }

    pub fn environment(&self) -> Result<Vec<ArmModel>, CliError> {
        self.means
            .iter()
            .map(|&mu| ArmModel::new(mu, self.noise, self.eps).map_err(CliError::from))
            .collect()
    }

    /// Checks every invariant that can be checked before simulating.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(k) = self.arms {
            if k != self.means.len() {
                return Err(CliError::Config(format!(
                    "arms = {k} but {} means were given",
                    self.means.len()
                )));
            }
        }
        if self.algorithms.is_empty() {
            return Err(CliError::Config("no algorithms selected".into()));
        }
        if self.runs == 0 {
            return Err(CliError::Config("runs must be at least 1".into()));
        }
        if self.grid_points < 2 {
            return Err(CliError::Config("grid_points must be at least 2".into()));
        }
        let valid_levels = self.quantiles.iter().all(|&q| q > 0.0 && q <= 1.0)
            && self.quantiles.windows(2).all(|w| w[0] < w[1]);
        if !valid_levels {
            return Err(CliError::Config(
                "quantiles must be strictly increasing within (0, 1]".into(),
            ));
        }
        let params = self.params()?;
        for (k, arm) in self.environment()?.iter().enumerate() {
            let needed = moment_bound_check(arm, self.eps)?;
            if needed > self.u * (1.0 + MOMENT_SLACK) {
                return Err(CliError::Config(format!(
                    "arm {k}: E|X|^(1+eps) = {:.6} exceeds u^(1+eps) = {:.6}; u must be at least {needed:.6}",
                    needed.powf(1.0 + self.eps),
                    self.u.powf(1.0 + self.eps),
                )));
            }
        }
        for &kind in &self.algorithms {
            Policy::new(kind, params).map_err(|e| CliError::Config(format!("{kind}: {e}")))?;
        }
        Ok(())
    }

    pub fn batch(&self, threads: Option<usize>) -> Result<BatchConfig, CliError> {
        Ok(BatchConfig {
            env: self.environment()?,
            algorithms: self.algorithms.clone(),
            params: self.params()?,
            runs: self.runs,
            master_seed: self.master_seed,
            grid: recording_grid(self.horizon, self.grid_points),
            quantile_levels: self.quantiles.clone(),
            threads,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{
                "algorithms": ["robust_moss", "moss"],
                "horizon": 1000,
                "means": [-0.3, 0.0, 0.3],
                "noise": {"kind": "gpd_symmetric", "shape": 0.33, "scale": 0.32},
                "u": 1.0, "eps": 1.0, "a": 1.1, "eta": 2.2,
                "runs": 4
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_are_filled_in() {
        let c = base();
        assert_eq!(c.master_seed, DEFAULT_MASTER_SEED);
        assert_eq!(c.quantiles, vec![0.05, 0.5, 0.95]);
        assert_eq!(c.grid_points, 200);
        assert!(!c.write_runs);
        c.validate().unwrap();
    }

    #[test]
    fn arm_count_must_match_means() {
        let c = ExperimentConfig {
            arms: Some(4),
            ..base()
        };
        let err = c.validate().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("arms = 4"));
    }

    #[test]
    fn tuning_condition_is_enforced_for_robust_moss() {
        let c = ExperimentConfig { eta: 1.0, ..base() };
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("2.200000"), "{msg}");
        let c = ExperimentConfig {
            eta: 1.0,
            algorithms: vec![PolicyKind::Moss],
            ..base()
        };
        c.validate().unwrap();
    }

    #[test]
    fn moment_scale_must_cover_every_arm() {
        let c = ExperimentConfig { u: 0.9, ..base() };
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("arm 0"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"algorithms": [], "horizon": 1, "means": [], "noise": {"kind": "none"},
            "u": 1, "eps": 1, "a": 1.1, "eta": 2.2, "runs": 1, "colour": "red"}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }
}
