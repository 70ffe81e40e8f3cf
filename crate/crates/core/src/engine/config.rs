use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gradient::GradientField;
use crate::params::EnvironmentParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Fixed endogenous gradient; every agent carries drug.
    Passive,
    /// Agents build the gradient by releasing signal payloads at the target.
    Active,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Passive => "passive",
            Model::Active => "active",
        }
    }
}

/// Gradient used by the passive model.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    /// Static Gaussian profile from `p`, `d`, `t_star`.
    #[default]
    PointSource,
    Linear {
        slope: f64,
        #[serde(default = "default_intercept")]
        intercept: f64,
    },
    Null,
}

fn default_intercept() -> f64 {
    1.0
}

impl FieldSpec {
    pub fn build(&self, params: &EnvironmentParams) -> GradientField {
        match *self {
            FieldSpec::PointSource => GradientField::static_from(params),
            FieldSpec::Linear { slope, intercept } => GradientField::Linear {
                slope,
                intercept,
                x_star: params.x_star,
            },
            FieldSpec::Null => GradientField::Null,
        }
    }
}

pub const DEFAULT_QUOTA: f64 = 0.75;
pub const DEFAULT_STEP_CAP: u64 = 10_000_000;
pub const DEFAULT_TRAJECTORY_STRIDE: u64 = 10;

fn default_quota() -> f64 {
    DEFAULT_QUOTA
}
fn default_cap() -> u64 {
    DEFAULT_STEP_CAP
}
fn default_stride() -> u64 {
    DEFAULT_TRAJECTORY_STRIDE
}

/// Everything needed to reproduce one simulation run, given a trial index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: Model,
    #[serde(flatten)]
    pub params: EnvironmentParams,
    #[serde(default = "default_quota")]
    pub quota_fraction: f64,
    #[serde(default = "default_cap")]
    pub step_cap: u64,
    #[serde(default)]
    pub record_trajectories: bool,
    #[serde(default = "default_stride")]
    pub trajectory_stride: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub field: FieldSpec,
}

impl RunConfig {
    pub fn new(model: Model, params: EnvironmentParams) -> Self {
        RunConfig {
            model,
            params,
            quota_fraction: DEFAULT_QUOTA,
            step_cap: DEFAULT_STEP_CAP,
            record_trajectories: false,
            trajectory_stride: DEFAULT_TRAJECTORY_STRIDE,
            seed: 0,
            field: FieldSpec::PointSource,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.quota_fraction > 0.0 && self.quota_fraction <= 1.0) {
            return Err(invalid("quota_fraction", format!("must lie in (0, 1], got {}", self.quota_fraction)));
        }
        if self.step_cap == 0 {
            return Err(invalid("step_cap", "must be >= 1"));
        }
        if self.trajectory_stride == 0 {
            return Err(invalid("trajectory_stride", "must be >= 1"));
        }
        if self.model == Model::Active && self.params.n < 2 {
            return Err(Error::Config(format!(
                "active model needs at least 2 agents, got {}",
                self.params.n
            )));
        }
        Ok(())
    }

    /// Number of drug deliveries that meets the quota.
    pub fn quota_count(&self, drug_agents: usize) -> usize {
        // the small offset keeps products like 0.7 * 10 from rounding up past 7
        let need = (self.quota_fraction * drug_agents as f64 - 1e-9).ceil();
        (need.max(1.0) as usize).min(drug_agents.max(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quota_counts() {
        let mut c = RunConfig::new(Model::Passive, EnvironmentParams::reference());
        assert_eq!(c.quota_count(1), 1);
        assert_eq!(c.quota_count(25), 19);
        assert_eq!(c.quota_count(16), 12);
        c.quota_fraction = 0.7;
        assert_eq!(c.quota_count(10), 7);
        c.quota_fraction = 1.0;
        assert_eq!(c.quota_count(5), 5);
    }

    #[test]
    fn config_json_is_flat() {
        let json = r#"{"model":"active","p":1e-19,"d":1e-9,"t_star":1e4,"b":1e12,"alpha":2e-5,
            "epsilon":2e-5,"phi_max":0.01,"x_star":[0,0],"x0":[0.005,0],"n":10,"seed":7}"#;
        let c: RunConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.model, Model::Active);
        assert_eq!(c.params.n, 10);
        assert_eq!(c.quota_fraction, 0.75);
        assert_eq!(c.step_cap, 10_000_000);
        assert_eq!(c.field, FieldSpec::PointSource);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_quota_and_small_active_swarm() {
        let mut c = RunConfig::new(Model::Passive, EnvironmentParams::reference());
        c.quota_fraction = 0.0;
        assert!(c.validate().is_err());
        let c = RunConfig::new(Model::Active, EnvironmentParams::reference());
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }
}
