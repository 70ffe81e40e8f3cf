//! Experiment descriptions: a base run configuration, labelled series of
//! parameter overrides, and an optional one-parameter sweep.

use std::collections::BTreeMap;

use anyhow::{bail, ensure, Context, Result};
use nanosim_core::{RunConfig, Vec2};
use serde::{Deserialize, Serialize};

pub const DEFAULT_TRIALS: u64 = 100;

/// Parameters accepted by sweeps, series overrides and `--set`.
pub const SWEEP_PARAMS: &[&str] = &[
    "phi0",
    "b",
    "p",
    "d",
    "t_star",
    "n",
    "alpha",
    "epsilon",
    "phi_max",
    "quota_fraction",
    "step_cap",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    #[default]
    Simulation,
    Analysis,
}

/// How the agents of a series are run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesMode {
    /// Dispatch on the configured model.
    #[default]
    Configured,
    /// Drug agents in a drop field holding one release at `t = 0`.
    SeededDrop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    #[serde(default)]
    pub set: BTreeMap<String, f64>,
    #[serde(default)]
    pub mode: SeriesMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

/// Extra analysis outputs attached to an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRequest {
    /// Points on the log-spaced `[epsilon, phi_max]` grid of progress curves.
    #[serde(default = "default_curve_points")]
    pub curve_points: usize,
    /// Fractions of the peak progress tried as `delta`.
    #[serde(default)]
    pub delta_fractions: Vec<f64>,
    /// Target `(d2, d4)` used to pick the closest `delta` from the scan.
    #[serde(default)]
    pub reference_band: Option<[f64; 2]>,
}

fn default_curve_points() -> usize {
    400
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub kind: ExperimentKind,
    #[serde(default = "default_trials")]
    pub trials: u64,
    pub base: RunConfig,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default = "default_series")]
    pub series: Vec<Series>,
    #[serde(default)]
    pub analysis: Option<AnalysisRequest>,
}

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

fn default_series() -> Vec<Series> {
    vec![Series {
        label: String::new(),
        set: BTreeMap::new(),
        mode: SeriesMode::Configured,
    }]
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.trials >= 1, "trials must be >= 1");
        ensure!(!self.series.is_empty(), "at least one series is required");
        let mut labels: Vec<&str> = self.series.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        ensure!(labels.len() == self.series.len(), "series labels must be unique");
        for s in &self.series {
            ensure!(
                !s.label.contains(['/', '\\']) && s.label != "." && s.label != "..",
                "series label {:?} is not a valid directory name",
                s.label
            );
            for (k, v) in &s.set {
                check_value(k, *v)?;
            }
        }
        if let Some(sw) = &self.sweep {
            ensure!(!sw.values.is_empty(), "sweep over {} has no values", sw.param);
            for v in &sw.values {
                check_value(&sw.param, *v)?;
            }
        }
        for point in self.points() {
            point
                .config
                .validate()
                .with_context(|| format!("series {:?}", point.series))?;
        }
        Ok(())
    }

    pub fn sweep_param(&self) -> &str {
        self.sweep.as_ref().map_or("phi0", |s| s.param.as_str())
    }

    /// Every `(series, sweep value)` combination with its resolved config,
    /// series-major.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for (si, s) in self.series.iter().enumerate() {
            let mut cfg = self.base.clone();
            for (k, v) in &s.set {
                // validate() reports bad names; skip them here
                let _ = apply_param(&mut cfg, k, *v);
            }
            let values = match &self.sweep {
                Some(sw) => sw.values.clone(),
                None => vec![get_param(&cfg, "phi0").unwrap_or(f64::NAN)],
            };
            for v in values {
                let mut c = cfg.clone();
                let _ = apply_param(&mut c, self.sweep_param(), v);
                out.push(SweepPoint {
                    series_index: si,
                    series: s.label.clone(),
                    mode: s.mode,
                    value: v,
                    config: c,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub series_index: usize,
    pub series: String,
    pub mode: SeriesMode,
    pub value: f64,
    pub config: RunConfig,
}

fn check_value(name: &str, v: f64) -> Result<()> {
    if !SWEEP_PARAMS.contains(&name) {
        bail!("unknown parameter {name:?}; expected one of {}", SWEEP_PARAMS.join(", "));
    }
    // b = 0 is the unbiased-walk baseline
    let ok = if name == "b" { v >= 0.0 } else { v > 0.0 };
    ensure!(v.is_finite() && ok, "value {v} for {name} must be finite and positive");
    if matches!(name, "n" | "step_cap") {
        ensure!(v.fract() == 0.0, "{name} must be an integer, got {v}");
    }
    Ok(())
}

/// Sets one named parameter on `cfg`.
pub fn apply_param(cfg: &mut RunConfig, name: &str, v: f64) -> Result<()> {
    check_value(name, v)?;
    let p = &mut cfg.params;
    match name {
        "phi0" => p.x0 = p.x_star + Vec2::new(v, 0.0),
        "b" => p.b = v,
        "p" => p.p = v,
        "d" => p.d = v,
        "t_star" => p.t_star = v,
        "n" => p.n = v as usize,
        "alpha" => p.alpha = v,
        "epsilon" => p.epsilon = v,
        "phi_max" => p.phi_max = v,
        "quota_fraction" => cfg.quota_fraction = v,
        "step_cap" => cfg.step_cap = v as u64,
        _ => unreachable!("checked above"),
    }
    Ok(())
}

pub fn get_param(cfg: &RunConfig, name: &str) -> Result<f64> {
    let p = &cfg.params;
    Ok(match name {
        "phi0" => p.phi0(),
        "b" => p.b,
        "p" => p.p,
        "d" => p.d,
        "t_star" => p.t_star,
        "n" => p.n as f64,
        "alpha" => p.alpha,
        "epsilon" => p.epsilon,
        "phi_max" => p.phi_max,
        "quota_fraction" => cfg.quota_fraction,
        "step_cap" => cfg.step_cap as f64,
        _ => bail!("unknown parameter {name:?}"),
    })
}

/// Parses `key=value` overrides.
pub fn parse_assignment(s: &str) -> Result<(String, f64)> {
    let (k, v) = s.split_once('=').context("expected key=value")?;
    let v: f64 = v.trim().parse().with_context(|| format!("bad number in {s:?}"))?;
    let k = k.trim().to_string();
    check_value(&k, v)?;
    Ok((k, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nanosim_core::{EnvironmentParams, Model};

    fn spec() -> ExperimentSpec {
        ExperimentSpec {
            name: "t".into(),
            description: String::new(),
            kind: ExperimentKind::Simulation,
            trials: 2,
            base: RunConfig::new(Model::Passive, EnvironmentParams::reference()),
            sweep: Some(Sweep {
                param: "phi0".into(),
                values: vec![1e-3, 2e-3],
            }),
            series: vec![
                Series {
                    label: "rw".into(),
                    set: [("b".to_string(), 0.0)].into(),
                    mode: SeriesMode::Configured,
                },
                Series {
                    label: "biased".into(),
                    set: BTreeMap::new(),
                    mode: SeriesMode::Configured,
                },
            ],
            analysis: None,
        }
    }

    #[test]
    fn points_are_series_major() {
        let pts = spec().points();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0].config.params.b, 0.0);
        assert_eq!(pts[1].value, 2e-3);
        assert_eq!(pts[2].config.params.b, 1e11);
        assert!((pts[3].config.params.phi0() - 2e-3).abs() < 1e-18);
    }

    #[test]
    fn unknown_sweep_parameter_rejected() {
        let mut s = spec();
        s.sweep.as_mut().unwrap().param = "gamma".into();
        assert!(s.validate().is_err());
    }

    #[test]
    fn non_positive_values_rejected() {
        let mut s = spec();
        s.sweep.as_mut().unwrap().values = vec![-1.0];
        assert!(s.validate().is_err());
        assert!(parse_assignment("n=2.5").is_err());
        assert!(parse_assignment("b=0").is_ok());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut s = spec();
        s.series[1].label = "rw".into();
        assert!(s.validate().is_err());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let s = spec();
        let text = serde_json::to_string(&s).unwrap();
        let back: ExperimentSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
