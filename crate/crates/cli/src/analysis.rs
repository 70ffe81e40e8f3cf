//! Analysis reports: progress curves, notable distances, assumption checks
//! and hitting-time bounds, written as JSON and CSV.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nanosim_core::analysis::bound::{theorem_bound, BoundReport};
use nanosim_core::analysis::distances::{
    default_delta, log_grid, notable_distances, peak_progress, NotableDistances,
};
use nanosim_core::analysis::progress::expected_progress;
use nanosim_core::{EnvironmentParams, FieldSpec, GradientField};
use serde::{Deserialize, Serialize};

use crate::experiment::{AnalysisRequest, ExperimentSpec};
use crate::runner::{write_csv, write_json};

/// Input of the `analyze` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    #[serde(flatten)]
    pub params: EnvironmentParams,
    #[serde(default)]
    pub field: FieldSpec,
    /// Required progress per step; defaults to half the peak progress.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Explicit `(d2, d4)` replacing the searched band.
    #[serde(default)]
    pub band: Option<Band>,
    /// Timestep at which the field is evaluated.
    #[serde(default)]
    pub t: u64,
    #[serde(default = "default_points")]
    pub curve_points: usize,
}

fn default_points() -> usize {
    400
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub d2: f64,
    pub d4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaSource {
    Given,
    HalfPeak,
}

impl AnalysisConfig {
    pub fn field(&self) -> GradientField {
        self.field.build(&self.params)
    }

    pub fn resolve_delta(&self) -> Result<(f64, DeltaSource)> {
        match self.delta {
            Some(d) => Ok((d, DeltaSource::Given)),
            None => Ok((default_delta(&self.field(), &self.params, self.t)?, DeltaSource::HalfPeak)),
        }
    }

    pub fn distances(&self) -> Result<(NotableDistances, DeltaSource)> {
        let (delta, src) = self.resolve_delta()?;
        let nd = match self.band {
            Some(b) => {
                if !(self.params.epsilon <= b.d2 && b.d2 < b.d4 && b.d4 <= self.params.phi_max) {
                    bail!("band needs epsilon <= d2 < d4 <= phi_max");
                }
                NotableDistances::from_band(self.params.epsilon, b.d2, b.d4, self.params.phi_max, delta)
            }
            None => notable_distances(&self.field(), &self.params, delta, self.t)?,
        };
        Ok((nd, src))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub phi: f64,
    pub sigma_squared: f64,
    pub expected_progress: f64,
}

pub fn progress_curve(cfg: &AnalysisConfig) -> Result<Vec<CurvePoint>> {
    let field = cfg.field();
    log_grid(cfg.params.epsilon, cfg.params.phi_max, cfg.curve_points.max(2))
        .into_iter()
        .map(|phi| {
            Ok(CurvePoint {
                phi,
                sigma_squared: field.sigma_squared(phi, cfg.t, cfg.params.b),
                expected_progress: expected_progress(&field, phi, cfg.t, &cfg.params)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
struct ProgressSummary<'a> {
    config: &'a AnalysisConfig,
    peak_phi: f64,
    peak_progress: f64,
}

pub fn write_progress(cfg: &AnalysisConfig, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let curve = progress_curve(cfg)?;
    let (peak_phi, peak_progress) = peak_progress(&cfg.field(), &cfg.params, cfg.t)?;
    let csv = out.join("progress.csv");
    write_csv(&csv, &curve)?;
    let json = out.join("progress.json");
    write_json(
        &json,
        &ProgressSummary {
            config: cfg,
            peak_phi,
            peak_progress,
        },
    )?;
    Ok(vec![csv, json])
}

#[derive(Debug, Clone, Serialize)]
struct DistancesReport<'a> {
    config: &'a AnalysisConfig,
    delta_source: DeltaSource,
    distances: NotableDistances,
}

pub fn write_distances(cfg: &AnalysisConfig, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let (nd, delta_source) = cfg.distances()?;
    let json = out.join("distances.json");
    write_json(
        &json,
        &DistancesReport {
            config: cfg,
            delta_source,
            distances: nd,
        },
    )?;
    let csv = out.join("distances.csv");
    write_csv(&csv, [nd])?;
    Ok(vec![json, csv])
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundOutput {
    pub config: AnalysisConfig,
    pub delta_source: DeltaSource,
    pub report: BoundReport,
}

/// Flat one-row summary of a bound report.
#[derive(Debug, Clone, Serialize)]
struct BoundRow {
    delta: f64,
    d1: f64,
    d2: f64,
    d3: f64,
    d4: f64,
    d5: f64,
    delta_small: bool,
    band_wide: bool,
    outer_extent: bool,
    band_vs_step: bool,
    ln_s: f64,
    ln_s_prime: f64,
    s: f64,
    s_prime: f64,
    phase_53: f64,
    phase_32: f64,
    phase_21: f64,
    total_bound: f64,
    corollary_time: f64,
    corollary_prob: f64,
}

pub fn bound(cfg: &AnalysisConfig) -> Result<BoundOutput> {
    let (nd, delta_source) = cfg.distances()?;
    let report = theorem_bound(&nd, &cfg.params)?;
    Ok(BoundOutput {
        config: cfg.clone(),
        delta_source,
        report,
    })
}

pub fn write_bound(cfg: &AnalysisConfig, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let b = bound(cfg)?;
    let r = &b.report;
    let json = out.join("bound.json");
    write_json(&json, &b)?;
    let nd = r.distances;
    let a = &r.assumptions;
    let csv = out.join("bound.csv");
    write_csv(
        &csv,
        [BoundRow {
            delta: nd.delta,
            d1: nd.d1,
            d2: nd.d2,
            d3: nd.d3,
            d4: nd.d4,
            d5: nd.d5,
            delta_small: a.delta_small.holds,
            band_wide: a.band_wide.holds,
            outer_extent: a.outer_extent.holds,
            band_vs_step: a.band_vs_step.holds,
            ln_s: r.ln_s,
            ln_s_prime: r.ln_s_prime,
            s: r.s,
            s_prime: r.s_prime,
            phase_53: r.phase_53,
            phase_32: r.phase_32,
            phase_21: r.phase_21,
            total_bound: r.total_bound,
            corollary_time: r.corollary_time,
            corollary_prob: r.corollary_prob,
        }],
    )?;
    Ok(vec![json, csv])
}

#[derive(Debug, Clone, Serialize)]
struct SeriesCurvePoint<'a> {
    series: &'a str,
    t_star: f64,
    b: f64,
    #[serde(rename = "P")]
    p: f64,
    #[serde(rename = "D")]
    d: f64,
    phi: f64,
    expected_progress: f64,
}

#[derive(Debug, Clone, Serialize)]
struct SeriesSummary<'a> {
    series: &'a str,
    t_star: f64,
    peak_phi: f64,
    peak_progress: f64,
    delta: f64,
    d2: f64,
    d3: f64,
    d4: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ScanRow<'a> {
    series: &'a str,
    fraction: f64,
    delta: f64,
    d2: f64,
    d4: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ReferenceMatch {
    target_d2: f64,
    target_d4: f64,
    fraction: f64,
    delta: f64,
    d2: f64,
    d4: f64,
    /// `|ln(d2 / target_d2)| + |ln(d4 / target_d4)|`
    log_mismatch: f64,
}

/// Analysis outputs of an experiment: one progress curve and one set of
/// notable distances per series (at the first sweep value).
pub fn run_spec_analysis(spec: &ExperimentSpec, req: &AnalysisRequest, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut curves = Vec::new();
    let mut summaries = Vec::new();
    let mut scans = Vec::new();
    let mut best: Option<ReferenceMatch> = None;
    let points = spec.points();
    for s in &spec.series {
        let Some(point) = points.iter().find(|p| p.series == s.label) else {
            continue;
        };
        let cfg = AnalysisConfig {
            params: point.config.params.clone(),
            field: point.config.field,
            delta: None,
            band: None,
            t: 0,
            curve_points: req.curve_points,
        };
        let p = &cfg.params;
        for c in progress_curve(&cfg)? {
            curves.push(SeriesCurvePoint {
                series: &s.label,
                t_star: p.t_star,
                b: p.b,
                p: p.p,
                d: p.d,
                phi: c.phi,
                expected_progress: c.expected_progress,
            });
        }
        let field = cfg.field();
        let (peak_phi, peak_progress) = peak_progress(&field, p, 0)?;
        let (nd, _) = cfg.distances()?;
        summaries.push(SeriesSummary {
            series: &s.label,
            t_star: p.t_star,
            peak_phi,
            peak_progress,
            delta: nd.delta,
            d2: nd.d2,
            d3: nd.d3,
            d4: nd.d4,
        });
        for &fraction in &req.delta_fractions {
            let delta = fraction * peak_progress;
            let nd = notable_distances(&field, p, delta, 0)?;
            scans.push(ScanRow {
                series: &s.label,
                fraction,
                delta,
                d2: nd.d2,
                d4: nd.d4,
            });
            if let Some([t2, t4]) = req.reference_band {
                let log_mismatch = (nd.d2 / t2).ln().abs() + (nd.d4 / t4).ln().abs();
                if best.as_ref().is_none_or(|b| log_mismatch < b.log_mismatch) {
                    best = Some(ReferenceMatch {
                        target_d2: t2,
                        target_d4: t4,
                        fraction,
                        delta,
                        d2: nd.d2,
                        d4: nd.d4,
                        log_mismatch,
                    });
                }
            }
        }
    }
    let mut files = Vec::new();
    let path = out.join("progress.csv");
    write_csv(&path, &curves)?;
    files.push(path);
    let path = out.join("distances.csv");
    write_csv(&path, &summaries)?;
    files.push(path);
    if !scans.is_empty() {
        let path = out.join("delta_scan.csv");
        write_csv(&path, &scans)?;
        files.push(path);
    }
    if let Some(b) = best {
        let path = out.join("reference_match.json");
        write_json(&path, &b)?;
        files.push(path);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic() -> AnalysisConfig {
        serde_json::from_str(
            r#"{
                "p": 1.0, "d": 1.0, "t_star": 1.0, "b": 1e12,
                "alpha": 1.0, "epsilon": 1.0, "phi_max": 3000.0,
                "x_star": [0, 0], "x0": [3000, 0], "n": 1,
                "field": {"kind": "linear", "slope": -1e-12},
                "delta": 0.3333333333333333,
                "band": {"d2": 10, "d4": 2010}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn synthetic_bound_is_finite_and_admissible() {
        let b = bound(&synthetic()).unwrap();
        assert!(b.report.assumptions_hold);
        assert!(b.report.total_bound.is_finite());
        assert_eq!(b.delta_source, DeltaSource::Given);
    }

    #[test]
    fn corollary_for_25_agents() {
        let mut cfg = synthetic();
        cfg.params.n = 25;
        let b = bound(&cfg).unwrap();
        assert!((b.report.corollary_prob - 0.98686099351166).abs() < 1e-13);
    }

    #[test]
    fn helper_delta_used_when_missing() {
        let cfg = AnalysisConfig {
            params: EnvironmentParams::reference(),
            field: FieldSpec::PointSource,
            delta: None,
            band: None,
            t: 0,
            curve_points: 50,
        };
        let (nd, src) = cfg.distances().unwrap();
        assert_eq!(src, DeltaSource::HalfPeak);
        assert!(nd.d2 < nd.d4);
    }

    #[test]
    fn bad_band_rejected() {
        let mut cfg = synthetic();
        cfg.band = Some(Band { d2: 20.0, d4: 10.0 });
        assert!(cfg.distances().is_err());
    }
}
