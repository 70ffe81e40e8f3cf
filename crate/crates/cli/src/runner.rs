//! Parallel trial execution and per-series output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use nanosim_core::{run_in_field, run_trial, stats, GradientField, Model, TrialResult};
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis;
use crate::experiment::{ExperimentKind, ExperimentSpec, SeriesMode, SweepPoint};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub workers: usize,
    pub master_seed: u64,
    /// Write one JSONL line per delivery / drop / cap event.
    pub write_events: bool,
    /// Print a trial counter to stderr.
    pub progress: bool,
}

/// Seed handed to trial `trial`.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    master_seed ^ trial
}

/// Runs one trial of a sweep point.
pub fn run_point(point: &SweepPoint, trial: u64, master_seed: u64) -> Result<TrialResult> {
    let mut cfg = point.config.clone();
    cfg.seed = trial_seed(master_seed, trial);
    let r = match point.mode {
        SeriesMode::Configured => run_trial(&cfg, trial)?,
        SeriesMode::SeededDrop => {
            let mut field = GradientField::empty_drops(&cfg.params);
            field.register_drop(0)?;
            run_in_field(&cfg, trial, field)?
        }
    };
    Ok(r)
}

/// One row of `per_trial.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub model: &'static str,
    pub n: usize,
    pub phi0: f64,
    pub b: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub t_star: f64,
    /// Hitting time (one agent) or runtime to quota; the step cap when capped.
    pub hitting_time_or_runtime: u64,
    pub capped: bool,
    pub first_drop_time: Option<u64>,
}

impl TrialRecord {
    pub fn from_result(point: &SweepPoint, r: &TrialResult) -> Self {
        let p = &point.config.params;
        let first_drop_time = match point.mode {
            SeriesMode::SeededDrop => Some(0),
            SeriesMode::Configured => r.first_signal_drop_time,
        };
        TrialRecord {
            trial: r.trial,
            seed: r.seed,
            model: match point.mode {
                SeriesMode::SeededDrop => "seeded_drop",
                SeriesMode::Configured => point.config.model.as_str(),
            },
            n: p.n,
            phi0: p.phi0(),
            b: p.b,
            p: p.p,
            d: p.d,
            t_star: p.t_star,
            hitting_time_or_runtime: r.runtime_to_quota.unwrap_or(point.config.step_cap),
            capped: r.is_capped(),
            first_drop_time,
        }
    }
}

/// One row of the aggregate CSVs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub sweep_param: String,
    pub sweep_value: f64,
    pub mean: f64,
    pub std: f64,
    pub n_trials: usize,
    pub n_capped: usize,
}

impl AggregateRow {
    /// Capped trials enter the statistics at their capped value.
    pub fn from_values(param: &str, value: f64, values: &[(f64, bool)]) -> Self {
        let xs: Vec<f64> = values.iter().map(|v| v.0).collect();
        AggregateRow {
            sweep_param: param.to_string(),
            sweep_value: value,
            mean: if xs.is_empty() { f64::NAN } else { stats::mean(&xs) },
            std: stats::std_dev(&xs),
            n_trials: xs.len(),
            n_capped: values.iter().filter(|v| v.1).count(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub point: SweepPoint,
    pub results: Vec<TrialResult>,
}

impl PointOutcome {
    pub fn records(&self) -> Vec<TrialRecord> {
        self.results.iter().map(|r| TrialRecord::from_result(&self.point, r)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SeriesOutcome {
    pub label: String,
    pub dir: PathBuf,
    pub points: Vec<PointOutcome>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub series: Vec<SeriesOutcome>,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    name: &'a str,
    description: &'a str,
    tool_version: &'static str,
    master_seed: u64,
    seed_rule: &'static str,
    workers: usize,
    started_unix: u64,
    finished_unix: u64,
    spec: &'a ExperimentSpec,
    files: Vec<String>,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn run_experiment(spec: &ExperimentSpec, opts: &RunOptions) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let started = unix_now();
    fs::create_dir_all(&opts.out).with_context(|| format!("cannot create {}", opts.out.display()))?;
    let mut files = Vec::new();
    let mut series_out = Vec::new();

    if spec.kind == ExperimentKind::Simulation {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers.max(1))
            .build()
            .context("cannot start worker pool")?;
        let points = spec.points();
        for (si, s) in spec.series.iter().enumerate() {
            let dir = if s.label.is_empty() { opts.out.clone() } else { opts.out.join(&s.label) };
            fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let mut outcomes = Vec::new();
            for point in points.iter().filter(|p| p.series_index == si) {
                let results = pool.install(|| {
                    (0..spec.trials)
                        .into_par_iter()
                        .map(|k| run_point(point, k, opts.master_seed))
                        .collect::<Result<Vec<_>>>()
                });
                let results = results.with_context(|| {
                    format!("series {:?}, {} = {}", s.label, spec.sweep_param(), point.value)
                })?;
                if opts.progress {
                    eprintln!(
                        "[{}{}{}] {} = {}: {} trials done",
                        spec.name,
                        if s.label.is_empty() { "" } else { "/" },
                        s.label,
                        spec.sweep_param(),
                        point.value,
                        results.len()
                    );
                }
                outcomes.push(PointOutcome {
                    point: point.clone(),
                    results,
                });
            }
            let so = SeriesOutcome {
                label: s.label.clone(),
                dir,
                points: outcomes,
            };
            files.extend(write_series(spec, &so, opts)?);
            series_out.push(so);
        }
    }

    if let Some(req) = &spec.analysis {
        let dir = match spec.kind {
            ExperimentKind::Analysis => opts.out.clone(),
            ExperimentKind::Simulation => opts.out.join("analysis"),
        };
        files.extend(analysis::run_spec_analysis(spec, req, &dir)?);
    }

    let rel: Vec<String> = files
        .iter()
        .map(|f| f.strip_prefix(&opts.out).unwrap_or(f).display().to_string())
        .collect();
    let manifest = Manifest {
        name: &spec.name,
        description: &spec.description,
        tool_version: env!("CARGO_PKG_VERSION"),
        master_seed: opts.master_seed,
        seed_rule: "trial seed = master_seed XOR trial index",
        workers: opts.workers,
        started_unix: started,
        finished_unix: unix_now(),
        spec,
        files: rel,
    };
    let mpath = opts.out.join("manifest.json");
    write_json(&mpath, &manifest)?;
    files.push(mpath);
    Ok(ExperimentOutcome {
        series: series_out,
        files,
    })
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_series(spec: &ExperimentSpec, so: &SeriesOutcome, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let param = spec.sweep_param();
    let mut files = Vec::new();

    let per_trial = so.dir.join("per_trial.csv");
    write_csv(&per_trial, so.points.iter().flat_map(|p| p.records()))?;
    files.push(per_trial);

    let aggregate = so.dir.join("aggregate.csv");
    write_csv(
        &aggregate,
        so.points.iter().map(|p| {
            let vals: Vec<(f64, bool)> = p
                .records()
                .iter()
                .map(|r| (r.hitting_time_or_runtime as f64, r.capped))
                .collect();
            AggregateRow::from_values(param, p.point.value, &vals)
        }),
    )?;
    files.push(aggregate);

    let active = so.points.iter().any(|p| p.point.config.model == Model::Active && p.point.mode == SeriesMode::Configured);
    if active {
        let first = so.dir.join("aggregate_first_drop.csv");
        write_csv(
            &first,
            so.points.iter().map(|p| {
                let cap = p.point.config.step_cap as f64;
                let vals: Vec<(f64, bool)> = p
                    .results
                    .iter()
                    .map(|r| match r.first_signal_drop_time {
                        Some(t) => (t as f64, false),
                        None => (cap, true),
                    })
                    .collect();
                AggregateRow::from_values(param, p.point.value, &vals)
            }),
        )?;
        files.push(first);
        let post = so.dir.join("aggregate_post_drop.csv");
        write_csv(
            &post,
            so.points.iter().map(|p| {
                let cap = p.point.config.step_cap;
                let vals: Vec<(f64, bool)> = p
                    .results
                    .iter()
                    .filter_map(|r| {
                        let t1 = r.first_signal_drop_time?;
                        let end = r.runtime_to_quota.unwrap_or(cap);
                        Some(((end - t1) as f64, r.is_capped()))
                    })
                    .collect();
                AggregateRow::from_values(param, p.point.value, &vals)
            }),
        )?;
        files.push(post);
    }

    if opts.write_events {
        let path = so.dir.join("events.jsonl");
        let mut w = BufWriter::new(File::create(&path).with_context(|| format!("cannot write {}", path.display()))?);
        for p in &so.points {
            for r in &p.results {
                for e in &r.events {
                    let line = serde_json::json!({
                        "sweep_value": p.point.value,
                        "trial": r.trial,
                        "t": e.t,
                        "agent": e.agent,
                        "event": e.event,
                        "pos": e.pos,
                    });
                    serde_json::to_writer(&mut w, &line)?;
                    w.write_all(b"\n")?;
                }
            }
        }
        w.flush()?;
        files.push(path);
    }

    if so.points.iter().any(|p| p.point.config.record_trajectories) {
        #[derive(Serialize)]
        struct Row {
            sweep_value: f64,
            trial: u64,
            agent: usize,
            t: u64,
            x: f64,
            y: f64,
        }
        let path = so.dir.join("trajectories.csv");
        let rows = so.points.iter().flat_map(|p| {
            p.results.iter().flat_map(move |r| {
                r.trajectories.iter().flatten().enumerate().flat_map(move |(agent, tr)| {
                    tr.iter().map(move |q| Row {
                        sweep_value: p.point.value,
                        trial: r.trial,
                        agent,
                        t: q.t,
                        x: q.pos.x,
                        y: q.pos.y,
                    })
                })
            })
        });
        write_csv(&path, rows)?;
        files.push(path);
    }
    Ok(files)
}
