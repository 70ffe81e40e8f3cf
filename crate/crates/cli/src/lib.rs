//! Experiment orchestration for nanosim: presets, sweeps, parallel trials,
//! CSV / JSON export, and analysis reports.

pub mod analysis;
pub mod experiment;
pub mod presets;
pub mod runner;

pub use experiment::{ExperimentKind, ExperimentSpec, Series, SeriesMode, Sweep};
pub use runner::{run_experiment, run_point, trial_seed, ExperimentOutcome, RunOptions, TrialRecord};

/// Environment variable holding the default master seed.
pub const SEED_ENV: &str = "NANOSIM_SEED";
