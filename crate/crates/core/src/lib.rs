//! Monte Carlo simulation and analysis of chemotactic nano-agent swarms
//! searching for a point target by noisily ascending a chemical gradient.
//!
//! The crate covers a static ("passive") gradient and a dynamic gradient the
//! agents build themselves ("active"), plus numerical tools for the expected
//! single-step progress and analytical hitting-time bounds.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod gradient;
pub mod heading;
pub mod movement;
pub mod params;
pub mod rng;
pub mod stats;

pub use engine::{
    run_active, run_in_field, run_passive_single, run_passive_swarm, run_trial, AgentState, Event,
    EventKind, FieldSpec, Model, Payload, RunConfig, Status, TrialResult,
};
pub use error::{Error, Result};
pub use geometry::{delta_phi, rotate, Vec2};
pub use gradient::{DropField, GradientField};
pub use heading::{sample_heading_angle, HeadingLaw};
pub use movement::{biased_step, rw_step, StepOutcome};
pub use params::EnvironmentParams;
pub use rng::RngStream;
