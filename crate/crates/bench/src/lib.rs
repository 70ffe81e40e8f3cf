//! Shared fixtures for the nanosim benchmarks.

use nanosim_core::{EnvironmentParams, GradientField, Model, RunConfig};

/// Reference environment with bias `b`.
pub fn reference(b: f64) -> EnvironmentParams {
    EnvironmentParams {
        b,
        ..EnvironmentParams::reference()
    }
}

/// Passive single-agent run starting `phi0` from the target.
pub fn passive_run(b: f64, phi0: f64) -> RunConfig {
    RunConfig::new(Model::Passive, reference(b).with_phi0(phi0))
}

/// Drop field holding `k` releases at timesteps `0..k`.
pub fn drop_field(params: &EnvironmentParams, k: u64) -> GradientField {
    let mut f = GradientField::empty_drops(params);
    for t in 0..k {
        f.register_drop(t).expect("increasing drop times");
    }
    f
}
