//! One timestep of the orientation-biased walk and its unbiased baseline.

use crate::error::{Error, Result};
use crate::geometry::{rotate, Vec2};
use crate::gradient::GradientField;
use crate::heading::HeadingLaw;
use crate::params::EnvironmentParams;
use crate::rng::RngStream;

/// Redraws allowed per timestep before the boundary rule is declared stuck.
pub const MAX_RESAMPLES: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub new_position: Vec2,
    /// Accepted heading relative to the target direction.
    pub beta: f64,
    /// Rejected candidates that left the boundary disk this timestep.
    pub resample_count: u32,
}

/// Heading law sensed by an agent at `pos` at timestep `t`.
pub fn heading_law_at(field: &GradientField, params: &EnvironmentParams, pos: Vec2, t: u64) -> HeadingLaw {
    let phi = pos.distance(params.x_star);
    if phi == 0.0 {
        return HeadingLaw::Uniform;
    }
    HeadingLaw::from_variance(field.sigma_squared(phi, t, params.b))
}

/// Takes one step of length `alpha` with headings drawn from `law`,
/// redrawing from the same start until the candidate stays within `phi_max`.
pub fn step_with_law(
    pos: Vec2,
    law: HeadingLaw,
    params: &EnvironmentParams,
    rng: &mut RngStream,
) -> Result<StepOutcome> {
    let mu = params.x_star - pos;
    let phi = mu.norm();
    // At the target the reference direction is arbitrary; headings are uniform there.
    let (axis, law) = if phi == 0.0 {
        (Vec2::new(1.0, 0.0), HeadingLaw::Uniform)
    } else {
        (mu * (1.0 / phi), law)
    };
    let mut resample_count = 0;
    loop {
        let beta = law.sample(rng);
        let candidate = pos + rotate(axis, beta) * params.alpha;
        if candidate.distance(params.x_star) <= params.phi_max {
            return Ok(StepOutcome {
                new_position: candidate,
                beta,
                resample_count,
            });
        }
        resample_count += 1;
        if resample_count > MAX_RESAMPLES {
            return Err(Error::BoundaryStarvation {
                attempts: resample_count,
                phi,
            });
        }
    }
}

/// One orientation-biased step against `field` sensed at timestep `t`.
pub fn biased_step(
    pos: Vec2,
    field: &GradientField,
    params: &EnvironmentParams,
    t: u64,
    rng: &mut RngStream,
) -> Result<StepOutcome> {
    step_with_law(pos, heading_law_at(field, params, pos, t), params, rng)
}

/// One step of the unbiased walk: heading uniform on `[-pi, pi)`.
pub fn rw_step(pos: Vec2, params: &EnvironmentParams, rng: &mut RngStream) -> Result<StepOutcome> {
    step_with_law(pos, HeadingLaw::Uniform, params, rng)
}
