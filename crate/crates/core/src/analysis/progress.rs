//! Expected one-step progress toward the target.
//!
//! With heading law `N(0, sigma²)` truncated to `[-pi, pi)` and retained mass
//! `Z`, the mean of `delta_phi` is `(2/Z) ∫_0^pi delta_phi(beta) pdf(beta) dbeta`
//! by symmetry of `delta_phi` in `beta`. Narrow laws are integrated in the
//! standardized variable `beta / sigma` so the peak at zero is resolved.

use std::f64::consts::{FRAC_1_PI, PI};

use crate::analysis::quadrature::{integrate, DEFAULT_MAX_INTERVALS};
use crate::error::{invalid, Result};
use crate::geometry::delta_phi;
use crate::gradient::GradientField;
use crate::heading::HeadingLaw;
use crate::params::EnvironmentParams;

/// Standard deviation substituted for the degenerate straight-line law.
pub const SIGMA_FLOOR: f64 = 1e-8;
/// Relative accuracy target; the absolute tolerance is this times `alpha`.
pub const RELATIVE_TOLERANCE: f64 = 1e-12;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// Below this sigma the integral runs over `beta / sigma`.
const STANDARDIZE_BELOW: f64 = 0.5;
/// Standard-normal tail beyond this many sigma is below 1e-300.
const TAIL_CUTOFF: f64 = 38.0;

/// Mean of `delta_phi(phi, alpha, beta)` for `beta` drawn from `law`.
pub fn expected_progress_for_law(phi: f64, alpha: f64, law: HeadingLaw) -> Result<f64> {
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(invalid("phi", format!("must be finite and > 0, got {phi}")));
    }
    let tol = RELATIVE_TOLERANCE * alpha;
    let law = match law {
        HeadingLaw::Straight => HeadingLaw::from_sigma(SIGMA_FLOOR)?,
        other => other,
    };
    match law {
        HeadingLaw::Uniform => {
            let r = integrate(|b| delta_phi(phi, alpha, b), 0.0, PI, tol * PI, DEFAULT_MAX_INTERVALS)?;
            Ok(r.value * FRAC_1_PI)
        }
        HeadingLaw::TruncatedNormal { sigma, mass } if sigma < STANDARDIZE_BELOW => {
            let prefactor = 2.0 / mass;
            let upper = (PI / sigma).min(TAIL_CUTOFF);
            let r = integrate(
                |x| delta_phi(phi, alpha, sigma * x) * (-0.5 * x * x).exp() * INV_SQRT_2PI,
                0.0,
                upper,
                tol / prefactor,
                DEFAULT_MAX_INTERVALS,
            )?;
            Ok(prefactor * r.value)
        }
        HeadingLaw::TruncatedNormal { sigma, mass } => {
            let prefactor = 2.0 * INV_SQRT_2PI / (mass * sigma);
            let inv_two_var = 0.5 / (sigma * sigma);
            let r = integrate(
                |b| delta_phi(phi, alpha, b) * (-b * b * inv_two_var).exp(),
                0.0,
                PI,
                tol / prefactor,
                DEFAULT_MAX_INTERVALS,
            )?;
            Ok(prefactor * r.value)
        }
        HeadingLaw::Straight => unreachable!("replaced by the sigma floor above"),
    }
}

/// Expected progress of one orientation-biased step from distance `phi`
/// in `field` at timestep `t`.
pub fn expected_progress(
    field: &GradientField,
    phi: f64,
    t: u64,
    params: &EnvironmentParams,
) -> Result<f64> {
    let law = HeadingLaw::from_variance(field.sigma_squared(phi, t, params.b));
    expected_progress_for_law(phi, params.alpha, law)
}

pub fn progress_curve(
    field: &GradientField,
    params: &EnvironmentParams,
    t: u64,
    phis: &[f64],
) -> Result<Vec<f64>> {
    phis.iter()
        .map(|&phi| expected_progress(field, phi, t, params))
        .collect()
}
