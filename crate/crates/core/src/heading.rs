//! Heading-angle distributions for the orientation-biased walk.
//!
//! The heading `beta` is the signed angle between the step direction and the
//! direction to the target. It is drawn from a zero-mean normal truncated to
//! `[-pi, pi)`, sampled by inverse transform so that a single uniform draw
//! maps monotonically to an angle. Two laws fed the same uniform therefore
//! produce coupled headings, with the more concentrated law never turning
//! further from the target.

use statrs::function::erf::{erf, erf_inv};
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{invalid, Result};
use crate::rng::RngStream;

/// Largest double strictly below pi.
const PI_BELOW: f64 = f64::from_bits(PI.to_bits() - 1);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeadingLaw {
    /// Uniform on `[-pi, pi)`: flat gradient, zero derivative, or `b = 0`.
    Uniform,
    /// Degenerate at 0: the `sigma -> 0` limit, straight at the target.
    Straight,
    /// Normal with standard deviation `sigma` truncated to `[-pi, pi)`.
    /// `mass` is the retained probability `erf(pi / (sigma * sqrt 2))`.
    TruncatedNormal { sigma: f64, mass: f64 },
}

impl HeadingLaw {
    /// Law for a given standard deviation. `f64::INFINITY` selects the uniform law.
    pub fn from_sigma(sigma: f64) -> Result<Self> {
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(invalid("sigma", format!("must be > 0 or infinite, got {sigma}")));
        }
        if sigma.is_infinite() {
            return Ok(HeadingLaw::Uniform);
        }
        let mass = erf(PI / (sigma * SQRT_2));
        if mass <= 0.0 {
            // pi / sigma below the smallest subnormal: indistinguishable from flat.
            return Ok(HeadingLaw::Uniform);
        }
        Ok(HeadingLaw::TruncatedNormal { sigma, mass })
    }

    /// Law for a variance as returned by the gradient module; `0` is the
    /// straight-line limit and `+inf` is uniform.
    pub fn from_variance(variance: f64) -> Self {
        if variance == 0.0 {
            HeadingLaw::Straight
        } else if variance.is_infinite() || variance.is_nan() {
            HeadingLaw::Uniform
        } else {
            let sigma = variance.sqrt();
            if sigma == 0.0 {
                HeadingLaw::Straight
            } else {
                HeadingLaw::from_sigma(sigma).unwrap_or(HeadingLaw::Uniform)
            }
        }
    }

    pub fn sigma(&self) -> f64 {
        match *self {
            HeadingLaw::Uniform => f64::INFINITY,
            HeadingLaw::Straight => 0.0,
            HeadingLaw::TruncatedNormal { sigma, .. } => sigma,
        }
    }

    /// Inverse CDF on `(0, 1)`; the result lies in `[-pi, pi)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let beta = match *self {
            HeadingLaw::Uniform => PI * (2.0 * u - 1.0),
            HeadingLaw::Straight => 0.0,
            HeadingLaw::TruncatedNormal { sigma, mass } => {
                sigma * SQRT_2 * erf_inv((2.0 * u - 1.0) * mass)
            }
        };
        if beta >= PI {
            PI_BELOW
        } else if beta < -PI {
            -PI
        } else {
            beta
        }
    }

    /// CDF of the heading on `[-pi, pi)`.
    pub fn cdf(&self, beta: f64) -> f64 {
        if beta < -PI {
            return 0.0;
        }
        if beta >= PI {
            return 1.0;
        }
        match *self {
            HeadingLaw::Uniform => (beta + PI) / (2.0 * PI),
            HeadingLaw::Straight => {
                if beta >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            HeadingLaw::TruncatedNormal { sigma, mass } => {
                0.5 * (1.0 + erf(beta * FRAC_1_SQRT_2 / sigma) / mass)
            }
        }
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match self {
            HeadingLaw::Straight => 0.0,
            _ => self.quantile(open_uniform(rng)),
        }
    }
}

/// Uniform draw on the open interval `(0, 1)`.
#[inline]
pub(crate) fn open_uniform(rng: &mut RngStream) -> f64 {
    use rand::RngCore;
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Draws a heading from the zero-mean normal with standard deviation `sigma`
/// truncated to `[-pi, pi)`; `sigma = f64::INFINITY` draws uniformly.
pub fn sample_heading_angle(sigma: f64, rng: &mut RngStream) -> Result<f64> {
    Ok(HeadingLaw::from_sigma(sigma)?.sample(rng))
}
