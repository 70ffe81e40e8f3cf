use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Vec2;

/// Physical and model constants shared by every run, in SI units.
///
/// One timestep is one second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentParams {
    /// Payload / point mass, kg.
    #[serde(alias = "P")]
    pub p: f64,
    /// Diffusion coefficient, m²/s.
    #[serde(alias = "D")]
    pub d: f64,
    /// Gradient steepness of the static field, s.
    pub t_star: f64,
    /// Orientation-bias parameter; 0 gives the unbiased walk.
    pub b: f64,
    /// Step length, m.
    pub alpha: f64,
    /// Detection distance, m.
    pub epsilon: f64,
    /// Radius of the bounding disk around the target, m.
    pub phi_max: f64,
    pub x_star: Vec2,
    pub x0: Vec2,
    pub n: usize,
}

impl EnvironmentParams {
    /// Reference setting: one agent at 5 mm, `b = 1e11`.
    pub fn reference() -> Self {
        EnvironmentParams {
            p: 1e-19,
            d: 1e-10,
            t_star: 1e4,
            b: 1e11,
            alpha: 2e-5,
            epsilon: 2e-5,
            phi_max: 0.01,
            x_star: Vec2::ZERO,
            x0: Vec2::new(0.005, 0.0),
            n: 1,
        }
    }

    /// Distance from the start site to the target.
    pub fn phi0(&self) -> f64 {
        self.x0.distance(self.x_star)
    }

    /// Places the start site at distance `phi0` along the +x axis from the target.
    pub fn with_phi0(mut self, phi0: f64) -> Self {
        self.x0 = self.x_star + Vec2::new(phi0, 0.0);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("alpha", self.alpha)?;
        positive("epsilon", self.epsilon)?;
        positive("d", self.d)?;
        positive("t_star", self.t_star)?;
        positive("phi_max", self.phi_max)?;
        if !(self.p.is_finite() && self.p >= 0.0) {
            return Err(invalid("p", format!("must be finite and >= 0, got {}", self.p)));
        }
        if self.b.is_nan() || self.b < 0.0 {
            return Err(invalid("b", format!("must be >= 0, got {}", self.b)));
        }
        if self.phi_max <= self.epsilon {
            return Err(invalid("phi_max", "must exceed epsilon"));
        }
        if !self.x_star.is_finite() || !self.x0.is_finite() {
            return Err(invalid("x0", "positions must be finite"));
        }
        if self.phi0() > self.phi_max {
            return Err(invalid(
                "x0",
                format!("start distance {} lies outside phi_max {}", self.phi0(), self.phi_max),
            ));
        }
        if self.n == 0 {
            return Err(invalid("n", "need at least one agent"));
        }
        Ok(())
    }
}
