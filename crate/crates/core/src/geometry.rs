//! Planar vectors and the single-step distance kernel.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A point or displacement in the plane, in meters.
///
/// Serialized as a two-element array `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Euclidean length; plain `sqrt(x² + y²)`, the model's scales are far
    /// from overflow.
    #[inline]
    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    #[inline]
    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2 { x, y }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Rotates `mu` counter-clockwise by `beta` radians.
pub fn rotate(mu: Vec2, beta: f64) -> Vec2 {
    let (s, c) = beta.sin_cos();
    Vec2::new(c * mu.x - s * mu.y, s * mu.x + c * mu.y)
}

/// Progress toward the target made by one step of length `alpha` taken at
/// angle `beta` from the target direction, starting at distance `phi`.
///
/// Positive values mean the agent ended closer. Evaluated as
/// `(2·phi·alpha·cos β − alpha²) / (phi + new_distance)` with
/// `cos β` and `new_distance` expanded through `sin(β/2)`, which is the law of
/// cosines difference without the cancellation of `phi − new_distance`.
pub fn delta_phi(phi: f64, alpha: f64, beta: f64) -> f64 {
    let h = (0.5 * beta).sin();
    let gap = phi - alpha;
    let next_sq = gap * gap + 4.0 * phi * alpha * h * h;
    let next = next_sq.max(0.0).sqrt();
    let denom = phi + next;
    if denom == 0.0 {
        return 0.0;
    }
    ((2.0 * phi - alpha - 4.0 * phi * h * h) * alpha / denom).clamp(-alpha, alpha)
}
