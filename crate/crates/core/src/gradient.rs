//! Signal-chemical concentration fields and their radial derivatives.
//!
//! Concentrations are treated as kg/m² (planar point-source diffusion); only
//! derivative magnitudes feed the movement model.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::params::EnvironmentParams;

/// Concentration at squared distance `phi_sq` from an instantaneous point
/// release of mass `p` that has diffused for `elapsed` seconds.
#[inline]
pub fn point_source_concentration(p: f64, d: f64, elapsed: f64, phi_sq: f64) -> f64 {
    let spread = 4.0 * d * elapsed;
    p / (PI * spread) * (-phi_sq / spread).exp()
}

/// Radial derivative of [`point_source_concentration`] at distance `phi`.
#[inline]
pub fn point_source_derivative(p: f64, d: f64, elapsed: f64, phi: f64) -> f64 {
    let spread = 4.0 * d * elapsed;
    -(p * phi / (8.0 * PI * d * d * elapsed * elapsed)) * (-phi * phi / spread).exp()
}

/// The superposed field of payloads released at the target.
///
/// A drop registered at timestep `t_j` contributes only when evaluated at
/// `t > t_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropField {
    pub p: f64,
    pub d: f64,
    pub x_star: Vec2,
    pub drop_times: Vec<u64>,
    /// Skip terms smaller than this fraction of the largest term.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prune_below: Option<f64>,
}

impl DropField {
    pub fn new(p: f64, d: f64, x_star: Vec2) -> Self {
        DropField {
            p,
            d,
            x_star,
            drop_times: Vec::new(),
            prune_below: None,
        }
    }

    fn effective(&self, t: u64) -> impl Iterator<Item = f64> + '_ {
        self.drop_times
            .iter()
            .take_while(move |&&tj| tj < t)
            .map(move |&tj| (t - tj) as f64)
    }

    fn sum_terms<F: Fn(f64) -> f64>(&self, t: u64, term: F) -> f64 {
        match self.prune_below {
            None => self.effective(t).map(&term).sum(),
            Some(cut) => {
                let largest = self.effective(t).map(|e| term(e).abs()).fold(0.0, f64::max);
                self.effective(t)
                    .map(&term)
                    .filter(|v| v.abs() >= cut * largest)
                    .sum()
            }
        }
    }

    pub fn effective_drops(&self, t: u64) -> usize {
        self.drop_times.iter().take_while(|&&tj| tj < t).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GradientField {
    /// Time-constant Gaussian profile centred on the target.
    StaticPointSource { p: f64, d: f64, t_star: f64, x_star: Vec2 },
    /// Sum of payloads released at the target over time.
    DynamicDrops(DropField),
    /// `max(0, intercept + slope * phi)` with constant derivative `slope`.
    Linear { slope: f64, intercept: f64, x_star: Vec2 },
    /// Zero everywhere.
    Null,
}

impl GradientField {
    pub fn static_from(params: &EnvironmentParams) -> Self {
        GradientField::StaticPointSource {
            p: params.p,
            d: params.d,
            t_star: params.t_star,
            x_star: params.x_star,
        }
    }

    pub fn empty_drops(params: &EnvironmentParams) -> Self {
        GradientField::DynamicDrops(DropField::new(params.p, params.d, params.x_star))
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            GradientField::StaticPointSource { .. } => "static_point_source",
            GradientField::DynamicDrops(_) => "dynamic_drops",
            GradientField::Linear { .. } => "linear",
            GradientField::Null => "null",
        }
    }

    fn centre(&self) -> Vec2 {
        match self {
            GradientField::StaticPointSource { x_star, .. } | GradientField::Linear { x_star, .. } => {
                *x_star
            }
            GradientField::DynamicDrops(f) => f.x_star,
            GradientField::Null => Vec2::ZERO,
        }
    }

    /// Concentration at position `x` at timestep `t`.
    pub fn concentration(&self, x: Vec2, t: u64) -> f64 {
        let phi = x.distance(self.centre());
        self.concentration_at_distance(phi, t)
    }

    pub fn concentration_at_distance(&self, phi: f64, t: u64) -> f64 {
        let phi_sq = phi * phi;
        match self {
            GradientField::StaticPointSource { p, d, t_star, .. } => {
                point_source_concentration(*p, *d, *t_star, phi_sq)
            }
            GradientField::DynamicDrops(f) => {
                f.sum_terms(t, |elapsed| point_source_concentration(f.p, f.d, elapsed, phi_sq))
            }
            GradientField::Linear { slope, intercept, .. } => (intercept + slope * phi).max(0.0),
            GradientField::Null => 0.0,
        }
    }

    /// Derivative of the concentration with respect to distance from the target.
    pub fn radial_derivative(&self, phi: f64, t: u64) -> f64 {
        match self {
            GradientField::StaticPointSource { p, d, t_star, .. } => {
                point_source_derivative(*p, *d, *t_star, phi)
            }
            GradientField::DynamicDrops(f) => {
                f.sum_terms(t, |elapsed| point_source_derivative(f.p, f.d, elapsed, phi))
            }
            GradientField::Linear { slope, .. } => *slope,
            GradientField::Null => 0.0,
        }
    }

    /// Heading variance `1 / (b |dγ/dφ|)`; `+inf` when `b = 0` or the
    /// derivative vanishes, `0` when `b` is infinite on a non-flat gradient.
    pub fn sigma_squared(&self, phi: f64, t: u64, b: f64) -> f64 {
        if b == 0.0 {
            return f64::INFINITY;
        }
        let slope = self.radial_derivative(phi, t).abs();
        if slope == 0.0 {
            return f64::INFINITY;
        }
        1.0 / (b * slope)
    }

    /// Records a payload released at timestep `t_drop`.
    pub fn register_drop(&mut self, t_drop: u64) -> Result<()> {
        match self {
            GradientField::DynamicDrops(f) => {
                if let Some(&last) = f.drop_times.last() {
                    if t_drop < last {
                        return Err(Error::DropOrdering { t_drop, last });
                    }
                }
                f.drop_times.push(t_drop);
                Ok(())
            }
            other => Err(Error::FieldVariant {
                found: other.variant_name(),
            }),
        }
    }

    pub fn drop_times(&self) -> &[u64] {
        match self {
            GradientField::DynamicDrops(f) => &f.drop_times,
            _ => &[],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig2() -> GradientField {
        GradientField::StaticPointSource {
            p: 1e-19,
            d: 1e-10,
            t_star: 1e4,
            x_star: Vec2::ZERO,
        }
    }

    fn drops(times: &[u64]) -> GradientField {
        let mut f = DropField::new(1e-19, 1e-9, Vec2::ZERO);
        f.drop_times = times.to_vec();
        GradientField::DynamicDrops(f)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn peak_concentration() {
        // P / (4 pi D t*) evaluated at 40 digits
        let c = fig2().concentration(Vec2::ZERO, 0);
        assert!(rel(c, 7.957_747_154_594_767e-15) < 1e-14, "{c:e}");
    }

    #[test]
    fn null_field_is_zero() {
        let f = GradientField::Null;
        assert_eq!(f.concentration(Vec2::new(0.3, -2.0), 17), 0.0);
        assert_eq!(f.radial_derivative(0.3, 17), 0.0);
        assert_eq!(f.sigma_squared(0.3, 17, 1e12), f64::INFINITY);
    }

    #[test]
    fn strict_drop_effectiveness() {
        let f = drops(&[5]);
        let x = Vec2::new(1e-4, 0.0);
        assert_eq!(f.concentration(x, 5), 0.0);
        let single = GradientField::StaticPointSource {
            p: 1e-19,
            d: 1e-9,
            t_star: 1.0,
            x_star: Vec2::ZERO,
        };
        assert_eq!(f.concentration(x, 6), single.concentration(x, 0));
    }

    #[test]
    fn derivative_vanishes_at_target() {
        assert_eq!(fig2().radial_derivative(0.0, 0), 0.0);
        assert_eq!(drops(&[0, 3]).radial_derivative(0.0, 10), 0.0);
    }

    #[test]
    fn static_derivative_matches_finite_difference() {
        let f = fig2();
        let (phi, h) = (0.002, 1e-9);
        let fd = (f.concentration_at_distance(phi + h, 0) - f.concentration_at_distance(phi - h, 0))
            / (2.0 * h);
        assert!(rel(f.radial_derivative(phi, 0), fd) < 1e-6);
    }

    #[test]
    fn linear_field() {
        let f = GradientField::Linear {
            slope: -1e-12,
            intercept: 1.0,
            x_star: Vec2::ZERO,
        };
        assert_eq!(f.radial_derivative(0.004, 3), -1e-12);
        assert!((f.sigma_squared(0.004, 3, 1e12) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_squared_has_interior_minimum() {
        let f = fig2();
        let b = 1e11;
        let grid: Vec<f64> = (0..=600).map(|k| 1e-7 * 10f64.powf(k as f64 / 100.0)).collect();
        let vals: Vec<f64> = grid.iter().map(|&phi| f.sigma_squared(phi, 0, b)).collect();
        let (imin, vmin) = vals
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(imin > 0 && imin < grid.len() - 1);
        assert!(vmin.is_finite() && vmin > 0.0);
        assert!(vals[0] > 1e3 * vmin);
        assert!(*vals.last().unwrap() > 1e3 * vmin);
        // analytic minimiser sqrt(2 D t*)
        assert!(rel(grid[imin], (2.0f64 * 1e-10 * 1e4).sqrt()) < 0.03);
    }

    #[test]
    fn far_field_underflows_to_flat() {
        assert_eq!(fig2().sigma_squared(10.0, 0, 1e11), f64::INFINITY);
    }

    #[test]
    fn register_drop_rules() {
        let mut f = drops(&[]);
        f.register_drop(10).unwrap();
        assert_eq!(f.drop_times(), &[10]);
        f.register_drop(10).unwrap();
        assert_eq!(
            f.register_drop(9),
            Err(Error::DropOrdering { t_drop: 9, last: 10 })
        );
        let mut s = fig2();
        assert!(matches!(s.register_drop(1), Err(Error::FieldVariant { .. })));
    }

    #[test]
    fn registration_invisible_until_next_step() {
        let mut f = drops(&[2]);
        let x = Vec2::new(3e-4, 1e-4);
        let before: Vec<f64> = (0..=8).map(|t| f.concentration(x, t)).collect();
        f.register_drop(8).unwrap();
        for t in 0..=8 {
            assert_eq!(f.concentration(x, t), before[t as usize]);
        }
    }

    #[test]
    fn doubled_drop_doubles_field() {
        let one = drops(&[10]);
        let two = drops(&[10, 10]);
        for t in [11, 12, 50, 1000] {
            for phi in [0.0, 1e-4, 1e-3] {
                let a = one.concentration_at_distance(phi, t);
                assert_eq!(two.concentration_at_distance(phi, t), 2.0 * a);
                let da = one.radial_derivative(phi, t);
                assert_eq!(two.radial_derivative(phi, t), 2.0 * da);
            }
        }
    }

    #[test]
    fn pruning_drops_only_negligible_terms() {
        let mut f = DropField::new(1e-19, 1e-9, Vec2::ZERO);
        f.drop_times = vec![0, 9_990];
        let exact = GradientField::DynamicDrops(f.clone());
        f.prune_below = Some(1e-15);
        let pruned = GradientField::DynamicDrops(f);
        let t = 10_000;
        let phi = 1e-6;
        assert!(rel(
            pruned.concentration_at_distance(phi, t),
            exact.concentration_at_distance(phi, t)
        ) < 1e-3);
    }

    proptest! {
        #[test]
        fn derivative_consistent_with_concentration(
            phi in 1e-5f64..5e-3,
            p_exp in -20.0f64..-17.0,
            d_exp in -11.0f64..-9.0,
            t_exp in 2.0f64..5.0,
            slope in -1e-9f64..-1e-13,
        ) {
            let p = 10f64.powf(p_exp);
            let d = 10f64.powf(d_exp);
            let ts = 10f64.powf(t_exp);
            let mut df = DropField::new(p, d, Vec2::ZERO);
            df.drop_times = vec![0, (ts / 3.0) as u64];
            let fields = [
                GradientField::StaticPointSource { p, d, t_star: ts, x_star: Vec2::ZERO },
                GradientField::DynamicDrops(df),
                GradientField::Linear { slope, intercept: -slope, x_star: Vec2::ZERO },
            ];
            let t = ts as u64 + 1;
            let h = phi * 1e-6 + 1e-12;
            for f in &fields {
                let exact = f.radial_derivative(phi, t);
                let fd = (f.concentration_at_distance(phi + h, t) - f.concentration_at_distance(phi - h, t)) / (2.0 * h);
                // skip deep tails where both underflow
                if exact.abs() > 1e-250 {
                    prop_assert!(rel(exact, fd) < 1e-5, "{} phi={} exact={:e} fd={:e}", f.variant_name(), phi, exact, fd);
                }
            }
        }

        #[test]
        fn drop_sum_is_exactly_additive(times in proptest::collection::vec(0u64..500, 0..12), phi in 0.0f64..3e-3, dt in 1u64..2000) {
            let mut times = times;
            times.sort_unstable();
            let t = times.last().copied().unwrap_or(0) + dt;
            let f = drops(&times);
            let mut sum = 0.0;
            for &tj in &times {
                sum += point_source_concentration(1e-19, 1e-9, (t - tj) as f64, phi * phi);
            }
            prop_assert_eq!(f.concentration_at_distance(phi, t), sum);
        }

        #[test]
        fn point_source_decays_radially(t_exp in 2.0f64..6.0) {
            let f = GradientField::StaticPointSource { p: 1e-19, d: 1e-10, t_star: 10f64.powf(t_exp), x_star: Vec2::ZERO };
            let mut prev = f64::INFINITY;
            for k in 0..=500 {
                let c = f.concentration_at_distance(k as f64 * 2e-5, 0);
                prop_assert!(c <= prev);
                prev = c;
            }
        }

        #[test]
        fn drops_never_decrease_concentration(times in proptest::collection::vec(0u64..300, 0..8), extra in 0u64..100, phi in 0.0f64..3e-3, dt in 1u64..5000) {
            let mut times = times;
            times.sort_unstable();
            let t_drop = times.last().copied().unwrap_or(0) + extra;
            let mut f = drops(&times);
            let t = t_drop + dt;
            let before = f.concentration_at_distance(phi, t);
            f.register_drop(t_drop).unwrap();
            prop_assert!(f.concentration_at_distance(phi, t) >= before);
        }

        #[test]
        fn inverse_variance_identity(phi in 1e-6f64..1e-2, b_exp in 9.0f64..13.0, t_exp in 2.0f64..5.0) {
            let (p, d, ts, b) = (1e-19, 1e-10, 10f64.powf(t_exp), 10f64.powf(b_exp));
            let f = GradientField::StaticPointSource { p, d, t_star: ts, x_star: Vec2::ZERO };
            let r = b * p / (8.0 * PI * d * d * ts * ts);
            let expected = r * phi * (-phi * phi / (4.0 * d * ts)).exp();
            let inv = 1.0 / f.sigma_squared(phi, 0, b);
            if expected > 1e-280 {
                prop_assert!(rel(inv, expected) < 1e-12);
            }
        }
    }
}
