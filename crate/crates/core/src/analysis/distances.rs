//! Notable distances `d1..d5` delimiting the phases of a hitting-time bound.
//!
//! `d4` is the outermost distance where expected progress reaches `delta`
//! and `d2` the innermost distance such that progress stays at or above
//! `delta` all the way out to `d4`. Both come from a log-spaced scan refined
//! by bisection; no monotonicity of the progress curve is assumed.

use serde::{Deserialize, Serialize};

use crate::analysis::progress::expected_progress;
use crate::error::{invalid, Error, Result};
use crate::gradient::GradientField;
use crate::params::EnvironmentParams;

pub const DEFAULT_GRID_POINTS: usize = 2000;
pub const BISECTION_RELATIVE_TOLERANCE: f64 = 1e-6;
/// Helper default: `delta` is this fraction of the peak expected progress.
pub const DEFAULT_DELTA_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NotableDistances {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
    pub delta: f64,
}

impl NotableDistances {
    /// Builds the tuple from explicit `d2`, `d4`, with `d1 = epsilon`,
    /// `d5 = phi_max` and `d3` the midpoint.
    pub fn from_band(epsilon: f64, d2: f64, d4: f64, phi_max: f64, delta: f64) -> Self {
        Self {
            d1: epsilon,
            d2,
            d3: 0.5 * (d2 + d4),
            d4,
            d5: phi_max,
            delta,
        }
    }

    pub fn band_width(&self) -> f64 {
        self.d3 - self.d2
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (n - 1) as f64;
            let mut g: Vec<f64> = (0..n).map(|k| (a + step * k as f64).exp()).collect();
            g[0] = lo;
            g[n - 1] = hi;
            g
        }
    }
}

fn scan(
    field: &GradientField,
    params: &EnvironmentParams,
    t: u64,
    points: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(params.epsilon > 0.0 && params.phi_max > params.epsilon) {
        return Err(invalid("phi_max", "need 0 < epsilon < phi_max"));
    }
    if points < 2 {
        return Err(invalid("points", "grid needs at least 2 points"));
    }
    let grid = log_grid(params.epsilon, params.phi_max, points);
    let values = grid
        .iter()
        .map(|&phi| expected_progress(field, phi, t, params))
        .collect::<Result<Vec<_>>>()?;
    Ok((grid, values))
}

/// Location and value of the largest expected progress on the scan grid.
pub fn peak_progress(field: &GradientField, params: &EnvironmentParams, t: u64) -> Result<(f64, f64)> {
    let (grid, values) = scan(field, params, t, DEFAULT_GRID_POINTS)?;
    let k = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    Ok((grid[k], values[k]))
}

/// `DEFAULT_DELTA_FRACTION` times the peak expected progress.
pub fn default_delta(field: &GradientField, params: &EnvironmentParams, t: u64) -> Result<f64> {
    let (_, peak) = peak_progress(field, params, t)?;
    if peak <= 0.0 {
        return Err(Error::EmptyInterval {
            delta: 0.0,
            max_progress: peak,
            lo: params.epsilon,
            hi: params.phi_max,
        });
    }
    Ok(DEFAULT_DELTA_FRACTION * peak)
}

pub fn notable_distances(
    field: &GradientField,
    params: &EnvironmentParams,
    delta: f64,
    t: u64,
) -> Result<NotableDistances> {
    notable_distances_on_grid(field, params, delta, t, DEFAULT_GRID_POINTS)
}

pub fn notable_distances_on_grid(
    field: &GradientField,
    params: &EnvironmentParams,
    delta: f64,
    t: u64,
    points: usize,
) -> Result<NotableDistances> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", format!("must be finite and > 0, got {delta}")));
    }
    let (grid, values) = scan(field, params, t, points)?;
    let feasible = |k: usize| values[k] >= delta;
    let Some(k4) = (0..grid.len()).rev().find(|&k| feasible(k)) else {
        let max_progress = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::EmptyInterval {
            delta,
            max_progress,
            lo: params.epsilon,
            hi: params.phi_max,
        });
    };
    let mut k2 = k4;
    while k2 > 0 && feasible(k2 - 1) {
        k2 -= 1;
    }
    let progress_ok = |phi: f64| -> Result<bool> { Ok(expected_progress(field, phi, t, params)? >= delta) };

    let d4 = if k4 + 1 == grid.len() {
        params.phi_max
    } else {
        // feasible at lo, infeasible at hi
        let (mut lo, mut hi) = (grid[k4], grid[k4 + 1]);
        while hi - lo > BISECTION_RELATIVE_TOLERANCE * lo {
            let mid = 0.5 * (lo + hi);
            if progress_ok(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let d2 = if k2 == 0 {
        params.epsilon
    } else {
        // infeasible at lo, feasible at hi
        let (mut lo, mut hi) = (grid[k2 - 1], grid[k2]);
        while hi - lo > BISECTION_RELATIVE_TOLERANCE * lo {
            let mid = 0.5 * (lo + hi);
            if progress_ok(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(NotableDistances::from_band(params.epsilon, d2, d4, params.phi_max, delta))
}
