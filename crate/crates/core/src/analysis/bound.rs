//! Assumption checks and the three-phase expected hitting-time bound.
//!
//! Phases: outer (`d5 -> d3`), band (`d3 -> d2`), inner (`d2 -> d1`).
//! `s` is the expected number of inner-phase restarts and `s'` the success
//! probability of a band crossing; both are evaluated in log space.

use std::f64::consts::{E, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::analysis::distances::NotableDistances;
use crate::analysis::json_f64;
use crate::error::{invalid, Result};
use crate::params::EnvironmentParams;

/// One inequality `lhs >= rhs` (or `lhs <= rhs`, see `holds`), with both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(with = "json_f64")]
    pub lhs: f64,
    #[serde(with = "json_f64")]
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// `delta <= 1/3`
    pub delta_small: Verdict,
    /// `d3 - d2 > 4 / delta^5`
    pub band_wide: Verdict,
    /// Natural logs of both sides of `band_wide`.
    pub band_wide_ln: Verdict,
    /// `(d3² + d3 d5 √2 + d5²) / 2 >= 1`
    pub outer_extent: Verdict,
    /// `(d3 - d2) / alpha >= 1`
    pub band_vs_step: Verdict,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.delta_small.holds && self.band_wide.holds && self.outer_extent.holds && self.band_vs_step.holds
    }
}

pub fn check_assumptions(nd: &NotableDistances, alpha: f64) -> AssumptionReport {
    let delta = nd.delta;
    let width = nd.d3 - nd.d2;
    let ln_rhs = 4f64.ln() - 5.0 * delta.ln();
    let ln_lhs = if width > 0.0 { width.ln() } else { f64::NEG_INFINITY };
    let ln_holds = ln_lhs > ln_rhs;
    let extent = 0.5 * (nd.d3 * nd.d3 + nd.d3 * nd.d5 * SQRT_2 + nd.d5 * nd.d5);
    AssumptionReport {
        delta_small: Verdict {
            lhs: delta,
            rhs: 1.0 / 3.0,
            holds: delta <= 1.0 / 3.0,
        },
        band_wide: Verdict {
            lhs: width,
            rhs: ln_rhs.exp(),
            holds: ln_holds,
        },
        band_wide_ln: Verdict {
            lhs: ln_lhs,
            rhs: ln_rhs,
            holds: ln_holds,
        },
        outer_extent: Verdict {
            lhs: extent,
            rhs: 1.0,
            holds: extent >= 1.0,
        },
        band_vs_step: Verdict {
            lhs: width / alpha,
            rhs: 1.0,
            holds: width / alpha >= 1.0,
        },
    }
}

/// Which quantities were evaluated through logarithms, and any saturation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogSpaceFlags {
    pub computed_in_log: Vec<String>,
    pub s_overflow: bool,
    pub s_prime_underflow: bool,
    pub total_infinite: bool,
}

/// Round lengths and success probabilities from the per-phase arguments,
/// reported for cross-checking only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundDiagnostics {
    /// Outer-phase round length `(d3² + d3 d5 √2 + d5²) / alpha²`.
    #[serde(with = "json_f64")]
    pub outer_round_length: f64,
    /// Outer-phase success probability per round.
    #[serde(with = "json_f64")]
    pub outer_round_success: f64,
    /// Inner-phase round length `(d3 - d2) / alpha`.
    #[serde(with = "json_f64")]
    pub inner_round_length: f64,
    /// `ln s` rebuilt from the inner round's Gaussian displacement law.
    #[serde(with = "json_f64")]
    pub ln_s_from_round: f64,
    /// Whether the two routes to `s` agree within a factor of 2.
    pub s_routes_agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub params: EnvironmentParams,
    pub distances: NotableDistances,
    pub assumptions: AssumptionReport,
    pub assumptions_hold: bool,
    #[serde(with = "json_f64")]
    pub s: f64,
    #[serde(with = "json_f64")]
    pub s_prime: f64,
    #[serde(with = "json_f64")]
    pub ln_s: f64,
    #[serde(with = "json_f64")]
    pub ln_s_prime: f64,
    #[serde(with = "json_f64")]
    pub phase_53: f64,
    #[serde(with = "json_f64")]
    pub phase_32: f64,
    #[serde(with = "json_f64")]
    pub phase_21: f64,
    #[serde(with = "json_f64")]
    pub total_bound: f64,
    #[serde(with = "json_f64")]
    pub corollary_time: f64,
    pub corollary_prob: f64,
    pub log_space_flags: LogSpaceFlags,
    pub diagnostics: BoundDiagnostics,
}

/// Outer-phase term `pi e (d3² + d3 d5 √2 + d5²)² / (2 alpha² d3²)`.
pub fn outer_phase(nd: &NotableDistances, alpha: f64) -> f64 {
    let q = nd.d3 * nd.d3 + nd.d3 * nd.d5 * SQRT_2 + nd.d5 * nd.d5;
    PI * E * q * q / (2.0 * alpha * alpha * nd.d3 * nd.d3)
}

/// `ln s` where `1/s = (2 d1² / (pi alpha (d3 - d2))) exp(-(d1² + d1 d2 √2 + d2²) / (alpha (d3 - d2)))`.
pub fn ln_restarts(nd: &NotableDistances, alpha: f64) -> f64 {
    let w = alpha * (nd.d3 - nd.d2);
    let q = nd.d1 * nd.d1 + nd.d1 * nd.d2 * SQRT_2 + nd.d2 * nd.d2;
    (PI * w / (2.0 * nd.d1 * nd.d1)).ln() + q / w
}

/// `ln s'` where `s' = exp(-1/delta³) / (1 - exp(-delta³/4))`.
pub fn ln_band_success(delta: f64) -> f64 {
    let d3 = delta * delta * delta;
    -1.0 / d3 - (-(-0.25 * d3).exp_m1()).ln()
}

/// Total bound `(1 + (s+1)/s') A + (s+1)(d3-d2)/delta + s (d3-d2)/alpha`
/// with `A` the outer-phase term.
pub fn theorem_total(s: f64, s_prime: f64, nd: &NotableDistances, alpha: f64) -> f64 {
    let width = nd.d3 - nd.d2;
    let a = outer_phase(nd, alpha);
    let outer = if s.is_infinite() && s_prime.is_infinite() {
        f64::INFINITY
    } else {
        (1.0 + (s + 1.0) / s_prime) * a
    };
    let inner = if s == 0.0 { 0.0 } else { s * width / alpha };
    outer + (s + 1.0) * width / nd.delta + inner
}

pub fn theorem_bound(nd: &NotableDistances, params: &EnvironmentParams) -> Result<BoundReport> {
    let alpha = params.alpha;
    if !(nd.d3 > nd.d2) {
        return Err(invalid("distances", format!("need d3 > d2, got d2 = {}, d3 = {}", nd.d2, nd.d3)));
    }
    if !(nd.delta > 0.0 && alpha > 0.0 && nd.d1 > 0.0) {
        return Err(invalid("distances", "delta, alpha and d1 must be positive"));
    }
    let assumptions = check_assumptions(nd, alpha);
    let width = nd.d3 - nd.d2;

    let ln_s = ln_restarts(nd, alpha);
    let ln_s_prime = ln_band_success(nd.delta);
    let s = ln_s.exp();
    let s_prime = ln_s_prime.exp();
    let s_overflow = s.is_infinite();
    let s_prime_underflow = s_prime == 0.0;

    let phase_53 = outer_phase(nd, alpha);
    let phase_32 = width / nd.delta + phase_53 / s_prime;
    let phase_21 = s * (width / alpha + phase_32);
    let total_bound = if s_prime_underflow {
        f64::INFINITY
    } else {
        theorem_total(s, s_prime, nd, alpha)
    };

    let outer_round_length = (nd.d3 * nd.d3 + nd.d3 * nd.d5 * SQRT_2 + nd.d5 * nd.d5) / (alpha * alpha);
    let outer_var = alpha * alpha * outer_round_length / 2.0;
    let outer_round_success = nd.d3 * nd.d3 / (PI * outer_var) * (-1.0f64).exp();
    let inner_round_length = width / alpha;
    let inner_var = alpha * alpha * inner_round_length / 2.0;
    let q_inner = nd.d1 * nd.d1 + nd.d1 * nd.d2 * SQRT_2 + nd.d2 * nd.d2;
    let ln_hit = (nd.d1 * nd.d1 / (PI * inner_var)).ln() - q_inner / (2.0 * inner_var);
    let ln_s_from_round = -ln_hit;
    let s_routes_agree = (ln_s - ln_s_from_round).abs() <= 2f64.ln();

    let (corollary_time, corollary_prob) = corollary_bound(total_bound, params.n);
    Ok(BoundReport {
        params: params.clone(),
        distances: *nd,
        assumptions_hold: assumptions.all_hold(),
        assumptions,
        s,
        s_prime,
        ln_s,
        ln_s_prime,
        phase_53,
        phase_32,
        phase_21,
        total_bound,
        corollary_time,
        corollary_prob,
        log_space_flags: LogSpaceFlags {
            computed_in_log: ["s", "s_prime", "band_wide"].iter().map(|s| s.to_string()).collect(),
            s_overflow,
            s_prime_underflow,
            total_infinite: total_bound.is_infinite(),
        },
        diagnostics: BoundDiagnostics {
            outer_round_length,
            outer_round_success,
            inner_round_length,
            ln_s_from_round,
            s_routes_agree,
        },
    })
}

/// `(10 t_plus, 1 - 2^(-n/4))`: at least 75% of `n` agents deliver by the
/// returned time with at least the returned probability.
pub fn corollary_bound(t_plus: f64, n: usize) -> (f64, f64) {
    (10.0 * t_plus, 1.0 - (-(n as f64) / 4.0).exp2())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band(delta: f64, d2: f64, d3: f64, d5: f64) -> NotableDistances {
        NotableDistances {
            d1: 1.0,
            d2,
            d3,
            d4: 2.0 * d3 - d2,
            d5,
            delta,

        }
    }

    fn synthetic() -> (NotableDistances, EnvironmentParams) {
        let params = EnvironmentParams {
            alpha: 1.0,
            epsilon: 1.0,
            phi_max: 3000.0,
            ..EnvironmentParams::reference()
        };
        (NotableDistances::from_band(1.0, 10.0, 2010.0, 3000.0, 1.0 / 3.0), params)
    }

    #[test]
    fn hand_checked_assumptions() {
        let r = check_assumptions(&band(1.0 / 3.0, -998.0, 2.0, 3.0), 0.5);
        assert!(r.all_hold());
        assert!((r.band_wide.rhs - 972.0).abs() < 1e-9);
        assert!((r.outer_extent.lhs - (13.0 + 6.0 * SQRT_2) / 2.0).abs() < 1e-12);
        assert!((r.outer_extent.lhs - 10.74).abs() < 0.01);
    }

    #[test]
    fn tiny_delta_fails_band_width() {
        let r = check_assumptions(&band(2e-5, 7.5e-4, 2.4e-3, 0.01), 2e-5);
        assert!(!r.band_wide.holds);
        assert!((r.band_wide.rhs / 1.25e24 - 1.0).abs() < 1e-12);
        assert!(r.band_wide_ln.rhs.is_finite());
    }

    #[test]
    fn large_delta_fails_first() {
        let r = check_assumptions(&band(0.4, -998.0, 2.0, 3.0), 0.5);
        assert!(!r.delta_small.holds);
        assert!(!r.all_hold());
    }

    #[test]
    fn band_success_at_third() {
        let v = ln_band_success(1.0 / 3.0).exp();
        assert!((v / 2.039303268461347e-10 - 1.0).abs() < 1e-12, "{v:e}");
    }

    #[test]
    fn band_success_underflow_yields_infinite_total() {
        let (mut nd, params) = synthetic();
        nd.delta = 0.01;
        let r = theorem_bound(&nd, &params).unwrap();
        assert_eq!(r.s_prime, 0.0);
        assert!(r.log_space_flags.s_prime_underflow);
        assert_eq!(r.total_bound, f64::INFINITY);
        assert!(r.ln_s_prime.is_finite());
    }

    #[test]
    fn degenerate_substitution_identity() {
        let (nd, params) = synthetic();
        let t = theorem_total(0.0, f64::INFINITY, &nd, params.alpha);
        let expect = outer_phase(&nd, params.alpha) + (nd.d3 - nd.d2) / nd.delta;
        assert!((t / expect - 1.0).abs() < 1e-15);
    }

    #[test]
    fn synthetic_config_is_finite_and_admissible() {
        let (nd, params) = synthetic();
        let r = theorem_bound(&nd, &params).unwrap();
        assert!(r.assumptions_hold, "{:?}", r.assumptions);
        assert!(r.total_bound.is_finite() && r.total_bound > 0.0);
        assert!(r.diagnostics.s_routes_agree);
        let sum = r.phase_53 + r.phase_32 + r.phase_21;
        assert!((sum / r.total_bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn total_reproduces_from_parts() {
        let (nd, params) = synthetic();
        let r = theorem_bound(&nd, &params).unwrap();
        let w = nd.d3 - nd.d2;
        let q = nd.d3 * nd.d3 + nd.d3 * nd.d5 * SQRT_2 + nd.d5 * nd.d5;
        let core = PI * E * q * q / (2.0 * params.alpha * params.alpha * nd.d3 * nd.d3);
        let again = (1.0 + (r.s + 1.0) / r.s_prime) * core
            + (r.s + 1.0) * w / nd.delta
            + r.s * w / params.alpha;
        assert!((again / r.total_bound - 1.0).abs() < 1e-12);
        assert_eq!(r.corollary_time, 10.0 * r.total_bound);
    }

    #[test]
    fn corollary_values() {
        assert_eq!(corollary_bound(7.0, 4), (70.0, 0.5));
        assert_eq!(corollary_bound(0.0, 1).0, 0.0);
        assert!((corollary_bound(1.0, 40).1 - 0.9990234375).abs() < 1e-15);
        assert!((corollary_bound(1.0, 25).1 - 0.98686099351166).abs() < 1e-13);
    }

    #[test]
    fn rejects_collapsed_band() {
        let (mut nd, params) = synthetic();
        nd.d3 = nd.d2;
        assert!(theorem_bound(&nd, &params).is_err());
    }

    #[test]
    fn json_round_trip_with_infinity() {
        let (mut nd, params) = synthetic();
        nd.delta = 0.01;
        let r = theorem_bound(&nd, &params).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"total_bound\":\"inf\""));
        let back: BoundReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.total_bound, f64::INFINITY);
    }
}
