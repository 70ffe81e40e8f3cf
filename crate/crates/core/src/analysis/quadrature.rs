//! Globally adaptive 15-point Gauss–Kronrod quadrature.
//!
//! The panel with the largest error estimate is bisected until the summed
//! estimate drops below the absolute tolerance. The error of a panel is
//! `|K15 - G7|`, which is pessimistic for smooth integrands.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const DEFAULT_MAX_INTERVALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol` using at
/// most `max_intervals` panels.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    let mut panels = vec![gauss_kronrod(&f, a, b)];
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        // roundoff floor: a few ulps of the running total
        let floor = 50.0 * f64::EPSILON * value.abs();
        if error <= abs_tol.max(floor) {
            return Ok(Integral {
                value,
                abs_error: error,
                intervals: panels.len(),
            });
        }
        if panels.len() >= max_intervals {
            return Err(Error::Quadrature {
                estimate: value,
                abs_error: error,
                tolerance: abs_tol,
                intervals: panels.len(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gauss_kronrod(&f, p.a, mid));
        panels.push(gauss_kronrod(&f, mid, p.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, 1e-14, 10).unwrap();
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn smooth_trig() {
        let r = integrate(f64::sin, 0.0, PI, 1e-13, 100).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn sharp_peak_needs_refinement() {
        let s = 1e-3;
        let r = integrate(|x: f64| (-(x - 0.3) * (x - 0.3) / (2.0 * s * s)).exp(), 0.0, 1.0, 1e-12, 10_000).unwrap();
        let exact = s * (2.0 * PI).sqrt();
        assert!((r.value - exact).abs() < 1e-11, "{} vs {}", r.value, exact);
        assert!(r.intervals > 1);
    }

    #[test]
    fn kink_is_resolved() {
        let r = integrate(|x: f64| (x - 0.37).abs(), 0.0, 1.0, 1e-12, 10_000).unwrap();
        let exact = 0.5 * (0.37f64.powi(2) + 0.63f64.powi(2));
        assert!((r.value - exact).abs() < 1e-11);
    }

    #[test]
    fn reports_non_convergence() {
        let e = integrate(|x: f64| (1.0 / x).sin(), 1e-9, 1.0, 1e-15, 8).unwrap_err();
        assert!(matches!(e, Error::Quadrature { intervals: 8, .. }));
    }
}
