//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Finite intervals are bisected at the sub-interval with the largest error
//! estimate until the summed estimate drops below the requested absolute
//! tolerance. Semi-infinite ranges `[lo, ∞)` are mapped onto `[0, 1)` with
//! `y = lo + s·u/(1−u)`, i.e. `u = (y−lo)/(s + y−lo)`, where `s` is a length
//! scale chosen by the caller (1 by default). The Kronrod nodes never touch
//! `u = 1`, so the integrand is only evaluated at finite `y`.

use crate::error::{HetnetError, Result};

/// Default absolute tolerance used by [`adaptive_integrate`] callers.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Hard cap on interval bisections before giving up.
pub const MAX_SUBDIVISIONS: usize = 500;

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
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Estimated absolute error.
    pub residual: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let abs_half = half.abs();

    let fc = f(centre);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let x = half * XGK[jtw];
        let f1 = f(centre - x);
        let f2 = f(centre + x);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtw = 2 * j;
        let x = half * XGK[jtw];
        let f1 = f(centre - x);
        let f2 = f(centre + x);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        lo,
        hi,
        value,
        error,
    }
}

fn adapt<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<Integral> {
    let first = gauss_kronrod(f, lo, hi);
    let mut segments = vec![first];
    let mut evaluations = 15;
    let mut subdivisions = 0;

    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let residual: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !residual.is_finite() {
            return Err(HetnetError::domain(format!(
                "integrand is not finite on [{lo}, {hi}]"
            )));
        }
        let floor = 50.0 * f64::EPSILON * value.abs();
        if residual <= tol.max(floor) {
            return Ok(Integral {
                value,
                residual,
                evaluations,
            });
        }
        if subdivisions >= MAX_SUBDIVISIONS {
            return Err(HetnetError::NonConvergence {
                residual,
                subdivisions,
            });
        }

        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // interval cannot be split any further in floating point
            return Err(HetnetError::NonConvergence {
                residual,
                subdivisions,
            });
        }
        segments.push(gauss_kronrod(f, seg.lo, mid));
        segments.push(gauss_kronrod(f, mid, seg.hi));
        evaluations += 30;
        subdivisions += 1;
    }
}

/// Integrates `f` over `[lo, hi]`; `hi` may be `f64::INFINITY`.
///
/// Returns the estimate together with its residual, or
/// [`HetnetError::NonConvergence`] once [`MAX_SUBDIVISIONS`] bisections have
/// not brought the residual under `tol`.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Integral> {
    if !(tol > 0.0) {
        return Err(HetnetError::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !lo.is_finite() || hi.is_nan() {
        return Err(HetnetError::domain("lower limit must be finite"));
    }
    if hi == f64::INFINITY {
        return integrate_semi_infinite(f, lo, 1.0, tol);
    }
    if hi < lo {
        let r = adapt(&f, hi, lo, tol)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }
    if hi == lo {
        return Ok(Integral {
            value: 0.0,
            residual: 0.0,
            evaluations: 0,
        });
    }
    adapt(&f, lo, hi, tol)
}

/// Integrates `f` over `[lo, ∞)` using the map `y = lo + scale·u/(1−u)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    scale: f64,
    tol: f64,
) -> Result<Integral> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(HetnetError::domain(format!(
            "length scale must be positive, got {scale}"
        )));
    }
    let g = |u: f64| {
        let one_minus = 1.0 - u;
        let y = lo + scale * u / one_minus;
        let fy = f(y);
        if fy == 0.0 {
            0.0
        } else {
            fy * scale / (one_minus * one_minus)
        }
    };
    adapt(&g, 0.0, 1.0, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponential_tail() {
        let r = adaptive_integrate(|x: f64| (-x).exp(), 0.0, f64::INFINITY, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn nearest_neighbour_density_normalises() {
        for lambda in [0.1, 1.0, 5.0, 100.0] {
            let f = |y: f64| 2.0 * PI * lambda * y * (-PI * lambda * y * y).exp();
            let r = integrate_semi_infinite(f, 0.0, 1.0 / (PI * lambda).sqrt(), 1e-12).unwrap();
            assert!((r.value - 1.0).abs() < 1e-10, "lambda {lambda}: {r:?}");
        }
    }

    #[test]
    fn finite_polynomial_is_exact() {
        let r = adaptive_integrate(|x: f64| x * x * x - 2.0 * x, -1.0, 3.0, 1e-12).unwrap();
        assert!((r.value - 12.0).abs() < 1e-12);
        let rev = adaptive_integrate(|x: f64| x * x * x - 2.0 * x, 3.0, -1.0, 1e-12).unwrap();
        assert!((rev.value + 12.0).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand_needs_subdivision() {
        let r = adaptive_integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-9).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() < 1e-7, "{} vs {exact}", r.value);
        assert!(r.evaluations > 15);
    }

    #[test]
    fn z_integral_matches_arctan_at_exponent_four() {
        // Z(0.5, 4, 10) = sqrt(t) * ∫_{sqrt(c/t)}^∞ du/(1+u²)
        let (t, c) = (0.5f64, 10.0f64);
        let r = adaptive_integrate(
            |u: f64| 1.0 / (1.0 + u * u),
            (c / t).sqrt(),
            f64::INFINITY,
            1e-12,
        )
        .unwrap();
        let numeric = t.sqrt() * r.value;
        let closed = t.sqrt() * (t / c).sqrt().atan();
        assert!((numeric - closed).abs() < 1e-8);
    }

    #[test]
    fn oscillating_integrand_reports_non_convergence() {
        let err = adaptive_integrate(|x: f64| (1.0 / x).sin() / x, 1e-9, 1.0, 1e-14).unwrap_err();
        assert!(matches!(err, HetnetError::NonConvergence { .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(adaptive_integrate(|x: f64| x, 0.0, 1.0, 0.0).is_err());
    }
}
