//! Interference-exclusion kernels.
//!
//! `Z(t, b, c) = t^{2/b} ∫_{(c/t)^{2/b}}^∞ du / (1 + u^{b/2})` and
//! `Q(t, b, c) = c^{2/b} + Z(t, b, c)`. At `b = 4` the integral is
//! `√t·atan(√(t/c))`.

use crate::error::{HetnetError, Result};
use crate::quad::adaptive_integrate;

const KERNEL_TOL: f64 = 1e-13;

fn check(t: f64, b: f64, c: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(HetnetError::domain(format!(
            "threshold must be >= 0, got {t}"
        )));
    }
    if !(b > 2.0) || !b.is_finite() {
        return Err(HetnetError::domain(format!(
            "path-loss exponent must exceed 2 (tail integral diverges), got {b}"
        )));
    }
    if !(c > 0.0) {
        return Err(HetnetError::domain(format!(
            "bias ratio must be > 0, got {c}"
        )));
    }
    Ok(())
}

/// `∫_lo^∞ du / (1 + u^m)` for `m > 1`.
///
/// The tail beyond 1 is mapped by `w = u^{1−m}` onto
/// `(1/(m−1)) ∫_0^{·} dw / (1 + w^{m/(m−1)})`, which is a bounded smooth
/// integrand on a finite range.
fn tail_integral(lo: f64, m: f64) -> Result<f64> {
    let q = m / (m - 1.0);
    let mapped = |w: f64| 1.0 / (1.0 + w.powf(q));
    if lo >= 1.0 {
        let upper = lo.powf(1.0 - m);
        let r = adaptive_integrate(mapped, 0.0, upper, KERNEL_TOL)?;
        Ok(r.value / (m - 1.0))
    } else {
        let near = adaptive_integrate(|u: f64| 1.0 / (1.0 + u.powf(m)), lo, 1.0, KERNEL_TOL)?;
        let far = adaptive_integrate(mapped, 0.0, 1.0, KERNEL_TOL)?;
        Ok(near.value + far.value / (m - 1.0))
    }
}

/// `Z(t, b, c)` by quadrature, whatever the exponent.
pub fn z_kernel_numeric(t: f64, b: f64, c: f64) -> Result<f64> {
    check(t, b, c)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let lo = (c / t).powf(2.0 / b);
    Ok(t.powf(2.0 / b) * tail_integral(lo, b / 2.0)?)
}

/// `Z(t, b, c)`, closed form at `b = 4`.
pub fn z_kernel(t: f64, b: f64, c: f64) -> Result<f64> {
    check(t, b, c)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    if b == 4.0 {
        Ok(t.sqrt() * (t / c).sqrt().atan())
    } else {
        z_kernel_numeric(t, b, c)
    }
}

/// Returns `(Q, Z)` for threshold `t`, exponent `b` and bias ratio `c`.
pub fn q_kernel(t: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    let z = z_kernel(t, b, c)?;
    Ok((c.powf(2.0 / b) + z, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn unit_arguments() {
        let (q, z) = q_kernel(1.0, 4.0, 1.0).unwrap();
        assert!((q - (1.0 + FRAC_PI_4)).abs() < 1e-15);
        assert!((z - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn zero_threshold_leaves_bias_term() {
        for b in [2.5, 3.5, 4.0, 6.0] {
            let (q, z) = q_kernel(0.0, b, 10.0).unwrap();
            assert_eq!(z, 0.0);
            assert!((q - 10f64.powf(2.0 / b)).abs() < 1e-15);
            let (q_small, _) = q_kernel(1e-12, b, 10.0).unwrap();
            assert!((q_small - q).abs() < 1e-6);
        }
    }

    #[test]
    fn reference_value_at_exponent_four() {
        let (q, _) = q_kernel(0.5, 4.0, 10.0).unwrap();
        assert!((q - 3.3178).abs() < 5e-5, "{q}");
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for &t in &[1e-3, 0.1, 0.5, 1.0, 3.0, 50.0, 1e4] {
            for &c in &[1e-3, 0.1, 1.0, 10.0, 316.0] {
                let closed = z_kernel(t, 4.0, c).unwrap();
                let numeric = z_kernel_numeric(t, 4.0, c).unwrap();
                assert!(
                    (closed - numeric).abs() < 1e-8 * closed.max(1.0),
                    "t={t} c={c}"
                );
            }
        }
    }

    #[test]
    fn non_integer_exponent_against_simpson() {
        // Independent composite Simpson on a truncated range with a power-law tail correction.
        let (t, b, c) = (0.7f64, 3.5f64, 2.0f64);
        let m = b / 2.0;
        let lo = (c / t).powf(2.0 / b);
        let hi = 2000.0f64;
        let n = 400_000;
        let h = (hi - lo) / n as f64;
        let f = |u: f64| 1.0 / (1.0 + u.powf(m));
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(lo + i as f64 * h);
        }
        let tail = hi.powf(1.0 - m) / (m - 1.0) - hi.powf(1.0 - 2.0 * m) / (2.0 * m - 1.0);
        let oracle = t.powf(2.0 / b) * (s * h / 3.0 + tail);
        let z = z_kernel(t, b, c).unwrap();
        assert!((z - oracle).abs() < 1e-7, "{z} vs {oracle}");
    }

    #[test]
    fn domain_errors() {
        assert!(q_kernel(1.0, 2.0, 1.0).is_err());
        assert!(q_kernel(1.0, 1.5, 1.0).is_err());
        assert!(q_kernel(1.0, 4.0, 0.0).is_err());
        assert!(q_kernel(-1.0, 4.0, 1.0).is_err());
    }
}
