//! Closed forms for a common path-loss exponent of 4 without noise.
//!
//! With `a = λ2/λ1`, `p = P2/P1`, `b = B2/B1` and `v(t) = √t·atan(√t) + 1`,
//! every `Q` kernel reduces to arctangents.

use crate::association::association_probabilities;
use crate::error::{HetnetError, Result};
use crate::load::{load_intensity, AREA_SECOND_MOMENT};
use crate::model::{NetworkConfig, UserClass};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormParams {
    /// Density ratio λ2/λ1.
    pub a: f64,
    /// Power ratio P2/P1.
    pub p: f64,
    /// Bias ratio B2/B1.
    pub b: f64,
}

impl ClosedFormParams {
    pub fn new(a: f64, p: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && p > 0.0 && b > 0.0) || !(a.is_finite() && p.is_finite()) {
            return Err(HetnetError::domain(format!(
                "closed-form ratios must be positive: a={a} p={p} b={b}"
            )));
        }
        Ok(ClosedFormParams { a, p, b })
    }

    /// Extracts the ratios from a two-tier config with `α ≡ 4`, no noise and
    /// fully active tiers.
    pub fn from_config(cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate_two_tier()?;
        if cfg.tiers.iter().any(|t| t.ple != 4.0) {
            return Err(HetnetError::domain(
                "closed forms need path-loss exponent 4 on every tier",
            ));
        }
        if cfg.noise_power != 0.0 {
            return Err(HetnetError::domain("closed forms assume zero noise"));
        }
        if cfg.tiers.iter().any(|t| t.activity != 1.0) {
            return Err(HetnetError::domain(
                "closed forms assume fully active tiers",
            ));
        }
        let (m, s) = (cfg.macro_tier(), cfg.small_tier());
        ClosedFormParams::new(
            s.density / m.density,
            s.tx_power / m.tx_power,
            s.bias / m.bias,
        )
    }

    fn c(&self) -> f64 {
        self.a * self.p.sqrt()
    }
}

/// `√t·atan(√t) + 1`, i.e. `Q(t, 4, 1)`.
pub fn v_of(t: f64) -> f64 {
    let r = t.sqrt();
    r * r.atan() + 1.0
}

fn check_threshold(t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(HetnetError::domain(format!(
            "threshold must be >= 0, got {t}"
        )));
    }
    Ok(())
}

fn macro_term(c: f64, b: f64, t: f64) -> f64 {
    1.0 / (v_of(t) + c * (t.sqrt() * (t / b).sqrt().atan() + b.sqrt()))
}

fn unprotected_small_term(c: f64, b: f64, t: f64) -> f64 {
    1.0 / (v_of(t) + (t.sqrt() * (b * t).sqrt().atan() + (1.0 / b).sqrt()) / c)
}

fn small_unbiased_term(c: f64, t: f64) -> f64 {
    let v = v_of(t);
    1.0 / (v + v / c)
}

fn protected_offloaded_term(c: f64, b: f64, t: f64) -> f64 {
    let v = v_of(t);
    1.0 / (v + 1.0 / (c * b.sqrt())) - 1.0 / (v + 1.0 / c)
}

/// SINR coverage with (`partitioned`) or without resource partitioning.
pub fn sinr_coverage_alpha4_closed(
    params: ClosedFormParams,
    t: f64,
    partitioned: bool,
) -> Result<f64> {
    check_threshold(t)?;
    let (c, b) = (params.c(), params.b);
    Ok(if partitioned {
        macro_term(c, b, t) + small_unbiased_term(c, t) + protected_offloaded_term(c, b, t)
    } else {
        macro_term(c, b, t) + unprotected_small_term(c, b, t)
    })
}

/// Partitioned coverage in the limit `b → ∞`:
/// `1/(v + v/(a√p)) + 1/v − 1/(v + 1/(a√p))`.
pub fn sinr_coverage_alpha4_unbounded_bias(a: f64, p: f64, t: f64) -> Result<f64> {
    check_threshold(t)?;
    let params = ClosedFormParams::new(a, p, 1.0)?;
    let (c, v) = (params.c(), v_of(t));
    Ok(1.0 / (v + v / c) + 1.0 / v - 1.0 / (v + 1.0 / c))
}

/// Mean-load rate coverage in closed form.
///
/// Each class's rate threshold is `u_l = 2^{ρ/W · K̄_l · G_l} − 1`; the
/// no-partitioning form uses the tier-2 load for every small-cell user.
pub fn rate_coverage_mean_load_closed(cfg: &NetworkConfig, rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(HetnetError::domain(format!(
            "rate threshold must be >= 0, got {rho}"
        )));
    }
    let params = ClosedFormParams::from_config(cfg)?;
    let assoc = association_probabilities(cfg)?;
    let rho_hat = rho / cfg.bandwidth;
    let u = |class: UserClass| {
        let k = 1.0 + AREA_SECOND_MOMENT * load_intensity(cfg, &assoc, class);
        (rho_hat * k * class.resource_divisor(cfg.eta)).exp2() - 1.0
    };
    let (c, b) = (params.c(), params.b);
    let u1 = u(UserClass::Macro);
    Ok(if cfg.partitioned() {
        macro_term(c, b, u1)
            + small_unbiased_term(c, u(UserClass::SmallUnbiased))
            + protected_offloaded_term(c, b, u(UserClass::Offloaded))
    } else {
        macro_term(c, b, u1) + unprotected_small_term(c, b, u(UserClass::SmallUnbiased))
    })
}

/// Coverage change per unit bias, used by the claim checks.
pub(crate) fn sinr_alpha4_bias_derivative(
    params: ClosedFormParams,
    t: f64,
    partitioned: bool,
) -> Result<f64> {
    let b = params.b;
    let h = 1e-5 * b;
    let up = sinr_coverage_alpha4_closed(ClosedFormParams { b: b + h, ..params }, t, partitioned)?;
    let down =
        sinr_coverage_alpha4_closed(ClosedFormParams { b: b - h, ..params }, t, partitioned)?;
    Ok((up - down) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(b: f64) -> ClosedFormParams {
        ClosedFormParams::new(5.0, 0.01, b).unwrap()
    }

    #[test]
    fn unit_bias_coincides_across_modes() {
        let w = sinr_coverage_alpha4_closed(params(1.0), 1.0, false).unwrap();
        let s = sinr_coverage_alpha4_closed(params(1.0), 1.0, true).unwrap();
        assert!((w - s).abs() < 1e-12);
        assert!((s - 0.560099).abs() < 1e-6, "{s}");
    }

    #[test]
    fn unbounded_bias_limit() {
        let lim = sinr_coverage_alpha4_unbounded_bias(5.0, 0.01, 1.0).unwrap();
        assert!((lim - 0.482625).abs() < 2e-6, "{lim}");
        let far = sinr_coverage_alpha4_closed(params(1e14), 1.0, true).unwrap();
        assert!((far - lim).abs() < 1e-5);
    }

    #[test]
    fn zero_threshold_is_full_coverage() {
        for b in [1.0, 10.0, 100.0] {
            for part in [false, true] {
                let s = sinr_coverage_alpha4_closed(params(b), 0.0, part).unwrap();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn derivative_vanishes_at_unit_bias() {
        for t in [0.5, 1.0, 4.0] {
            let d = sinr_alpha4_bias_derivative(params(1.0), t, false).unwrap();
            assert!(d.abs() < 1e-9, "t={t}: {d}");
        }
    }

    #[test]
    fn rejects_non_alpha4_configs() {
        let cfg = NetworkConfig::reference(10.0, 0.5);
        assert!(ClosedFormParams::from_config(&cfg).is_err());
    }
}
