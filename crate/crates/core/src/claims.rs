//! Machine checks of the bias trends of the path-loss-exponent-4 closed
//! forms.

use crate::closed::{
    sinr_alpha4_bias_derivative, sinr_coverage_alpha4_closed, sinr_coverage_alpha4_unbounded_bias,
    v_of, ClosedFormParams,
};
use crate::error::{HetnetError, Result};
use serde::{Deserialize, Serialize};

/// Largest derivative tolerated before a point counts as increasing.
pub const DERIVATIVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativePoint {
    pub a: f64,
    pub p: f64,
    pub b: f64,
    pub t: f64,
    /// Central difference of unpartitioned coverage in the bias.
    pub derivative: f64,
    /// `t ≥ 1`; points below are reported but not judged.
    pub in_scope: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasMonotonicityReport {
    pub points: Vec<DerivativePoint>,
    /// Largest derivative over in-scope points.
    pub max_derivative: f64,
    pub passed: bool,
}

/// Checks that, without partitioning, coverage never increases with the
/// bias for `b ≥ 1` and `t ≥ 1`.
pub fn check_claim1(
    ap_grid: &[(f64, f64)],
    b_grid: &[f64],
    t_grid: &[f64],
) -> Result<BiasMonotonicityReport> {
    if let Some(b) = b_grid.iter().find(|&&b| !(b >= 1.0)) {
        return Err(HetnetError::domain(format!(
            "bias grid must be >= 1, got {b}"
        )));
    }
    let mut points = Vec::with_capacity(ap_grid.len() * b_grid.len() * t_grid.len());
    for &(a, p) in ap_grid {
        for &b in b_grid {
            let params = ClosedFormParams::new(a, p, b)?;
            for &t in t_grid {
                let derivative = sinr_alpha4_bias_derivative(params, t, false)?;
                points.push(DerivativePoint {
                    a,
                    p,
                    b,
                    t,
                    derivative,
                    in_scope: t >= 1.0,
                });
            }
        }
    }
    let max_derivative = points
        .iter()
        .filter(|p| p.in_scope)
        .map(|p| p.derivative)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BiasMonotonicityReport {
        passed: max_derivative <= DERIVATIVE_TOL,
        max_derivative,
        points,
    })
}

/// Bounds on the roots of the stationarity polynomial of partitioned
/// coverage in `x = √b`, with `atan(z) ≈ z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Coefficients of `x⁴, x³, x², x, 1`.
    pub coefficients: [f64; 5],
    /// Bound on the positive root.
    pub upper: f64,
    /// Bound on the magnitude of the negative roots.
    pub lower: f64,
    /// `max(upper², lower²)`, an upper bound on the coverage-maximizing bias.
    pub bias_bound: f64,
    pub v: f64,
}

pub fn bias_upper_bound(a: f64, p: f64, t: f64) -> Result<BoundReport> {
    if !(a > 0.0 && p > 0.0 && t > 0.0) {
        return Err(HetnetError::domain(format!(
            "bias bound needs a, p, t > 0: a={a} p={p} t={t}"
        )));
    }
    let v = v_of(t);
    if !(v > 1.0) {
        return Err(HetnetError::domain(format!(
            "degenerate threshold t={t}: v = {v}"
        )));
    }
    let c = a * p.sqrt();
    let c2 = a * a * p;
    let lead = c2 * (v * v - 1.0);
    let quad = v * v - 1.0 + c2 * t * (v * v + 2.0);
    let constant = c2 * t * t + t;
    let coefficients = [
        lead,
        2.0 * c * v * (1.0 - t),
        -quad,
        -4.0 * c * v * t,
        -constant,
    ];

    let cubic_gap = 2.0 * c * v * (t - 1.0).abs() / lead;
    let linear = 4.0 * c * v / lead;
    let (upper, lower) = if t <= 1.0 {
        (
            (3.0 * quad / lead)
                .sqrt()
                .max((3.0 * linear).cbrt())
                .max((3.0 * constant / lead).powf(0.25)),
            (3.0 * cubic_gap)
                .max((3.0 * quad / lead).sqrt())
                .max((3.0 * constant / lead).powf(0.25)),
        )
    } else {
        (
            (4.0 * cubic_gap)
                .max((4.0 * quad / lead).sqrt())
                .max((4.0 * linear).cbrt())
                .max((4.0 * constant / lead).powf(0.25)),
            (2.0 * quad / lead)
                .sqrt()
                .max((2.0 * constant / lead).powf(0.25)),
        )
    };
    Ok(BoundReport {
        coefficients,
        upper,
        lower,
        bias_bound: (upper * upper).max(lower * lower),
        v,
    })
}

/// Coverage with no bias against coverage with every macro user offloaded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullOffloadReport {
    pub s_at_b1: f64,
    pub s_at_binf: f64,
    /// `s_at_b1 − s_at_binf`.
    pub margin: f64,
    /// The same margin from the simplified rational expression.
    pub margin_rational: f64,
    /// The rational expression with the power ratio dropped; only its sign
    /// is meaningful.
    pub margin_density_only: f64,
}

impl FullOffloadReport {
    pub fn passed(&self) -> bool {
        self.margin > 0.0
    }
}

fn rational_margin(v: f64, c: f64) -> f64 {
    (v * v - v) / (v * (v + 1.0 / c) * (v + c * v))
}

pub fn check_claim3(a: f64, p: f64, t: f64) -> Result<FullOffloadReport> {
    if !(t > 0.0) {
        return Err(HetnetError::domain(format!(
            "threshold must be > 0, got {t}"
        )));
    }
    let s_at_b1 = sinr_coverage_alpha4_closed(ClosedFormParams::new(a, p, 1.0)?, t, true)?;
    let s_at_binf = sinr_coverage_alpha4_unbounded_bias(a, p, t)?;
    let v = v_of(t);
    Ok(FullOffloadReport {
        s_at_b1,
        s_at_binf,
        margin: s_at_b1 - s_at_binf,
        margin_rational: rational_margin(v, a * p.sqrt()),
        margin_density_only: rational_margin(v, a),
    })
}
