//! Radial integrands shared by association, coverage and the K-tier engine.
//!
//! Every conditional coverage expression has the shape
//! `2πλ_j ∫ y·exp(−Σ cᵢ y^{pᵢ})·[exp(−Σ aᵢ y^{pᵢ}) − exp(−Σ bᵢ y^{pᵢ})] dy`,
//! with the bracket absent for classes defined by a single inequality.

use crate::error::Result;
use crate::quad::integrate_semi_infinite;
use std::f64::consts::PI;

/// Absolute tolerance for the y-integrals of the analytic engine.
pub const ANALYTIC_TOL: f64 = 1e-11;

/// `coef · y^pow`
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PowerTerm {
    pub coef: f64,
    pub pow: f64,
}

impl PowerTerm {
    pub fn new(coef: f64, pow: f64) -> Self {
        PowerTerm { coef, pow }
    }

    #[inline]
    fn at(&self, y: f64) -> f64 {
        if self.coef == 0.0 {
            0.0
        } else if self.pow == 2.0 {
            self.coef * y * y
        } else {
            self.coef * y.powf(self.pow)
        }
    }
}

fn sum_at(terms: &[PowerTerm], y: f64) -> f64 {
    terms.iter().map(|t| t.at(y)).sum()
}

#[derive(Debug, Clone)]
pub(crate) struct RadialIntegrand {
    pub density: f64,
    pub common: Vec<PowerTerm>,
    pub difference: Option<(Vec<PowerTerm>, Vec<PowerTerm>)>,
}

impl RadialIntegrand {
    pub fn eval(&self, y: f64) -> f64 {
        let c = sum_at(&self.common, y);
        let pref = 2.0 * PI * self.density * y;
        match &self.difference {
            None => pref * (-c).exp(),
            Some((a, b)) => {
                let sa = sum_at(a, y);
                let sb = sum_at(b, y);
                let head = (-(c + sa)).exp();
                if head == 0.0 {
                    0.0
                } else {
                    -pref * head * (sa - sb).exp_m1()
                }
            }
        }
    }

    /// Integral over `[0, ∞)` with the given characteristic length.
    pub fn integrate(&self, scale: f64) -> Result<f64> {
        Ok(integrate_semi_infinite(|y| self.eval(y), 0.0, scale, ANALYTIC_TOL)?.value)
    }
}

/// Characteristic nearest-AP distance of the superposed tiers.
pub(crate) fn length_scale(densities: impl Iterator<Item = f64>) -> f64 {
    let total: f64 = densities.sum();
    1.0 / (PI * total).sqrt()
}
