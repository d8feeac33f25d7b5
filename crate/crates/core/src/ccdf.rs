//! Coverage curves.

use crate::coverage::sinr_coverage;
use crate::error::{HetnetError, Result};
use crate::model::NetworkConfig;
use crate::rate::{rate_coverage_backhaul, rate_coverage_with, RatePath};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// Thresholds are linear SINR values.
    Sinr,
    /// Thresholds are rates in bit/s.
    Rate,
}

/// A CCDF sampled at ascending thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    pub kind: CurveKind,
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
    /// 95% confidence halfwidths, present for empirical curves.
    pub halfwidths: Option<Vec<f64>>,
}

impl CcdfCurve {
    pub fn new(kind: CurveKind, thresholds: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if thresholds.len() != values.len() {
            return Err(HetnetError::domain(
                "thresholds and values differ in length",
            ));
        }
        if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(HetnetError::domain("thresholds must be strictly ascending"));
        }
        Ok(CcdfCurve {
            kind,
            thresholds,
            values,
            halfwidths: None,
        })
    }

    /// Largest absolute pointwise difference to another curve on the same grid.
    pub fn sup_gap(&self, other: &CcdfCurve) -> Result<f64> {
        if self.thresholds != other.thresholds {
            return Err(HetnetError::domain(
                "curves are sampled on different thresholds",
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// True if the values never increase by more than `slack`.
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

fn curve(
    kind: CurveKind,
    thresholds: &[f64],
    f: impl Fn(f64) -> Result<f64> + Sync,
) -> Result<CcdfCurve> {
    let values = thresholds
        .par_iter()
        .map(|&t| f(t))
        .collect::<Result<Vec<_>>>()?;
    CcdfCurve::new(kind, thresholds.to_vec(), values)
}

pub fn sinr_ccdf(cfg: &NetworkConfig, thresholds: &[f64]) -> Result<CcdfCurve> {
    curve(CurveKind::Sinr, thresholds, |t| {
        Ok(sinr_coverage(cfg, t)?.total)
    })
}

pub fn rate_ccdf(cfg: &NetworkConfig, thresholds: &[f64], path: RatePath) -> Result<CcdfCurve> {
    curve(CurveKind::Rate, thresholds, |r| {
        Ok(rate_coverage_with(cfg, r, path)?.total)
    })
}

pub fn rate_backhaul_ccdf(cfg: &NetworkConfig, thresholds: &[f64]) -> Result<CcdfCurve> {
    curve(CurveKind::Rate, thresholds, |r| {
        Ok(rate_coverage_backhaul(cfg, r)?.total)
    })
}

/// `points` values from `start` to `stop` inclusive, evenly spaced on a
/// linear or logarithmic axis.
pub fn threshold_grid(start: f64, stop: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if points == 0 || !(start < stop) || (log && !(start > 0.0)) {
        return Err(HetnetError::domain(format!(
            "bad threshold grid: {start}..{stop} ({points} points)"
        )));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    let step = |i: usize| i as f64 / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => start,
            _ if i == points - 1 => stop,
            _ if log => 10f64.powf(start.log10() + (stop.log10() - start.log10()) * step(i)),
            _ => start + (stop - start) * step(i),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = threshold_grid(1e4, 1e7, 20, true).unwrap();
        assert_eq!(g.len(), 20);
        assert!((g[0] - 1e4).abs() < 1e-6 && (g[19] - 1e7).abs() < 1e-3);
        assert!(threshold_grid(0.0, 1.0, 5, true).is_err());
    }

    #[test]
    fn analytic_curves_are_monotone() {
        let cfg = NetworkConfig::reference(10.0, 0.5);
        let g = threshold_grid(1e4, 1e7, 8, true).unwrap();
        let c = rate_ccdf(&cfg, &g, RatePath::Full).unwrap();
        assert!(c.is_non_increasing(0.0));
        assert!(c.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
