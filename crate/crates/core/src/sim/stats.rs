//! Empirical curves and histograms from simulated probes.

use super::ProbeResult;
use crate::ccdf::{CcdfCurve, CurveKind};
use crate::error::{HetnetError, Result};
use crate::model::UserClass;
use serde::{Deserialize, Serialize};

/// Fewest probes accepted by [`empirical_ccdf`].
pub const MIN_CCDF_SAMPLES: usize = 100;
/// Fewest probes of the class accepted by [`empirical_load_pmf`].
pub const MIN_LOAD_SAMPLES: usize = 1000;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Sinr,
    Rate,
    RateBackhaul,
}

impl Metric {
    fn of(self, p: &ProbeResult) -> f64 {
        match self {
            Metric::Sinr => p.sinr,
            Metric::Rate => p.rate,
            Metric::RateBackhaul => p.rate_backhaul,
        }
    }
}

/// Fraction of probes whose metric exceeds each threshold, with normal
/// approximation 95% halfwidths.
pub fn empirical_ccdf(
    results: &[ProbeResult],
    thresholds: &[f64],
    metric: Metric,
) -> Result<CcdfCurve> {
    if results.len() < MIN_CCDF_SAMPLES {
        return Err(HetnetError::InsufficientSamples {
            needed: MIN_CCDF_SAMPLES,
            got: results.len(),
        });
    }
    let mut xs: Vec<f64> = results.iter().map(|p| metric.of(p)).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let values: Vec<f64> = thresholds
        .iter()
        .map(|&t| (xs.len() - xs.partition_point(|&x| x <= t)) as f64 / n)
        .collect();
    let halfwidths = values
        .iter()
        .map(|&p| Z95 * (p * (1.0 - p) / n).sqrt())
        .collect();
    let kind = if metric == Metric::Sinr {
        CurveKind::Sinr
    } else {
        CurveKind::Rate
    };
    let mut c = CcdfCurve::new(kind, thresholds.to_vec(), values)?;
    c.halfwidths = Some(halfwidths);
    Ok(c)
}

/// Normalized histogram of the loads seen by probes of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadHistogram {
    pub class: UserClass,
    /// `masses[i]` is the fraction of probes with load `i + 1`.
    pub masses: Vec<f64>,
    pub samples: usize,
}

impl LoadHistogram {
    pub fn mean(&self) -> f64 {
        self.masses
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }

    /// Total variation distance to a PMF given by `mass(n)` for `n ≥ 1`.
    pub fn total_variation(&self, mass: impl Fn(usize) -> f64, n_max: usize) -> f64 {
        let n = n_max.max(self.masses.len());
        let mut covered = 0.0;
        let mut tv = 0.0;
        for k in 1..=n {
            let q = mass(k);
            covered += q;
            tv += (self.masses.get(k - 1).copied().unwrap_or(0.0) - q).abs();
        }
        0.5 * (tv + (1.0 - covered).max(0.0))
    }
}

pub fn empirical_load_pmf(results: &[ProbeResult], class: UserClass) -> Result<LoadHistogram> {
    let loads: Vec<usize> = results
        .iter()
        .filter(|p| p.class == class)
        .map(|p| p.load)
        .collect();
    if loads.len() < MIN_LOAD_SAMPLES {
        return Err(HetnetError::InsufficientSamples {
            needed: MIN_LOAD_SAMPLES,
            got: loads.len(),
        });
    }
    let top = loads.iter().copied().max().unwrap_or(1);
    let mut masses = vec![0.0; top];
    for &l in &loads {
        masses[l - 1] += 1.0;
    }
    let n = loads.len() as f64;
    masses.iter_mut().for_each(|m| *m /= n);
    Ok(LoadHistogram {
        class,
        masses,
        samples: loads.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe(sinr: f64, load: usize) -> ProbeResult {
        ProbeResult {
            class: UserClass::Macro,
            serving_tier: 0,
            serving_distance: 0.1,
            signal: sinr,
            interference: vec![1.0, 0.0],
            protected: false,
            noise: 0.0,
            sinr,
            load,
            load_unbiased: load,
            load_offloaded: 0,
            rate: sinr,
            rate_backhaul: sinr,
        }
    }

    #[test]
    fn all_above_threshold() {
        let res: Vec<_> = (0..150).map(|i| probe(10.0 + i as f64, 1)).collect();
        let c = empirical_ccdf(&res, &[1.0, 5.0], Metric::Sinr).unwrap();
        assert_eq!(c.values, vec![1.0, 1.0]);
        assert_eq!(c.halfwidths.unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn monotone_and_order_free() {
        let mut res: Vec<_> = (0..200)
            .map(|i| probe(((i * 37) % 101) as f64, 1))
            .collect();
        let th: Vec<f64> = (0..20).map(|i| i as f64 * 5.0).collect();
        let a = empirical_ccdf(&res, &th, Metric::Rate).unwrap();
        assert!(a.is_non_increasing(0.0));
        res.reverse();
        assert_eq!(a, empirical_ccdf(&res, &th, Metric::Rate).unwrap());
    }

    #[test]
    fn too_few_samples() {
        let res: Vec<_> = (0..99).map(|_| probe(1.0, 1)).collect();
        assert!(matches!(
            empirical_ccdf(&res, &[1.0], Metric::Sinr),
            Err(HetnetError::InsufficientSamples {
                needed: 100,
                got: 99
            })
        ));
        assert!(empirical_load_pmf(&res, UserClass::Macro).is_err());
    }

    #[test]
    fn histogram_of_unit_loads() {
        let res: Vec<_> = (0..1000).map(|_| probe(1.0, 1)).collect();
        let h = empirical_load_pmf(&res, UserClass::Macro).unwrap();
        assert_eq!(h.masses, vec![1.0]);
        assert_eq!(
            h.total_variation(|n| if n == 1 { 1.0 } else { 0.0 }, 1),
            0.0
        );
    }
}
