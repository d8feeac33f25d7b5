//! Joint search over association bias and partitioning fraction.

use crate::association::association_probabilities;
use crate::error::{HetnetError, Result};
use crate::model::NetworkConfig;
use crate::rate::{rate_coverage_with, rate_percentile, RatePath};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Quantity maximized by [`optimize_joint`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    /// `R(ρ)` at a rate threshold in bit/s.
    RateCoverage { rho: f64 },
    /// The rate exceeded by all but a fraction `q` of users.
    Percentile { q: f64 },
    /// The median rate.
    Median,
}

impl Objective {
    fn validate(&self) -> Result<()> {
        match *self {
            Objective::RateCoverage { rho } if !(rho > 0.0) => {
                Err(HetnetError::config("sweep.objective.rho must be > 0"))
            }
            Objective::Percentile { q } if !(q > 0.0 && q < 1.0) => {
                Err(HetnetError::config("sweep.objective.q must lie in (0, 1)"))
            }
            _ => Ok(()),
        }
    }
}

/// Evaluates an objective for one configuration.
pub fn evaluate_objective(
    cfg: &NetworkConfig,
    objective: Objective,
    path: RatePath,
) -> Result<f64> {
    match objective {
        Objective::RateCoverage { rho } => Ok(rate_coverage_with(cfg, rho, path)?.total),
        Objective::Percentile { q } => Ok(rate_percentile(cfg, q, path)?.rate_bps),
        Objective::Median => Ok(rate_percentile(cfg, 0.5, path)?.rate_bps),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub bias_db: Vec<f64>,
    /// Partitioning fractions; 0 selects the unpartitioned network.
    pub eta: Vec<f64>,
    pub objective: Objective,
    #[serde(default)]
    pub path: RatePath,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.bias_db.is_empty() {
            return Err(HetnetError::config("sweep.bias_db must not be empty"));
        }
        if self.eta.is_empty() {
            return Err(HetnetError::config("sweep.eta must not be empty"));
        }
        if let Some(b) = self.bias_db.iter().find(|b| !b.is_finite()) {
            return Err(HetnetError::config(format!(
                "sweep.bias_db entry {b} is not finite"
            )));
        }
        if let Some(e) = self.eta.iter().find(|e| !(**e >= 0.0 && **e < 1.0)) {
            return Err(HetnetError::config(format!(
                "sweep.eta entry {e} outside [0, 1)"
            )));
        }
        self.objective.validate()
    }

    /// Evenly spaced grid `start, start + step, …` up to `stop` inclusive.
    pub fn steps(start: f64, stop: f64, step: f64) -> Vec<f64> {
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| start + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCell {
    pub bias_db: f64,
    pub eta: f64,
    /// `None` when the objective could not be evaluated.
    pub value: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub bias_db: f64,
    pub eta: f64,
    pub objective: f64,
    /// Fraction of users served by small cells at the optimum.
    pub offload_fraction: f64,
    /// Every cell, bias-major in ascending order.
    pub surface: Vec<SurfaceCell>,
}

impl Optimum {
    pub fn failed_cells(&self) -> impl Iterator<Item = &SurfaceCell> {
        self.surface.iter().filter(|c| c.value.is_none())
    }
}

/// First cell with the largest value in a surface sorted by bias, then eta.
fn best_cell(surface: &[SurfaceCell]) -> Option<&SurfaceCell> {
    let mut best: Option<&SurfaceCell> = None;
    for cell in surface {
        if let Some(v) = cell.value {
            if best.is_none_or(|b| v > b.value.unwrap()) {
                best = Some(cell);
            }
        }
    }
    best
}

/// Evaluates the objective on the whole grid and returns the best cell.
/// Ties go to the smaller bias, then the smaller fraction.
pub fn optimize_joint(cfg: &NetworkConfig, spec: &SweepSpec) -> Result<Optimum> {
    cfg.validate_two_tier()?;
    spec.validate()?;
    let mut biases = spec.bias_db.clone();
    let mut etas = spec.eta.clone();
    biases.sort_by(f64::total_cmp);
    biases.dedup();
    etas.sort_by(f64::total_cmp);
    etas.dedup();
    let cells: Vec<(f64, f64)> = biases
        .iter()
        .flat_map(|&b| etas.iter().map(move |&e| (b, e)))
        .collect();

    let surface: Vec<SurfaceCell> = cells
        .par_iter()
        .map(|&(bias_db, eta)| {
            let at = cfg.clone().with_bias_db(bias_db).with_eta(eta);
            match evaluate_objective(&at, spec.objective, spec.path) {
                Ok(v) => SurfaceCell {
                    bias_db,
                    eta,
                    value: Some(v),
                    error: None,
                },
                Err(e) => SurfaceCell {
                    bias_db,
                    eta,
                    value: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let best = best_cell(&surface).ok_or_else(|| {
        let first = surface
            .first()
            .and_then(|c| c.error.clone())
            .unwrap_or_default();
        HetnetError::domain(format!("objective failed on every grid cell: {first}"))
    })?;
    let at = cfg.clone().with_bias_db(best.bias_db).with_eta(best.eta);
    let offload_fraction = association_probabilities(&at)?.a2();
    Ok(Optimum {
        bias_db: best.bias_db,
        eta: best.eta,
        objective: best.value.unwrap(),
        offload_fraction,
        surface: surface.clone(),
    })
}
