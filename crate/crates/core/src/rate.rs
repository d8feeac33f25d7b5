//! Rate coverage: SINR coverage averaged over the load at the tagged AP.
//!
//! A class-`l` user served by an AP carrying `n` users needs
//! `SINR > 2^{n·ρ/W·G_l} − 1` to reach rate `ρ`.

use crate::association::{association_probabilities, AssocProbabilities, EMPTY_CLASS};
use crate::coverage::Coverage;
use crate::error::{HetnetError, Result};
use crate::load::{load_intensity, LoadPmf, AREA_SECOND_MOMENT};
use crate::model::{NetworkConfig, UserClass};
use crate::two_tier::TwoTier;
use serde::{Deserialize, Serialize};

/// Terms whose remaining contribution falls below this are skipped.
const SUM_CUTOFF: f64 = 1e-13;
/// Worst-case resolution of [`rate_percentile`] [bit/s].
pub const PERCENTILE_TOL_BPS: f64 = 1e3;
/// Relative resolution of [`rate_percentile`], applied when finer.
pub const PERCENTILE_REL_TOL: f64 = 1e-4;

/// Load model used for a rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatePath {
    /// Average over the full load PMF.
    #[default]
    Full,
    /// Replace the load by its mean.
    MeanLoad,
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho >= 0.0) {
        return Err(HetnetError::domain(format!(
            "rate threshold must be >= 0, got {rho}"
        )));
    }
    Ok(())
}

struct RateModel {
    tt: TwoTier,
    assoc: AssocProbabilities,
    cfg: NetworkConfig,
}

impl RateModel {
    fn new(cfg: &NetworkConfig) -> Result<Self> {
        Ok(RateModel {
            tt: TwoTier::new(cfg)?,
            assoc: association_probabilities(cfg)?,
            cfg: cfg.clone(),
        })
    }

    fn active(&self, class: UserClass) -> bool {
        self.assoc.get(class) > EMPTY_CLASS
    }

    fn pmf(&self, class: UserClass) -> LoadPmf {
        LoadPmf::from_intensity(class, load_intensity(&self.cfg, &self.assoc, class))
    }

    /// `A_l·S_l(2^{n·ρ̂·G_l} − 1)`
    fn joint_at_load(&self, class: UserClass, rho: f64, load: f64) -> Result<f64> {
        let x = rho / self.cfg.bandwidth * load * class.resource_divisor(self.cfg.eta);
        self.tt.joint_coverage(class, x.exp2() - 1.0)
    }

    /// Partial sums `Σ_{n ≤ k} p(n)·A_l·S_l(t(n ρ̂ G_l))` for `k = 0..`,
    /// stopping once the remaining mass cannot matter.
    fn partial_sums(
        &self,
        class: UserClass,
        rho: f64,
        pmf: &LoadPmf,
        limit: usize,
    ) -> Result<Vec<f64>> {
        let n_max = pmf.n_max().min(limit);
        // the stopping point must not depend on `limit`
        let mut remaining: f64 = pmf.masses.iter().sum();
        let mut sums = vec![0.0];
        let mut acc = 0.0;
        for n in 1..=n_max {
            let p = pmf.mass(n);
            let joint = self.joint_at_load(class, rho, n as f64)?;
            acc += p * joint;
            sums.push(acc);
            remaining -= p;
            if joint * remaining < SUM_CUTOFF {
                break;
            }
        }
        Ok(sums)
    }

    fn load_sum(&self, class: UserClass, rho: f64, pmf: &LoadPmf, limit: usize) -> Result<f64> {
        Ok(*self.partial_sums(class, rho, pmf, limit)?.last().unwrap())
    }

    fn finish(&self, joints: [f64; 3]) -> Coverage {
        let mut per_class = [None; 3];
        for class in UserClass::ALL {
            if self.active(class) {
                per_class[class as usize] =
                    Some((joints[class as usize] / self.assoc.get(class)).min(1.0));
            }
        }
        Coverage {
            total: joints.iter().sum(),
            per_class,
        }
    }
}

/// Rate coverage `R(ρ)` with the full load distribution.
pub fn rate_coverage(cfg: &NetworkConfig, rho: f64) -> Result<Coverage> {
    check_rho(rho)?;
    let model = RateModel::new(cfg)?;
    let mut joints = [0.0; 3];
    for class in UserClass::ALL {
        if model.active(class) {
            let pmf = model.pmf(class);
            joints[class as usize] = model.load_sum(class, rho, &pmf, usize::MAX)?;
        }
    }
    Ok(model.finish(joints))
}

/// Rate coverage with each class's load replaced by its mean
/// `1 + 1.28·λ_u A_l/λ_J`.
pub fn rate_coverage_mean_load(cfg: &NetworkConfig, rho: f64) -> Result<Coverage> {
    check_rho(rho)?;
    let model = RateModel::new(cfg)?;
    let mut joints = [0.0; 3];
    for class in UserClass::ALL {
        if model.active(class) {
            let k = 1.0 + AREA_SECOND_MOMENT * load_intensity(cfg, &model.assoc, class);
            joints[class as usize] = model.joint_at_load(class, rho, k)?;
        }
    }
    Ok(model.finish(joints))
}

/// Rate coverage via the chosen load model.
pub fn rate_coverage_with(cfg: &NetworkConfig, rho: f64, path: RatePath) -> Result<Coverage> {
    match path {
        RatePath::Full => rate_coverage(cfg, rho),
        RatePath::MeanLoad => rate_coverage_mean_load(cfg, rho),
    }
}

/// Largest admissible load at an AP with backhaul `c` for threshold `rho`:
/// `⌈c/ρ − 1⌉`, or `None` when unlimited.
pub fn backhaul_load_limit(c: Option<f64>, rho: f64) -> Option<i64> {
    let c = c?;
    if rho == 0.0 {
        return None;
    }
    let x = (c / rho - 1.0).ceil();
    Some(if x > i64::MAX as f64 {
        i64::MAX
    } else {
        x as i64
    })
}

fn as_limit(n: Option<i64>) -> usize {
    match n {
        None => usize::MAX,
        Some(n) if n <= 0 => 0,
        Some(n) => n as usize,
    }
}

/// Rate coverage when each AP splits a finite backhaul `C_k` equally among
/// its users, so that a user's rate is `min(R, C_k/K_k)`.
///
/// With partitioning, the loads of the two small-cell classes at an AP are
/// taken as independent; the number of other-class users at the tagged AP
/// follows the other class's load PMF shifted by one.
pub fn rate_coverage_backhaul(cfg: &NetworkConfig, rho: f64) -> Result<Coverage> {
    check_rho(rho)?;
    let model = RateModel::new(cfg)?;
    let n1 = as_limit(backhaul_load_limit(cfg.macro_tier().backhaul, rho));
    let n2 = as_limit(backhaul_load_limit(cfg.small_tier().backhaul, rho));
    let mut joints = [0.0; 3];

    if model.active(UserClass::Macro) {
        let pmf = model.pmf(UserClass::Macro);
        joints[0] = model.load_sum(UserClass::Macro, rho, &pmf, n1)?;
    }

    let small = [UserClass::SmallUnbiased, UserClass::Offloaded];
    if !cfg.partitioned() || n2 == usize::MAX {
        for class in small {
            if model.active(class) {
                let pmf = model.pmf(class);
                joints[class as usize] = model.load_sum(class, rho, &pmf, n2)?;
            }
        }
        return Ok(model.finish(joints));
    }

    for [class, other] in [small, [small[1], small[0]]] {
        if !model.active(class) {
            continue;
        }
        let sums = model.partial_sums(class, rho, &model.pmf(class), n2)?;
        let others = model.pmf(other);
        let partial = |k: usize| sums[k.min(sums.len() - 1)];
        // P(m other-class users) = p_other(m + 1)
        let mut acc = 0.0;
        for m in 0..n2.min(others.n_max()) {
            acc += others.mass(m + 1) * partial(n2 - m);
        }
        joints[class as usize] = acc;
    }
    Ok(model.finish(joints))
}

/// Result of a percentile search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePercentile {
    pub rate_bps: f64,
    /// False when coverage never fell to `1 − q` below the search limit; the
    /// limit itself is then returned.
    pub bracketed: bool,
}

/// Search limit used by [`rate_percentile`], in units of the bandwidth.
pub const DEFAULT_SPECTRAL_LIMIT: f64 = 64.0;

/// The rate `ρ_q` with `R(ρ_q) = 1 − q`, e.g. `q = 0.05` for the rate that all
/// but the worst 5% of users exceed.
pub fn rate_percentile(cfg: &NetworkConfig, q: f64, path: RatePath) -> Result<RatePercentile> {
    rate_percentile_within(cfg, q, path, DEFAULT_SPECTRAL_LIMIT * cfg.bandwidth)
}

/// [`rate_percentile`] with an explicit upper limit `rho_max` on the search.
pub fn rate_percentile_within(
    cfg: &NetworkConfig,
    q: f64,
    path: RatePath,
    rho_max: f64,
) -> Result<RatePercentile> {
    if !(q > 0.0 && q < 1.0) {
        return Err(HetnetError::domain(format!(
            "quantile must lie in (0, 1), got {q}"
        )));
    }
    if !(rho_max > 0.0) {
        return Err(HetnetError::domain(format!(
            "search limit must be > 0, got {rho_max}"
        )));
    }
    let target = 1.0 - q;
    let cov = |rho: f64| rate_coverage_with(cfg, rho, path).map(|c| c.total);

    let mut lo = 0.0;
    let mut hi = cfg.bandwidth.min(rho_max);
    while cov(hi)? > target {
        if hi >= rho_max {
            return Ok(RatePercentile {
                rate_bps: rho_max,
                bracketed: false,
            });
        }
        lo = hi;
        hi = (2.0 * hi).min(rho_max);
    }
    while hi - lo > PERCENTILE_TOL_BPS.min(PERCENTILE_REL_TOL * hi) {
        let mid = 0.5 * (lo + hi);
        if cov(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RatePercentile {
        rate_bps: 0.5 * (lo + hi),
        bracketed: true,
    })
}
