//! Load at the tagged AP.
//!
//! The tagged cell's area is modelled as a size-biased, scaled Poisson–Voronoi
//! cell with gamma shape 3.5, which makes the number of other users at the AP
//! negative binomial with shape 4.5:
//! `p(n) = 3.5^{3.5}/(n−1)! · Γ(n+3.5)/Γ(3.5) · m^{n−1} · (3.5+m)^{−(n+3.5)}`
//! where `m = λ_u A_l / λ_{J(l)}` is the mean number of class users per AP.

use crate::association::{association_probabilities, AssocProbabilities, EMPTY_CLASS};
use crate::error::{HetnetError, Result};
use crate::model::{NetworkConfig, UserClass};
use serde::{Deserialize, Serialize};

/// Gamma shape of the Poisson–Voronoi cell area.
pub const VORONOI_SHAPE: f64 = 3.5;
/// Second moment of the unit-mean Poisson–Voronoi cell area, as used by the
/// mean-load approximation.
pub const AREA_SECOND_MOMENT: f64 = 1.28;
/// Target tail mass left after truncating the PMF.
pub const TAIL_TARGET: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadPmf {
    pub class: UserClass,
    /// Mean number of class users per serving AP, `λ_u A / λ_J`.
    pub intensity: f64,
    /// `masses[i]` is `P(K = i + 1)`.
    pub masses: Vec<f64>,
    pub tail_mass: f64,
}

impl LoadPmf {
    /// Builds the truncated PMF for a given per-AP intensity.
    ///
    /// Truncation stops at the first `n` whose tail is at most [`TAIL_TARGET`],
    /// or at the cap `max(50, 8·mean)`.
    pub fn from_intensity(class: UserClass, intensity: f64) -> Self {
        let m = intensity.max(0.0);
        let mean = 1.0 + m * (VORONOI_SHAPE + 1.0) / VORONOI_SHAPE;
        let cap = (50.0f64).max(8.0 * mean).ceil() as usize;
        let ratio = m / (VORONOI_SHAPE + m);
        // p(1) = (3.5 / (3.5 + m))^{4.5}
        let mut p = (VORONOI_SHAPE / (VORONOI_SHAPE + m)).powf(VORONOI_SHAPE + 1.0);
        let mut masses = Vec::new();
        let mut cumulative = 0.0;
        for n in 1..=cap {
            masses.push(p);
            cumulative += p;
            if 1.0 - cumulative <= TAIL_TARGET {
                break;
            }
            p *= (n as f64 + VORONOI_SHAPE) / n as f64 * ratio;
        }
        LoadPmf {
            class,
            intensity: m,
            masses,
            tail_mass: (1.0 - cumulative).max(0.0),
        }
    }

    pub fn n_max(&self) -> usize {
        self.masses.len()
    }

    /// `P(K = n)` for `n ≥ 1`, zero beyond the truncation point.
    pub fn mass(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.masses.get(n - 1).copied().unwrap_or(0.0)
        }
    }

    /// Mean of the truncated PMF.
    pub fn mean(&self) -> f64 {
        self.masses
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }

    /// Mean of the untruncated PMF, `1 + m·4.5/3.5`.
    pub fn exact_mean(&self) -> f64 {
        1.0 + self.intensity * (VORONOI_SHAPE + 1.0) / VORONOI_SHAPE
    }
}

/// Association weight that loads the class's serving AP.
///
/// Without partitioning both small-cell classes share one resource pool, so
/// their load is that of the whole tier.
pub(crate) fn load_weight(
    cfg: &NetworkConfig,
    assoc: &AssocProbabilities,
    class: UserClass,
) -> f64 {
    match class {
        UserClass::Macro => assoc.a1,
        UserClass::SmallUnbiased | UserClass::Offloaded if !cfg.partitioned() => assoc.a2(),
        other => assoc.get(other),
    }
}

pub(crate) fn load_intensity(
    cfg: &NetworkConfig,
    assoc: &AssocProbabilities,
    class: UserClass,
) -> f64 {
    cfg.user_density * load_weight(cfg, assoc, class) / cfg.tiers[class.serving_tier()].density
}

/// Load PMF seen by a typical user of `class`.
pub fn load_pmf(cfg: &NetworkConfig, class: UserClass) -> Result<LoadPmf> {
    let assoc = association_probabilities(cfg)?;
    if assoc.get(class) <= EMPTY_CLASS {
        return Err(HetnetError::DegenerateClass(class.name()));
    }
    Ok(LoadPmf::from_intensity(
        class,
        load_intensity(cfg, &assoc, class),
    ))
}

/// Mean-load approximation `1 + 1.28·λ_u A / λ_J`.
pub fn mean_load(cfg: &NetworkConfig, class: UserClass) -> Result<f64> {
    let assoc = association_probabilities(cfg)?;
    Ok(1.0 + AREA_SECOND_MOMENT * load_intensity(cfg, &assoc, class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TierConfig;
    use statrs::function::gamma::ln_gamma;

    fn printed_pmf(n: usize, m: f64) -> f64 {
        let n = n as f64;
        (3.5 * 3.5f64.ln() - ln_gamma(n) + ln_gamma(n + 3.5) - ln_gamma(3.5) + (n - 1.0) * m.ln()
            - (n + 3.5) * (3.5 + m).ln())
        .exp()
    }

    #[test]
    fn recursion_matches_gamma_ratio_formula() {
        for m in [0.3, 2.0, 10.0, 38.7] {
            let pmf = LoadPmf::from_intensity(UserClass::Macro, m);
            for n in 1..pmf.n_max() {
                let oracle = printed_pmf(n, m);
                assert!(
                    (pmf.mass(n) - oracle).abs() <= 1e-12 + 1e-10 * oracle,
                    "m={m} n={n}"
                );
            }
        }
    }

    #[test]
    fn vanishing_user_density_puts_mass_on_one() {
        let pmf = LoadPmf::from_intensity(UserClass::Macro, 1e-12);
        assert!((pmf.mass(1) - 1.0).abs() < 1e-10);
        let pmf = LoadPmf::from_intensity(UserClass::Macro, 0.0);
        assert_eq!(pmf.masses, vec![1.0]);
    }

    #[test]
    fn sums_to_one_and_tail_is_small() {
        for m in [0.01, 1.0, 10.0, 50.0, 200.0] {
            let pmf = LoadPmf::from_intensity(UserClass::Macro, m);
            let total: f64 = pmf.masses.iter().sum::<f64>() + pmf.tail_mass;
            assert!((total - 1.0).abs() < 1e-8);
            assert!(
                pmf.tail_mass <= TAIL_TARGET,
                "m={m}: tail {}",
                pmf.tail_mass
            );
            assert!(pmf.masses.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn mean_of_intensity_ten() {
        let pmf = LoadPmf::from_intensity(UserClass::Macro, 10.0);
        // direct summation of the printed formula far into the tail
        let oracle: f64 = (1..2000).map(|n| n as f64 * printed_pmf(n, 10.0)).sum();
        assert!((oracle - 13.857_142_857).abs() < 1e-6);
        assert!((pmf.mean() - oracle).abs() / oracle < 1e-3);
    }

    #[test]
    fn mean_load_constant() {
        let cfg = NetworkConfig::new(
            vec![
                TierConfig::new(1.0, 46.0, 0.0, 4.0),
                TierConfig::new(5.0, 26.0, 10.0, 4.0),
            ],
            100.0,
            -10.0,
            0.5,
        );
        let k = mean_load(&cfg, UserClass::Macro).unwrap();
        assert!((k - (1.0 + 1.28 * 100.0 * 0.387_426)).abs() < 1e-3, "{k}");
        assert!((k - 50.6).abs() < 0.05);
        let zero = mean_load(&NetworkConfig::reference(0.0, 0.5), UserClass::Offloaded).unwrap();
        assert_eq!(zero, 1.0);
    }

    #[test]
    fn degenerate_class_is_an_error() {
        let err = load_pmf(&NetworkConfig::reference(0.0, 0.5), UserClass::Offloaded).unwrap_err();
        assert_eq!(err, HetnetError::DegenerateClass("offloaded"));
    }
}
