//! Association probabilities and conditional serving-distance densities.

use crate::error::{HetnetError, Result};
use crate::model::{NetworkConfig, UserClass};
use crate::two_tier::TwoTier;
use serde::{Deserialize, Serialize};

/// Probabilities that a typical user falls into each class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssocProbabilities {
    pub a1: f64,
    pub a_bbar: f64,
    pub a_b: f64,
}

/// Below this an association probability is treated as an empty class.
pub const EMPTY_CLASS: f64 = 1e-14;

impl AssocProbabilities {
    /// Probability of being served by the small-cell tier (the offload fraction).
    pub fn a2(&self) -> f64 {
        self.a_bbar + self.a_b
    }

    pub fn get(&self, class: UserClass) -> f64 {
        match class {
            UserClass::Macro => self.a1,
            UserClass::SmallUnbiased => self.a_bbar,
            UserClass::Offloaded => self.a_b,
        }
    }

    pub fn sum(&self) -> f64 {
        self.a1 + self.a_bbar + self.a_b
    }
}

/// Association probabilities; uses the rational forms when both tiers share
/// a path-loss exponent.
pub fn association_probabilities(cfg: &NetworkConfig) -> Result<AssocProbabilities> {
    cfg.validate_two_tier()?;
    if cfg.equal_ple() {
        Ok(association_probabilities_equal_ple(cfg))
    } else {
        association_probabilities_integral(cfg)
    }
}

/// Association probabilities from the three radial integrals.
pub fn association_probabilities_integral(cfg: &NetworkConfig) -> Result<AssocProbabilities> {
    let tt = TwoTier::new(cfg)?;
    Ok(AssocProbabilities {
        a1: tt.joint_coverage(UserClass::Macro, 0.0)?,
        a_bbar: tt.joint_coverage(UserClass::SmallUnbiased, 0.0)?,
        a_b: tt.joint_coverage(UserClass::Offloaded, 0.0)?,
    })
}

fn association_probabilities_equal_ple(cfg: &NetworkConfig) -> AssocProbabilities {
    let (m, s) = (cfg.macro_tier(), cfg.small_tier());
    let e = 2.0 / m.ple;
    let a1 = m.density / (m.density + s.density * (s.tx_power * s.bias / m.tx_power).powf(e));
    let a_bbar = s.density / (s.density + m.density * (m.tx_power / s.tx_power).powf(e));
    let a2 = s.density / (s.density + m.density * (m.tx_power / (s.tx_power * s.bias)).powf(e));
    AssocProbabilities {
        a1,
        a_bbar,
        a_b: (a2 - a_bbar).max(0.0),
    }
}

/// Density of the distance to the serving AP given membership of `class`.
pub fn serving_distance_pdf(cfg: &NetworkConfig, class: UserClass, y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(HetnetError::domain(format!(
            "distance must be >= 0, got {y}"
        )));
    }
    let a = association_probabilities(cfg)?.get(class);
    if a <= EMPTY_CLASS {
        return Err(HetnetError::DegenerateClass(class.name()));
    }
    let tt = TwoTier::new(cfg)?;
    Ok(tt.integrand(class, 0.0)?.eval(y) / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TierConfig;
    use crate::quad::integrate_semi_infinite;
    use std::f64::consts::PI;

    fn equal_ple_cfg(bias_db: f64) -> NetworkConfig {
        NetworkConfig::new(
            vec![
                TierConfig::new(1.0, 46.0, 0.0, 4.0),
                TierConfig::new(5.0, 26.0, bias_db, 4.0),
            ],
            100.0,
            -10.0,
            0.5,
        )
    }

    #[test]
    fn symmetric_tiers_split_evenly() {
        let cfg = NetworkConfig::new(
            vec![
                TierConfig::new(2.0, 30.0, 0.0, 3.0),
                TierConfig::new(2.0, 30.0, 0.0, 3.0),
            ],
            10.0,
            -90.0,
            0.3,
        );
        let a = association_probabilities(&cfg).unwrap();
        assert!((a.a1 - 0.5).abs() < 1e-12 && (a.a_bbar - 0.5).abs() < 1e-12 && a.a_b == 0.0);
    }

    #[test]
    fn equal_ple_reference_values() {
        let a = association_probabilities(&equal_ple_cfg(10.0)).unwrap();
        assert!((a.a1 - 0.38743).abs() < 5e-6, "{a:?}");
        assert!((a.a_bbar - 1.0 / 3.0).abs() < 1e-12);
        assert!((a.a_b - 0.27924).abs() < 5e-6);
    }

    #[test]
    fn closed_and_integral_forms_agree() {
        for bias in [0.0, 3.0, 10.0, 20.0, 35.0] {
            let cfg = equal_ple_cfg(bias);
            let c = association_probabilities(&cfg).unwrap();
            let i = association_probabilities_integral(&cfg).unwrap();
            assert!((c.a1 - i.a1).abs() < 1e-8, "bias {bias}");
            assert!((c.a_bbar - i.a_bbar).abs() < 1e-8);
            assert!((c.a_b - i.a_b).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_bias_has_no_offloaded_users() {
        let a = association_probabilities(&NetworkConfig::reference(0.0, 0.0)).unwrap();
        assert_eq!(a.a_b, 0.0);
        assert!((a.sum() - 1.0).abs() < 1e-9);
        let err = serving_distance_pdf(
            &NetworkConfig::reference(0.0, 0.0),
            UserClass::Offloaded,
            0.1,
        );
        assert_eq!(err.unwrap_err(), HetnetError::DegenerateClass("offloaded"));
    }

    #[test]
    fn single_dominant_tier_pdf() {
        let cfg = NetworkConfig::new(
            vec![
                TierConfig::new(1.0, 46.0, 0.0, 3.5),
                TierConfig::new(1e-9, 26.0, 0.0, 4.0),
            ],
            100.0,
            -10.0,
            0.0,
        );
        for y in [0.05, 0.3, 0.8, 1.5] {
            let f = serving_distance_pdf(&cfg, UserClass::Macro, y).unwrap();
            let nn = 2.0 * PI * y * (-PI * y * y).exp();
            assert!((f - nn).abs() < 1e-6, "{f} vs {nn}");
        }
    }

    #[test]
    fn pdfs_normalise_on_reference_config() {
        let cfg = NetworkConfig::reference(10.0, 0.5);
        for class in UserClass::ALL {
            let r = integrate_semi_infinite(
                |y| serving_distance_pdf(&cfg, class, y).unwrap(),
                0.0,
                0.3,
                1e-10,
            )
            .unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "{class:?}: {}", r.value);
        }
    }

    #[test]
    fn negative_distance_rejected() {
        let cfg = NetworkConfig::reference(10.0, 0.5);
        assert!(serving_distance_pdf(&cfg, UserClass::Macro, -1.0).is_err());
    }
}
