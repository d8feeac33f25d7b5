//! Network description: tiers, users, bandwidth, noise and the partitioning
//! fraction. Quantities are stored in linear units (mW, linear bias); the
//! constructors take the dB values found in configuration files.

use crate::error::{HetnetError, Result};
use serde::{Deserialize, Serialize};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// dBm to mW.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

/// One tier of access points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierConfig {
    /// AP intensity [1/km²].
    pub density: f64,
    /// Transmit power [mW].
    pub tx_power: f64,
    /// Association bias (linear).
    pub bias: f64,
    /// Path-loss exponent.
    pub ple: f64,
    /// Backhaul bandwidth [bit/s]; `None` is unlimited.
    pub backhaul: Option<f64>,
    /// Probability that a non-serving AP transmits.
    pub activity: f64,
}

impl TierConfig {
    pub fn new(density: f64, tx_power_dbm: f64, bias_db: f64, ple: f64) -> Self {
        TierConfig {
            density,
            tx_power: dbm_to_mw(tx_power_dbm),
            bias: db_to_linear(bias_db),
            ple,
            backhaul: None,
            activity: 1.0,
        }
    }

    pub fn with_backhaul_mbps(mut self, mbps: f64) -> Self {
        self.backhaul = Some(mbps * 1e6);
        self
    }

    pub fn with_activity(mut self, activity: f64) -> Self {
        self.activity = activity;
        self
    }

    pub fn bias_db(&self) -> f64 {
        linear_to_db(self.bias)
    }

    fn validate(&self, idx: usize) -> Result<()> {
        let key = |name: &str| format!("tiers[{idx}].{name}");
        if !(self.density > 0.0) || !self.density.is_finite() {
            return Err(HetnetError::config(format!(
                "{} must be > 0",
                key("density_per_km2")
            )));
        }
        if !(self.tx_power > 0.0) || !self.tx_power.is_finite() {
            return Err(HetnetError::config(format!(
                "{} must be finite",
                key("tx_power_dbm")
            )));
        }
        if !(self.ple > 2.0) || !self.ple.is_finite() {
            return Err(HetnetError::config(format!("{} must be > 2", key("ple"))));
        }
        if !(self.bias > 0.0) || !self.bias.is_finite() {
            return Err(HetnetError::config(format!(
                "{} must be finite",
                key("bias_db")
            )));
        }
        if !(self.activity > 0.0 && self.activity <= 1.0) {
            return Err(HetnetError::config(format!(
                "{} must lie in (0, 1]",
                key("activity")
            )));
        }
        if let Some(c) = self.backhaul {
            if !(c > 0.0) {
                return Err(HetnetError::config(format!(
                    "{} must be > 0",
                    key("backhaul_mbps")
                )));
            }
        }
        Ok(())
    }
}

/// A complete scenario. Tier 0 is the macro tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub tiers: Vec<TierConfig>,
    /// User intensity [1/km²].
    pub user_density: f64,
    /// Air-interface bandwidth [Hz].
    pub bandwidth: f64,
    /// Thermal noise [mW].
    pub noise_power: f64,
    /// Fraction of resources on which the macro tier is muted; 0 disables
    /// partitioning altogether.
    pub eta: f64,
}

/// Bandwidth assumed when a configuration does not name one.
pub const DEFAULT_BANDWIDTH_HZ: f64 = 10e6;

impl NetworkConfig {
    pub fn new(tiers: Vec<TierConfig>, user_density: f64, noise_dbm: f64, eta: f64) -> Self {
        NetworkConfig {
            tiers,
            user_density,
            bandwidth: DEFAULT_BANDWIDTH_HZ,
            noise_power: if noise_dbm == f64::NEG_INFINITY {
                0.0
            } else {
                dbm_to_mw(noise_dbm)
            },
            eta,
        }
    }

    /// The validation scenario: λ1 = 1, λ2 = 5, λu = 100 per km², α = (3.5, 4),
    /// P = (46, 26) dBm, σ² = −10 dBm, W = 10 MHz.
    pub fn reference(bias_db: f64, eta: f64) -> Self {
        NetworkConfig::new(
            vec![
                TierConfig::new(1.0, 46.0, 0.0, 3.5),
                TierConfig::new(5.0, 26.0, bias_db, 4.0),
            ],
            100.0,
            -10.0,
            eta,
        )
    }

    pub fn with_bandwidth(mut self, hz: f64) -> Self {
        self.bandwidth = hz;
        self
    }

    pub fn with_noise_mw(mut self, mw: f64) -> Self {
        self.noise_power = mw;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    /// Sets the small-cell bias of a two-tier network.
    pub fn with_bias_db(mut self, bias_db: f64) -> Self {
        if let Some(t) = self.tiers.get_mut(1) {
            t.bias = db_to_linear(bias_db);
        }
        self
    }

    pub fn partitioned(&self) -> bool {
        self.eta > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.tiers.len() < 2 {
            return Err(HetnetError::config("tiers must list at least 2 tiers"));
        }
        for (i, t) in self.tiers.iter().enumerate() {
            t.validate(i)?;
        }
        if (self.tiers[0].bias - 1.0).abs() > 1e-12 {
            return Err(HetnetError::config(
                "tiers[0].bias_db must be 0 (macro tier is unbiased)",
            ));
        }
        if !(self.user_density > 0.0) || !self.user_density.is_finite() {
            return Err(HetnetError::config("user_density_per_km2 must be > 0"));
        }
        if !(self.bandwidth > 0.0) || !self.bandwidth.is_finite() {
            return Err(HetnetError::config("bandwidth_hz must be > 0"));
        }
        if !(self.noise_power >= 0.0) || !self.noise_power.is_finite() {
            return Err(HetnetError::config("noise_dbm must be finite"));
        }
        if !(self.eta >= 0.0 && self.eta < 1.0) {
            return Err(HetnetError::config("eta must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Validates and additionally requires exactly two tiers.
    pub fn validate_two_tier(&self) -> Result<()> {
        self.validate()?;
        if self.tiers.len() != 2 {
            return Err(HetnetError::config(format!(
                "two-tier operation needs exactly 2 tiers, got {}",
                self.tiers.len()
            )));
        }
        Ok(())
    }

    pub fn macro_tier(&self) -> &TierConfig {
        &self.tiers[0]
    }

    pub fn small_tier(&self) -> &TierConfig {
        &self.tiers[1]
    }

    /// True when every tier shares one path-loss exponent.
    pub fn equal_ple(&self) -> bool {
        let a = self.tiers[0].ple;
        self.tiers.iter().all(|t| t.ple == a)
    }
}

/// User classes of the two-tier model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UserClass {
    /// Served by the macro tier.
    Macro,
    /// Served by a small cell that is also its strongest unbiased AP.
    SmallUnbiased,
    /// Range-expanded: strongest unbiased AP is a macro, served by a small cell.
    Offloaded,
}

impl UserClass {
    pub const ALL: [UserClass; 3] = [
        UserClass::Macro,
        UserClass::SmallUnbiased,
        UserClass::Offloaded,
    ];

    /// Zero-based serving tier index.
    pub fn serving_tier(self) -> usize {
        match self {
            UserClass::Macro => 0,
            UserClass::SmallUnbiased | UserClass::Offloaded => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UserClass::Macro => "macro",
            UserClass::SmallUnbiased => "small",
            UserClass::Offloaded => "offloaded",
        }
    }

    /// Inverse of the resource fraction available to the class.
    ///
    /// Without partitioning (`eta == 0`) every class sees all resources.
    pub fn resource_divisor(self, eta: f64) -> f64 {
        if eta == 0.0 {
            return 1.0;
        }
        match self {
            UserClass::Macro | UserClass::SmallUnbiased => 1.0 / (1.0 - eta),
            UserClass::Offloaded => 1.0 / eta,
        }
    }
}

/// Parameters of tier `k` relative to a serving tier `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedParams {
    pub p_hat: f64,
    pub b_hat: f64,
    pub a_hat: f64,
}

impl NormalizedParams {
    pub fn new(cfg: &NetworkConfig, k: usize, j: usize) -> Self {
        let (tk, tj) = (&cfg.tiers[k], &cfg.tiers[j]);
        NormalizedParams {
            p_hat: tk.tx_power / tj.tx_power,
            b_hat: tk.bias / tj.bias,
            a_hat: tk.ple / tj.ple,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_conversions() {
        assert!((dbm_to_mw(46.0) - 39_810.717_055_349_73).abs() < 1e-6);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((linear_to_db(100.0) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn normalisation_is_identity_on_serving_tier() {
        let cfg = NetworkConfig::reference(10.0, 0.5);
        for j in 0..2 {
            let n = NormalizedParams::new(&cfg, j, j);
            assert_eq!((n.p_hat, n.b_hat, n.a_hat), (1.0, 1.0, 1.0));
        }
        let n = NormalizedParams::new(&cfg, 0, 1);
        assert!((n.p_hat - 100.0).abs() < 1e-9);
        assert!((n.b_hat - 0.1).abs() < 1e-12);
        assert!((n.a_hat - 0.875).abs() < 1e-12);
    }

    #[test]
    fn resource_divisors() {
        assert_eq!(UserClass::Macro.resource_divisor(0.0), 1.0);
        assert_eq!(UserClass::Offloaded.resource_divisor(0.0), 1.0);
        assert!((UserClass::Offloaded.resource_divisor(0.25) - 4.0).abs() < 1e-12);
        assert!((UserClass::SmallUnbiased.resource_divisor(0.25) - 4.0 / 3.0).abs() < 1e-12);
        for eta in [0.01, 0.3, 0.99] {
            for c in UserClass::ALL {
                assert!(c.resource_divisor(eta) >= 1.0);
            }
        }
    }

    #[test]
    fn validation_rejects_bad_values() {
        let ok = NetworkConfig::reference(10.0, 0.5);
        ok.validate_two_tier().unwrap();

        let mut bad = ok.clone();
        bad.tiers[1].ple = 2.0;
        assert!(bad
            .validate()
            .unwrap_err()
            .to_string()
            .contains("tiers[1].ple"));

        let mut bad = ok.clone();
        bad.eta = 1.0;
        assert!(bad.validate().is_err());

        let mut bad = ok.clone();
        bad.tiers[0].bias = 2.0;
        assert!(bad.validate().is_err());

        let mut bad = ok.clone();
        bad.tiers[1].activity = 0.0;
        assert!(bad.validate().is_err());

        let mut bad = ok;
        bad.tiers.pop();
        assert!(bad.validate().is_err());
    }
}
