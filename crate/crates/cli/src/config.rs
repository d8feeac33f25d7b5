//! Experiment file schema and its conversion to the model types.

use hetnet::ccdf::threshold_grid;
use hetnet::optimize::SweepSpec;
use hetnet::sim::{SimOptions, DEFAULT_WINDOW_KM};
use hetnet::{NetworkConfig, TierConfig};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// A configuration problem, reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierSpec {
    pub density_per_km2: f64,
    pub tx_power_dbm: f64,
    #[serde(default)]
    pub bias_db: f64,
    pub ple: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backhaul_mbps: Option<f64>,
    #[serde(default = "unit")]
    pub activity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdKind {
    Sinr,
    Rate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

/// Threshold grid. SINR grids are given in dB and spaced evenly in dB; rate
/// grids are given in bit/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSpec {
    pub kind: ThresholdKind,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    #[serde(default = "default_window")]
    pub window_km: f64,
    #[serde(default = "default_drops")]
    pub drops: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec {
            window_km: default_window(),
            drops: default_drops(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub tiers: Vec<TierSpec>,
    pub user_density_per_km2: f64,
    #[serde(default = "default_bandwidth")]
    pub bandwidth_hz: f64,
    /// Thermal noise; `null` or absent means a noise-free network.
    #[serde(default)]
    pub noise_dbm: Option<f64>,
    #[serde(default)]
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdSpec>,
    #[serde(default)]
    pub mc: McSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn unit() -> f64 {
    1.0
}

fn default_window() -> f64 {
    DEFAULT_WINDOW_KM
}

fn default_drops() -> usize {
    2000
}

fn default_seed() -> u64 {
    1
}

fn default_bandwidth() -> f64 {
    hetnet::model::DEFAULT_BANDWIDTH_HZ
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), ConfigError> {
        self.network()?;
        if let Some(th) = &self.thresholds {
            grid(th)?;
        }
        if !(self.mc.window_km > 0.0) || !self.mc.window_km.is_finite() {
            return Err(ConfigError("mc.window_km must be > 0".into()));
        }
        if self.mc.drops == 0 {
            return Err(ConfigError("mc.drops must be > 0".into()));
        }
        if let Some(sweep) = &self.sweep {
            sweep.validate().map_err(|e| ConfigError(strip(e)))?;
        }
        Ok(())
    }

    pub fn network(&self) -> Result<NetworkConfig, ConfigError> {
        let tiers = self
            .tiers
            .iter()
            .map(|t| {
                let mut tier = TierConfig::new(t.density_per_km2, t.tx_power_dbm, t.bias_db, t.ple)
                    .with_activity(t.activity);
                if let Some(c) = t.backhaul_mbps {
                    tier = tier.with_backhaul_mbps(c);
                }
                tier
            })
            .collect();
        let noise = self.noise_dbm.unwrap_or(f64::NEG_INFINITY);
        let cfg = NetworkConfig::new(tiers, self.user_density_per_km2, noise, self.eta)
            .with_bandwidth(self.bandwidth_hz);
        cfg.validate().map_err(|e| ConfigError(strip(e)))?;
        for (i, t) in self.tiers.iter().enumerate() {
            if let Some(c) = t.backhaul_mbps {
                if !(c > 0.0) {
                    return Err(ConfigError(format!("tiers[{i}].backhaul_mbps must be > 0")));
                }
            }
        }
        Ok(cfg)
    }

    /// Thresholds of the requested kind as written: dB for SINR, bit/s for
    /// rate. Falls back to a default grid when the file names none or names
    /// the other kind.
    pub fn thresholds(&self, kind: ThresholdKind) -> Result<Vec<f64>, ConfigError> {
        match &self.thresholds {
            Some(th) if th.kind == kind => grid(th),
            _ => grid(&default_thresholds(kind)),
        }
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            window_km: self.mc.window_km,
            drops: self.mc.drops,
            seed: self.mc.seed,
        }
    }
}

pub fn default_thresholds(kind: ThresholdKind) -> ThresholdSpec {
    match kind {
        ThresholdKind::Sinr => ThresholdSpec {
            kind,
            start: -10.0,
            stop: 20.0,
            points: 31,
            scale: Scale::Linear,
        },
        ThresholdKind::Rate => ThresholdSpec {
            kind,
            start: 1e4,
            stop: 1e7,
            points: 20,
            scale: Scale::Log,
        },
    }
}

fn grid(th: &ThresholdSpec) -> Result<Vec<f64>, ConfigError> {
    if th.kind == ThresholdKind::Sinr && th.scale == Scale::Log {
        return Err(ConfigError(
            "thresholds.scale must be linear for sinr thresholds (given in dB)".into(),
        ));
    }
    threshold_grid(th.start, th.stop, th.points, th.scale == Scale::Log)
        .map_err(|e| ConfigError(format!("thresholds: {}", strip(e))))
}

fn strip(e: hetnet::HetnetError) -> String {
    match e {
        hetnet::HetnetError::InvalidConfig(msg) | hetnet::HetnetError::InvalidDomain(msg) => msg,
        other => other.to_string(),
    }
}
