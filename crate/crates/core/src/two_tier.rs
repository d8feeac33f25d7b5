//! Per-class integrands of the two-tier model.

use crate::error::{HetnetError, Result};
use crate::kernel::z_kernel;
use crate::model::{NetworkConfig, UserClass};
use crate::radial::{length_scale, PowerTerm, RadialIntegrand};
use std::f64::consts::PI;

/// Scalar view of a validated two-tier configuration.
#[derive(Debug, Clone)]
pub(crate) struct TwoTier {
    pub lambda: [f64; 2],
    pub power: [f64; 2],
    pub ple: [f64; 2],
    pub activity: [f64; 2],
    pub bias: f64,
    pub noise: f64,
    /// Offloaded users see no macro interference.
    pub protected: bool,
    pub scale: f64,
}

impl TwoTier {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate_two_tier()?;
        let (m, s) = (cfg.macro_tier(), cfg.small_tier());
        Ok(TwoTier {
            lambda: [m.density, s.density],
            power: [m.tx_power, s.tx_power],
            ple: [m.ple, s.ple],
            activity: [m.activity, s.activity],
            bias: s.bias,
            noise: cfg.noise_power,
            protected: cfg.partitioned(),
            scale: length_scale([m.density, s.density].into_iter()),
        })
    }

    /// `exclusion + activity·Z`: density-weighted kernel for one interfering tier.
    fn kernel(&self, k: usize, t: f64, c: f64, interferes: bool) -> Result<f64> {
        let excl = c.powf(2.0 / self.ple[k]);
        if !interferes || t == 0.0 {
            return Ok(excl);
        }
        Ok(excl + self.activity[k] * z_kernel(t, self.ple[k], c)?)
    }

    fn noise_term(&self, j: usize, t: f64) -> Option<PowerTerm> {
        (t > 0.0 && self.noise > 0.0)
            .then(|| PowerTerm::new(t * self.noise / self.power[j], self.ple[j]))
    }

    /// Integrand whose integral is `A_l · S_l(t)` (and `A_l` at `t = 0`).
    pub fn integrand(&self, class: UserClass, t: f64) -> Result<RadialIntegrand> {
        if !(t >= 0.0) {
            return Err(HetnetError::domain(format!(
                "SINR threshold must be >= 0, got {t}"
            )));
        }
        let j = class.serving_tier();
        let k = 1 - j;
        let p_hat = self.power[k] / self.power[j];
        let other = |c: f64, interferes: bool| -> Result<PowerTerm> {
            Ok(PowerTerm::new(
                PI * self.lambda[k]
                    * p_hat.powf(2.0 / self.ple[k])
                    * self.kernel(k, t, c, interferes)?,
                2.0 * self.ple[j] / self.ple[k],
            ))
        };
        let mut common = vec![PowerTerm::new(
            PI * self.lambda[j] * self.kernel(j, t, 1.0, true)?,
            2.0,
        )];
        common.extend(self.noise_term(j, t));

        let difference = match class {
            UserClass::Macro => {
                common.push(other(self.bias, true)?);
                None
            }
            UserClass::SmallUnbiased => {
                common.push(other(1.0, true)?);
                None
            }
            UserClass::Offloaded => {
                let interferes = !self.protected;
                Some((
                    vec![other(1.0 / self.bias, interferes)?],
                    vec![other(1.0, interferes)?],
                ))
            }
        };
        Ok(RadialIntegrand {
            density: self.lambda[j],
            common,
            difference,
        })
    }

    /// `A_l · S_l(t)`; zero for an infinite threshold.
    pub fn joint_coverage(&self, class: UserClass, t: f64) -> Result<f64> {
        if t == f64::INFINITY {
            return Ok(0.0);
        }
        if class == UserClass::Offloaded && self.bias == 1.0 {
            return Ok(0.0);
        }
        self.integrand(class, t)?.integrate(self.scale)
    }
}
