//! SINR coverage of a tier-`j` user in a K-tier network.
//!
//! Users of tier `j` split into the unbiased set (tier `j` is strongest even
//! without bias) and the offloaded set (served only thanks to the bias). With
//! partitioning, offloaded users see no macro interference.

use crate::association::EMPTY_CLASS;
use crate::error::{HetnetError, Result};
use crate::kernel::z_kernel;
use crate::model::NetworkConfig;
use crate::radial::{length_scale, PowerTerm, RadialIntegrand};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which expression to use for the offloaded set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum KTierForm {
    /// Probability of the biased-association event minus that of the
    /// unbiased one.
    #[default]
    Exact,
    /// Product over tiers of per-tier offloading factors, for partitioned
    /// networks only. Coincides with `Exact` for two tiers and undercounts
    /// the offloaded set for more.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KTierCoverage {
    /// Conditional coverage of the unbiased set; `None` if the set is empty.
    pub s_unbiased: Option<f64>,
    /// Conditional coverage of the offloaded set; `None` if the set is empty.
    pub s_offloaded: Option<f64>,
    pub a_unbiased: f64,
    pub a_offloaded: f64,
}

struct Tiers<'a> {
    cfg: &'a NetworkConfig,
    j: usize,
    t: f64,
}

impl Tiers<'_> {
    fn p_hat(&self, k: usize) -> f64 {
        self.cfg.tiers[k].tx_power / self.cfg.tiers[self.j].tx_power
    }

    fn pow(&self, k: usize) -> f64 {
        2.0 * self.cfg.tiers[self.j].ple / self.cfg.tiers[k].ple
    }

    /// `πλ_k P̂_k^{2/α_k} (c^{2/α_k} + act·Z)` with `Z` dropped when tier `k`
    /// does not interfere.
    fn term(&self, k: usize, c: f64, interferes: bool) -> Result<PowerTerm> {
        let tier = &self.cfg.tiers[k];
        let e = 2.0 / tier.ple;
        let mut kern = c.powf(e);
        if interferes && self.t > 0.0 {
            kern += tier.activity * z_kernel(self.t, tier.ple, c)?;
        }
        Ok(PowerTerm::new(
            PI * tier.density * self.p_hat(k).powf(e) * kern,
            self.pow(k),
        ))
    }

    fn head(&self) -> Result<Vec<PowerTerm>> {
        let mut v = vec![self.term(self.j, 1.0, true)?];
        let noise = self.cfg.noise_power;
        if self.t > 0.0 && noise > 0.0 {
            let serving = &self.cfg.tiers[self.j];
            v.push(PowerTerm::new(
                self.t * noise / serving.tx_power,
                serving.ple,
            ));
        }
        Ok(v)
    }

    fn others(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cfg.tiers.len()).filter(move |&k| k != self.j)
    }

    fn protected(&self, k: usize) -> bool {
        k == 0 && self.cfg.partitioned()
    }

    fn unbiased(&self) -> Result<RadialIntegrand> {
        let mut common = self.head()?;
        for k in self.others() {
            common.push(self.term(k, self.cfg.tiers[k].bias, true)?);
        }
        Ok(RadialIntegrand {
            density: self.cfg.tiers[self.j].density,
            common,
            difference: None,
        })
    }

    fn offloaded_exact(&self) -> Result<RadialIntegrand> {
        let bj = self.cfg.tiers[self.j].bias;
        let (mut biased, mut unbiased) = (Vec::new(), Vec::new());
        for k in self.others() {
            let bk = self.cfg.tiers[k].bias;
            let interferes = !self.protected(k);
            biased.push(self.term(k, bk / bj, interferes)?);
            unbiased.push(self.term(k, bk, interferes)?);
        }
        Ok(RadialIntegrand {
            density: self.cfg.tiers[self.j].density,
            common: self.head()?,
            difference: Some((biased, unbiased)),
        })
    }

    fn offloaded_printed(&self) -> Result<Box<dyn Fn(f64) -> f64 + '_>> {
        let bj = self.cfg.tiers[self.j].bias;
        let head = self.head()?;
        let mut exp_terms = Vec::new();
        let mut factors = Vec::new();
        for k in self.others() {
            let tier = &self.cfg.tiers[k];
            let b_hat = tier.bias / bj;
            exp_terms.push(self.term(k, b_hat, !self.protected(k))?);
            let gap = PI
                * tier.density
                * (self.p_hat(k) * b_hat).powf(2.0 / tier.ple)
                * (bj.powf(2.0 / tier.ple) - 1.0);
            factors.push(PowerTerm::new(gap, self.pow(k)));
        }
        let density = self.cfg.tiers[self.j].density;
        Ok(Box::new(move |y: f64| {
            let s: f64 = head
                .iter()
                .chain(exp_terms.iter())
                .map(|p| p.coef * y.powf(p.pow))
                .sum();
            let prod: f64 = factors
                .iter()
                .map(|p| -(-p.coef * y.powf(p.pow)).exp_m1())
                .product();
            2.0 * PI * density * y * (-s).exp() * prod
        }))
    }
}

/// Coverage and set probabilities of the unbiased and offloaded users of
/// tier `j` (zero-based; tier 0 is the macro tier).
pub fn ktier_sinr_coverage(
    cfg: &NetworkConfig,
    j: usize,
    t: f64,
    form: KTierForm,
) -> Result<KTierCoverage> {
    cfg.validate()?;
    if j >= cfg.tiers.len() {
        return Err(HetnetError::domain(format!(
            "serving tier {j} out of range for {} tiers",
            cfg.tiers.len()
        )));
    }
    if !(t >= 0.0) || t.is_infinite() {
        return Err(HetnetError::domain(format!(
            "SINR threshold must be finite and >= 0, got {t}"
        )));
    }
    let scale = length_scale(cfg.tiers.iter().map(|k| k.density));
    let at = |t: f64| Tiers { cfg, j, t };

    let a_unbiased = at(0.0).unbiased()?.integrate(scale)?;
    let s_unbiased = (a_unbiased > EMPTY_CLASS)
        .then(|| {
            at(t)
                .unbiased()?
                .integrate(scale)
                .map(|v| (v / a_unbiased).min(1.0))
        })
        .transpose()?;

    let offloaded = |t: f64| -> Result<f64> {
        if cfg.tiers[j].bias == 1.0 {
            return Ok(0.0);
        }
        let tiers = at(t);
        match form {
            KTierForm::Exact => tiers.offloaded_exact()?.integrate(scale),
            KTierForm::Printed => {
                if !cfg.partitioned() {
                    return Err(HetnetError::domain("product form needs eta > 0"));
                }
                let f = tiers.offloaded_printed()?;
                Ok(crate::quad::integrate_semi_infinite(
                    f,
                    0.0,
                    scale,
                    crate::radial::ANALYTIC_TOL,
                )?
                .value)
            }
        }
    };
    let a_offloaded = offloaded(0.0)?;
    let s_offloaded = (a_offloaded > EMPTY_CLASS)
        .then(|| offloaded(t).map(|v| (v / a_offloaded).min(1.0)))
        .transpose()?;
    Ok(KTierCoverage {
        s_unbiased,
        s_offloaded,
        a_unbiased,
        a_offloaded,
    })
}
