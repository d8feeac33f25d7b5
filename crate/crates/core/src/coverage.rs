//! SINR coverage of the two-tier network.

use crate::association::{association_probabilities, EMPTY_CLASS};
use crate::error::{HetnetError, Result};
use crate::kernel::z_kernel;
use crate::model::{NetworkConfig, UserClass};
use crate::two_tier::TwoTier;
use serde::{Deserialize, Serialize};

/// Overall coverage and the conditional coverage of each user class.
///
/// A class with zero association probability has no conditional coverage
/// (`None`) and contributes nothing to the total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub total: f64,
    pub per_class: [Option<f64>; 3],
}

impl Coverage {
    pub fn class(&self, class: UserClass) -> Option<f64> {
        self.per_class[class as usize]
    }
}

/// SINR coverage `S(t)` and its per-class terms.
///
/// With `eta > 0` offloaded users are protected from macro interference; with
/// `eta == 0` they are not. Within the partitioned regime the result does not
/// depend on the value of `eta`.
pub fn sinr_coverage(cfg: &NetworkConfig, t: f64) -> Result<Coverage> {
    let tt = TwoTier::new(cfg)?;
    let assoc = association_probabilities(cfg)?;
    let mut total = 0.0;
    let mut per_class = [None; 3];
    for class in UserClass::ALL {
        let a = assoc.get(class);
        if a <= EMPTY_CLASS {
            continue;
        }
        let joint = tt.joint_coverage(class, t)?;
        total += joint;
        per_class[class as usize] = Some((joint / a).min(1.0));
    }
    Ok(Coverage { total, per_class })
}

/// Conditional coverage `S_l(t)` of a single class.
pub fn conditional_sinr_coverage(cfg: &NetworkConfig, class: UserClass, t: f64) -> Result<f64> {
    let a = association_probabilities(cfg)?.get(class);
    if a <= EMPTY_CLASS {
        return Err(HetnetError::DegenerateClass(class.name()));
    }
    Ok((TwoTier::new(cfg)?.joint_coverage(class, t)? / a).min(1.0))
}

/// Interference-limited coverage for a common path-loss exponent, in closed
/// form up to the `Q` kernel. Noise is ignored.
pub fn sinr_coverage_equal_ple(cfg: &NetworkConfig, t: f64) -> Result<f64> {
    cfg.validate_two_tier()?;
    if !cfg.equal_ple() {
        return Err(HetnetError::domain("equal path-loss exponents required"));
    }
    let (m, s) = (cfg.macro_tier(), cfg.small_tier());
    let alpha = m.ple;
    let e = 2.0 / alpha;
    let (l1, l2) = (m.density, s.density);
    let b = s.bias;
    let q1 = |c: f64| -> Result<f64> { Ok(c.powf(e) + m.activity * z_kernel(t, alpha, c)?) };
    let q2 = |c: f64| -> Result<f64> { Ok(c.powf(e) + s.activity * z_kernel(t, alpha, c)?) };
    let p21 = (s.tx_power / m.tx_power).powf(e);
    let p12 = (m.tx_power / s.tx_power).powf(e);

    let macro_term = l1 / (l1 * q1(1.0)? + l2 * p21 * q2(b)?);
    let small_term = l2 / (l2 * q2(1.0)? + l1 * p12 * q1(1.0)?);
    let offloaded_term = if cfg.partitioned() {
        l2 / (l2 * q2(1.0)? + l1 * p12 * b.powf(-e)) - l2 / (l2 * q2(1.0)? + l1 * p12)
    } else {
        l2 / (l2 * q2(1.0)? + l1 * p12 * q1(1.0 / b)?) - l2 / (l2 * q2(1.0)? + l1 * p12 * q1(1.0)?)
    };
    Ok(macro_term + small_term + offloaded_term)
}
