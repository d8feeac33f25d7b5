//! Downlink SINR and rate coverage of two-tier heterogeneous cellular
//! networks with biased association (range expansion) and macro-tier
//! resource partitioning, plus a Monte Carlo simulator and a joint
//! bias/partition optimizer.

pub mod association;
pub mod ccdf;
pub mod claims;
pub mod closed;
pub mod coverage;
pub mod error;
pub mod kernel;
pub mod ktier;
pub mod load;
pub mod model;
pub mod optimize;
pub mod quad;
pub mod rate;
pub mod sim;

mod radial;
mod two_tier;

pub use association::{association_probabilities, serving_distance_pdf, AssocProbabilities};
pub use ccdf::{CcdfCurve, CurveKind};
pub use closed::ClosedFormParams;
pub use coverage::{sinr_coverage, Coverage};
pub use error::{HetnetError, Result};
pub use ktier::{ktier_sinr_coverage, KTierCoverage, KTierForm};
pub use load::{load_pmf, mean_load, LoadPmf};
pub use model::{NetworkConfig, TierConfig, UserClass};
pub use optimize::{optimize_joint, Objective, Optimum, SweepSpec};
pub use rate::{
    rate_coverage, rate_coverage_backhaul, rate_coverage_mean_load, rate_percentile, RatePath,
};
