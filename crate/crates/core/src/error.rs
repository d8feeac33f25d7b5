use thiserror::Error;

/// Errors produced by the analytic engine, the simulator and the optimizer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HetnetError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("argument outside the valid domain: {0}")]
    InvalidDomain(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimated residual {residual:.3e})")]
    NonConvergence { residual: f64, subdivisions: usize },

    #[error("user class {0} has zero association probability")]
    DegenerateClass(&'static str),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
}

impl HetnetError {
    pub fn config(msg: impl Into<String>) -> Self {
        HetnetError::InvalidConfig(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        HetnetError::InvalidDomain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, HetnetError>;
