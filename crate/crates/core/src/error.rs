use thiserror::Error;

/// Errors raised across the simulation library.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate state: {0}")]
    Degenerate(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    ResourceCap { dim: usize, cap: usize },

    #[error("dispersive regime violated: {0}")]
    Regime(String),

    #[error("truncation deficit {deficit:.3e} exceeds {limit:.1e}; increase n_max (currently {n_max})")]
    Truncation { deficit: f64, limit: f64, n_max: usize },

    #[error("numerical tolerance exceeded: {0}")]
    Tolerance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SimError::InvalidArgument(msg.into()))
}
