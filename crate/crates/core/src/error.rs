use thiserror::Error;

/// Errors raised by the simulation and analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operation requires a dynamic drop field, got {found}")]
    FieldVariant { found: &'static str },

    #[error("drop time {t_drop} precedes last recorded drop at {last}")]
    DropOrdering { t_drop: u64, last: u64 },

    #[error("boundary resampling exceeded {attempts} attempts at distance {phi:e}")]
    BoundaryStarvation { attempts: u32, phi: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(
        "quadrature did not converge: estimate {estimate:e}, error {abs_error:e} > tolerance {tolerance:e} after {intervals} intervals"
    )]
    Quadrature {
        estimate: f64,
        abs_error: f64,
        tolerance: f64,
        intervals: usize,
    },

    #[error("no distance in [{lo:e}, {hi:e}] reaches expected progress {delta:e} (max {max_progress:e})")]
    EmptyInterval {
        delta: f64,
        max_progress: f64,
        lo: f64,
        hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
