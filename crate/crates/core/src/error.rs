use thiserror::Error;

/// Errors produced by the recovery algorithms and their measurement tools.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// A sample of the target function was NaN or infinite.
    #[error("non-finite sample {value} at x = {x}")]
    NonFiniteSample { x: f64, value: f64 },

    /// Reweighting by a negative power of the Gaussian density overflowed.
    #[error("overflow evaluating rho^{exponent} at x = {x}")]
    Overflow { x: f64, exponent: f64 },

    /// The shifted Gram matrix could not be factorized reliably.
    #[error("singular system: condition estimate {condition:e}")]
    Singular { condition: f64 },

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error("function `{id}` declares derivatives up to order {known}, requested {requested}")]
    MissingDerivative {
        id: String,
        known: usize,
        requested: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteSample { .. } | Error::Overflow { .. } | Error::Singular { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
