use thiserror::Error;

/// Errors surfaced by the numeric and simulation layers.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error in {context}: {message}")]
    Domain { context: &'static str, message: String },

    /// A quadrature or root finder exhausted its budget before reaching the
    /// requested tolerance. Carries the best estimate obtained so far.
    #[error("accuracy not reached in {context}: estimate {estimate}, error bound {error_bound}")]
    Accuracy {
        context: &'static str,
        estimate: f64,
        error_bound: f64,
    },

    /// The integrand appears to diverge.
    #[error("divergent integral in {context}")]
    Divergent { context: &'static str },

    /// Invalid parameter set.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl CoreError {
    pub fn domain(context: &'static str, message: impl Into<String>) -> Self {
        CoreError::Domain {
            context,
            message: message.into(),
        }
    }

    /// Best estimate carried by an accuracy error, if any.
    pub fn best_estimate(&self) -> Option<f64> {
        match self {
            CoreError::Accuracy { estimate, .. } => Some(*estimate),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
