use std::fmt;

use thiserror::Error;

/// A single failed constraint in a collect-all validation pass.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Violation {
    /// Short machine-readable name of the constraint, e.g. `"0<sp<N"`.
    pub constraint: String,
    /// Human-readable detail with the offending value.
    pub detail: String,
}

impl Violation {
    pub fn new(constraint: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            constraint: constraint.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.constraint, self.detail)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation failed: {}", join(.0))]
    Validation(Vec<Violation>),

    #[error("quadrature did not converge at r = {radius:e} (estimate {estimate:e}, error {error:e})")]
    Convergence {
        radius: f64,
        estimate: f64,
        error: f64,
    },

    #[error("iteration failed at step {step}: {reason}")]
    Iteration { step: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures caused by the numerics rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::Iteration { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
