use std::fmt;

use thiserror::Error;

/// Which end of a half-line integral failed to converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Zero,
    Infinity,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Zero => f.write_str("0"),
            Endpoint::Infinity => f.write_str("infinity"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("element is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    Positivity { min_eigenvalue: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("superoperator is not self-adjoint (defect {defect:e})")]
    Symmetry { defect: f64 },

    #[error("function is not finite at eigenvalue {eigenvalue:e}")]
    Evaluation { eigenvalue: f64 },

    #[error("{context}: accuracy {achieved:e} not reached (requested {requested:e})")]
    Accuracy {
        context: String,
        achieved: f64,
        requested: f64,
    },

    #[error("{context}: integral diverges at {endpoint}")]
    Divergence { context: String, endpoint: Endpoint },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("function vanishes at sample point {0}")]
    Zero(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("incomplete specification: {0}")]
    Specification(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn accuracy(context: impl Into<String>, achieved: f64, requested: f64) -> Self {
        Error::Accuracy {
            context: context.into(),
            achieved,
            requested,
        }
    }

    pub(crate) fn divergence(context: impl Into<String>, endpoint: Endpoint) -> Self {
        Error::Divergence {
            context: context.into(),
            endpoint,
        }
    }
}
