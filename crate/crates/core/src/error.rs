use thiserror::Error;

use crate::ordering::ConditionReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("entry {index} must be strictly positive, got {value}")]
    NonPositive { index: usize, value: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("optimizer did not converge: {0}")]
    NonConvergence(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    /// Hypotheses verified on the grid but the survival curves disagree.
    #[error("inconsistency: hypotheses hold but dominance fails (min gap {min_gap:e})")]
    Inconsistency { min_gap: f64, report: Box<ConditionReport> },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

/// Rejects NaN and infinities, reporting the first offending index.
pub(crate) fn ensure_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

pub(crate) fn ensure_positive(values: &[f64]) -> Result<()> {
    ensure_finite(values)?;
    match values.iter().position(|&v| v <= 0.0) {
        Some(index) => Err(Error::NonPositive {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}
