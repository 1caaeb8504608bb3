use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: `{what}` has {found} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite entry in `{what}` at index {index}")]
    NonFiniteEntry { what: &'static str, index: usize },
    #[error("invalid tail model: {0}")]
    InvalidTail(String),
    #[error("{0}")]
    Validation(ValidationErrors),
    #[error("s = {s} lies outside the half-plane Re s > {abscissa}")]
    OutsideDomain { s: Complex64, abscissa: f64 },
    #[error("s = {s} is within {distance:e} of the pole λ[{index}] = {pole}")]
    PoleHit {
        s: Complex64,
        index: usize,
        pole: Complex64,
        distance: f64,
    },
    #[error("mode {index} has Re λ = {re} ≥ 0 and a non-zero weight b·c*")]
    UnstableMode { index: usize, re: f64 },
    #[error("eigenvalue {index} violates the sector |Im λ| ≤ {sector}·|Re λ| (ratio {ratio})")]
    SectorViolation { index: usize, ratio: f64, sector: f64 },
    #[error("spectrum is not uniformly in the open left half-plane (max Re λ = {abscissa})")]
    NotExponentiallyStable { abscissa: f64 },
    #[error("density is not integrable: decay rate {decay_rate} ≤ 0")]
    NonIntegrableDensity { decay_rate: f64 },
    #[error("input signal is identically zero")]
    ZeroInput,
    #[error("transfer function evaluation failed at contour node {node}: {reason}")]
    ContourError { node: Complex64, reason: String },
    #[error("argument {x} outside the domain Re x > 0")]
    DomainError { x: Complex64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("perturbed mode {index} has Re(λ + p) = {re} ≥ 0")]
    UnstablePerturbed { index: usize, re: f64 },
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sub-check `{check}` failed: {detail}")]
    AssertionFailure { check: String, detail: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag, used in CLI error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NonFiniteEntry { .. } => "NonFiniteEntry",
            Error::InvalidTail(_) => "InvalidTail",
            Error::Validation(_) => "Validation",
            Error::OutsideDomain { .. } => "OutsideDomain",
            Error::PoleHit { .. } => "PoleHit",
            Error::UnstableMode { .. } => "UnstableMode",
            Error::SectorViolation { .. } => "SectorViolation",
            Error::NotExponentiallyStable { .. } => "NotExponentiallyStable",
            Error::NonIntegrableDensity { .. } => "NonIntegrableDensity",
            Error::ZeroInput => "ZeroInput",
            Error::ContourError { .. } => "ContourError",
            Error::DomainError { .. } => "DomainError",
            Error::GridMismatch(_) => "GridMismatch",
            Error::UnstablePerturbed { .. } => "UnstablePerturbed",
            Error::InvalidSignal(_) => "InvalidSignal",
            Error::InvalidMeasure(_) => "InvalidMeasure",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::AssertionFailure { .. } => "AssertionFailure",
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
        }
    }
}

/// Every problem found while validating a system spec.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationErrors(pub Vec<Error>);

impl ValidationErrors {
    pub fn errors(&self) -> &[Error] {
        &self.0
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation error(s)", self.0.len())?;
        for e in &self.0 {
            write!(f, "; {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

impl From<ValidationErrors> for Error {
    fn from(v: ValidationErrors) -> Self {
        Error::Validation(v)
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
