use thiserror::Error;

/// Errors raised across the library.
///
/// Variants group into input validation, resource caps and numerical
/// breakdown; the CLI maps each group onto its own exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("negative mass {value} at cell ({row}, {col})")]
    NegativeMass { row: usize, col: usize, value: f64 },
    #[error("non-finite entry at cell ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("total mass {total} deviates from 1 by more than {tolerance}")]
    MassNotOne { total: f64, tolerance: f64 },
    #[error("all probability mass was pruned")]
    EmptySupport,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("label {0} is not numeric")]
    NonNumericLabel(String),
    #[error("invalid Markov kernel: {0}")]
    InvalidKernel(String),
    #[error("top singular value {top} differs from 1 beyond {tolerance}")]
    SpectrumAnomaly { top: f64, tolerance: f64 },
    #[error("state space of {cells} cells exceeds cap {cap}")]
    SizeOverflow { cells: u128, cap: usize },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("invalid indices: {0}")]
    BadIndices(String),
    #[error("quadrature on [{a}, {b}] did not reach tolerance {tolerance} within {panels} panels")]
    QuadratureFailure {
        a: f64,
        b: f64,
        tolerance: f64,
        panels: usize,
    },
    #[error("spectral measure is not invariant under the antipodal map: {0}")]
    NotSymmetric(String),
    #[error("unsupported jump measure: {0}")]
    UnsupportedMeasure(String),
    #[error("scheme puts mass on a non-nested pair (s = {s:#b}, t = {t:#b})")]
    NotNested { s: u32, t: u32 },
    #[error("ladder decreased from {previous} to {current} at level {level}")]
    MonotonicityViolation { level: f64, previous: f64, current: f64 },
    #[error("axis {0} has fewer than two distinct bins")]
    DegenerateAxis(&'static str),
    #[error("invalid spectral measure: {0}")]
    InvalidMeasure(String),
    #[error("malformed input: {0}")]
    MalformedInput(String),
}

impl McError {
    /// True for errors caused by a configurable resource cap.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, McError::SizeOverflow { .. })
    }
}

pub type Result<T> = std::result::Result<T, McError>;
