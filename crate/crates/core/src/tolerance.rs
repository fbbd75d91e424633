//! Numerical tolerances shared by every module.
//!
//! Mass comparisons are absolute; spectral comparisons are absolute on
//! quantities that live in `[0, 1]`.

/// Entries at or above this (negative) value are rounded up to zero.
pub const NEGATIVE_MASS: f64 = 1e-15;

/// Maximum deviation of the total mass from 1 that is silently renormalised.
pub const MASS_RENORMALIZE: f64 = 1e-9;

/// Invariant tolerance on the total mass of a validated table.
pub const MASS_EXACT: f64 = 1e-12;

/// Allowed deviation of the top singular value of the normalised kernel from 1.
pub const TOP_SINGULAR: f64 = 1e-8;

/// Tolerance attached to exact SVD-based reports.
pub const SPECTRAL: f64 = 1e-10;

/// Absolute tolerance of the adaptive quadrature.
pub const QUADRATURE_ABS: f64 = 1e-10;

/// Panel budget of the adaptive quadrature.
pub const QUADRATURE_PANELS: usize = 10_000;

/// Slack allowed when checking that a truncation ladder is non-decreasing.
pub const LADDER_MONOTONE: f64 = 1e-9;

/// Tolerance on angles and weights when checking antipodal symmetry.
pub const SYMMETRY: f64 = 1e-12;

/// Tolerance for row sums of stochastic kernels and covariance checks.
pub const KERNEL_ROW: f64 = 1e-12;

/// Default cap on the number of cells of a constructed joint table.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Significant digits kept when deduplicating non-integer numeric labels.
pub const LABEL_SIGNIFICANT_DIGITS: i32 = 12;
