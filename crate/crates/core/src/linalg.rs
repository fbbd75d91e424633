//! Small dense linear-algebra helpers.

use nalgebra::DMatrix;

/// All singular values of `m`, sorted in non-increasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value, 0 for an empty matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Spectral norm of a 2x2 matrix from the largest eigenvalue of `AᵀA`.
pub fn spectral_norm_2x2(a: [[f64; 2]; 2]) -> f64 {
    let p = a[0][0] * a[0][0] + a[1][0] * a[1][0];
    let r = a[0][1] * a[0][1] + a[1][1] * a[1][1];
    let q = a[0][0] * a[0][1] + a[1][0] * a[1][1];
    let half_gap = 0.5 * (p - r);
    let lambda = 0.5 * (p + r) + half_gap.hypot(q);
    lambda.max(0.0).sqrt()
}
