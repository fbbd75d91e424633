//! Closed-form maximal correlations.
//!
//! Each evaluator rejects inputs outside its domain instead of clamping.

use crate::error::{McError, Result};

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(McError::OutOfRange(format!("{name} = {v} is not in [0, 1]")))
    }
}

/// Jointly Gaussian pair with Pearson correlation `rho`.
pub fn gaussian_mc(rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(McError::OutOfRange(format!("rho = {rho} is not in [-1, 1]")));
    }
    Ok(rho.abs())
}

/// Cell probabilities of a pair of two-valued variables, X ∈ {a, b} and
/// Y ∈ {c, d}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bernoulli2x2Params {
    pub p_ac: f64,
    pub p_ad: f64,
    pub p_bc: f64,
    pub p_bd: f64,
}

impl Bernoulli2x2Params {
    pub fn new(p_ac: f64, p_ad: f64, p_bc: f64, p_bd: f64) -> Result<Self> {
        for (name, v) in [("p_ac", p_ac), ("p_ad", p_ad), ("p_bc", p_bc), ("p_bd", p_bd)] {
            check_unit(name, v)?;
        }
        let total = p_ac + p_ad + p_bc + p_bd;
        if (total - 1.0).abs() > crate::tolerance::MASS_EXACT {
            return Err(McError::MassNotOne {
                total,
                tolerance: crate::tolerance::MASS_EXACT,
            });
        }
        Ok(Bernoulli2x2Params { p_ac, p_ad, p_bc, p_bd })
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.p_ac, self.p_ad], [self.p_bc, self.p_bd]]
    }
}

/// `|p_ac p_bd − p_ad p_bc| / √(p_a p_b p_c p_d)`, zero for a degenerate marginal.
pub fn bernoulli_2x2_mc(p: &Bernoulli2x2Params) -> f64 {
    let p_a = p.p_ac + p.p_ad;
    let p_b = p.p_bc + p.p_bd;
    let p_c = p.p_ac + p.p_bc;
    let p_d = p.p_ad + p.p_bd;
    let denom = p_a * p_b * p_c * p_d;
    if denom == 0.0 {
        return 0.0;
    }
    ((p.p_ac * p.p_bd - p.p_ad * p.p_bc).abs() / denom.sqrt()).min(1.0)
}

fn check_windows(l: u64, m: u64, n: u64) -> Result<()> {
    if l < m && m <= n {
        Ok(())
    } else {
        Err(McError::BadIndices(format!(
            "need 1 <= l + 1 <= m <= n, got l = {l}, m = {m}, n = {n}"
        )))
    }
}

/// Overlapping partial sums `(Σ_{i≤m} X_i, Σ_{l<j≤n} X_j)` of i.i.d. terms:
/// `(m − l) / √(m (n − l))`. `l = 0` gives `√(m / n)`.
pub fn dksy_mc(l: u64, m: u64, n: u64) -> Result<f64> {
    check_windows(l, m, n)?;
    let d = (m - l) as u128;
    Ok(((d * d) as f64 / (m as u128 * (n - l) as u128) as f64).sqrt())
}

/// Upper bound for the minima of the same two windows; numerically equal
/// to [`dksy_mc`].
pub fn min_window_bound(l: u64, m: u64, n: u64) -> Result<f64> {
    dksy_mc(l, m, n)
}

/// `(X_1..X_n)` against its randomly masked copy: `√max_i P(i ∈ T)`.
pub fn mb_bound(p_in_t: &[f64]) -> Result<f64> {
    let mut max = 0.0f64;
    for (i, &p) in p_in_t.iter().enumerate() {
        check_unit(&format!("P({} in T)", i + 1), p)?;
        max = max.max(p);
    }
    Ok(max.sqrt())
}

/// Uniform `m`-subset `T` of `[n]` and uniform `k`-subset `S` of `T`:
/// `√(k (n − m) / (m (n − k)))` with `0/0 = 0`.
pub fn nested_subsets_mc(n: u64, m: u64, k: u64) -> Result<f64> {
    if !(k <= m && m <= n) {
        return Err(McError::BadIndices(format!(
            "need 0 <= k <= m <= n, got n = {n}, m = {m}, k = {k}"
        )));
    }
    let num = k * (n - m);
    if num == 0 {
        return Ok(0.0);
    }
    Ok((num as f64 / (m * (n - k)) as f64).sqrt())
}

/// Tagged uniform `a`-subset inside a uniform `b`-subset: `√(a / b)`.
pub fn uniform_nested_tag_mc(a: u64, b: u64) -> Result<f64> {
    if !(0 < a && a <= b) {
        return Err(McError::BadIndices(format!("need 0 < a <= b, got a = {a}, b = {b}")));
    }
    Ok((a as f64 / b as f64).sqrt())
}

/// `R(X, X + λZ)` for i.i.d. α-stable `X, Z` whose Lévy density has tail
/// constants `c_minus` (left) and `c_plus` (right).
pub fn bdk_mc(alpha: f64, lambda: f64, c_minus: f64, c_plus: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(McError::OutOfRange(format!("alpha = {alpha} is not in (0, 2)")));
    }
    if !lambda.is_finite() {
        return Err(McError::OutOfRange(format!("lambda = {lambda}")));
    }
    if !(c_minus >= 0.0 && c_plus >= 0.0 && c_minus + c_plus > 0.0) {
        return Err(McError::OutOfRange(format!(
            "tail constants must be non-negative with positive sum, got ({c_minus}, {c_plus})"
        )));
    }
    let scale = lambda.abs().powf(alpha);
    let factor = if lambda >= 0.0 {
        1.0
    } else {
        c_minus.min(c_plus) / c_minus.max(c_plus)
    };
    Ok(1.0 / (1.0 + factor * scale).sqrt())
}

/// Bivariate Marshall–Olkin exponential: `λ3 / √((λ1 + λ3)(λ2 + λ3))`.
pub fn marshall_olkin_mc(l1: f64, l2: f64, l3: f64) -> Result<f64> {
    for (name, v) in [("l1", l1), ("l2", l2), ("l3", l3)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(McError::OutOfRange(format!("{name} = {v} must be positive")));
        }
    }
    Ok(l3 / ((l1 + l3) * (l2 + l3)).sqrt())
}

/// `r_j` for independent `S` and `T`: `√(P(j ∈ S) P(j ∈ T))`.
pub fn independent_rj(p_j_in_s: f64, p_j_in_t: f64) -> Result<f64> {
    check_unit("P(j in S)", p_j_in_s)?;
    check_unit("P(j in T)", p_j_in_t)?;
    Ok((p_j_in_s * p_j_in_t).sqrt())
}
