//! Jump-part operator norm `Op(ν)` and maximal correlation of
//! two-dimensional Lévy processes.
//!
//! Stable Lévy measures are given in polar form `r^{-1-α} dr τ(dθ)` by a
//! spectral measure `τ` on the circle. `Op(ν)` is then the spectral norm of
//! a 2x2 matrix built from eight angular integrals of `τ`: one mixed
//! integral per quadrant and one marginal integral per half-axis.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::DMatrix;
use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::error::{McError, Result};
use crate::joint::{CorrelationReport, Method};
use crate::label::canonical_real;
use crate::linalg::{spectral_norm, spectral_norm_2x2};
use crate::quadrature;
use crate::tolerance;

/// Reduces an angle into `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `(cos θ, sin θ)` with exact zeros and ones on the axes.
fn axis_exact_trig(theta: f64) -> (f64, f64) {
    let quarter = theta / FRAC_PI_2;
    let k = quarter.round();
    if (quarter - k).abs() < 1e-12 {
        match (k as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        (theta.cos(), theta.sin())
    }
}

fn on_axis(theta: f64) -> bool {
    let (c, s) = axis_exact_trig(theta);
    c == 0.0 || s == 0.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularAtom {
    pub theta: f64,
    pub weight: f64,
}

/// Constant density `level` on `[from, to)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPiece {
    pub from: f64,
    pub to: f64,
    pub level: f64,
}

/// Finite measure on the circle: atoms plus a piecewise-constant density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectralMeasure", into = "RawSpectralMeasure")]
pub struct SpectralMeasure {
    atoms: Vec<AngularAtom>,
    pieces: Vec<DensityPiece>,
}

#[derive(Clone, Serialize, Deserialize)]
pub(crate) struct RawSpectralMeasure {
    #[serde(default)]
    atoms: Vec<AngularAtom>,
    #[serde(default)]
    pieces: Vec<DensityPiece>,
}

impl TryFrom<RawSpectralMeasure> for SpectralMeasure {
    type Error = McError;
    fn try_from(raw: RawSpectralMeasure) -> Result<Self> {
        SpectralMeasure::new(raw.atoms, raw.pieces)
    }
}

impl From<SpectralMeasure> for RawSpectralMeasure {
    fn from(m: SpectralMeasure) -> Self {
        RawSpectralMeasure {
            atoms: m.atoms,
            pieces: m.pieces,
        }
    }
}

impl SpectralMeasure {
    /// Validates and canonicalises: angles are reduced into `[0, 2π)`,
    /// pieces that wrap past `2π` are split, zero-level pieces are dropped.
    pub fn new(atoms: Vec<AngularAtom>, pieces: Vec<DensityPiece>) -> Result<Self> {
        let mut out_atoms = Vec::with_capacity(atoms.len());
        for a in atoms {
            if !(a.weight > 0.0 && a.weight.is_finite()) || !a.theta.is_finite() {
                return Err(McError::InvalidMeasure(format!(
                    "atom at {} has weight {}; weights must be positive",
                    a.theta, a.weight
                )));
            }
            out_atoms.push(AngularAtom {
                theta: reduce_angle(a.theta),
                weight: a.weight,
            });
        }
        let mut out_pieces = Vec::with_capacity(pieces.len());
        for p in pieces {
            if !(p.level >= 0.0 && p.level.is_finite()) || !p.from.is_finite() || !p.to.is_finite() {
                return Err(McError::InvalidMeasure(format!(
                    "piece [{}, {}) has invalid level {}",
                    p.from, p.to, p.level
                )));
            }
            let width = p.to - p.from;
            if !(width > 0.0 && width <= TAU + 1e-12) {
                return Err(McError::InvalidMeasure(format!(
                    "piece [{}, {}) must have width in (0, 2π]",
                    p.from, p.to
                )));
            }
            if p.level == 0.0 {
                continue;
            }
            let from = reduce_angle(p.from);
            let to = from + width.min(TAU);
            if to > TAU + 1e-15 {
                out_pieces.push(DensityPiece {
                    from,
                    to: TAU,
                    level: p.level,
                });
                out_pieces.push(DensityPiece {
                    from: 0.0,
                    to: to - TAU,
                    level: p.level,
                });
            } else {
                out_pieces.push(DensityPiece {
                    from,
                    to: to.min(TAU),
                    level: p.level,
                });
            }
        }
        out_pieces.sort_by(|a, b| a.from.total_cmp(&b.from));
        for w in out_pieces.windows(2) {
            if w[1].from < w[0].to - 1e-15 {
                return Err(McError::InvalidMeasure(format!(
                    "pieces [{}, {}) and [{}, {}) overlap",
                    w[0].from, w[0].to, w[1].from, w[1].to
                )));
            }
        }
        let m = SpectralMeasure {
            atoms: out_atoms,
            pieces: out_pieces,
        };
        if m.total_mass().is_nan() || m.total_mass() <= 0.0 {
            return Err(McError::InvalidMeasure("total mass must be positive".into()));
        }
        Ok(m)
    }

    pub fn atoms_only(atoms: &[(f64, f64)]) -> Result<Self> {
        SpectralMeasure::new(
            atoms
                .iter()
                .map(|&(theta, weight)| AngularAtom { theta, weight })
                .collect(),
            Vec::new(),
        )
    }

    /// Constant density `level` on the whole circle.
    pub fn uniform(level: f64) -> Result<Self> {
        SpectralMeasure::new(
            Vec::new(),
            vec![DensityPiece {
                from: 0.0,
                to: TAU,
                level,
            }],
        )
    }

    pub fn atoms(&self) -> &[AngularAtom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[DensityPiece] {
        &self.pieces
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum::<f64>()
            + self.pieces.iter().map(|p| p.level * (p.to - p.from)).sum::<f64>()
    }

    /// Density of the absolutely continuous part at `theta`.
    pub fn density_at(&self, theta: f64) -> f64 {
        let t = reduce_angle(theta);
        self.pieces
            .iter()
            .filter(|p| p.from <= t && t < p.to)
            .map(|p| p.level)
            .sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        SpectralMeasure::new(
            self.atoms
                .iter()
                .map(|a| AngularAtom {
                    theta: a.theta,
                    weight: c * a.weight,
                })
                .collect(),
            self.pieces
                .iter()
                .map(|p| DensityPiece {
                    level: c * p.level,
                    ..*p
                })
                .collect(),
        )
    }

    /// Image under `θ ↦ π/2 − θ`, which exchanges the two coordinates.
    pub fn swap_axes(&self) -> Result<Self> {
        SpectralMeasure::new(
            self.atoms
                .iter()
                .map(|a| AngularAtom {
                    theta: FRAC_PI_2 - a.theta,
                    weight: a.weight,
                })
                .collect(),
            self.pieces
                .iter()
                .map(|p| DensityPiece {
                    from: FRAC_PI_2 - p.to,
                    to: FRAC_PI_2 - p.from,
                    level: p.level,
                })
                .collect(),
        )
    }

    /// Atoms sitting exactly on a coordinate axis.
    pub fn axis_atoms(&self) -> Vec<f64> {
        self.atoms
            .iter()
            .filter(|a| on_axis(a.theta))
            .map(|a| a.theta)
            .collect()
    }

    /// Checks invariance under `θ ↦ θ + π`.
    pub fn check_antipodal(&self) -> Result<()> {
        for a in &self.atoms {
            let target = reduce_angle(a.theta + PI);
            let partner = self.atoms.iter().find(|b| {
                let d = (b.theta - target).abs();
                d.min(TAU - d) <= tolerance::SYMMETRY
            });
            match partner {
                Some(b) if (b.weight - a.weight).abs() <= tolerance::SYMMETRY => {}
                Some(b) => {
                    return Err(McError::NotSymmetric(format!(
                        "atom at {} has weight {} but its antipode has {}",
                        a.theta, a.weight, b.weight
                    )))
                }
                None => return Err(McError::NotSymmetric(format!("atom at {} has no antipode", a.theta))),
            }
        }
        let mut cuts = vec![0.0, PI, TAU];
        for p in &self.pieces {
            for e in [p.from, p.to] {
                cuts.push(reduce_angle(e));
                cuts.push(reduce_angle(e + PI));
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            if w[1] - w[0] < 1e-14 {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            let (d1, d2) = (self.density_at(mid), self.density_at(mid + PI));
            if (d1 - d2).abs() > tolerance::SYMMETRY {
                return Err(McError::NotSymmetric(format!(
                    "density {d1} at {mid} differs from {d2} at its antipode"
                )));
            }
        }
        Ok(())
    }

    /// Splits every piece at multiples of π/2 so that each part lies in a
    /// single closed quadrant.
    fn quadrant_parts(&self) -> Vec<DensityPiece> {
        let mut parts = Vec::new();
        for p in &self.pieces {
            let mut from = p.from;
            for k in 1..=4 {
                let edge = k as f64 * FRAC_PI_2;
                if from >= p.to {
                    break;
                }
                if edge > from {
                    let to = edge.min(p.to);
                    parts.push(DensityPiece {
                        from,
                        to,
                        level: p.level,
                    });
                    from = to;
                }
            }
        }
        parts
    }
}

/// The eight angular integrals that determine `Op(ν)` for a stable `ν`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CDSet {
    pub c_pp: f64,
    pub c_pm: f64,
    pub c_mp: f64,
    pub c_mm: f64,
    pub dx_p: f64,
    pub dx_m: f64,
    pub dy_p: f64,
    pub dy_m: f64,
}

impl CDSet {
    /// Entry matrix with `0/0 = 0`; rows index the sign of x, columns the
    /// sign of y.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let ratio = |c: f64, dx: f64, dy: f64| if c == 0.0 { 0.0 } else { c / (dx * dy).sqrt() };
        [
            [
                ratio(self.c_pp, self.dx_p, self.dy_p),
                ratio(self.c_pm, self.dx_p, self.dy_m),
            ],
            [
                ratio(self.c_mp, self.dx_m, self.dy_p),
                ratio(self.c_mm, self.dx_m, self.dy_m),
            ],
        ]
    }

    /// Per-quadrant Cauchy–Schwarz: `C_{±±} ≤ √(D^x_± D^y_±) + tol`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let all = [
            self.c_pp, self.c_pm, self.c_mp, self.c_mm, self.dx_p, self.dx_m, self.dy_p, self.dy_m,
        ];
        all.iter().all(|&v| v >= 0.0)
            && self.c_pp <= (self.dx_p * self.dy_p).sqrt() + tol
            && self.c_pm <= (self.dx_p * self.dy_m).sqrt() + tol
            && self.c_mp <= (self.dx_m * self.dy_p).sqrt() + tol
            && self.c_mm <= (self.dx_m * self.dy_m).sqrt() + tol
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(McError::OutOfRange(format!("alpha = {alpha} is not in (0, 2)")))
    }
}

/// Sign-resolved angular moments: `mixed = |cos sin|^{α/2}`,
/// `horizontal = |cos|^α`, `vertical = |sin|^α`.
#[derive(Clone, Copy)]
struct Moments {
    mixed: f64,
    horizontal: f64,
    vertical: f64,
}

fn moments_at(theta: f64, alpha: f64) -> (f64, f64, Moments) {
    let (c, s) = axis_exact_trig(theta);
    let m = Moments {
        mixed: (c * s).abs().powf(0.5 * alpha),
        horizontal: c.abs().powf(alpha),
        vertical: s.abs().powf(alpha),
    };
    (c, s, m)
}

fn integrate_piece(part: &DensityPiece, alpha: f64, tol: f64) -> Result<Moments> {
    let run = |g: &dyn Fn(f64) -> f64| {
        quadrature::integrate(
            g,
            part.from,
            part.to,
            &[],
            tol / part.level,
            tolerance::QUADRATURE_PANELS,
        )
        .map(|v| v * part.level)
    };
    Ok(Moments {
        mixed: run(&|t| moments_at(t, alpha).2.mixed)?,
        horizontal: run(&|t| moments_at(t, alpha).2.horizontal)?,
        vertical: run(&|t| moments_at(t, alpha).2.vertical)?,
    })
}

fn accumulate(cd: &mut CDSet, c: f64, s: f64, m: Moments) {
    if c > 0.0 && s > 0.0 {
        cd.c_pp += m.mixed;
    } else if c > 0.0 && s < 0.0 {
        cd.c_pm += m.mixed;
    } else if c < 0.0 && s > 0.0 {
        cd.c_mp += m.mixed;
    } else if c < 0.0 && s < 0.0 {
        cd.c_mm += m.mixed;
    }
    if c > 0.0 {
        cd.dx_p += m.horizontal;
    } else if c < 0.0 {
        cd.dx_m += m.horizontal;
    }
    if s > 0.0 {
        cd.dy_p += m.vertical;
    } else if s < 0.0 {
        cd.dy_m += m.vertical;
    }
}

/// Computes the eight integrals. Atoms contribute exact summands; density
/// pieces are integrated quadrant by quadrant so that every kink of the
/// integrands is a panel boundary.
pub fn cd_integrals(tau: &SpectralMeasure, alpha: f64) -> Result<CDSet> {
    check_alpha(alpha)?;
    let mut cd = CDSet::default();
    for a in &tau.atoms {
        let (c, s, m) = moments_at(a.theta, alpha);
        let scaled = Moments {
            mixed: a.weight * m.mixed,
            horizontal: a.weight * m.horizontal,
            vertical: a.weight * m.vertical,
        };
        accumulate(&mut cd, c, s, scaled);
    }
    let parts = tau.quadrant_parts();
    if !parts.is_empty() {
        let tol = tolerance::QUADRATURE_ABS / (3 * parts.len()) as f64;
        for part in &parts {
            let (c, s, _) = moments_at(0.5 * (part.from + part.to), alpha);
            accumulate(&mut cd, c.signum(), s.signum(), integrate_piece(part, alpha, tol)?);
        }
    }
    Ok(cd)
}

/// `Op(ν)` for the stable Lévy measure with index `alpha` and spectral
/// measure `tau`.
pub fn opnu_stable(tau: &SpectralMeasure, alpha: f64) -> Result<CorrelationReport> {
    let cd = cd_integrals(tau, alpha)?;
    let a = cd.matrix();
    let value = spectral_norm_2x2(a);
    let mut report = CorrelationReport::new(value, Method::SpectralNorm, tolerance::QUADRATURE_ABS)
        .with_note("cd", serde_json::to_value(cd).expect("plain struct"))
        .with_note("matrix", vec![a[0].to_vec(), a[1].to_vec()]);
    let axis = tau.axis_atoms();
    if !axis.is_empty() {
        report = report.with_note("axis_atoms", axis);
    }
    Ok(report)
}

/// Spectral measure of `(X, X + λZ)` for i.i.d. α-stable `X, Z` with left
/// and right tail constants `c_minus`, `c_plus`.
///
/// Jumps of `X` land on the diagonal; jumps of `λZ` land on the y-axis,
/// upward for `λZ > 0`, so the sign of `λ` decides which tail constant
/// sits at `π/2`.
pub fn bdk_tau(alpha: f64, lambda: f64, c_minus: f64, c_plus: f64) -> Result<SpectralMeasure> {
    check_alpha(alpha)?;
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(McError::OutOfRange(format!(
            "lambda = {lambda} must be finite and non-zero"
        )));
    }
    if !(c_minus >= 0.0 && c_plus >= 0.0 && c_minus + c_plus > 0.0) {
        return Err(McError::OutOfRange(format!(
            "tail constants must be non-negative with positive sum, got ({c_minus}, {c_plus})"
        )));
    }
    let z_scale = lambda.abs().powf(alpha);
    let diag_scale = 2f64.sqrt().powf(alpha);
    let (up, down) = if lambda < 0.0 {
        (c_minus, c_plus)
    } else {
        (c_plus, c_minus)
    };
    let atoms: Vec<(f64, f64)> = [
        (FRAC_PI_2, up * z_scale),
        (3.0 * FRAC_PI_2, down * z_scale),
        (PI / 4.0, c_plus * diag_scale),
        (5.0 * PI / 4.0, c_minus * diag_scale),
    ]
    .into_iter()
    .filter(|&(_, w)| w > 0.0)
    .collect();
    SpectralMeasure::atoms_only(&atoms)
}

/// `(∫|cos θ sin θ|^{α/2} dτ) / √(∫|cos θ|^α dτ · ∫|sin θ|^α dτ)` for an
/// antipodally symmetric `τ`.
pub fn hilbert_hardy_symmetric(tau: &SpectralMeasure, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    tau.check_antipodal()?;
    let (mut num, mut dx, mut dy) = (0.0, 0.0, 0.0);
    for a in &tau.atoms {
        let (_, _, m) = moments_at(a.theta, alpha);
        num += a.weight * m.mixed;
        dx += a.weight * m.horizontal;
        dy += a.weight * m.vertical;
    }
    let kinks = [FRAC_PI_2, PI, 3.0 * FRAC_PI_2];
    let tol = tolerance::QUADRATURE_ABS / (3 * tau.pieces.len().max(1)) as f64;
    for p in &tau.pieces {
        let run = |g: &dyn Fn(f64) -> f64| {
            quadrature::integrate(g, p.from, p.to, &kinks, tol / p.level, tolerance::QUADRATURE_PANELS)
                .map(|v| v * p.level)
        };
        num += run(&|t| moments_at(t, alpha).2.mixed)?;
        dx += run(&|t| moments_at(t, alpha).2.horizontal)?;
        dy += run(&|t| moments_at(t, alpha).2.vertical)?;
    }
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(num / (dx * dy).sqrt())
}

/// A point mass of a finite jump measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpAtom {
    pub x: f64,
    pub y: f64,
    pub weight: f64,
}

fn check_jump_atoms(atoms: &[JumpAtom]) -> Result<()> {
    for a in atoms {
        if !(a.weight > 0.0 && a.weight.is_finite()) {
            return Err(McError::InvalidMeasure(format!(
                "jump atom at ({}, {}) has non-positive weight {}",
                a.x, a.y, a.weight
            )));
        }
        if !(a.x.is_finite() && a.y.is_finite()) {
            return Err(McError::InvalidMeasure("jump atom coordinates must be finite".into()));
        }
        if a.x == 0.0 && a.y == 0.0 {
            return Err(McError::InvalidMeasure("jump measure cannot charge the origin".into()));
        }
    }
    Ok(())
}

/// `Op(ν)` for a jump measure with finitely many atoms: the largest
/// singular value of `ν({(x, y)}) / √(ν_X(x) ν_Y(y))` over non-zero `x`, `y`.
pub fn opnu_atoms(atoms: &[JumpAtom]) -> Result<CorrelationReport> {
    check_jump_atoms(atoms)?;
    let key = |v: f64| OrderedFloat(canonical_real(v));
    let mut nu_x: BTreeMap<OrderedFloat<f64>, f64> = BTreeMap::new();
    let mut nu_y: BTreeMap<OrderedFloat<f64>, f64> = BTreeMap::new();
    for a in atoms {
        if a.x != 0.0 {
            *nu_x.entry(key(a.x)).or_default() += a.weight;
        }
        if a.y != 0.0 {
            *nu_y.entry(key(a.y)).or_default() += a.weight;
        }
    }
    let x_index: BTreeMap<_, usize> = nu_x.keys().enumerate().map(|(i, k)| (*k, i)).collect();
    let y_index: BTreeMap<_, usize> = nu_y.keys().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut m = DMatrix::zeros(x_index.len(), y_index.len());
    for a in atoms.iter().filter(|a| a.x != 0.0 && a.y != 0.0) {
        let (kx, ky) = (key(a.x), key(a.y));
        m[(x_index[&kx], y_index[&ky])] += a.weight / (nu_x[&kx] * nu_y[&ky]).sqrt();
    }
    let value = if m.is_empty() { 0.0 } else { spectral_norm(&m) };
    Ok(CorrelationReport::new(value, Method::SpectralNorm, tolerance::SPECTRAL)
        .with_note("shape", vec![m.nrows(), m.ncols()]))
}

/// Jump part of a Lévy triple.
#[derive(Clone, Debug, PartialEq)]
pub enum JumpMeasure {
    None,
    Stable { alpha: f64, tau: SpectralMeasure },
    FiniteAtoms(Vec<JumpAtom>),
}

/// Characteristic triple `(b, Σ, ν)` of a two-dimensional Lévy process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLevyTriple", into = "RawLevyTriple")]
pub struct LevyTriple {
    drift: [f64; 2],
    sigma: [[f64; 2]; 2],
    jumps: JumpMeasure,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawJumps {
    None,
    Stable {
        alpha: f64,
        tau: RawSpectralMeasure,
    },
    Atoms {
        atoms: Vec<JumpAtom>,
    },
    #[serde(other)]
    Unknown,
}

#[derive(Clone, Serialize, Deserialize)]
pub(crate) struct RawLevyTriple {
    #[serde(default)]
    drift: [f64; 2],
    #[serde(default)]
    sigma: [[f64; 2]; 2],
    #[serde(default = "no_jumps")]
    jumps: RawJumps,
}

fn no_jumps() -> RawJumps {
    RawJumps::None
}

impl TryFrom<RawLevyTriple> for LevyTriple {
    type Error = McError;
    fn try_from(raw: RawLevyTriple) -> Result<Self> {
        let jumps = match raw.jumps {
            RawJumps::None => JumpMeasure::None,
            RawJumps::Stable { alpha, tau } => JumpMeasure::Stable {
                alpha,
                tau: SpectralMeasure::try_from(tau)?,
            },
            RawJumps::Atoms { atoms } => JumpMeasure::FiniteAtoms(atoms),
            RawJumps::Unknown => {
                return Err(McError::UnsupportedMeasure(
                    "only stable spectral measures and finite atoms have a computable Op(ν)".into(),
                ))
            }
        };
        LevyTriple::new(raw.drift, raw.sigma, jumps)
    }
}

impl From<LevyTriple> for RawLevyTriple {
    fn from(t: LevyTriple) -> Self {
        let jumps = match t.jumps {
            JumpMeasure::None => RawJumps::None,
            JumpMeasure::Stable { alpha, tau } => RawJumps::Stable { alpha, tau: tau.into() },
            JumpMeasure::FiniteAtoms(atoms) => RawJumps::Atoms { atoms },
        };
        RawLevyTriple {
            drift: t.drift,
            sigma: t.sigma,
            jumps,
        }
    }
}

impl LevyTriple {
    pub fn new(drift: [f64; 2], sigma: [[f64; 2]; 2], jumps: JumpMeasure) -> Result<Self> {
        let tol = tolerance::KERNEL_ROW;
        if drift.iter().chain(sigma.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(McError::OutOfRange("drift and covariance must be finite".into()));
        }
        if (sigma[0][1] - sigma[1][0]).abs() > tol {
            return Err(McError::OutOfRange("covariance must be symmetric".into()));
        }
        let det = sigma[0][0] * sigma[1][1] - sigma[0][1] * sigma[1][0];
        if sigma[0][0] < -tol || sigma[1][1] < -tol || det < -tol {
            return Err(McError::OutOfRange("covariance must be positive semidefinite".into()));
        }
        match &jumps {
            JumpMeasure::Stable { alpha, .. } => check_alpha(*alpha)?,
            JumpMeasure::FiniteAtoms(atoms) => check_jump_atoms(atoms)?,
            JumpMeasure::None => {}
        }
        Ok(LevyTriple { drift, sigma, jumps })
    }

    pub fn drift(&self) -> [f64; 2] {
        self.drift
    }

    pub fn sigma(&self) -> [[f64; 2]; 2] {
        self.sigma
    }

    pub fn jumps(&self) -> &JumpMeasure {
        &self.jumps
    }

    /// Gaussian correlation, 0 when either variance vanishes.
    pub fn rho(&self) -> f64 {
        let v = self.sigma[0][0] * self.sigma[1][1];
        if v > 0.0 {
            (self.sigma[0][1] / v.sqrt()).clamp(-1.0, 1.0)
        } else {
            0.0
        }
    }
}

/// Maximal correlation of the whole paths of a two-dimensional Lévy
/// process: `max(|ρ|, Op(ν))`.
pub fn levy_mc(triple: &LevyTriple) -> Result<CorrelationReport> {
    let rho = triple.rho();
    let (op, tol) = match &triple.jumps {
        JumpMeasure::None => (0.0, 0.0),
        JumpMeasure::Stable { alpha, tau } => {
            let r = opnu_stable(tau, *alpha)?;
            (r.value, r.tolerance)
        }
        JumpMeasure::FiniteAtoms(atoms) => {
            let r = opnu_atoms(atoms)?;
            (r.value, r.tolerance)
        }
    };
    Ok(CorrelationReport::new(rho.abs().max(op), Method::SpectralNorm, tol)
        .with_note("rho", rho)
        .with_note("op_nu", op))
}
