//! Random-subset schemes: maximal correlation of subset pairs, the `r_j`
//! constants, subsampled vectors and the ANOVA decomposition.
//!
//! Subsets of `[n]` are bitmasks with bit `i - 1` standing for index `i`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::discrete::{check_cap, max_corr};
use crate::error::{McError, Result};
use crate::joint::{CorrelationReport, FiniteJoint, Method};
use crate::label::Label;
use crate::linalg::spectral_norm;
use crate::tolerance;

pub type Mask = u32;

/// Largest supported ground set.
pub const MAX_GROUND: u32 = 12;

pub fn mask_of(indices: &[u32]) -> Mask {
    indices.iter().fold(0, |m, &i| m | 1 << (i - 1))
}

pub fn indices_of(mask: Mask) -> Vec<u32> {
    (1..=32).filter(|i| mask >> (i - 1) & 1 == 1).collect()
}

fn subsets_of_size(n: u32, size: u32) -> impl Iterator<Item = Mask> {
    (0..1u32 << n).filter(move |m| m.count_ones() == size)
}

fn submasks(mask: Mask) -> impl Iterator<Item = Mask> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Law of a pair `(S, T)` of random subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScheme", into = "RawScheme")]
pub struct SubsetPairScheme {
    n: u32,
    table: BTreeMap<(Mask, Mask), f64>,
}

#[derive(Clone, Serialize, Deserialize)]
pub(crate) struct RawPair {
    s: Vec<u32>,
    t: Vec<u32>,
    p: f64,
}

#[derive(Clone, Serialize, Deserialize)]
pub(crate) struct RawScheme {
    n: u32,
    pairs: Vec<RawPair>,
}

impl TryFrom<RawScheme> for SubsetPairScheme {
    type Error = McError;
    fn try_from(raw: RawScheme) -> Result<Self> {
        check_ground(raw.n)?;
        let mut cells = Vec::with_capacity(raw.pairs.len());
        for pair in &raw.pairs {
            let s = parse_subset(raw.n, &pair.s)?;
            let t = parse_subset(raw.n, &pair.t)?;
            cells.push(((s, t), pair.p));
        }
        SubsetPairScheme::from_table(raw.n, cells)
    }
}

impl From<SubsetPairScheme> for RawScheme {
    fn from(s: SubsetPairScheme) -> Self {
        RawScheme {
            n: s.n,
            pairs: s
                .table
                .iter()
                .map(|(&(a, b), &p)| RawPair {
                    s: indices_of(a),
                    t: indices_of(b),
                    p,
                })
                .collect(),
        }
    }
}

fn check_ground(n: u32) -> Result<()> {
    if (1..=MAX_GROUND).contains(&n) {
        Ok(())
    } else {
        Err(McError::BadIndices(format!(
            "ground set size {n} is not in 1..={MAX_GROUND}"
        )))
    }
}

fn parse_subset(n: u32, indices: &[u32]) -> Result<Mask> {
    let mut mask = 0;
    for &i in indices {
        if !(1..=n).contains(&i) {
            return Err(McError::BadIndices(format!("index {i} is outside [1, {n}]")));
        }
        if mask & 1 << (i - 1) != 0 {
            return Err(McError::BadIndices(format!("index {i} repeated in a subset")));
        }
        mask |= 1 << (i - 1);
    }
    Ok(mask)
}

/// Named scheme constructors.
#[derive(Clone, Debug)]
pub enum SchemeKind {
    /// `T` uniform among `m`-subsets of `[n]`, `S` uniform among
    /// `k`-subsets of `T`.
    UniformNested {
        n: u32,
        m: u32,
        k: u32,
    },
    /// `S` and `T` independent with the given laws.
    Independent {
        n: u32,
        law_s: Vec<(Mask, f64)>,
        law_t: Vec<(Mask, f64)>,
    },
    Explicit {
        n: u32,
        table: Vec<((Mask, Mask), f64)>,
    },
}

pub fn make_scheme(kind: SchemeKind) -> Result<SubsetPairScheme> {
    match kind {
        SchemeKind::UniformNested { n, m, k } => SubsetPairScheme::uniform_nested(n, m, k),
        SchemeKind::Independent { n, law_s, law_t } => SubsetPairScheme::independent(n, &law_s, &law_t),
        SchemeKind::Explicit { n, table } => SubsetPairScheme::from_table(n, table),
    }
}

impl SubsetPairScheme {
    /// Validates an explicit table; repeated pairs accumulate and a total
    /// within 1e-9 of 1 is renormalised.
    pub fn from_table<I>(n: u32, cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((Mask, Mask), f64)>,
    {
        check_ground(n)?;
        let limit = 1u32 << n;
        let mut table: BTreeMap<(Mask, Mask), f64> = BTreeMap::new();
        for ((s, t), p) in cells {
            if s >= limit || t >= limit {
                return Err(McError::BadIndices(format!("subset mask out of range for n = {n}")));
            }
            if !p.is_finite() {
                return Err(McError::NonFinite {
                    row: s as usize,
                    col: t as usize,
                });
            }
            if p < -tolerance::NEGATIVE_MASS {
                return Err(McError::NegativeMass {
                    row: s as usize,
                    col: t as usize,
                    value: p,
                });
            }
            *table.entry((s, t)).or_default() += p.max(0.0);
        }
        let total: f64 = table.values().sum();
        if (total - 1.0).abs() > tolerance::MASS_RENORMALIZE {
            return Err(McError::MassNotOne {
                total,
                tolerance: tolerance::MASS_RENORMALIZE,
            });
        }
        table.retain(|_, p| *p > 0.0);
        table.values_mut().for_each(|p| *p /= total);
        Ok(SubsetPairScheme { n, table })
    }

    pub fn uniform_nested(n: u32, m: u32, k: u32) -> Result<Self> {
        check_ground(n)?;
        if !(k <= m && m <= n) {
            return Err(McError::BadIndices(format!(
                "need 0 <= k <= m <= n, got n = {n}, m = {m}, k = {k}"
            )));
        }
        let p = 1.0 / (binomial(n, m) * binomial(m, k));
        let cells = subsets_of_size(n, m)
            .flat_map(|t| {
                submasks(t)
                    .filter(move |s| s.count_ones() == k)
                    .map(move |s| ((s, t), p))
            })
            .collect::<Vec<_>>();
        SubsetPairScheme::from_table(n, cells)
    }

    pub fn independent(n: u32, law_s: &[(Mask, f64)], law_t: &[(Mask, f64)]) -> Result<Self> {
        let cells = law_s
            .iter()
            .flat_map(|&(s, ps)| law_t.iter().map(move |&(t, pt)| ((s, t), ps * pt)))
            .collect::<Vec<_>>();
        SubsetPairScheme::from_table(n, cells)
    }

    /// `S = T = [n]` almost surely.
    pub fn full(n: u32) -> Result<Self> {
        check_ground(n)?;
        let all = (1u32 << n) - 1;
        SubsetPairScheme::from_table(n, [((all, all), 1.0)])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Mask, Mask, f64)> + '_ {
        self.table.iter().map(|(&(s, t), &p)| (s, t, p))
    }

    pub fn law_s(&self) -> BTreeMap<Mask, f64> {
        let mut out = BTreeMap::new();
        for (s, _, p) in self.pairs() {
            *out.entry(s).or_default() += p;
        }
        out
    }

    pub fn law_t(&self) -> BTreeMap<Mask, f64> {
        let mut out = BTreeMap::new();
        for (_, t, p) in self.pairs() {
            *out.entry(t).or_default() += p;
        }
        out
    }

    /// `P(j ∈ S)` and `P(j ∈ T)` for 1-based `j`.
    pub fn inclusion(&self, j: u32) -> (f64, f64) {
        let bit = 1 << (j - 1);
        self.pairs().fold((0.0, 0.0), |(a, b), (s, t, p)| {
            (
                a + if s & bit != 0 { p } else { 0.0 },
                b + if t & bit != 0 { p } else { 0.0 },
            )
        })
    }

    /// First pair with `S ⊄ T`, if any.
    pub fn non_nested_pair(&self) -> Option<(Mask, Mask)> {
        self.pairs().find(|&(s, t, _)| s & !t != 0).map(|(s, t, _)| (s, t))
    }

    pub fn to_joint(&self) -> Result<FiniteJoint> {
        FiniteJoint::from_cells(
            self.pairs()
                .map(|(s, t, p)| (Label::Int(s as i64), Label::Int(t as i64), p)),
        )
    }
}

/// `R(S, T)`.
pub fn subset_pair_mc(scheme: &SubsetPairScheme) -> Result<CorrelationReport> {
    max_corr(&scheme.to_joint()?)
}

fn check_index(scheme: &SubsetPairScheme, j: u32) -> Result<()> {
    if (1..=scheme.n).contains(&j) {
        Ok(())
    } else {
        Err(McError::BadIndices(format!("index {j} is outside [1, {}]", scheme.n)))
    }
}

/// Best constant of the bilinear inequality restricted to `s ⊇ u`,
/// `t ⊇ u`: the largest singular value of
/// `P(S = s, T = t) / √(P(S = s) P(T = t))` over those subsets.
pub fn ru(scheme: &SubsetPairScheme, u: Mask) -> f64 {
    let law_s = scheme.law_s();
    let law_t = scheme.law_t();
    let rows: Vec<Mask> = law_s.keys().copied().filter(|s| s & u == u).collect();
    let cols: Vec<Mask> = law_t.keys().copied().filter(|t| t & u == u).collect();
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    let n = DMatrix::from_fn(rows.len(), cols.len(), |a, b| {
        let (s, t) = (rows[a], cols[b]);
        scheme
            .table
            .get(&(s, t))
            .map_or(0.0, |p| p / (law_s[&s] * law_t[&t]).sqrt())
    });
    spectral_norm(&n)
}

/// `r_j` for a 1-based index `j`.
pub fn rj(scheme: &SubsetPairScheme, j: u32) -> Result<f64> {
    check_index(scheme, j)?;
    Ok(ru(scheme, 1 << (j - 1)))
}

/// Perron–Frobenius route to `r_j`: with
/// `C_{uv} = Σ_{t ∋ j} P(T = t | S = u) P(S = v | T = t)` over `u, v ∋ j`,
/// constant row sums `c` give `r_j = √c`. `None` when the rows differ.
pub fn rj_row_sum_oracle(scheme: &SubsetPairScheme, j: u32) -> Result<Option<f64>> {
    check_index(scheme, j)?;
    let bit = 1 << (j - 1);
    let law_s = scheme.law_s();
    let law_t = scheme.law_t();
    // P(j ∈ S | T = t)
    let mut hit_given_t: BTreeMap<Mask, f64> = BTreeMap::new();
    for (s, t, p) in scheme.pairs() {
        if s & bit != 0 {
            *hit_given_t.entry(t).or_default() += p / law_t[&t];
        }
    }
    let mut sums = Vec::new();
    for (&u, &pu) in law_s.iter().filter(|(s, _)| *s & bit != 0) {
        let row: f64 = scheme
            .pairs()
            .filter(|&(s, t, _)| s == u && t & bit != 0)
            .map(|(_, t, p)| p / pu * hit_given_t.get(&t).copied().unwrap_or(0.0))
            .sum();
        sums.push(row);
    }
    let Some(&first) = sums.first() else {
        return Ok(Some(0.0));
    };
    if sums.iter().all(|r| (r - first).abs() <= tolerance::KERNEL_ROW) {
        Ok(Some(first.sqrt()))
    } else {
        Ok(None)
    }
}

/// `R((Y_1..Y_n), (Z_1..Z_n)) = max(R(S, T), max_j r_j)` for a vector with
/// independent non-degenerate coordinates observed on `S` and on `T`.
pub fn subsample_mc(scheme: &SubsetPairScheme) -> Result<CorrelationReport> {
    let pair = subset_pair_mc(scheme)?;
    let r: Vec<f64> = (1..=scheme.n).map(|j| ru(scheme, 1 << (j - 1))).collect();
    let best = r.iter().copied().fold(pair.value, f64::max);
    let mut report = CorrelationReport::new(best.min(1.0), Method::SvdExact, tolerance::SPECTRAL)
        .with_note("r_st", pair.value)
        .with_note("r_j", r);
    report.spectrum = pair.spectrum;
    Ok(report)
}

fn check_law(i: usize, law: &[f64]) -> Result<()> {
    if law.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(McError::OutOfRange(format!(
            "law of coordinate {} has invalid entries",
            i + 1
        )));
    }
    let total: f64 = law.iter().sum();
    if (total - 1.0).abs() > tolerance::MASS_RENORMALIZE {
        return Err(McError::MassNotOne {
            total,
            tolerance: tolerance::MASS_RENORMALIZE,
        });
    }
    if law.iter().filter(|&&p| p > 0.0).count() < 2 {
        return Err(McError::OutOfRange(format!("coordinate {} is degenerate", i + 1)));
    }
    Ok(())
}

/// Assignments of values to the coordinates in `mask`, with probabilities.
fn assignments(mask: Mask, laws: &[Vec<f64>]) -> Vec<(BTreeMap<u32, usize>, f64)> {
    let mut out = vec![(BTreeMap::new(), 1.0)];
    for i in indices_of(mask) {
        let law = &laws[i as usize - 1];
        out = out
            .into_iter()
            .flat_map(|(vals, p)| {
                law.iter().enumerate().filter(|(_, q)| **q > 0.0).map(move |(v, q)| {
                    let mut vals = vals.clone();
                    vals.insert(i, v);
                    (vals, p * q)
                })
            })
            .collect();
    }
    out
}

fn observed(mask: Mask, vals: &BTreeMap<u32, usize>) -> Label {
    let seen = indices_of(mask).iter().map(|i| Label::Int(vals[i] as i64)).collect();
    Label::pair(Label::Int(mask as i64), Label::Tuple(seen))
}

/// Exact joint of `Y = (S, X|_S)` and `Z = (T, X|_T)` for independent
/// coordinates `X_i` with finite laws `x_laws[i - 1]` over `0, 1, ...`.
/// Coordinates outside the observed subset carry no value at all.
pub fn brute_force_subvector_joint(scheme: &SubsetPairScheme, x_laws: &[Vec<f64>], cap: usize) -> Result<FiniteJoint> {
    if x_laws.len() != scheme.n as usize {
        return Err(McError::ShapeMismatch(format!(
            "{} coordinate laws for n = {}",
            x_laws.len(),
            scheme.n
        )));
    }
    for (i, law) in x_laws.iter().enumerate() {
        check_law(i, law)?;
    }
    let support = |mask: Mask| -> u128 {
        indices_of(mask)
            .iter()
            .map(|&i| x_laws[i as usize - 1].iter().filter(|&&p| p > 0.0).count() as u128)
            .product()
    };
    let ny: u128 = scheme.law_s().keys().map(|&s| support(s)).sum();
    let nz: u128 = scheme.law_t().keys().map(|&t| support(t)).sum();
    check_cap(ny * nz, cap)?;
    let mut cells = Vec::new();
    for (s, t, p) in scheme.pairs() {
        for (vals, q) in assignments(s | t, x_laws) {
            cells.push((observed(s, &vals), observed(t, &vals), p * q));
        }
    }
    FiniteJoint::from_cells(cells)
}

/// Count vectors of `size` draws from `law`, with multinomial probabilities.
fn count_vectors(size: u32, law: &[f64]) -> Vec<(Vec<u32>, f64)> {
    let mut out: Vec<(Vec<u32>, f64)> = vec![(Vec::new(), 1.0)];
    let mut remaining_mass = 1.0;
    for (idx, &p) in law.iter().enumerate() {
        let last = idx + 1 == law.len();
        out = out
            .into_iter()
            .flat_map(|(counts, prob)| {
                let used: u32 = counts.iter().sum();
                let left = size - used;
                let range: Vec<u32> = if last { vec![left] } else { (0..=left).collect() };
                range.into_iter().map(move |c| {
                    // binomial split of the remaining draws
                    let q = if remaining_mass > 0.0 { p / remaining_mass } else { 0.0 };
                    let w = binomial(left, c) * q.powi(c as i32) * (1.0 - q).powi((left - c) as i32);
                    let mut counts = counts.clone();
                    counts.push(c);
                    (counts, prob * w)
                })
            })
            .filter(|(_, w)| *w > 0.0)
            .collect();
        remaining_mass -= p;
    }
    out
}

fn count_label(counts: &[u32]) -> Label {
    Label::Tuple(counts.iter().map(|&c| Label::Int(c as i64)).collect())
}

/// Exact joint of the empirical counts of `X_1..X_m` and of
/// `X_{l+1}..X_n` for i.i.d. draws from `law`.
pub fn empirical_measure_joint(n: u32, m: u32, l: u32, law: &[f64], cap: usize) -> Result<FiniteJoint> {
    if !(l < m && m <= n) {
        return Err(McError::BadIndices(format!(
            "need 0 <= l < m <= n, got l = {l}, m = {m}, n = {n}"
        )));
    }
    check_law(0, law)?;
    let (a, b, c) = (
        count_vectors(l, law),
        count_vectors(m - l, law),
        count_vectors(n - m, law),
    );
    check_cap(a.len() as u128 * b.len() as u128 * c.len() as u128, cap)?;
    let add = |u: &[u32], v: &[u32]| -> Vec<u32> { u.iter().zip(v).map(|(x, y)| x + y).collect() };
    let mut cells = Vec::with_capacity(a.len() * b.len() * c.len());
    for (ca, pa) in &a {
        for (cb, pb) in &b {
            let first = count_label(&add(ca, cb));
            for (cc, pc) in &c {
                cells.push((first.clone(), count_label(&add(cb, cc)), pa * pb * pc));
            }
        }
    }
    FiniteJoint::from_cells(cells)
}

/// Orthogonal decomposition `ψ = Σ_t Ē_t ψ` of a function of independent
/// finite coordinates. Every component is stored on the full grid (row
/// major, last coordinate fastest) and is constant in the coordinates
/// outside its index set.
#[derive(Clone, Debug)]
pub struct AnovaDecomposition {
    dims: Vec<usize>,
    laws: Vec<Vec<f64>>,
    components: BTreeMap<Mask, Vec<f64>>,
}

impl AnovaDecomposition {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn component(&self, u: Mask) -> &[f64] {
        &self.components[&u]
    }

    pub fn components(&self) -> &BTreeMap<Mask, Vec<f64>> {
        &self.components
    }

    /// Product-law probability of every grid cell.
    pub fn cell_weights(&self) -> Vec<f64> {
        let mut w = vec![1.0];
        for law in &self.laws {
            w = w.iter().flat_map(|a| law.iter().map(move |b| a * b)).collect();
        }
        w
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.cell_weights()
            .iter()
            .zip(f)
            .zip(g)
            .map(|((w, a), b)| w * a * b)
            .sum()
    }

    /// Pointwise sum of all components.
    pub fn total(&self) -> Vec<f64> {
        let len = self.dims.iter().product();
        let mut out = vec![0.0; len];
        for c in self.components.values() {
            out.iter_mut().zip(c).for_each(|(o, v)| *o += v);
        }
        out
    }
}

/// Applies the conditional expectation `E_j` that integrates out
/// coordinate `j` (0-based).
fn average_out(values: &[f64], dims: &[usize], law: &[f64], j: usize) -> Vec<f64> {
    let inner: usize = dims[j + 1..].iter().product();
    let d = dims[j];
    let outer = values.len() / (inner * d);
    let mut out = vec![0.0; values.len()];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * d * inner + i;
            let mean: f64 = (0..d).map(|v| law[v] * values[base + v * inner]).sum();
            for v in 0..d {
                out[base + v * inner] = mean;
            }
        }
    }
    out
}

/// Computes all `2^n` components `Ē_t ψ = Π_{j∈t}(I − E_j) Π_{k∉t} E_k ψ`.
pub fn anova_decompose(psi: &[f64], x_laws: &[Vec<f64>]) -> Result<AnovaDecomposition> {
    let n = x_laws.len();
    if n > 10 {
        return Err(McError::SizeOverflow {
            cells: 1u128 << n,
            cap: 1 << 10,
        });
    }
    for (i, law) in x_laws.iter().enumerate() {
        check_law(i, law)?;
    }
    let dims: Vec<usize> = x_laws.iter().map(Vec::len).collect();
    let len: usize = dims.iter().product();
    if psi.len() != len {
        return Err(McError::ShapeMismatch(format!(
            "table has {} cells, laws need {len}",
            psi.len()
        )));
    }
    let mut components = BTreeMap::new();
    for t in 0..1u32 << n {
        let mut v = psi.to_vec();
        for k in (0..n).filter(|k| t >> k & 1 == 0) {
            v = average_out(&v, &dims, &x_laws[k], k);
        }
        for j in (0..n).filter(|j| t >> j & 1 == 1) {
            let e = average_out(&v, &dims, &x_laws[j], j);
            v.iter_mut().zip(e).for_each(|(a, b)| *a -= b);
        }
        components.insert(t, v);
    }
    Ok(AnovaDecomposition {
        dims,
        laws: x_laws.to_vec(),
        components,
    })
}

/// Both sides of the Fisher-information inequality for Gaussian
/// coordinates with variances `variances`, where `I(U_s) = 1 / Σ_{i∈s} σ_i²`:
///
/// `Σ_t P(T=t) I(U_t) μ_t²  ≤  R² Σ_s P(S=s) I(U_s) λ_s²`,
/// `μ_t = Σ_s P(S=s | T=t) λ_s`.
pub fn fisher_gap_gaussian<F>(scheme: &SubsetPairScheme, variances: &[f64], lambda: F) -> Result<(f64, f64)>
where
    F: Fn(Mask) -> f64,
{
    if let Some((s, t)) = scheme.non_nested_pair() {
        return Err(McError::NotNested { s, t });
    }
    if variances.len() != scheme.n as usize {
        return Err(McError::ShapeMismatch(format!(
            "{} variances for n = {}",
            variances.len(),
            scheme.n
        )));
    }
    if variances.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(McError::OutOfRange("variances must be positive".into()));
    }
    if scheme.pairs().any(|(s, _, _)| s == 0) {
        return Err(McError::OutOfRange("S must be non-empty almost surely".into()));
    }
    let info = |mask: Mask| 1.0 / indices_of(mask).iter().map(|&i| variances[i as usize - 1]).sum::<f64>();
    let law_t = scheme.law_t();
    let mut mu: BTreeMap<Mask, f64> = BTreeMap::new();
    for (s, t, p) in scheme.pairs() {
        *mu.entry(t).or_default() += p / law_t[&t] * lambda(s);
    }
    let lhs: f64 = law_t.iter().map(|(&t, &pt)| pt * info(t) * mu[&t].powi(2)).sum();
    let r = subsample_mc(scheme)?.value;
    let energy: f64 = scheme
        .law_s()
        .iter()
        .map(|(&s, &ps)| ps * info(s) * lambda(s).powi(2))
        .sum();
    Ok((lhs, r * r * energy))
}
