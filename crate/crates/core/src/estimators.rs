//! Convergent lower-bound estimators: censored joints of countable laws,
//! quantile grids of continuous laws, truncation ladders, seeded samplers
//! and binned empirical estimation.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::bvn::{bvn_rect, phi, phi_inv};
use crate::discrete::max_corr;
use crate::error::{McError, Result};
use crate::joint::{CorrelationReport, FiniteJoint, Method};
use crate::label::Label;
use crate::tolerance;

/// Name of the generator recorded in every [`SampleBatch`].
pub const RNG_NAME: &str = "chacha20";

/// Largest censoring radius accepted by the Poisson-based joints.
pub const MAX_TRUNC: u32 = 60;

/// Tail mass below which a Poisson sum is cut off; the remainder is
/// assigned to the outermost cell.
const POISSON_TAIL: f64 = 1e-18;

struct PoissonTable {
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl PoissonTable {
    fn new(rate: f64, len: usize) -> Self {
        let pmf: Vec<f64> = (0..len)
            .map(|k| (k as f64 * rate.ln() - rate - ln_gamma(k as f64 + 1.0)).exp())
            .collect();
        let cdf = pmf
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        PoissonTable { pmf, cdf }
    }

    /// Smallest table covering `start..` up to a tail below [`POISSON_TAIL`].
    fn covering(rate: f64, start: usize) -> Self {
        let mut len = start + 32;
        loop {
            let t = PoissonTable::new(rate, len);
            if 1.0 - t.cdf[len - 1] < POISSON_TAIL || len > 100_000 {
                return t;
            }
            len *= 2;
        }
    }

    fn pmf(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    fn cdf(&self, k: i64) -> f64 {
        if k < 0 {
            0.0
        } else {
            self.cdf.get(k as usize).copied().unwrap_or(1.0)
        }
    }

    fn sf(&self, k: i64) -> f64 {
        (1.0 - self.cdf(k)).max(0.0)
    }

    fn len(&self) -> usize {
        self.pmf.len()
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate.is_finite() && rate <= 500.0 {
        Ok(())
    } else {
        Err(McError::OutOfRange(format!("rate {rate} must be in (0, 500]")))
    }
}

fn check_trunc(trunc: u32) -> Result<()> {
    if trunc <= MAX_TRUNC {
        Ok(())
    } else {
        Err(McError::OutOfRange(format!("truncation {trunc} exceeds {MAX_TRUNC}")))
    }
}

/// Exact joint of `(M − N, M)` for independent Poisson(`rate`) variables,
/// with `M − N` censored to `[−trunc, trunc]` and `M` to `[0, trunc]`.
/// Censoring moves mass into the boundary cells; nothing is discarded.
pub fn skellam_poisson_joint(rate: f64, trunc: u32) -> Result<FiniteJoint> {
    check_rate(rate)?;
    check_trunc(trunc)?;
    let t = trunc as i64;
    let pois = PoissonTable::covering(rate, 3 * trunc as usize);
    let width = 2 * trunc as usize + 1;
    let mut probs = DMatrix::zeros(width, trunc as usize + 1);
    let col = trunc as usize;
    let add_row = |m: i64, weight: f64, y: usize, probs: &mut DMatrix<f64>| {
        if t == 0 {
            probs[(0, y)] += weight;
            return;
        }
        // x = m − N, clamped
        probs[(width - 1, y)] += weight * pois.cdf(m - t);
        for n in (m - t + 1).max(0)..m + t {
            probs[((m - n + t) as usize, y)] += weight * pois.pmf(n as usize);
        }
        probs[(0, y)] += weight * pois.sf(m + t - 1);
    };
    for y in 0..trunc as usize {
        add_row(y as i64, pois.pmf(y), y, &mut probs);
    }
    for m in trunc as usize..pois.len() {
        add_row(m as i64, pois.pmf(m), col, &mut probs);
    }
    probs[(width - 1, col)] += pois.sf(pois.len() as i64 - 1);
    let x_labels = (-t..=t).map(Label::Int).collect();
    let y_labels = (0..=t).map(Label::Int).collect();
    FiniteJoint::from_matrix(probs, x_labels, y_labels)
}

/// `P(|M − N| > trunc or M > trunc)`: the mass moved by censoring.
pub fn skellam_tail_mass(rate: f64, trunc: u32) -> Result<f64> {
    check_rate(rate)?;
    check_trunc(trunc)?;
    let pois = PoissonTable::covering(rate, 3 * trunc as usize);
    let kept: f64 = (0..=trunc as usize)
        .map(|y| pois.pmf(y) * pois.cdf((y + trunc as usize) as i64))
        .sum();
    Ok((1.0 - kept).max(0.0))
}

/// Grid width for [`brownian_poisson_joint`].
pub const BROWNIAN_BIN_WIDTH: f64 = 0.5;

/// Joint of `(B_1 + N_1, N_1)` for a standard Brownian motion and an
/// independent Poisson process: `B_1 + N_1` is binned on a fixed grid of
/// width 0.5 over `[−trunc, trunc]` plus two tail bins, `N_1` is censored
/// at `trunc`. Raising `trunc` refines both partitions.
pub fn brownian_poisson_joint(rate: f64, trunc: u32) -> Result<FiniteJoint> {
    check_rate(rate)?;
    check_trunc(trunc)?;
    let t = trunc as f64;
    let inner = (2.0 * t / BROWNIAN_BIN_WIDTH).round() as usize;
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend((0..=inner).map(|i| -t + i as f64 * BROWNIAN_BIN_WIDTH));
    edges.push(f64::INFINITY);
    let pois = PoissonTable::covering(rate, 2 * trunc as usize);
    let nbins = edges.len() - 1;
    let mut probs = DMatrix::zeros(nbins, trunc as usize + 1);
    let mut add = |n: usize, weight: f64, col: usize| {
        for b in 0..nbins {
            let shift = n as f64;
            probs[(b, col)] += weight * (phi(edges[b + 1] - shift) - phi(edges[b] - shift));
        }
    };
    for n in 0..trunc as usize {
        add(n, pois.pmf(n), n);
    }
    for n in trunc as usize..pois.len() {
        add(n, pois.pmf(n), trunc as usize);
    }
    probs[(nbins - 1, trunc as usize)] += pois.sf(pois.len() as i64 - 1);
    FiniteJoint::from_matrix(probs, Label::range(nbins), Label::range(trunc as usize + 1))
}

/// `P(N_1 > trunc or |B_1 + N_1| > trunc)`.
pub fn brownian_poisson_tail_mass(rate: f64, trunc: u32) -> Result<f64> {
    check_rate(rate)?;
    check_trunc(trunc)?;
    let pois = PoissonTable::covering(rate, 2 * trunc as usize);
    let t = trunc as f64;
    let kept: f64 = (0..=trunc as usize)
        .map(|n| pois.pmf(n) * (phi(t - n as f64) - phi(-t - n as f64)))
        .sum();
    Ok((1.0 - kept).max(0.0))
}

/// Exact joint of a standard bivariate normal with correlation `rho`
/// discretised on the `bins × bins` grid of marginal quantiles
/// `Φ^{-1}(i / bins)`.
pub fn gaussian_grid_joint(rho: f64, bins: usize) -> Result<FiniteJoint> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(McError::OutOfRange(format!("rho = {rho} is not in [-1, 1]")));
    }
    if bins == 0 {
        return Err(McError::OutOfRange("at least one bin is required".into()));
    }
    let edges: Vec<f64> = (0..=bins).map(|i| phi_inv(i as f64 / bins as f64)).collect();
    let probs = DMatrix::from_fn(bins, bins, |i, j| {
        bvn_rect(edges[i], edges[i + 1], edges[j], edges[j + 1], rho)
    });
    FiniteJoint::from_matrix(probs, Label::range(bins), Label::range(bins))
}

/// Maximal correlations of a censoring family at increasing levels.
#[derive(Clone, Debug, Serialize)]
pub struct TruncationLadder {
    pub levels: Vec<u32>,
    pub reports: Vec<CorrelationReport>,
    pub tail_mass: Vec<f64>,
}

impl TruncationLadder {
    pub fn values(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.value).collect()
    }

    pub fn last(&self) -> Option<&CorrelationReport> {
        self.reports.last()
    }
}

/// Runs `generator` at every level and checks that the values never
/// decrease by more than 1e-9. The generator returns the censored joint
/// and the mass it moved.
pub fn truncation_ladder<F>(mut generator: F, levels: &[u32]) -> Result<TruncationLadder>
where
    F: FnMut(u32) -> Result<(FiniteJoint, f64)>,
{
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(McError::OutOfRange("ladder levels must be strictly increasing".into()));
    }
    let mut ladder = TruncationLadder {
        levels: levels.to_vec(),
        reports: Vec::with_capacity(levels.len()),
        tail_mass: Vec::with_capacity(levels.len()),
    };
    for &level in levels {
        let (joint, tail) = generator(level)?;
        let mut report = max_corr(&joint)?;
        if let Some(prev) = ladder.reports.last() {
            if report.value < prev.value - tolerance::LADDER_MONOTONE {
                return Err(McError::MonotonicityViolation {
                    level: level as f64,
                    previous: prev.value,
                    current: report.value,
                });
            }
        }
        report.method = Method::Truncation;
        report = report.with_note("level", level).with_note("tail_mass", tail);
        ladder.reports.push(report);
        ladder.tail_mass.push(tail);
    }
    Ok(ladder)
}

/// Named censoring families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LadderFamily {
    /// `(M − N, M)`, level = censoring radius.
    Skellam { rate: f64 },
    /// `(B_1 + N_1, N_1)`, level = censoring radius.
    BrownianPoisson { rate: f64 },
    /// Bivariate normal quantile grid, level `l` = `2^l` bins per axis.
    GaussianGrid { rho: f64 },
}

impl LadderFamily {
    pub fn generate(&self, level: u32) -> Result<(FiniteJoint, f64)> {
        match *self {
            LadderFamily::Skellam { rate } => {
                Ok((skellam_poisson_joint(rate, level)?, skellam_tail_mass(rate, level)?))
            }
            LadderFamily::BrownianPoisson { rate } => Ok((
                brownian_poisson_joint(rate, level)?,
                brownian_poisson_tail_mass(rate, level)?,
            )),
            LadderFamily::GaussianGrid { rho } => {
                if level > 12 {
                    return Err(McError::SizeOverflow {
                        cells: 1u128 << (2 * level),
                        cap: 1 << 24,
                    });
                }
                Ok((gaussian_grid_joint(rho, 1 << level)?, 0.0))
            }
        }
    }

    pub fn ladder(&self, levels: &[u32]) -> Result<TruncationLadder> {
        truncation_ladder(|l| self.generate(l), levels)
    }
}

/// Seeded sample generators.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "sampler", rename_all = "snake_case")]
pub enum Sampler {
    BivariateGaussian {
        rho: f64,
    },
    MarshallOlkin {
        l1: f64,
        l2: f64,
        l3: f64,
    },
    /// Partial sums of i.i.d. increments drawn from a finite joint with
    /// numeric labels; every path contributes `steps` pairs.
    RandomWalkPair {
        increments: FiniteJoint,
        steps: usize,
    },
    /// Two independent Chambers–Mallows–Stuck draws per pair.
    StableCms {
        alpha: f64,
        beta: f64,
        scale: f64,
    },
}

impl Sampler {
    pub fn tag(&self) -> String {
        match self {
            Sampler::BivariateGaussian { rho } => format!("bivariate_gaussian({rho})"),
            Sampler::MarshallOlkin { l1, l2, l3 } => format!("marshall_olkin({l1},{l2},{l3})"),
            Sampler::RandomWalkPair { increments, steps } => {
                format!("random_walk_pair({}x{},{steps})", increments.nx(), increments.ny())
            }
            Sampler::StableCms { alpha, beta, scale } => format!("stable_cms({alpha},{beta},{scale})"),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(McError::OutOfRange(m));
        match self {
            Sampler::BivariateGaussian { rho } if !(-1.0..=1.0).contains(rho) => bad(format!("rho = {rho}")),
            Sampler::MarshallOlkin { l1, l2, l3 } if ![l1, l2, l3].iter().all(|l| **l > 0.0 && l.is_finite()) => {
                bad("Marshall-Olkin rates must be positive".into())
            }
            Sampler::RandomWalkPair { steps: 0, .. } => bad("steps must be positive".into()),
            Sampler::RandomWalkPair { increments, .. }
                if increments
                    .x_labels()
                    .iter()
                    .chain(increments.y_labels())
                    .any(|l| l.as_f64().is_none()) =>
            {
                bad("random-walk increments need numeric labels".into())
            }
            Sampler::StableCms { alpha, beta, scale }
                if !(*alpha > 0.0 && *alpha <= 2.0)
                    || !(-1.0..=1.0).contains(beta)
                    || scale.is_nan()
                    || *scale <= 0.0 =>
            {
                bad(format!("stable parameters ({alpha}, {beta}, {scale})"))
            }
            _ => Ok(()),
        }
    }
}

/// Sampled pairs with the information needed to regenerate them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleBatch {
    pub pairs: Vec<(f64, f64)>,
    pub seed: u64,
    pub generator: String,
    pub rng: String,
}

impl SampleBatch {
    pub fn from_pairs(pairs: Vec<(f64, f64)>, generator: &str) -> Self {
        SampleBatch {
            pairs,
            seed: 0,
            generator: generator.to_string(),
            rng: RNG_NAME.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Generator for substream `task` of `seed`.
pub fn task_rng(seed: u64, task: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

fn cms_draw<R: Rng>(rng: &mut R, alpha: f64, beta: f64, scale: f64) -> f64 {
    use std::f64::consts::{FRAC_PI_2, PI};
    let v = PI * (rng.random::<f64>() - 0.5);
    let w: f64 = Exp1.sample(rng);
    if (alpha - 1.0).abs() < 1e-12 {
        let core = FRAC_PI_2 + beta * v;
        let x = (core * v.tan() - beta * ((FRAC_PI_2 * w * v.cos()) / core).ln()) / FRAC_PI_2;
        scale * x + beta * scale * scale.ln() / FRAC_PI_2
    } else {
        let t = beta * (PI * alpha / 2.0).tan();
        let b = t.atan() / alpha;
        let s = (1.0 + t * t).powf(1.0 / (2.0 * alpha));
        let x = s * (alpha * (v + b)).sin() / v.cos().powf(1.0 / alpha)
            * ((v - alpha * (v + b)).cos() / w).powf((1.0 - alpha) / alpha);
        scale * x
    }
}

/// Draws `count` pairs (for random walks: `count` paths) from substream 0.
pub fn sample(sampler: &Sampler, count: usize, seed: u64) -> Result<SampleBatch> {
    sample_task(sampler, count, seed, 0)
}

/// Draws from substream `task`, so parallel tasks never share a stream.
pub fn sample_task(sampler: &Sampler, count: usize, seed: u64, task: u64) -> Result<SampleBatch> {
    sampler.validate()?;
    if count == 0 {
        return Err(McError::OutOfRange("count must be positive".into()));
    }
    let mut rng = task_rng(seed, task);
    let pairs = match sampler {
        Sampler::BivariateGaussian { rho } => {
            let c = (1.0 - rho * rho).sqrt();
            (0..count)
                .map(|_| {
                    let z1: f64 = StandardNormal.sample(&mut rng);
                    let z2: f64 = StandardNormal.sample(&mut rng);
                    (z1, rho * z1 + c * z2)
                })
                .collect()
        }
        Sampler::MarshallOlkin { l1, l2, l3 } => {
            let e = |l: f64| Exp::new(l).expect("validated rate");
            let (e1, e2, e3) = (e(*l1), e(*l2), e(*l3));
            (0..count)
                .map(|_| {
                    let w1 = e1.sample(&mut rng);
                    let w2 = e2.sample(&mut rng);
                    let w3 = e3.sample(&mut rng);
                    (w1.min(w3), w2.min(w3))
                })
                .collect()
        }
        Sampler::RandomWalkPair { increments, steps } => {
            let cells: Vec<(f64, f64, f64)> = increments
                .cells()
                .map(|(x, y, p)| (x.as_f64().unwrap_or(0.0), y.as_f64().unwrap_or(0.0), p))
                .collect();
            let cumulative: Vec<f64> = cells
                .iter()
                .scan(0.0, |acc, c| {
                    *acc += c.2;
                    Some(*acc)
                })
                .collect();
            let mut out = Vec::with_capacity(count * steps);
            for _ in 0..count {
                let (mut s, mut t) = (0.0, 0.0);
                for _ in 0..*steps {
                    let u = rng.random::<f64>() * cumulative[cumulative.len() - 1];
                    let idx = cumulative.partition_point(|&c| c <= u).min(cells.len() - 1);
                    s += cells[idx].0;
                    t += cells[idx].1;
                    out.push((s, t));
                }
            }
            out
        }
        Sampler::StableCms { alpha, beta, scale } => (0..count)
            .map(|_| {
                let x = cms_draw(&mut rng, *alpha, *beta, *scale);
                let z = cms_draw(&mut rng, *alpha, *beta, *scale);
                (x, z)
            })
            .collect(),
    };
    Ok(SampleBatch {
        pairs,
        seed,
        generator: sampler.tag(),
        rng: RNG_NAME.to_string(),
    })
}

/// Equal-frequency bin index of every value; equal values always share a
/// bin, so a bin may absorb more than its share.
pub fn quantile_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0; n];
    let mut prev: Option<(f64, usize)> = None;
    for (rank, &i) in order.iter().enumerate() {
        let bin = match prev {
            Some((v, b)) if v == values[i] => b,
            _ => rank * bins / n,
        };
        out[i] = bin;
        prev = Some((values[i], bin));
    }
    out
}

/// Maximal correlation of the empirical joint of quantile-binned samples.
/// A lower estimate: binning is a coordinate-wise map.
pub fn binned_empirical_mc(batch: &SampleBatch, bins_x: usize, bins_y: usize) -> Result<CorrelationReport> {
    if bins_x == 0 || bins_y == 0 {
        return Err(McError::OutOfRange("bin counts must be positive".into()));
    }
    if batch.pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(McError::MalformedInput("samples must be finite".into()));
    }
    let xs: Vec<f64> = batch.pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = batch.pairs.iter().map(|p| p.1).collect();
    let bx = quantile_bins(&xs, bins_x);
    let by = quantile_bins(&ys, bins_y);
    let mut counts = DMatrix::<f64>::zeros(bins_x, bins_y);
    for (i, j) in bx.iter().zip(&by) {
        counts[(*i, *j)] += 1.0;
    }
    let used = |m: &DMatrix<f64>, rows: bool| {
        if rows {
            m.row_iter().filter(|r| r.sum() > 0.0).count()
        } else {
            m.column_iter().filter(|c| c.sum() > 0.0).count()
        }
    };
    if used(&counts, true) < 2 {
        return Err(McError::DegenerateAxis("x"));
    }
    if used(&counts, false) < 2 {
        return Err(McError::DegenerateAxis("y"));
    }
    let n = batch.pairs.len() as f64;
    let joint = FiniteJoint::from_matrix(counts.clone() / n, Label::range(bins_x), Label::range(bins_y))?;
    let mut report = max_corr(&joint)?;
    report.method = Method::BinnedEmpirical;
    report.tolerance = (bins_x.max(bins_y) as f64 / n).sqrt();
    Ok(report
        .with_note("samples", batch.pairs.len())
        .with_note("bins", vec![bins_x, bins_y])
        .with_note("occupied_bins", vec![used(&counts, true), used(&counts, false)])
        .with_note("generator", batch.generator.clone())
        .with_note("seed", batch.seed))
}

/// Reads two-column `x,y` CSV; a header row is optional.
pub fn read_pairs_csv<R: Read>(reader: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut pairs = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| McError::MalformedInput(e.to_string()))?;
        if record.len() != 2 {
            return Err(McError::MalformedInput(format!(
                "line {} has {} columns, expected 2",
                line + 1,
                record.len()
            )));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(x), Ok(y)) => pairs.push((x, y)),
            _ if line == 0 => continue,
            _ => {
                return Err(McError::MalformedInput(format!(
                    "line {} is not numeric: {:?}",
                    line + 1,
                    record
                )))
            }
        }
    }
    Ok(pairs)
}

pub fn write_pairs_csv<W: Write>(pairs: &[(f64, f64)], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| McError::MalformedInput(e.to_string());
    wtr.write_record(["x", "y"]).map_err(io)?;
    for (x, y) in pairs {
        wtr.write_record([x.to_string(), y.to_string()]).map_err(io)?;
    }
    wtr.flush().map_err(|e| McError::MalformedInput(e.to_string()))
}

/// Same shape as [`Sampler`] for JSON/CLI parameter input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerName {
    BivariateGaussian,
    MarshallOlkin,
    StableCms,
}

impl SamplerName {
    /// Builds a sampler from positional parameters.
    pub fn with_params(self, params: &[f64]) -> Result<Sampler> {
        let want = match self {
            SamplerName::BivariateGaussian => 1,
            SamplerName::MarshallOlkin | SamplerName::StableCms => 3,
        };
        if params.len() != want {
            return Err(McError::OutOfRange(format!(
                "{self:?} takes {want} parameters, got {}",
                params.len()
            )));
        }
        Ok(match self {
            SamplerName::BivariateGaussian => Sampler::BivariateGaussian { rho: params[0] },
            SamplerName::MarshallOlkin => Sampler::MarshallOlkin {
                l1: params[0],
                l2: params[1],
                l3: params[2],
            },
            SamplerName::StableCms => Sampler::StableCms {
                alpha: params[0],
                beta: params[1],
                scale: params[2],
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skellam_mass_and_degenerate_level() {
        for trunc in [0, 1, 3, 10] {
            let j = skellam_poisson_joint(1.0, trunc).unwrap();
            assert!((j.probs().sum() - 1.0).abs() < 1e-14);
        }
        let j = skellam_poisson_joint(1.0, 0).unwrap();
        assert_eq!((j.nx(), j.ny()), (1, 1));
        assert_eq!(max_corr(&j).unwrap().value, 0.0);
        assert!(skellam_poisson_joint(1.0, 61).is_err());
    }

    #[test]
    fn skellam_cells_match_direct_sums() {
        let j = skellam_poisson_joint(1.0, 3).unwrap();
        let pmf = |k: i64| {
            if k < 0 {
                0.0
            } else {
                (-1.0f64).exp() / (1..=k).map(|v| v as f64).product::<f64>()
            }
        };
        // interior cell x = 0, y = 1: P(M = 1) P(N = 1)
        let xi = j.x_labels().iter().position(|l| *l == Label::Int(0)).unwrap();
        let yi = j.y_labels().iter().position(|l| *l == Label::Int(1)).unwrap();
        assert!((j.probs()[(xi, yi)] - pmf(1) * pmf(1)).abs() < 1e-16);
    }

    #[test]
    fn skellam_ladder() {
        let ladder = LadderFamily::Skellam { rate: 1.0 }.ladder(&[2, 4, 6, 8, 10]).unwrap();
        let v = ladder.values();
        assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        assert!((v[4] - 0.8321).abs() < 5e-3, "{v:?}");
        assert!(ladder.tail_mass.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn gaussian_grid_ladder() {
        let ladder = LadderFamily::GaussianGrid { rho: 0.5 }
            .ladder(&[1, 2, 3, 4, 5])
            .unwrap();
        let v = ladder.values();
        assert!((v[0] - 1.0 / 3.0).abs() < 1e-12, "{v:?}");
        assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        assert!(v.iter().all(|x| *x <= 0.5 + 1e-6));
    }

    #[test]
    fn brownian_poisson_stays_below_one() {
        let ladder = LadderFamily::BrownianPoisson { rate: 1.0 }.ladder(&[2, 4, 6]).unwrap();
        let v = ladder.values();
        assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        assert!(v[2] < 0.999 && v[2] > 0.5, "{v:?}");
    }

    #[test]
    fn flat_and_broken_ladders() {
        let j = FiniteJoint::from_rows(&[[0.4, 0.1], [0.2, 0.3]]).unwrap();
        let flat = truncation_ladder(|_| Ok((j.clone(), 0.0)), &[1, 2, 3]).unwrap();
        assert!(flat.values().windows(2).all(|w| w[0] == w[1]));
        let strong = FiniteJoint::from_rows(&[[0.5, 0.0], [0.0, 0.5]]).unwrap();
        let broken = truncation_ladder(|l| Ok((if l == 1 { strong.clone() } else { j.clone() }, 0.0)), &[1, 2]);
        assert!(matches!(broken, Err(McError::MonotonicityViolation { .. })));
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = Sampler::MarshallOlkin {
            l1: 1.0,
            l2: 1.0,
            l3: 1.0,
        };
        let a = sample(&s, 1000, 7).unwrap();
        let b = sample(&s, 1000, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample(&s, 1000, 8).unwrap());
        assert_ne!(a.pairs, sample_task(&s, 1000, 7, 1).unwrap().pairs);
    }

    #[test]
    fn gaussian_sampler_null_correlation() {
        let n = 20_000;
        let b = sample(&Sampler::BivariateGaussian { rho: 0.0 }, n, 3).unwrap();
        let (mx, my) = b.pairs.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (mx / n as f64, my / n as f64);
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (x, y) in &b.pairs {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx).powi(2);
            syy += (y - my).powi(2);
        }
        assert!((sxy / (sxx * syy).sqrt()).abs() < 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn stable_sampler_special_cases() {
        // α = 2, β = 0 is Gaussian with variance 2
        let b = sample(
            &Sampler::StableCms {
                alpha: 2.0,
                beta: 0.0,
                scale: 1.0,
            },
            20_000,
            1,
        )
        .unwrap();
        let var = b.pairs.iter().map(|p| p.0 * p.0).sum::<f64>() / b.len() as f64;
        assert!((var - 2.0).abs() < 0.1, "{var}");
        // α = 1, β = 0 is standard Cauchy: median of |X| is 1
        let b = sample(
            &Sampler::StableCms {
                alpha: 1.0,
                beta: 0.0,
                scale: 1.0,
            },
            20_001,
            2,
        )
        .unwrap();
        let mut abs: Vec<f64> = b.pairs.iter().map(|p| p.0.abs()).collect();
        abs.sort_by(f64::total_cmp);
        assert!((abs[10_000] - 1.0).abs() < 0.05);
    }

    #[test]
    fn ties_share_bins() {
        let bins = quantile_bins(&[1.0, 1.0, 1.0, 2.0, 3.0, 4.0], 3);
        assert_eq!(bins, vec![0, 0, 0, 1, 2, 2]);
        let batch = SampleBatch::from_pairs(vec![(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)], "test");
        assert!(matches!(
            binned_empirical_mc(&batch, 2, 2),
            Err(McError::DegenerateAxis("x"))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let pairs = vec![(0.1, -2.5), (1e-300, 3.0)];
        let mut buf = Vec::new();
        write_pairs_csv(&pairs, &mut buf).unwrap();
        assert_eq!(read_pairs_csv(buf.as_slice()).unwrap(), pairs);
        assert_eq!(
            read_pairs_csv("1,2\n3,4\n".as_bytes()).unwrap(),
            vec![(1.0, 2.0), (3.0, 4.0)]
        );
        assert!(read_pairs_csv("x,y\n1,a\n".as_bytes()).is_err());
    }
}
