//! Exact maximal correlation of finite joints and the joint constructors
//! used as brute-force oracles by the other modules.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{McError, Result};
use crate::joint::{CorrelationReport, FiniteJoint, Method};
use crate::label::{Label, Number};
use crate::linalg::singular_values;
use crate::tolerance;

/// Normalised kernel `diag(p_X)^{-1/2} P diag(p_Y)^{-1/2}`.
pub fn normalized_kernel(j: &FiniteJoint) -> DMatrix<f64> {
    let px = j.marginal_x();
    let py = j.marginal_y();
    DMatrix::from_fn(j.nx(), j.ny(), |r, c| j.probs()[(r, c)] / (px[r] * py[c]).sqrt())
}

/// Maximal correlation of a finite joint: the second singular value of the
/// normalised kernel. The top singular value must be 1.
pub fn max_corr(j: &FiniteJoint) -> Result<CorrelationReport> {
    let spectrum = singular_values(&normalized_kernel(j));
    let top = spectrum[0];
    if (top - 1.0).abs() > tolerance::TOP_SINGULAR {
        return Err(McError::SpectrumAnomaly {
            top,
            tolerance: tolerance::TOP_SINGULAR,
        });
    }
    let value = if j.is_degenerate() {
        0.0
    } else {
        spectrum[1].clamp(0.0, 1.0)
    };
    let mut report =
        CorrelationReport::new(value, Method::SvdExact, tolerance::SPECTRAL).with_note("shape", vec![j.nx(), j.ny()]);
    report.spectrum = spectrum;
    Ok(report)
}

pub(crate) fn check_cap(cells: u128, cap: usize) -> Result<()> {
    if cells > cap as u128 {
        Err(McError::SizeOverflow { cells, cap })
    } else {
        Ok(())
    }
}

/// Joint of `((X1, X2), (Y1, Y2))` for independent pairs.
pub fn product_joint(j1: &FiniteJoint, j2: &FiniteJoint, cap: usize) -> Result<FiniteJoint> {
    let nx = j1.nx() * j2.nx();
    let ny = j1.ny() * j2.ny();
    check_cap(nx as u128 * ny as u128, cap)?;
    let probs = j1.probs().kronecker(j2.probs());
    let pairs = |a: &[Label], b: &[Label]| -> Vec<Label> {
        a.iter()
            .flat_map(|l1| b.iter().map(move |l2| Label::pair(l1.clone(), l2.clone())))
            .collect()
    };
    FiniteJoint::from_matrix(
        probs,
        pairs(j1.x_labels(), j2.x_labels()),
        pairs(j1.y_labels(), j2.y_labels()),
    )
}

/// A joint `(X, Y)` together with a kernel `Y -> Z`, making `X ⟂ Z | Y`.
#[derive(Clone, Debug)]
pub struct MarkovTripleSpec {
    joint_xy: FiniteJoint,
    kernel_yz: DMatrix<f64>,
    z_labels: Vec<Label>,
}

impl MarkovTripleSpec {
    pub fn new(joint_xy: FiniteJoint, kernel_yz: DMatrix<f64>, z_labels: Vec<Label>) -> Result<Self> {
        if kernel_yz.nrows() != joint_xy.ny() {
            return Err(McError::InvalidKernel(format!(
                "kernel has {} rows but Y has {} states",
                kernel_yz.nrows(),
                joint_xy.ny()
            )));
        }
        if kernel_yz.ncols() != z_labels.len() {
            return Err(McError::InvalidKernel(format!(
                "kernel has {} columns but {} z-labels were given",
                kernel_yz.ncols(),
                z_labels.len()
            )));
        }
        for (i, row) in kernel_yz.row_iter().enumerate() {
            if row.iter().any(|&v| v.is_nan() || v < 0.0) {
                return Err(McError::InvalidKernel(format!("row {i} has a negative entry")));
            }
            let s = row.sum();
            if (s - 1.0).abs() > tolerance::KERNEL_ROW {
                return Err(McError::InvalidKernel(format!("row {i} sums to {s}")));
            }
        }
        Ok(MarkovTripleSpec {
            joint_xy,
            kernel_yz,
            z_labels,
        })
    }

    pub fn joint_xy(&self) -> &FiniteJoint {
        &self.joint_xy
    }

    pub fn kernel_yz(&self) -> &DMatrix<f64> {
        &self.kernel_yz
    }
}

/// Returns the joints of `(X, Z)` and `(Y, Z)`.
pub fn markov_triple_joint(spec: &MarkovTripleSpec) -> Result<(FiniteJoint, FiniteJoint)> {
    let j = &spec.joint_xy;
    let xz = j.probs() * &spec.kernel_yz;
    let py = j.marginal_y();
    let mut yz = spec.kernel_yz.clone();
    for (i, mut row) in yz.row_iter_mut().enumerate() {
        row *= py[i];
    }
    let j_xz = FiniteJoint::from_matrix(xz, j.x_labels().to_vec(), spec.z_labels.clone())?;
    let j_yz = FiniteJoint::from_matrix(yz, j.y_labels().to_vec(), spec.z_labels.clone())?;
    Ok((j_xz, j_yz))
}

/// Pushes a joint forward through coordinate-wise label maps.
pub fn map_states<F, G>(j: &FiniteJoint, f_x: F, f_y: G) -> Result<FiniteJoint>
where
    F: Fn(&Label) -> Label,
    G: Fn(&Label) -> Label,
{
    FiniteJoint::from_cells(j.cells().map(|(x, y, p)| (f_x(x), f_y(y), p)))
}

fn numeric_labels(labels: &[Label]) -> Result<Vec<Number>> {
    labels
        .iter()
        .map(|l| l.as_number().ok_or_else(|| McError::NonNumericLabel(l.to_string())))
        .collect()
}

/// Joint law of the two partial-sum paths `(S_1..S_m)` and `(T_1..T_m)` of a
/// random walk started at 0 with i.i.d. increments distributed as `j_inc`.
pub fn random_walk_path_joint(j_inc: &FiniteJoint, m: usize, cap: usize) -> Result<FiniteJoint> {
    if m == 0 {
        return Err(McError::OutOfRange("path length must be positive".into()));
    }
    let xs = numeric_labels(j_inc.x_labels())?;
    let ys = numeric_labels(j_inc.y_labels())?;
    let (nx, ny) = (xs.len(), ys.len());
    let paths_x = (nx as u128).checked_pow(m as u32);
    let paths_y = (ny as u128).checked_pow(m as u32);
    let cells = match (paths_x, paths_y) {
        (Some(a), Some(b)) => a.saturating_mul(b),
        _ => u128::MAX,
    };
    check_cap(cells, cap)?;
    let (px, py) = (paths_x.unwrap() as usize, paths_y.unwrap() as usize);

    let digits = |mut idx: usize, base: usize| -> Vec<usize> {
        let mut d = vec![0; m];
        for slot in d.iter_mut().rev() {
            *slot = idx % base;
            idx /= base;
        }
        d
    };
    let path_label = |steps: &[usize], values: &[Number]| -> Label {
        let mut acc = Number::Int(0);
        Label::Tuple(
            steps
                .iter()
                .map(|&s| {
                    acc = acc.sum(values[s]);
                    acc.into_label()
                })
                .collect(),
        )
    };

    let x_steps: Vec<Vec<usize>> = (0..px).map(|i| digits(i, nx)).collect();
    let y_steps: Vec<Vec<usize>> = (0..py).map(|i| digits(i, ny)).collect();
    let inc = j_inc.probs();
    let probs = DMatrix::from_fn(px, py, |a, b| {
        x_steps[a].iter().zip(&y_steps[b]).map(|(&i, &k)| inc[(i, k)]).product()
    });
    let x_labels = x_steps.iter().map(|s| path_label(s, &xs)).collect();
    let y_labels = y_steps.iter().map(|s| path_label(s, &ys)).collect();
    FiniteJoint::from_matrix(probs, x_labels, y_labels)
}

/// Joint law of the terminal sums `(S_m, T_m)`.
pub fn sum_pair_joint(j_inc: &FiniteJoint, m: usize, cap: usize) -> Result<FiniteJoint> {
    if m == 0 {
        return Err(McError::OutOfRange("number of steps must be positive".into()));
    }
    let xs = numeric_labels(j_inc.x_labels())?;
    let ys = numeric_labels(j_inc.y_labels())?;
    let steps: Vec<(Number, Number, f64)> = (0..xs.len())
        .flat_map(|i| (0..ys.len()).map(move |k| (i, k)))
        .filter_map(|(i, k)| {
            let p = j_inc.probs()[(i, k)];
            (p > 0.0).then_some((xs[i], ys[k], p))
        })
        .collect();

    let mut dist: BTreeMap<(Label, Label), (Number, Number, f64)> = BTreeMap::new();
    dist.insert((Label::Int(0), Label::Int(0)), (Number::Int(0), Number::Int(0), 1.0));
    for _ in 0..m {
        let mut next: BTreeMap<(Label, Label), (Number, Number, f64)> = BTreeMap::new();
        for &(s, t, p) in dist.values() {
            for &(dx, dy, q) in &steps {
                let (ns, nt) = (s.sum(dx), t.sum(dy));
                let key = (ns.into_label(), nt.into_label());
                next.entry(key).or_insert((ns, nt, 0.0)).2 += p * q;
            }
        }
        let sx = next
            .keys()
            .map(|k| &k.0)
            .collect::<std::collections::BTreeSet<_>>()
            .len();
        let sy = next
            .keys()
            .map(|k| &k.1)
            .collect::<std::collections::BTreeSet<_>>()
            .len();
        check_cap(sx as u128 * sy as u128, cap)?;
        dist = next;
    }
    FiniteJoint::from_cells(dist.into_iter().map(|((x, y), (_, _, p))| (x, y, p)))
}
