#![allow(dead_code)]

use maxcorr::subsets::{Mask, SubsetPairScheme};
use maxcorr::FiniteJoint;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    maxcorr::estimators::task_rng(seed, 0)
}

/// Dense random table with every entry positive.
pub fn random_joint<R: Rng>(rng: &mut R, nx: usize, ny: usize) -> FiniteJoint {
    let m = DMatrix::from_fn(nx, ny, |_, _| rng.random::<f64>() + 1e-3);
    let total = m.sum();
    FiniteJoint::from_matrix(m / total, maxcorr::Label::range(nx), maxcorr::Label::range(ny)).unwrap()
}

/// Random table where each entry is zeroed with probability `zero_p`;
/// redraws until every row and column keeps some mass.
pub fn random_sparse_matrix<R: Rng>(rng: &mut R, nx: usize, ny: usize, zero_p: f64) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(nx, ny, |_, _| {
            if rng.random::<f64>() < zero_p {
                0.0
            } else {
                rng.random::<f64>() + 1e-3
            }
        });
        let rows_ok = m.row_iter().all(|r| r.sum() > 0.0);
        let cols_ok = m.column_iter().all(|c| c.sum() > 0.0);
        if rows_ok && cols_ok {
            let total = m.sum();
            return m / total;
        }
    }
}

/// Symmetric-marginal 2x2 table with maximal correlation `r`, labels ±1.
pub fn signed_bernoulli(r: f64) -> FiniteJoint {
    let a = (1.0 + r) / 4.0;
    let b = (1.0 - r) / 4.0;
    FiniteJoint::from_cells([
        ((-1).into(), (-1).into(), a),
        ((-1).into(), 1.into(), b),
        (1.into(), (-1).into(), b),
        (1.into(), 1.into(), a),
    ])
    .unwrap()
}

/// Random 2x2 table with labels 0/1 and all marginals non-degenerate.
pub fn random_two_by_two<R: Rng>(rng: &mut R) -> FiniteJoint {
    let w: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 0.05).collect();
    let t: f64 = w.iter().sum();
    FiniteJoint::from_rows(&[[w[0] / t, w[1] / t], [w[2] / t, w[3] / t]]).unwrap()
}

/// Random row-stochastic matrix.
pub fn random_kernel<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    let mut k = DMatrix::from_fn(rows, cols, |_, _| rng.random::<f64>() + 1e-3);
    for mut row in k.row_iter_mut() {
        let s = row.sum();
        row /= s;
    }
    k
}

/// Random law over pairs of subsets of `[n]` supported on `pairs` cells.
pub fn random_scheme<R: Rng>(rng: &mut R, n: u32, pairs: usize) -> SubsetPairScheme {
    let limit = 1u32 << n;
    let cells: Vec<((Mask, Mask), f64)> = (0..pairs)
        .map(|_| {
            let s = rng.random_range(0..limit);
            let t = rng.random_range(0..limit);
            ((s, t), rng.random::<f64>() + 0.01)
        })
        .collect();
    normalised(n, cells)
}

/// Random law over nested pairs `∅ ≠ S ⊂ T ⊂ [n]`.
pub fn random_nested_scheme<R: Rng>(rng: &mut R, n: u32, pairs: usize) -> SubsetPairScheme {
    let limit = 1u32 << n;
    let cells: Vec<((Mask, Mask), f64)> = (0..pairs)
        .map(|_| {
            let t = rng.random_range(1..limit);
            let s = loop {
                let s = rng.random_range(1..limit) & t;
                if s != 0 {
                    break s;
                }
            };
            ((s, t), rng.random::<f64>() + 0.01)
        })
        .collect();
    normalised(n, cells)
}

fn normalised(n: u32, cells: Vec<((Mask, Mask), f64)>) -> SubsetPairScheme {
    let total: f64 = cells.iter().map(|c| c.1).sum();
    SubsetPairScheme::from_table(n, cells.into_iter().map(|(k, p)| (k, p / total))).unwrap()
}

/// Connected components of the bipartite support graph of `m`.
pub fn support_components(m: &DMatrix<f64>) -> usize {
    let (nx, ny) = m.shape();
    let mut parent: Vec<usize> = (0..nx + ny).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..nx {
        for j in 0..ny {
            if m[(i, j)] > 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, nx + j));
                parent[a] = b;
            }
        }
    }
    (0..nx + ny).filter(|&i| find(&mut parent, i) == i).count()
}
