//! Fixtures shared by the benchmarks.

use std::f64::consts::PI;

use maxcorr::stable_levy::{AngularAtom, DensityPiece};
use maxcorr::{FiniteJoint, SpectralMeasure};

/// Dense `n × n` joint with a smooth, strictly positive profile.
pub fn banded_joint(n: usize) -> FiniteJoint {
    let weight = |i: usize, j: usize| {
        let d = i as f64 - j as f64;
        (-d * d / n as f64).exp() + 0.01
    };
    let total: f64 = (0..n).flat_map(|i| (0..n).map(move |j| weight(i, j))).sum();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| weight(i, j) / total).collect()).collect();
    FiniteJoint::from_rows(&rows).expect("positive table")
}

/// Two antipodal density bands plus an atom on the diagonal.
pub fn banded_measure() -> SpectralMeasure {
    SpectralMeasure::new(
        vec![AngularAtom {
            theta: PI / 4.0,
            weight: 0.5,
        }],
        vec![
            DensityPiece {
                from: 0.3,
                to: 1.2,
                level: 1.5,
            },
            DensityPiece {
                from: 0.3 + PI,
                to: 1.2 + PI,
                level: 1.5,
            },
            DensityPiece {
                from: 2.0,
                to: 2.8,
                level: 0.4,
            },
        ],
    )
    .expect("valid measure")
}
