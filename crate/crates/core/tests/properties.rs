mod common;

use maxcorr::closed_forms::{dksy_mc, mb_bound, nested_subsets_mc};
use maxcorr::estimators::{sample, LadderFamily, Sampler};
use maxcorr::stable_levy::{cd_integrals, opnu_atoms, AngularAtom, DensityPiece, JumpAtom};
use maxcorr::subsets::{mask_of, ru, subsample_mc};
use maxcorr::tolerance::DEFAULT_STATE_CAP;
use maxcorr::{max_corr, opnu_stable, product_joint, FiniteJoint, Label, SpectralMeasure};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;

fn mc(j: &FiniteJoint) -> f64 {
    max_corr(j).unwrap().value
}

fn random_measure(seed: u64) -> SpectralMeasure {
    let mut r = rng(seed);
    let atoms = (0..r.random_range(0..4))
        .map(|_| AngularAtom {
            theta: r.random_range(0.0..std::f64::consts::TAU),
            weight: r.random_range(0.1..2.0),
        })
        .collect();
    let mut cuts: Vec<f64> = (0..4).map(|_| r.random_range(0.0..std::f64::consts::TAU)).collect();
    cuts.sort_by(f64::total_cmp);
    let pieces = vec![
        DensityPiece {
            from: cuts[0],
            to: cuts[1],
            level: r.random_range(0.1..2.0),
        },
        DensityPiece {
            from: cuts[2],
            to: cuts[3],
            level: r.random_range(0.1..2.0),
        },
    ];
    SpectralMeasure::new(atoms, pieces).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_well_formed(seed in any::<u64>(), nx in 1usize..7, ny in 1usize..7) {
        let j = random_joint(&mut rng(seed), nx, ny);
        let report = max_corr(&j).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&report.value));
        prop_assert!(report.spectrum.windows(2).all(|w| w[0] >= w[1] - 1e-14));
        prop_assert!((report.spectrum[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn relabeling_states_is_invisible(seed in any::<u64>(), nx in 2usize..6, ny in 2usize..6) {
        let mut r = rng(seed);
        let j = random_joint(&mut r, nx, ny);
        let mut px: Vec<usize> = (0..nx).collect();
        let mut py: Vec<usize> = (0..ny).collect();
        px.shuffle(&mut r);
        py.shuffle(&mut r);
        let permuted = nalgebra::DMatrix::from_fn(nx, ny, |i, k| j.probs()[(px[i], py[k])]);
        let shuffled = FiniteJoint::from_matrix(permuted, Label::range(nx), Label::range(ny)).unwrap();
        prop_assert!((mc(&j) - mc(&shuffled)).abs() < 1e-10);
    }

    #[test]
    fn product_with_independent_pair(seed in any::<u64>()) {
        let mut r = rng(seed);
        let j = random_joint(&mut r, 3, 4);
        let indep = FiniteJoint::from_rows(&[[0.12, 0.18], [0.28, 0.42]]).unwrap();
        let p = product_joint(&j, &indep, DEFAULT_STATE_CAP).unwrap();
        prop_assert!((mc(&p) - mc(&j)).abs() < 1e-9);
    }

    #[test]
    fn opnu_is_scale_and_swap_invariant(seed in any::<u64>(), c in 0.01f64..100.0, alpha in 0.2f64..1.9) {
        let tau = random_measure(seed);
        let base = opnu_stable(&tau, alpha).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-9).contains(&base));
        prop_assert!((opnu_stable(&tau.scaled(c).unwrap(), alpha).unwrap().value - base).abs() < 1e-9);
        prop_assert!((opnu_stable(&tau.swap_axes().unwrap(), alpha).unwrap().value - base).abs() < 1e-9);
    }

    #[test]
    fn cd_integrals_obey_cauchy_schwarz(seed in any::<u64>(), alpha in 0.2f64..1.9) {
        let cd = cd_integrals(&random_measure(seed), alpha).unwrap();
        prop_assert!(cd.is_consistent(1e-9));
    }

    #[test]
    fn opnu_atoms_invariances(seed in any::<u64>(), c in 0.01f64..100.0) {
        let mut r = rng(seed);
        let atoms: Vec<JumpAtom> = (0..r.random_range(1..7))
            .map(|_| {
                let x = r.random_range(-2i32..=2) as f64;
                let y = if x == 0.0 { r.random_range(1i32..=2) as f64 } else { r.random_range(-2i32..=2) as f64 };
                JumpAtom { x, y, weight: r.random_range(0.1..2.0) }
            })
            .collect();
        let base = opnu_atoms(&atoms).unwrap().value;
        let scaled: Vec<JumpAtom> = atoms.iter().map(|a| JumpAtom { weight: c * a.weight, ..*a }).collect();
        prop_assert!((opnu_atoms(&scaled).unwrap().value - base).abs() < 1e-10);
        // injective relabelling of coordinates, zero kept fixed
        let f = |v: f64| if v == 0.0 { 0.0 } else { v.powi(3) + 7.0 * v.signum() };
        let moved: Vec<JumpAtom> = atoms.iter().map(|a| JumpAtom { x: f(a.x), y: f(-a.y), ..*a }).collect();
        prop_assert!((opnu_atoms(&moved).unwrap().value - base).abs() < 1e-10);
    }

    #[test]
    fn ru_decreases_along_inclusion(seed in any::<u64>(), n in 2u32..5) {
        let mut r = rng(seed);
        let scheme = random_scheme(&mut r, n, 6);
        for i in 1..=n {
            let single = ru(&scheme, mask_of(&[i]));
            for j in (1..=n).filter(|&j| j != i) {
                prop_assert!(ru(&scheme, mask_of(&[i, j])) <= single + 1e-10);
            }
        }
    }

    #[test]
    fn subsample_value_in_unit_interval(seed in any::<u64>(), n in 1u32..5) {
        let scheme = random_scheme(&mut rng(seed), n, 5);
        if let Ok(report) = subsample_mc(&scheme) {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&report.value));
        }
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), rho in -0.99f64..0.99) {
        let s = Sampler::BivariateGaussian { rho };
        prop_assert_eq!(sample(&s, 500, seed).unwrap(), sample(&s, 500, seed).unwrap());
        let mo = Sampler::MarshallOlkin { l1: 1.0, l2: 2.0, l3: 0.5 };
        prop_assert_eq!(sample(&mo, 500, seed).unwrap(), sample(&mo, 500, seed).unwrap());
    }
}

#[test]
fn nested_subsets_monotone_and_bounded() {
    for n in 2..=12u64 {
        for m in 1..n {
            for k in 1..=m {
                let v = nested_subsets_mc(n, m, k).unwrap();
                assert!(v <= ((k as f64) / (m as f64)).sqrt() + 1e-15);
                if k < m {
                    assert!(nested_subsets_mc(n, m, k + 1).unwrap() >= v);
                }
                if m + 1 < n {
                    assert!(nested_subsets_mc(n, m + 1, k).unwrap() <= v + 1e-15);
                }
            }
        }
    }
}

#[test]
fn uniform_window_reduction() {
    for n in 2..=20u64 {
        for m in 1..n {
            let uniform = vec![m as f64 / n as f64; n as usize];
            assert_eq!(dksy_mc(0, m, n).unwrap(), mb_bound(&uniform).unwrap());
        }
    }
}

#[test]
fn brownian_poisson_ladder_stays_below_one() {
    let ladder = LadderFamily::BrownianPoisson { rate: 1.0 }
        .ladder(&[2, 4, 6, 8, 10])
        .unwrap();
    let v = ladder.values();
    assert!(v.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    assert!(v[4] <= 0.999, "{v:?}");
}
