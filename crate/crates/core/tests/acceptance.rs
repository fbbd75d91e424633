//! Acceptance suite: one line per criterion, non-zero exit on any failure.

mod common;

use std::f64::consts::{FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use maxcorr::closed_forms::{bdk_mc, bernoulli_2x2_mc, nested_subsets_mc, Bernoulli2x2Params};
use maxcorr::discrete::{map_states, random_walk_path_joint, sum_pair_joint};
use maxcorr::estimators::{binned_empirical_mc, sample, LadderFamily, Sampler};
use maxcorr::stable_levy::{bdk_tau, hilbert_hardy_symmetric, opnu_atoms, opnu_stable, DensityPiece, JumpAtom};
use maxcorr::subsets::{
    brute_force_subvector_joint, empirical_measure_joint, fisher_gap_gaussian, subsample_mc, subset_pair_mc,
};
use maxcorr::tolerance::DEFAULT_STATE_CAP;
use maxcorr::{
    markov_triple_joint, max_corr, product_joint, FiniteJoint, Label, MarkovTripleSpec, SpectralMeasure,
    SubsetPairScheme,
};
use rand::Rng;

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mc(j: &FiniteJoint) -> f64 {
    max_corr(j).expect("valid joint").value
}

fn two_by_two_grid() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for i in 1..=20 {
        for j in 1..=20 {
            let (pa, pc) = (i as f64 / 21.0, j as f64 / 21.0);
            let lo = (-(pa * pc)).max(-(1.0 - pa) * (1.0 - pc));
            let hi = (pa * (1.0 - pc)).min((1.0 - pa) * pc);
            let f = ((7 * i + 3 * j) % 11) as f64 / 10.0;
            let ac = (pa * pc + lo + f * (hi - lo)).max(0.0);
            let ad = (pa - ac).max(0.0);
            let bc = (pc - ac).max(0.0);
            let bd = (1.0 - ac - ad - bc).max(0.0);
            let svd = mc(&FiniteJoint::from_rows(&[[ac, ad], [bc, bd]]).unwrap());
            let det = bernoulli_2x2_mc(&Bernoulli2x2Params::new(ac, ad, bc, bd).unwrap());
            worst = worst.max((svd - det).abs());
            count += 1;
        }
    }
    ensure(count == 400 && worst <= 1e-10, || {
        format!("max |svd - det| = {worst:e}")
    })?;
    Ok(format!("{count} joints, max |svd - det| = {worst:.1e}"))
}

fn masked_copy() -> Outcome {
    let v = mc(&FiniteJoint::from_rows(&[[0.5, 0.0], [0.25, 0.25]]).unwrap());
    let target = 1.0 / 3f64.sqrt();
    ensure((v - target).abs() <= 1e-9, || format!("value {v}"))?;
    ensure(v < 0.5f64.sqrt(), || format!("value {v} not below sqrt(1/2)"))?;
    Ok(format!("R = {v:.9}, sqrt(p) = {:.6}", 0.5f64.sqrt()))
}

fn csaki_fischer() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let mut dims = || (r.random_range(2..=5), r.random_range(2..=5));
        let ((a, b), (c, d)) = (dims(), dims());
        let j1 = random_joint(&mut r, a, b);
        let j2 = random_joint(&mut r, c, d);
        let p = product_joint(&j1, &j2, DEFAULT_STATE_CAP).unwrap();
        worst = worst.max((mc(&p) - mc(&j1).max(mc(&j2))).abs());
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("200 pairs, max deviation {worst:.1e}"))
}

fn random_walks() -> Outcome {
    let mut r = rng(4);
    let mut worst_path = 0.0f64;
    let mut worst_sum = f64::NEG_INFINITY;
    for _ in 0..20 {
        let inc = random_two_by_two(&mut r);
        let base = mc(&inc);
        for m in [2, 3] {
            let path = random_walk_path_joint(&inc, m, DEFAULT_STATE_CAP).unwrap();
            worst_path = worst_path.max((mc(&path) - base).abs());
            let sums = sum_pair_joint(&inc, m, DEFAULT_STATE_CAP).unwrap();
            worst_sum = worst_sum.max(mc(&sums) - base);
        }
    }
    ensure(worst_path <= 1e-9, || format!("path deviation {worst_path:e}"))?;
    ensure(worst_sum <= 1e-9, || {
        format!("sum pair exceeds increment by {worst_sum:e}")
    })?;
    let inc = signed_bernoulli(0.5);
    let trend: Vec<f64> = [1, 2, 4, 8]
        .iter()
        .map(|&m| mc(&sum_pair_joint(&inc, m, DEFAULT_STATE_CAP).unwrap()))
        .collect();
    ensure(trend.iter().all(|v| *v <= 0.5 + 1e-9), || {
        format!("trend {trend:?} above 0.5")
    })?;
    ensure(trend[3] >= trend[0] - 1e-9, || {
        format!("m = 8 value below m = 1: {trend:?}")
    })?;
    Ok(format!(
        "path dev {worst_path:.1e}, sum-pair excess {worst_sum:.1e}, centred trend m=1..8 {:.12} -> {:.12}",
        trend[0], trend[3]
    ))
}

fn nested_subsets() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 1..=6u32 {
        for m in 0..=n {
            for k in 0..=m {
                let v = subset_pair_mc(&SubsetPairScheme::uniform_nested(n, m, k).unwrap())
                    .unwrap()
                    .value;
                let f = nested_subsets_mc(n as u64, m as u64, k as u64).unwrap();
                worst = worst.max((v - f).abs());
                count += 1;
            }
        }
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("{count} triples, max deviation {worst:.1e}"))
}

fn subsampled_vectors() -> Outcome {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let n = r.random_range(1..=3u32);
        let pairs = r.random_range(1..=6);
        let scheme = random_scheme(&mut r, n, pairs);
        let p = if i % 2 == 0 { 0.5 } else { 1.0 / 3.0 };
        let laws = vec![vec![1.0 - p, p]; n as usize];
        let brute = mc(&brute_force_subvector_joint(&scheme, &laws, DEFAULT_STATE_CAP).unwrap());
        let formula = subsample_mc(&scheme).unwrap().value;
        worst = worst.max((brute - formula).abs());
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("50 schemes, max deviation {worst:.1e}"))
}

fn empirical_measures() -> Outcome {
    let laws: [&[f64]; 3] = [&[0.5, 0.5], &[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0; 3]];
    let mut worst = 0.0f64;
    for (n, m, l) in [(3u32, 2u32, 1u32), (4, 2, 1), (4, 3, 1)] {
        let expected = (m - l) as f64 / ((m * (n - l)) as f64).sqrt();
        for law in laws {
            let v = mc(&empirical_measure_joint(n, m, l, law, DEFAULT_STATE_CAP).unwrap());
            worst = worst.max((v - expected).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("9 cases, max deviation {worst:.1e}"))
}

fn stable_consistency() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 1.5] {
        for lambda in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
            for (cm, cp) in [(1.0, 1.0), (1.0, 2.0), (3.0, 1.0)] {
                let op = opnu_stable(&bdk_tau(alpha, lambda, cm, cp).unwrap(), alpha)
                    .unwrap()
                    .value;
                worst = worst.max((op - bdk_mc(alpha, lambda, cm, cp).unwrap()).abs());
            }
        }
    }
    ensure(worst <= 1e-9, || format!("grid deviation {worst:e}"))?;
    let mut symmetric = vec![
        SpectralMeasure::uniform(1.0).unwrap(),
        SpectralMeasure::atoms_only(&[(FRAC_PI_4, 1.0), (5.0 * FRAC_PI_4, 1.0)]).unwrap(),
        SpectralMeasure::new(
            vec![],
            vec![
                DensityPiece {
                    from: 0.2,
                    to: 1.1,
                    level: 2.0,
                },
                DensityPiece {
                    from: 0.2 + PI,
                    to: 1.1 + PI,
                    level: 2.0,
                },
                DensityPiece {
                    from: 1.7,
                    to: 2.9,
                    level: 0.5,
                },
                DensityPiece {
                    from: 1.7 + PI,
                    to: 2.9 + PI,
                    level: 0.5,
                },
            ],
        )
        .unwrap(),
    ];
    for lambda in [-1.0, 2.0] {
        symmetric.push(bdk_tau(1.0, lambda, 1.5, 1.5).unwrap());
    }
    let mut worst_sym = 0.0f64;
    for tau in &symmetric {
        for alpha in [0.5, 1.0, 1.5] {
            let op = opnu_stable(tau, alpha).unwrap().value;
            worst_sym = worst_sym.max((op - hilbert_hardy_symmetric(tau, alpha).unwrap()).abs());
        }
    }
    ensure(worst_sym <= 1e-9, || format!("symmetric deviation {worst_sym:e}"))?;
    Ok(format!("54 grid points dev {worst:.1e}, symmetric dev {worst_sym:.1e}"))
}

fn skellam() -> Outcome {
    let ladder = LadderFamily::Skellam { rate: 1.0 }
        .ladder(&[2, 4, 6, 8, 10])
        .map_err(|e| e.to_string())?;
    let v = ladder.values();
    ensure(v.windows(2).all(|w| w[1] >= w[0] - 1e-9), || format!("ladder {v:?}"))?;
    ensure((v[4] - 0.8321).abs() <= 5e-3, || format!("trunc 10 value {}", v[4]))?;
    Ok(format!(
        "ladder {}",
        v.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>().join(" ")
    ))
}

fn finite_atoms() -> Outcome {
    let atom = |x, y, weight| JumpAtom { x, y, weight };
    let mut r = rng(10);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let k = r.random_range(1..=8);
        let atoms: Vec<JumpAtom> = (0..k)
            .map(|_| {
                let mut c = || {
                    let v = r.random_range(1..=4) as f64 * if r.random::<bool>() { 1.0 } else { -1.0 };
                    v / 2.0
                };
                atom(c(), c(), r.random::<f64>() + 0.1)
            })
            .collect();
        worst = worst.max((opnu_atoms(&atoms).unwrap().value - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("off-axis deviation {worst:e}"))?;
    let single = opnu_atoms(&[atom(1.0, 1.0, 1.0)]).unwrap().value;
    ensure((single - 1.0).abs() <= 1e-12, || format!("single atom {single}"))?;
    let split = opnu_atoms(&[atom(1.0, 0.0, 1.0), atom(0.0, 1.0, 1.0)]).unwrap().value;
    ensure(split == 0.0, || format!("no common jumps gave {split}"))?;
    Ok(format!(
        "50 off-axis sets dev {worst:.1e}, common jump {single}, disjoint {split}"
    ))
}

fn gaussian_grid() -> Outcome {
    let ladder = LadderFamily::GaussianGrid { rho: 0.5 }
        .ladder(&[1, 2, 3, 4, 5, 6, 7])
        .map_err(|e| e.to_string())?;
    let v = ladder.values();
    ensure(v.windows(2).all(|w| w[1] >= w[0] - 1e-9), || format!("ladder {v:?}"))?;
    ensure(v.iter().all(|x| *x <= 0.5 + 1e-6), || {
        format!("ladder above 0.5: {v:?}")
    })?;
    ensure(v[6] >= 0.49, || format!("128 bins gave {}", v[6]))?;
    Ok(format!(
        "ladder {}",
        v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
    ))
}

fn marshall_olkin() -> Outcome {
    let batch = sample(
        &Sampler::MarshallOlkin {
            l1: 1.0,
            l2: 1.0,
            l3: 1.0,
        },
        1_000_000,
        42,
    )
    .unwrap();
    let v = binned_empirical_mc(&batch, 50, 50).unwrap().value;
    ensure((0.40..=0.52).contains(&v), || format!("estimate {v}"))?;
    ensure(v <= 0.5 + 0.02, || format!("estimate {v} above closed form"))?;
    Ok(format!("estimate {v:.4} vs closed form 0.5"))
}

fn fisher() -> Outcome {
    let s = SubsetPairScheme::from_table(2, [((0b01, 0b11), 0.5), ((0b10, 0b11), 0.5)]).unwrap();
    let (l1, r1) = fisher_gap_gaussian(&s, &[1.0, 1.0], |_| 1.0).unwrap();
    ensure((l1 - 0.5).abs() <= 1e-12 && (r1 - 0.5).abs() <= 1e-12, || {
        format!("hand case ({l1}, {r1})")
    })?;
    let same = SubsetPairScheme::from_table(
        3,
        [((0b011, 0b011), 0.4), ((0b110, 0b110), 0.35), ((0b111, 0b111), 0.25)],
    )
    .unwrap();
    let (l2, r2) = fisher_gap_gaussian(&same, &[1.0, 2.0, 0.5], |m| m as f64 - 3.0).unwrap();
    ensure((l2 - r2).abs() <= 1e-12, || format!("S = T case ({l2}, {r2})"))?;
    let mut r = rng(13);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let n = r.random_range(1..=4u32);
        let pairs = r.random_range(1..=8);
        let scheme = random_nested_scheme(&mut r, n, pairs);
        let variances: Vec<f64> = (0..n).map(|_| r.random::<f64>() * 2.0 + 0.1).collect();
        let lambda: Vec<f64> = (0..1u32 << n).map(|_| r.random::<f64>() * 4.0 - 2.0).collect();
        let (lhs, rhs) = fisher_gap_gaussian(&scheme, &variances, |m| lambda[m as usize]).unwrap();
        worst = worst.max(lhs - rhs);
    }
    ensure(worst <= 1e-9, || format!("lhs exceeds rhs by {worst:e}"))?;
    Ok(format!(
        "equality cases exact, 100 schemes max(lhs - rhs) = {worst:.2e}"
    ))
}

fn property_suites() -> Outcome {
    let mut r = rng(14);
    // data processing
    let mut dp = f64::NEG_INFINITY;
    for _ in 0..100 {
        let j = random_joint(&mut r, 4, 4);
        let fx: Vec<i64> = (0..4).map(|_| r.random_range(0..3)).collect();
        let fy: Vec<i64> = (0..4).map(|_| r.random_range(0..3)).collect();
        let idx = |l: &Label| match l {
            Label::Int(i) => *i as usize,
            _ => unreachable!(),
        };
        let mapped = map_states(&j, |l| Label::Int(fx[idx(l)]), |l| Label::Int(fy[idx(l)])).unwrap();
        dp = dp.max(mc(&mapped) - mc(&j));
    }
    ensure(dp <= 1e-9, || format!("data processing violated by {dp:e}"))?;
    // submultiplicativity
    let mut sub = f64::NEG_INFINITY;
    for _ in 0..100 {
        let j = random_joint(&mut r, 3, 3);
        let spec = MarkovTripleSpec::new(j.clone(), random_kernel(&mut r, 3, 2), Label::range(2)).unwrap();
        let (xz, yz) = markov_triple_joint(&spec).unwrap();
        sub = sub.max(mc(&xz) - mc(&j) * mc(&yz));
    }
    ensure(sub <= 1e-9, || format!("submultiplicativity violated by {sub:e}"))?;
    // transpose symmetry
    let mut tr = 0.0f64;
    for _ in 0..100 {
        let (a, b) = (r.random_range(1..=6), r.random_range(1..=6));
        let j = random_joint(&mut r, a, b);
        tr = tr.max((mc(&j) - mc(&j.transpose())).abs());
    }
    ensure(tr <= 1e-10, || format!("transpose deviation {tr:e}"))?;
    // independence iff rank one
    for _ in 0..100 {
        let (a, b) = (r.random_range(2..=6), r.random_range(2..=6));
        let px: Vec<f64> = (0..a).map(|_| r.random::<f64>() + 0.01).collect();
        let py: Vec<f64> = (0..b).map(|_| r.random::<f64>() + 0.01).collect();
        let (sx, sy): (f64, f64) = (px.iter().sum(), py.iter().sum());
        let outer = nalgebra::DMatrix::from_fn(a, b, |i, k| px[i] / sx * py[k] / sy);
        let v = mc(&FiniteJoint::from_matrix(outer, Label::range(a), Label::range(b)).unwrap());
        ensure(v <= 1e-10, || format!("rank-one table gave {v}"))?;
        let generic = random_joint(&mut r, a, b);
        let rank = generic.probs().rank(1e-12);
        let v = mc(&generic);
        ensure(rank > 1 && v > 1e-10, || format!("rank {rank} table gave {v}"))?;
    }
    // decomposability iff disconnected support
    let mut disconnected = 0;
    for _ in 0..200 {
        let (a, b) = (r.random_range(2..=6), r.random_range(2..=6));
        let m = random_sparse_matrix(&mut r, a, b, 0.6);
        let components = support_components(&m);
        let v = mc(&FiniteJoint::from_matrix(m, Label::range(a), Label::range(b)).unwrap());
        if components > 1 {
            disconnected += 1;
            ensure((v - 1.0).abs() <= 1e-8, || format!("disconnected support gave {v}"))?;
        } else {
            ensure(v < 1.0 - 1e-8, || format!("connected support gave {v}"))?;
        }
    }
    ensure(disconnected > 10, || {
        format!("only {disconnected} disconnected instances")
    })?;
    Ok(format!(
        "dp {dp:.1e}, submult {sub:.1e}, transpose {tr:.1e}, 100 rank cases, 200 support cases ({disconnected} disconnected)"
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "2x2 determinant oracle grid",
            limit: secs(1),
            run: two_by_two_grid,
        },
        Criterion {
            id: 2,
            name: "masked copy joint",
            limit: secs(1),
            run: masked_copy,
        },
        Criterion {
            id: 3,
            name: "product of independent pairs",
            limit: secs(5),
            run: csaki_fischer,
        },
        Criterion {
            id: 4,
            name: "random-walk paths and sums",
            limit: secs(10),
            run: random_walks,
        },
        Criterion {
            id: 5,
            name: "uniform nested subsets",
            limit: secs(10),
            run: nested_subsets,
        },
        Criterion {
            id: 6,
            name: "subsampled vectors oracle",
            limit: secs(30),
            run: subsampled_vectors,
        },
        Criterion {
            id: 7,
            name: "empirical measures",
            limit: secs(30),
            run: empirical_measures,
        },
        Criterion {
            id: 8,
            name: "stable Op consistency",
            limit: secs(5),
            run: stable_consistency,
        },
        Criterion {
            id: 9,
            name: "Skellam truncation ladder",
            limit: secs(5),
            run: skellam,
        },
        Criterion {
            id: 10,
            name: "finite-atom Op",
            limit: secs(1),
            run: finite_atoms,
        },
        Criterion {
            id: 11,
            name: "Gaussian quantile grids",
            limit: secs(60),
            run: gaussian_grid,
        },
        Criterion {
            id: 12,
            name: "Marshall-Olkin binned estimate",
            limit: secs(60),
            run: marshall_olkin,
        },
        Criterion {
            id: 13,
            name: "Gaussian Fisher inequality",
            limit: secs(10),
            run: fisher,
        },
        Criterion {
            id: 14,
            name: "property suites",
            limit: secs(30),
            run: property_suites,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; runtime exceeded {:?}", c.limit)),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failures += 1;
        }
        println!(
            "criterion {:>2} {tag} {:<32} {:>8.3}s  {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
