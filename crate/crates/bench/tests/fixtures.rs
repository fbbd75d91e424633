use maxcorr::{max_corr, opnu_stable};
use maxcorr_bench::{banded_joint, banded_measure};

#[test]
fn banded_joint_is_a_distribution() {
    for n in [2, 8, 32] {
        let j = banded_joint(n);
        assert!((j.probs().sum() - 1.0).abs() < 1e-12);
        let v = max_corr(&j).unwrap().value;
        assert!(v > 0.0 && v < 1.0);
    }
}

#[test]
fn banded_measure_has_finite_op() {
    let v = opnu_stable(&banded_measure(), 1.3).unwrap().value;
    assert!((0.0..=1.0).contains(&v));
}
