//! Registered verification cases grouped into suites.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::closed_forms::{self, Bernoulli2x2Params};
use crate::discrete::{max_corr, product_joint, random_walk_path_joint};
use crate::error::Result;
use crate::estimators::{self, LadderFamily, Sampler};
use crate::joint::FiniteJoint;
use crate::stable_levy::{self, JumpAtom, JumpMeasure, LevyTriple, SpectralMeasure};
use crate::subsets::{self, SubsetPairScheme};
use crate::tolerance::DEFAULT_STATE_CAP;

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Stated in the literature.
    Published,
    /// Computed independently (closed form or hand evaluation).
    Derived,
    /// Holds by construction.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    PaperCore,
    Stable,
    Subsets,
    Estimators,
    All,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "paper-core" => Ok(Suite::PaperCore),
            "stable" => Ok(Suite::Stable),
            "subsets" => Ok(Suite::Subsets),
            "estimators" => Ok(Suite::Estimators),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite '{other}' (expected paper-core, stable, subsets, estimators or all)"
            )),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::PaperCore => "paper-core",
            Suite::Stable => "stable",
            Suite::Subsets => "subsets",
            Suite::Estimators => "estimators",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyCase {
    pub id: String,
    pub suite: Suite,
    pub expected: f64,
    pub source: Source,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySuiteResult {
    pub suite: Suite,
    pub cases: Vec<VerifyCase>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifySuiteResult {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// Fixed-width text table.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<40} {:>14} {:>14} {:>9} {:<9} {}\n",
            "case", "expected", "computed", "tol", "source", "result"
        );
        for c in &self.cases {
            out.push_str(&format!(
                "{:<40} {:>14.9} {:>14.9} {:>9.1e} {:<9} {}\n",
                c.id,
                c.expected,
                c.computed,
                c.tolerance,
                format!("{:?}", c.source).to_lowercase(),
                if c.pass { "pass" } else { "FAIL" }
            ));
        }
        out.push_str(&format!("{} passed, {} failed\n", self.passed, self.failed));
        out
    }
}

struct Spec {
    id: &'static str,
    suite: Suite,
    expected: f64,
    source: Source,
    tolerance: f64,
    run: fn() -> Result<f64>,
}

fn sym_bernoulli(r: f64) -> Result<FiniteJoint> {
    let a = (1.0 + r) / 4.0;
    let b = (1.0 - r) / 4.0;
    FiniteJoint::from_rows(&[[a, b], [b, a]])
}

fn signed_bernoulli(r: f64) -> Result<FiniteJoint> {
    let a = (1.0 + r) / 4.0;
    let b = (1.0 - r) / 4.0;
    FiniteJoint::from_cells([
        ((-1).into(), (-1).into(), a),
        ((-1).into(), 1.into(), b),
        (1.into(), (-1).into(), b),
        (1.into(), 1.into(), a),
    ])
}

#[allow(clippy::excessive_precision)]
fn uniform_c_pp() -> f64 {
    // Γ(3/4)² / (2 Γ(3/2))
    0.847_213_084_793_979_1
}

fn registry() -> Vec<Spec> {
    use Source::*;
    use Suite::*;
    let inv_sqrt3 = 1.0 / 3f64.sqrt();
    let inv_sqrt6 = 1.0 / 6f64.sqrt();
    vec![
        Spec {
            id: "masked-copy-joint",
            suite: PaperCore,
            expected: inv_sqrt3,
            source: Published,
            tolerance: 1e-9,
            run: || Ok(max_corr(&FiniteJoint::from_rows(&[[0.5, 0.0], [0.25, 0.25]])?)?.value),
        },
        Spec {
            id: "two-by-two-svd",
            suite: PaperCore,
            expected: 0.1 / 0.06f64.sqrt(),
            source: Derived,
            tolerance: 1e-10,
            run: || Ok(max_corr(&FiniteJoint::from_rows(&[[0.4, 0.1], [0.2, 0.3]])?)?.value),
        },
        Spec {
            id: "two-by-two-determinant",
            suite: PaperCore,
            expected: 0.1 / 0.06f64.sqrt(),
            source: Derived,
            tolerance: 1e-12,
            run: || {
                Ok(closed_forms::bernoulli_2x2_mc(&Bernoulli2x2Params::new(
                    0.4, 0.1, 0.2, 0.3,
                )?))
            },
        },
        Spec {
            id: "gaussian",
            suite: PaperCore,
            expected: 0.3,
            source: Published,
            tolerance: 0.0,
            run: || closed_forms::gaussian_mc(-0.3),
        },
        Spec {
            id: "partial-sums-l0-m2-n4",
            suite: PaperCore,
            expected: FRAC_1_SQRT_2,
            source: Published,
            tolerance: 1e-15,
            run: || closed_forms::dksy_mc(0, 2, 4),
        },
        Spec {
            id: "partial-sums-l1-m2-n4",
            suite: PaperCore,
            expected: inv_sqrt6,
            source: Derived,
            tolerance: 1e-15,
            run: || closed_forms::dksy_mc(1, 2, 4),
        },
        Spec {
            id: "masking-bound",
            suite: PaperCore,
            expected: 0.7f64.sqrt(),
            source: Derived,
            tolerance: 1e-15,
            run: || closed_forms::mb_bound(&[0.2, 0.7, 0.5]),
        },
        Spec {
            id: "marshall-olkin-1-2-1",
            suite: PaperCore,
            expected: inv_sqrt6,
            source: Published,
            tolerance: 1e-15,
            run: || closed_forms::marshall_olkin_mc(1.0, 2.0, 1.0),
        },
        Spec {
            id: "csaki-fischer-0.3-0.5",
            suite: PaperCore,
            expected: 0.5,
            source: Derived,
            tolerance: 1e-9,
            run: || {
                let p = product_joint(&sym_bernoulli(0.3)?, &sym_bernoulli(0.5)?, DEFAULT_STATE_CAP)?;
                Ok(max_corr(&p)?.value)
            },
        },
        Spec {
            id: "random-walk-paths-m3",
            suite: PaperCore,
            expected: 0.6,
            source: Derived,
            tolerance: 1e-9,
            run: || Ok(max_corr(&random_walk_path_joint(&signed_bernoulli(0.6)?, 3, DEFAULT_STATE_CAP)?)?.value),
        },
        Spec {
            id: "bdk-alpha1-lambda2-closed-form",
            suite: Stable,
            expected: inv_sqrt3,
            source: Published,
            tolerance: 1e-15,
            run: || closed_forms::bdk_mc(1.0, 2.0, 1.0, 1.0),
        },
        Spec {
            id: "bdk-alpha1-lambda2-spectral",
            suite: Stable,
            expected: inv_sqrt3,
            source: Published,
            tolerance: 1e-9,
            run: || Ok(stable_levy::opnu_stable(&stable_levy::bdk_tau(1.0, 2.0, 1.0, 1.0)?, 1.0)?.value),
        },
        Spec {
            id: "bdk-alpha1-lambda-1-c12-spectral",
            suite: Stable,
            expected: (2.0f64 / 3.0).sqrt(),
            source: Published,
            tolerance: 1e-9,
            run: || Ok(stable_levy::opnu_stable(&stable_levy::bdk_tau(1.0, -1.0, 1.0, 2.0)?, 1.0)?.value),
        },
        Spec {
            id: "diagonal-atoms",
            suite: Stable,
            expected: 1.0,
            source: Derived,
            tolerance: 1e-12,
            run: || {
                let tau = SpectralMeasure::atoms_only(&[(PI / 4.0, 1.0), (5.0 * PI / 4.0, 1.0)])?;
                Ok(stable_levy::opnu_stable(&tau, 1.0)?.value)
            },
        },
        Spec {
            id: "uniform-density-alpha1",
            suite: Stable,
            expected: uniform_c_pp(),
            source: Derived,
            tolerance: 1e-9,
            run: || Ok(stable_levy::opnu_stable(&SpectralMeasure::uniform(1.0)?, 1.0)?.value),
        },
        Spec {
            id: "uniform-density-symmetric-formula",
            suite: Stable,
            expected: uniform_c_pp(),
            source: Derived,
            tolerance: 1e-9,
            run: || stable_levy::hilbert_hardy_symmetric(&SpectralMeasure::uniform(1.0)?, 1.0),
        },
        Spec {
            id: "common-poisson-jumps",
            suite: Stable,
            expected: 1.0,
            source: Published,
            tolerance: 1e-12,
            run: || {
                Ok(stable_levy::opnu_atoms(&[JumpAtom {
                    x: 1.0,
                    y: 1.0,
                    weight: 1.0,
                }])?
                .value)
            },
        },
        Spec {
            id: "skellam-pair-jumps",
            suite: Stable,
            expected: 1.0,
            source: Published,
            tolerance: 1e-12,
            run: || {
                let atoms = [
                    JumpAtom {
                        x: 1.0,
                        y: 1.0,
                        weight: 1.0,
                    },
                    JumpAtom {
                        x: -1.0,
                        y: 0.0,
                        weight: 1.0,
                    },
                ];
                Ok(stable_levy::opnu_atoms(&atoms)?.value)
            },
        },
        Spec {
            id: "no-common-jumps",
            suite: Stable,
            expected: 0.0,
            source: Exact,
            tolerance: 0.0,
            run: || {
                let atoms = [
                    JumpAtom {
                        x: 1.0,
                        y: 0.0,
                        weight: 1.0,
                    },
                    JumpAtom {
                        x: 0.0,
                        y: 1.0,
                        weight: 1.0,
                    },
                ];
                Ok(stable_levy::opnu_atoms(&atoms)?.value)
            },
        },
        Spec {
            id: "levy-gaussian-0.9",
            suite: Stable,
            expected: 0.9,
            source: Exact,
            tolerance: 1e-15,
            run: || {
                let t = LevyTriple::new([0.0; 2], [[1.0, 0.9], [0.9, 1.0]], JumpMeasure::None)?;
                Ok(stable_levy::levy_mc(&t)?.value)
            },
        },
        Spec {
            id: "nested-subsets-3-2-1",
            suite: Subsets,
            expected: 0.5,
            source: Published,
            tolerance: 1e-10,
            run: || Ok(subsets::subset_pair_mc(&SubsetPairScheme::uniform_nested(3, 2, 1)?)?.value),
        },
        Spec {
            id: "nested-subsets-4-2-1",
            suite: Subsets,
            expected: inv_sqrt3,
            source: Published,
            tolerance: 1e-10,
            run: || Ok(subsets::subset_pair_mc(&SubsetPairScheme::uniform_nested(4, 2, 1)?)?.value),
        },
        Spec {
            id: "independent-singletons-subsample",
            suite: Subsets,
            expected: 0.5,
            source: Derived,
            tolerance: 1e-10,
            run: || {
                let single = [(0b01, 0.5), (0b10, 0.5)];
                Ok(subsets::subsample_mc(&SubsetPairScheme::independent(2, &single, &single)?)?.value)
            },
        },
        Spec {
            id: "tagged-nested-a1-b2",
            suite: Subsets,
            expected: FRAC_1_SQRT_2,
            source: Published,
            tolerance: 1e-10,
            run: || Ok(subsets::subsample_mc(&SubsetPairScheme::uniform_nested(3, 2, 1)?)?.value),
        },
        Spec {
            id: "masked-coordinate-brute-force",
            suite: Subsets,
            expected: FRAC_1_SQRT_2,
            source: Published,
            tolerance: 1e-10,
            run: || {
                let s = SubsetPairScheme::from_table(1, [((1, 1), 0.5), ((0, 1), 0.5)])?;
                let j = subsets::brute_force_subvector_joint(&s, &[vec![0.5, 0.5]], DEFAULT_STATE_CAP)?;
                Ok(max_corr(&j)?.value)
            },
        },
        Spec {
            id: "empirical-measure-3-2-1",
            suite: Subsets,
            expected: 0.5,
            source: Published,
            tolerance: 1e-9,
            run: || {
                Ok(max_corr(&subsets::empirical_measure_joint(
                    3,
                    2,
                    1,
                    &[0.5, 0.5],
                    DEFAULT_STATE_CAP,
                )?)?
                .value)
            },
        },
        Spec {
            id: "empirical-measure-4-2-1-ternary",
            suite: Subsets,
            expected: inv_sqrt6,
            source: Derived,
            tolerance: 1e-9,
            run: || {
                let law = [1.0 / 3.0; 3];
                Ok(max_corr(&subsets::empirical_measure_joint(4, 2, 1, &law, DEFAULT_STATE_CAP)?)?.value)
            },
        },
        Spec {
            id: "fisher-gap-equality",
            suite: Subsets,
            expected: 0.0,
            source: Derived,
            tolerance: 1e-12,
            run: || {
                let s = SubsetPairScheme::from_table(2, [((0b01, 0b11), 0.5), ((0b10, 0b11), 0.5)])?;
                let (lhs, rhs) = subsets::fisher_gap_gaussian(&s, &[1.0, 1.0], |_| 1.0)?;
                Ok(rhs - lhs)
            },
        },
        Spec {
            id: "skellam-trunc-10",
            suite: Estimators,
            expected: 0.8321,
            source: Published,
            tolerance: 5e-3,
            run: || Ok(max_corr(&estimators::skellam_poisson_joint(1.0, 10)?)?.value),
        },
        Spec {
            id: "gaussian-grid-128",
            suite: Estimators,
            expected: 0.5,
            source: Published,
            tolerance: 1e-2,
            run: || Ok(max_corr(&estimators::gaussian_grid_joint(0.5, 128)?)?.value),
        },
        Spec {
            id: "brownian-poisson-trunc-10-below-one",
            suite: Estimators,
            expected: 0.0,
            source: Derived,
            tolerance: 0.0,
            run: || {
                let v = LadderFamily::BrownianPoisson { rate: 1.0 }.ladder(&[2, 4, 6, 8, 10])?;
                let last = v.last().map_or(1.0, |r| r.value);
                // zero when the ladder stays at or below 0.999
                Ok((last - 0.999).max(0.0))
            },
        },
        Spec {
            id: "gaussian-binned-samples",
            suite: Estimators,
            expected: 0.5,
            source: Derived,
            tolerance: 0.02,
            run: || {
                let b = estimators::sample(&Sampler::BivariateGaussian { rho: 0.5 }, 1_000_000, 42)?;
                Ok(estimators::binned_empirical_mc(&b, 50, 50)?.value)
            },
        },
        Spec {
            id: "marshall-olkin-binned-samples",
            suite: Estimators,
            // centre of the band [0.40, 0.52] around the closed form 1/2
            expected: 0.46,
            source: Derived,
            tolerance: 0.06,
            run: || {
                let s = Sampler::MarshallOlkin {
                    l1: 1.0,
                    l2: 1.0,
                    l3: 1.0,
                };
                let b = estimators::sample(&s, 1_000_000, 42)?;
                Ok(estimators::binned_empirical_mc(&b, 50, 50)?.value)
            },
        },
    ]
}

/// Case identifiers of a suite, without running them.
pub fn case_ids(suite: Suite) -> Vec<&'static str> {
    registry()
        .into_iter()
        .filter(|s| suite == Suite::All || s.suite == suite)
        .map(|s| s.id)
        .collect()
}

pub fn run_suite(suite: Suite) -> VerifySuiteResult {
    let cases: Vec<VerifyCase> = registry()
        .into_iter()
        .filter(|s| suite == Suite::All || s.suite == suite)
        .map(|s| {
            let (computed, error) = match (s.run)() {
                Ok(v) => (v, None),
                Err(e) => (f64::NAN, Some(e.to_string())),
            };
            let pass = error.is_none() && (computed - s.expected).abs() <= s.tolerance;
            VerifyCase {
                id: s.id.to_string(),
                suite: s.suite,
                expected: s.expected,
                source: s.source,
                computed,
                tolerance: s.tolerance,
                pass,
                error,
            }
        })
        .collect();
    let passed = cases.iter().filter(|c| c.pass).count();
    VerifySuiteResult {
        suite,
        failed: cases.len() - passed,
        passed,
        cases,
    }
}
