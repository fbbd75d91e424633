//! Maximal (Hirschfeld–Gebelein–Rényi) correlation: exact values for finite
//! joints, closed forms for classical families, `Op(ν)` for Lévy processes,
//! random-subset schemes and consistent estimators for continuous laws.

pub mod bvn;
pub mod closed_forms;
pub mod discrete;
pub mod error;
pub mod estimators;
pub mod io;
pub mod joint;
pub mod label;
pub mod linalg;
pub mod quadrature;
pub mod stable_levy;
pub mod subsets;
pub mod tolerance;
pub mod verify;

pub use closed_forms::Bernoulli2x2Params;
pub use discrete::{map_states, markov_triple_joint, max_corr, product_joint, MarkovTripleSpec};
pub use error::{McError, Result};
pub use estimators::{LadderFamily, SampleBatch, Sampler, TruncationLadder};
pub use joint::{CorrelationReport, FiniteJoint, Method};
pub use label::Label;
pub use stable_levy::{levy_mc, opnu_atoms, opnu_stable, CDSet, JumpAtom, JumpMeasure, LevyTriple, SpectralMeasure};
pub use subsets::{AnovaDecomposition, SubsetPairScheme};
pub use verify::{Suite, VerifySuiteResult};
