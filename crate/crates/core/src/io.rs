//! JSON input that keeps syntax errors apart from validation errors.

use serde::de::DeserializeOwned;

use crate::error::McError;
use crate::joint::{FiniteJoint, RawJoint};
use crate::stable_levy::{LevyTriple, RawLevyTriple, RawSpectralMeasure, SpectralMeasure};
use crate::subsets::{RawScheme, SubsetPairScheme};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    /// Not JSON, or JSON of the wrong shape.
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    /// Well-formed input that violates an invariant.
    #[error(transparent)]
    Invalid(#[from] McError),
}

fn load<R, T>(text: &str) -> Result<T, InputError>
where
    R: DeserializeOwned,
    T: TryFrom<R, Error = McError>,
{
    let raw: R = serde_json::from_str(text)?;
    Ok(T::try_from(raw)?)
}

pub fn joint_from_json(text: &str) -> Result<FiniteJoint, InputError> {
    load::<RawJoint, _>(text)
}

pub fn spectral_measure_from_json(text: &str) -> Result<SpectralMeasure, InputError> {
    load::<RawSpectralMeasure, _>(text)
}

pub fn levy_triple_from_json(text: &str) -> Result<LevyTriple, InputError> {
    load::<RawLevyTriple, _>(text)
}

pub fn scheme_from_json(text: &str) -> Result<SubsetPairScheme, InputError> {
    load::<RawScheme, _>(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_validation_are_distinct() {
        assert!(matches!(joint_from_json("{"), Err(InputError::Parse(_))));
        assert!(matches!(
            joint_from_json(r#"{"x_labels":[0]}"#),
            Err(InputError::Parse(_))
        ));
        let negative = r#"{"x_labels":[0,1],"y_labels":[0,1],"probs":[[0.5,-0.1],[0.3,0.3]]}"#;
        assert!(matches!(
            joint_from_json(negative),
            Err(InputError::Invalid(McError::NegativeMass { .. }))
        ));
        let ok = r#"{"x_labels":["a","b"],"y_labels":[0,1],"probs":[[0.25,0.25],[0.25,0.25]]}"#;
        assert_eq!(joint_from_json(ok).unwrap().nx(), 2);
        assert!(matches!(
            levy_triple_from_json(r#"{"jumps":{"kind":"tempered"}}"#),
            Err(InputError::Invalid(McError::UnsupportedMeasure(_)))
        ));
        assert!(matches!(
            spectral_measure_from_json(r#"{"atoms":[{"theta":0,"weight":-1}]}"#),
            Err(InputError::Invalid(McError::InvalidMeasure(_)))
        ));
        assert!(scheme_from_json(r#"{"n":2,"pairs":[{"s":[1],"t":[2],"p":1}]}"#).is_ok());
    }
}
