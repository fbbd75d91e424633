use std::fmt;

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::tolerance::LABEL_SIGNIFICANT_DIGITS;

/// A state identifier on one axis of a joint table.
///
/// Integers and reals are kept apart so that sums of integer labels stay
/// exact; tuples label paths and product states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Real(OrderedFloat<f64>),
    Text(String),
    Tuple(Vec<Label>),
}

impl Label {
    pub fn real(x: f64) -> Self {
        Label::Real(OrderedFloat(canonical_real(x)))
    }

    pub fn pair(a: Label, b: Label) -> Self {
        Label::Tuple(vec![a, b])
    }

    pub fn as_number(&self) -> Option<Number> {
        match *self {
            Label::Int(v) => Some(Number::Int(v)),
            Label::Real(v) => Some(Number::Real(v.0)),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        self.as_number().map(Number::to_f64)
    }

    /// Integer labels `0..n`.
    pub fn range(n: usize) -> Vec<Label> {
        (0..n as i64).map(Label::Int).collect()
    }
}

impl From<i64> for Label {
    fn from(v: i64) -> Self {
        Label::Int(v)
    }
}

impl From<&str> for Label {
    fn from(v: &str) -> Self {
        Label::Text(v.to_owned())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(v) => write!(f, "{v}"),
            Label::Real(v) => write!(f, "{}", v.0),
            Label::Text(s) => write!(f, "{s}"),
            Label::Tuple(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Numeric view of a label used by the partial-sum constructors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Number {
    Int(i64),
    Real(f64),
}

impl Number {
    pub fn to_f64(self) -> f64 {
        match self {
            Number::Int(v) => v as f64,
            Number::Real(v) => v,
        }
    }

    /// Integer sums stay exact; anything else is summed in floating point
    /// and canonicalised so that equal partial sums collide.
    pub fn sum(self, other: Number) -> Number {
        match (self, other) {
            (Number::Int(a), Number::Int(b)) => match a.checked_add(b) {
                Some(s) => Number::Int(s),
                None => Number::Real(canonical_real(a as f64 + b as f64)),
            },
            (a, b) => Number::Real(canonical_real(a.to_f64() + b.to_f64())),
        }
    }

    pub fn into_label(self) -> Label {
        match self {
            Number::Int(v) => Label::Int(v),
            Number::Real(v) => Label::real(v),
        }
    }
}

/// Rounds to a fixed number of significant digits and folds `-0.0` into `0.0`.
pub fn canonical_real(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let magnitude = x.abs().log10().floor() as i32 + 1;
    let shift = LABEL_SIGNIFICANT_DIGITS - magnitude;
    let rounded = if shift >= 0 {
        let scale = 10f64.powi(shift);
        (x * scale).round() / scale
    } else {
        let scale = 10f64.powi(-shift);
        (x / scale).round() * scale
    };
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_partial_sums_collide() {
        let a = Number::Real(0.1).sum(Number::Real(0.2));
        let b = Number::Real(0.3);
        assert_eq!(a.into_label(), b.into_label());
    }

    #[test]
    fn integer_sums_are_exact() {
        assert_eq!(Number::Int(3).sum(Number::Int(-5)), Number::Int(-2));
    }

    #[test]
    fn json_shapes() {
        let labels: Vec<Label> = serde_json::from_str(r#"[1, 2.5, "a", [0, 1]]"#).unwrap();
        assert_eq!(labels[0], Label::Int(1));
        assert_eq!(labels[1], Label::real(2.5));
        assert_eq!(labels[2], Label::from("a"));
        assert_eq!(labels[3], Label::Tuple(vec![Label::Int(0), Label::Int(1)]));
    }

    #[test]
    fn negative_zero_folds() {
        assert_eq!(Label::real(-0.0), Label::real(0.0));
    }
}
