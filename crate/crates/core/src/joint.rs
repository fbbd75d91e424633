use std::collections::{BTreeMap, HashSet};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{McError, Result};
use crate::label::Label;
use crate::tolerance;

/// Joint law of a pair of finitely-valued random variables.
///
/// Rows index X states, columns index Y states. A value of this type always
/// has unit mass, non-negative entries and no zero-mass row or column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint", into = "RawJoint")]
pub struct FiniteJoint {
    x_labels: Vec<Label>,
    y_labels: Vec<Label>,
    probs: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RawJoint {
    x_labels: Vec<Label>,
    y_labels: Vec<Label>,
    probs: Vec<Vec<f64>>,
}

impl TryFrom<RawJoint> for FiniteJoint {
    type Error = McError;

    fn try_from(raw: RawJoint) -> Result<Self> {
        validate_joint(raw.probs, raw.x_labels, raw.y_labels)
    }
}

impl From<FiniteJoint> for RawJoint {
    fn from(j: FiniteJoint) -> Self {
        let probs = (0..j.probs.nrows())
            .map(|i| j.probs.row(i).iter().copied().collect())
            .collect();
        RawJoint {
            x_labels: j.x_labels,
            y_labels: j.y_labels,
            probs,
        }
    }
}

/// Validates a raw table and returns its canonical form.
///
/// Totals within [`tolerance::MASS_RENORMALIZE`] of one are renormalised;
/// zero rows and columns are pruned together with their labels.
pub fn validate_joint(raw_table: Vec<Vec<f64>>, x_labels: Vec<Label>, y_labels: Vec<Label>) -> Result<FiniteJoint> {
    let rows = raw_table.len();
    let cols = raw_table.first().map_or(0, Vec::len);
    if let Some(bad) = raw_table.iter().position(|r| r.len() != cols) {
        return Err(McError::ShapeMismatch(format!(
            "row {bad} has {} entries, expected {cols}",
            raw_table[bad].len()
        )));
    }
    let probs = DMatrix::from_fn(rows, cols, |i, j| raw_table[i][j]);
    FiniteJoint::from_matrix(probs, x_labels, y_labels)
}

fn check_unique(labels: &[Label]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l) {
            return Err(McError::DuplicateLabel(l.to_string()));
        }
    }
    Ok(())
}

impl FiniteJoint {
    pub fn from_matrix(mut probs: DMatrix<f64>, x_labels: Vec<Label>, y_labels: Vec<Label>) -> Result<Self> {
        if probs.nrows() != x_labels.len() || probs.ncols() != y_labels.len() {
            return Err(McError::ShapeMismatch(format!(
                "table is {}x{} but there are {} x-labels and {} y-labels",
                probs.nrows(),
                probs.ncols(),
                x_labels.len(),
                y_labels.len()
            )));
        }
        check_unique(&x_labels)?;
        check_unique(&y_labels)?;

        let mut total = 0.0;
        for j in 0..probs.ncols() {
            for i in 0..probs.nrows() {
                let v = probs[(i, j)];
                if !v.is_finite() {
                    return Err(McError::NonFinite { row: i, col: j });
                }
                if v < -tolerance::NEGATIVE_MASS {
                    return Err(McError::NegativeMass {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                if v < 0.0 {
                    probs[(i, j)] = 0.0;
                }
                total += probs[(i, j)];
            }
        }
        if total == 0.0 && probs.is_empty() {
            return Err(McError::EmptySupport);
        }
        if (total - 1.0).abs() > tolerance::MASS_RENORMALIZE {
            if total == 0.0 {
                return Err(McError::EmptySupport);
            }
            return Err(McError::MassNotOne {
                total,
                tolerance: tolerance::MASS_RENORMALIZE,
            });
        }
        probs /= total;

        let keep_rows: Vec<usize> = (0..probs.nrows())
            .filter(|&i| probs.row(i).iter().any(|&v| v > 0.0))
            .collect();
        let keep_cols: Vec<usize> = (0..probs.ncols())
            .filter(|&j| probs.column(j).iter().any(|&v| v > 0.0))
            .collect();
        if keep_rows.is_empty() || keep_cols.is_empty() {
            return Err(McError::EmptySupport);
        }
        let (probs, x_labels, y_labels) = if keep_rows.len() == probs.nrows() && keep_cols.len() == probs.ncols() {
            (probs, x_labels, y_labels)
        } else {
            let pruned = probs.select_rows(&keep_rows).select_columns(&keep_cols);
            let xl = keep_rows.iter().map(|&i| x_labels[i].clone()).collect();
            let yl = keep_cols.iter().map(|&j| y_labels[j].clone()).collect();
            (pruned, xl, yl)
        };
        Ok(FiniteJoint {
            x_labels,
            y_labels,
            probs,
        })
    }

    /// Table with integer labels `0..rows` and `0..cols`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let raw: Vec<Vec<f64>> = rows.iter().map(|r| r.as_ref().to_vec()).collect();
        let nx = raw.len();
        let ny = raw.first().map_or(0, Vec::len);
        validate_joint(raw, Label::range(nx), Label::range(ny))
    }

    /// Builds a joint from sparse `(x, y, p)` triples, accumulating repeats.
    pub fn from_cells<I>(cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Label, Label, f64)>,
    {
        let mut xs: BTreeMap<Label, usize> = BTreeMap::new();
        let mut ys: BTreeMap<Label, usize> = BTreeMap::new();
        let mut entries = Vec::new();
        for (x, y, p) in cells {
            let nx = xs.len();
            let ix = *xs.entry(x).or_insert(nx);
            let ny = ys.len();
            let iy = *ys.entry(y).or_insert(ny);
            entries.push((ix, iy, p));
        }
        let mut probs = DMatrix::zeros(xs.len(), ys.len());
        for (i, j, p) in entries {
            probs[(i, j)] += p;
        }
        // Order states by label for a canonical layout.
        let (x_perm, x_labels) = sorted_axis(xs);
        let (y_perm, y_labels) = sorted_axis(ys);
        let probs = DMatrix::from_fn(x_perm.len(), y_perm.len(), |i, j| probs[(x_perm[i], y_perm[j])]);
        FiniteJoint::from_matrix(probs, x_labels, y_labels)
    }

    pub fn probs(&self) -> &DMatrix<f64> {
        &self.probs
    }

    pub fn x_labels(&self) -> &[Label] {
        &self.x_labels
    }

    pub fn y_labels(&self) -> &[Label] {
        &self.y_labels
    }

    pub fn nx(&self) -> usize {
        self.probs.nrows()
    }

    pub fn ny(&self) -> usize {
        self.probs.ncols()
    }

    pub fn marginal_x(&self) -> DVector<f64> {
        DVector::from_iterator(self.nx(), self.probs.row_iter().map(|r| r.sum()))
    }

    pub fn marginal_y(&self) -> DVector<f64> {
        DVector::from_iterator(self.ny(), self.probs.column_iter().map(|c| c.sum()))
    }

    pub fn transpose(&self) -> FiniteJoint {
        FiniteJoint {
            x_labels: self.y_labels.clone(),
            y_labels: self.x_labels.clone(),
            probs: self.probs.transpose(),
        }
    }

    /// Replaces the labels without touching the table.
    pub fn relabel(&self, x_labels: Vec<Label>, y_labels: Vec<Label>) -> Result<FiniteJoint> {
        FiniteJoint::from_matrix(self.probs.clone(), x_labels, y_labels)
    }

    /// Iterates over `(x, y, p)` for cells with positive mass.
    pub fn cells(&self) -> impl Iterator<Item = (&Label, &Label, f64)> + '_ {
        (0..self.nx()).flat_map(move |i| {
            (0..self.ny()).filter_map(move |j| {
                let p = self.probs[(i, j)];
                (p > 0.0).then(|| (&self.x_labels[i], &self.y_labels[j], p))
            })
        })
    }

    pub fn is_degenerate(&self) -> bool {
        self.nx() < 2 || self.ny() < 2
    }
}

fn sorted_axis(map: BTreeMap<Label, usize>) -> (Vec<usize>, Vec<Label>) {
    map.into_iter().map(|(l, i)| (i, l)).unzip()
}

/// How a reported value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SvdExact,
    ClosedForm,
    SpectralNorm,
    Truncation,
    BinnedEmpirical,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::SvdExact => "svd-exact",
            Method::ClosedForm => "closed-form",
            Method::SpectralNorm => "spectral-norm",
            Method::Truncation => "truncation",
            Method::BinnedEmpirical => "binned-empirical",
        };
        f.write_str(s)
    }
}

/// A computed maximal correlation together with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub value: f64,
    pub method: Method,
    #[serde(default)]
    pub spectrum: Vec<f64>,
    pub tolerance: f64,
    #[serde(default)]
    pub notes: BTreeMap<String, serde_json::Value>,
}

impl CorrelationReport {
    pub fn new(value: f64, method: Method, tolerance: f64) -> Self {
        CorrelationReport {
            value,
            method,
            spectrum: Vec::new(),
            tolerance,
            notes: BTreeMap::new(),
        }
    }

    pub fn closed_form(value: f64) -> Self {
        CorrelationReport::new(value, Method::ClosedForm, 0.0)
    }

    pub fn with_note(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.notes.insert(key.to_owned(), value.into());
        self
    }
}
