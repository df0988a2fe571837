//! Linear programs before and after conversion to the all-`≤` form with an
//! embedded objective row.

mod convert;
mod mps;
mod validate;

pub use convert::{embed_objective, robust_box_baseline, to_inequality_form, ColumnMap, ConvertError, DualMap, InequalityForm};
pub use mps::{parse_mps, write_mps, MpsError};
pub use validate::{validate, with_bounding_box, with_recession_bounds, ValidationReport};

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::serde_util;
use crate::wac::Polytope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveSense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub enum RowKind {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct VarBound {
    #[serde(with = "serde_util::ext_f64")]
    #[schemars(with = "serde_util::ExtReal")]
    pub lower: f64,
    #[serde(with = "serde_util::ext_f64")]
    #[schemars(with = "serde_util::ExtReal")]
    pub upper: f64,
}

impl VarBound {
    pub const NONNEG: VarBound = VarBound { lower: 0.0, upper: f64::INFINITY };
    pub const FREE: VarBound = VarBound { lower: f64::NEG_INFINITY, upper: f64::INFINITY };
}

/// An LP as read from a file: optimize `⟨c,x⟩ + constant` subject to
/// `a_i x (kind_i) b_i` and `lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct LpInstance {
    pub name: String,
    pub objective_sense: ObjectiveSense,
    pub objective_name: String,
    #[serde(default)]
    pub objective_constant: f64,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub c: DVector<f64>,
    #[serde(with = "serde_util::dmatrix")]
    #[schemars(with = "Vec<Vec<f64>>")]
    pub a: DMatrix<f64>,
    pub row_kinds: Vec<RowKind>,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub b: DVector<f64>,
    pub bounds: Vec<VarBound>,
    pub row_names: Vec<String>,
    pub col_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("variable {name}: lower bound {lower} exceeds upper bound {upper}")]
    CrossedBounds { name: String, lower: f64, upper: f64 },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
}

impl LpInstance {
    pub fn num_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn num_cols(&self) -> usize {
        self.a.ncols()
    }

    pub fn check(&self) -> Result<(), ModelError> {
        let (m, n) = self.a.shape();
        let dims = [
            ("c", self.c.len(), n),
            ("b", self.b.len(), m),
            ("row_kinds", self.row_kinds.len(), m),
            ("bounds", self.bounds.len(), n),
            ("row_names", self.row_names.len(), m),
            ("col_names", self.col_names.len(), n),
        ];
        for (what, got, want) in dims {
            if got != want {
                return Err(ModelError::Dimension(format!("{what} has length {got}, expected {want}")));
            }
        }
        if self.a.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("A".into()));
        }
        if self.b.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("b".into()));
        }
        if self.c.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("c".into()));
        }
        for (bd, name) in self.bounds.iter().zip(&self.col_names) {
            if bd.lower > bd.upper || bd.lower == f64::INFINITY || bd.upper == f64::NEG_INFINITY {
                return Err(ModelError::CrossedBounds {
                    name: name.clone(),
                    lower: bd.lower,
                    upper: bd.upper,
                });
            }
        }
        Ok(())
    }

    /// Builds `max ⟨c,x⟩` subject to `Ax ≤ b` with free variables.
    pub fn inequality(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>) -> Self {
        let (m, n) = a.shape();
        LpInstance {
            name: String::new(),
            objective_sense: ObjectiveSense::Max,
            objective_name: "obj".into(),
            objective_constant: 0.0,
            c,
            a,
            row_kinds: vec![RowKind::Le; m],
            b,
            bounds: vec![VarBound::FREE; n],
            row_names: (1..=m).map(|i| format!("r{i}")).collect(),
            col_names: (1..=n).map(|j| format!("x{j}")).collect(),
        }
    }

    pub fn is_inequality_form(&self) -> bool {
        self.row_kinds.iter().all(|k| *k == RowKind::Le)
            && self.bounds.iter().all(|b| *b == VarBound::FREE)
    }
}

/// Maps values of `⟨c,x⟩` in the inequality form back to the units of the
/// source problem: `reported = sign · (⟨c,x⟩ + offset)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ObjectiveMap {
    pub sign: f64,
    pub offset: f64,
}

impl Default for ObjectiveMap {
    fn default() -> Self {
        ObjectiveMap { sign: 1.0, offset: 0.0 }
    }
}

impl ObjectiveMap {
    pub fn apply(&self, value: f64) -> f64 {
        self.sign * (value + self.offset)
    }
}

/// The polytope `{x : Ax ≤ b}` the centers live in, with the objective
/// `⟨c,x⟩` and, when embedded, the floor row `−⟨c,x⟩ ≤ −v` as its last row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AugmentedLp {
    #[serde(flatten)]
    pub polytope: Polytope,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub c: DVector<f64>,
    /// Objective floor; `None` when no objective row was embedded.
    pub v: Option<f64>,
    pub row_labels: Vec<String>,
    #[serde(default)]
    pub objective_map: ObjectiveMap,
}

impl AugmentedLp {
    /// Wraps a bare polytope; the objective is zero and no row is added.
    pub fn from_polytope(polytope: Polytope) -> Self {
        let (m, n) = polytope.a.shape();
        AugmentedLp {
            polytope,
            c: DVector::zeros(n),
            v: None,
            row_labels: (1..=m).map(|i| format!("r{i}")).collect(),
            objective_map: ObjectiveMap::default(),
        }
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn num_rows(&self) -> usize {
        self.polytope.a.nrows()
    }

    pub fn num_cols(&self) -> usize {
        self.polytope.a.ncols()
    }

    /// `⟨c,x⟩` in the units of the inequality form.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        self.c.dot(x)
    }

    /// Objective value in the units of the source problem.
    pub fn reported_objective(&self, x: &DVector<f64>) -> f64 {
        self.objective_map.apply(self.objective(x))
    }

    pub fn check(&self) -> Result<(), ModelError> {
        let (m, n) = self.polytope.a.shape();
        if self.polytope.b.len() != m {
            return Err(ModelError::Dimension(format!("b has length {}, expected {m}", self.polytope.b.len())));
        }
        if self.c.len() != n {
            return Err(ModelError::Dimension(format!("c has length {}, expected {n}", self.c.len())));
        }
        if self.row_labels.len() != m {
            return Err(ModelError::Dimension(format!(
                "row_labels has length {}, expected {m}",
                self.row_labels.len()
            )));
        }
        if self.polytope.a.iter().chain(self.polytope.b.iter()).any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite("A or b".into()));
        }
        Ok(())
    }
}
