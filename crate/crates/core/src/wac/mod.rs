//! Weighted analytic centers of `{x : Ax ≤ b}`.
//!
//! The `w`-center minimizes `φ(x) = −Σ w_i ln(b_i − ⟨a_i,x⟩)`. At the
//! minimizer, with `s = b − Ax` and `y = w/s`, we have `Aᵀy = 0` and `Sy = w`.

mod centric;
pub mod geometry;
mod newton;

pub use centric::{centric_y, find_interior_point, weight_of_point};
pub use newton::{weighted_center, weighted_center_traced, CenterOptions, NewtonStep};

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::serde_util;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Polytope {
    #[serde(with = "serde_util::dmatrix")]
    #[schemars(with = "Vec<Vec<f64>>")]
    pub a: DMatrix<f64>,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub b: DVector<f64>,
}

impl Polytope {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Self {
        assert_eq!(a.nrows(), b.len(), "A and b disagree on the number of rows");
        Polytope { a, b }
    }

    /// Builds from row-major data.
    pub fn from_rows(m: usize, n: usize, a: &[f64], b: &[f64]) -> Self {
        Self::new(DMatrix::from_row_slice(m, n, a), DVector::from_row_slice(b))
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn slacks(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.b - &self.a * x
    }

    pub fn is_interior(&self, x: &DVector<f64>) -> bool {
        x.len() == self.n() && self.slacks(x).iter().all(|&s| s > 0.0)
    }

    pub fn push_row(&mut self, row: &DVector<f64>, rhs: f64) {
        let m = self.m();
        let mut a = std::mem::replace(&mut self.a, DMatrix::zeros(0, 0)).insert_row(m, 0.0);
        a.row_mut(m).copy_from(&row.transpose());
        self.a = a;
        self.b = std::mem::replace(&mut self.b, DVector::zeros(0)).push(rhs);
    }
}

/// A weighted center `(x, y, s)` with its weight vector `w = S y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CenterTriple {
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub x: DVector<f64>,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub y: DVector<f64>,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub s: DVector<f64>,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub w: DVector<f64>,
    /// `‖Aᵀy‖_∞`.
    pub kkt_residual: f64,
}

impl CenterTriple {
    /// Assembles the triple for a point `x` paired with a dual vector `y`.
    pub fn from_parts(poly: &Polytope, x: DVector<f64>, y: DVector<f64>) -> Self {
        let s = poly.slacks(&x);
        let w = s.component_mul(&y);
        let kkt_residual = (poly.a.transpose() * &y).amax();
        CenterTriple { x, y, s, w, kkt_residual }
    }
}

/// A point of the open unit simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(transparent)]
pub struct SimplexPoint(
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub DVector<f64>,
);

impl SimplexPoint {
    /// Barycenter `e/m`.
    pub fn barycenter(m: usize) -> Self {
        SimplexPoint(DVector::from_element(m, 1.0 / m as f64))
    }

    /// Rescales a strictly positive vector onto the simplex.
    pub fn normalized(w: DVector<f64>) -> Result<Self, WacError> {
        if w.is_empty() || w.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(WacError::InvalidWeight("weights must be finite and strictly positive".into()));
        }
        let sum = w.sum();
        Ok(SimplexPoint(w / sum))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WacError {
    #[error("empty interior: the largest uniform slack is {t:.3e}")]
    EmptyInterior { t: f64 },
    #[error("no centric y: the positive orthant meets null(A^T) only at 0")]
    NoCentricY,
    #[error("invalid weight vector: {0}")]
    InvalidWeight(String),
    #[error("point is not strictly interior (min slack {min_slack:.3e})")]
    NotInterior { min_slack: f64 },
    #[error("y is not centric: {0}")]
    NotCentric(String),
    #[error("newton iteration cap {iterations} reached, last decrement {decrement:.3e}")]
    IterationCap { iterations: usize, decrement: f64 },
    #[error("hessian lost rank: smallest pivot {pivot:.3e} against threshold {threshold:.3e}")]
    RankLoss { pivot: f64, threshold: f64 },
    #[error("line search failed at decrement {decrement:.3e}")]
    LineSearch { decrement: f64 },
    #[error("non-finite arithmetic after {} newton steps", steps.len())]
    NonFinite { steps: Vec<NewtonStep> },
    #[error("auxiliary lp failed: {0}")]
    Lp(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_row_appends() {
        let mut p = Polytope::from_rows(2, 1, &[1.0, -1.0], &[1.0, 0.0]);
        p.push_row(&DVector::from_element(1, 2.0), 3.0);
        assert_eq!(p.m(), 3);
        assert_eq!(p.a[(2, 0)], 2.0);
        assert_eq!(p.b[2], 3.0);
    }

    #[test]
    fn simplex_point_rejects_nonpositive() {
        assert!(SimplexPoint::normalized(DVector::from_vec(vec![1.0, 0.0])).is_err());
        let p = SimplexPoint::normalized(DVector::from_vec(vec![1.0, 3.0])).unwrap();
        assert_eq!(p.0.as_slice(), &[0.25, 0.75]);
    }
}
