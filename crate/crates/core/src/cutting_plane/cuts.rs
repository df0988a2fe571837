//! Cut normals in weight space.

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::serde_util;
use crate::wac::{geometry::scaled_least_squares, CenterTriple};

/// The half-space `{w : uᵀw ≥ rhs}` with `rhs = uᵀw_anchor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CutHalfspace {
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub u: DVector<f64>,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub w_anchor: DVector<f64>,
    pub rhs: f64,
}

impl CutHalfspace {
    pub fn through(u: DVector<f64>, w_anchor: DVector<f64>) -> Self {
        let rhs = u.dot(&w_anchor);
        CutHalfspace { u, w_anchor, rhs }
    }

    /// `uᵀw − rhs`; nonnegative on the kept side.
    pub fn margin(&self, w: &DVector<f64>) -> f64 {
        self.u.dot(w) - self.rhs
    }

    /// `margin(w) ≥ −tol·‖u‖`.
    pub fn contains(&self, w: &DVector<f64>, tol: f64) -> bool {
        self.margin(w) >= -tol * self.u.norm()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CutError {
    #[error("stationary point: A^T g vanishes, no cut is defined")]
    Stationary,
    #[error("normal-equation matrix is not positive definite (condition estimate {condition:.3e})")]
    Degenerate { condition: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// `‖Aᵀg‖` below this fraction of `‖A‖·‖g‖` counts as stationary.
const STATIONARY_REL: f64 = 1e-14;
/// Smallest scaled QR pivot of `D A`.
const PIVOT_GUARD: f64 = 1e-12;

/// The cut through `w^k` with normal `u = S⁻¹A h`, where
/// `Aᵀ Y⁰ S⁻¹ A h = Aᵀ g`. It contains `W_{s^k}` and keeps `Y⁰s_opt` for
/// every maximizer `s_opt`.
pub fn cut_normal(center: &CenterTriple, g: &DVector<f64>, y0: &DVector<f64>, a: &DMatrix<f64>) -> Result<CutHalfspace, CutError> {
    let m = a.nrows();
    if g.len() != m || y0.len() != m || center.s.len() != m {
        return Err(CutError::Dimension(format!("expected {m} entries in g, y0 and s")));
    }
    let atg = a.transpose() * g;
    if atg.norm() <= STATIONARY_REL * a.norm() * g.norm() || atg.norm() == 0.0 {
        return Err(CutError::Stationary);
    }
    // h = argmin ‖D A h − D⁻¹g‖ with D² = Y⁰S⁻¹ has the normal equations
    // of the defining system.
    let mut da = a.clone();
    for i in 0..m {
        da.row_mut(i).scale_mut((y0[i] / center.s[i]).sqrt());
    }
    let rhs = DVector::from_fn(m, |i, _| g[i] * (center.s[i] / y0[i]).sqrt());
    let h = scaled_least_squares(&da, &rhs, PIVOT_GUARD)
        .map_err(|pivot| CutError::Degenerate { condition: 1.0 / (pivot * pivot) })?;
    let u = (a * h).component_div(&center.s);
    Ok(CutHalfspace::through(u, center.w.clone()))
}

/// The naive cut with normal `(Y^k)⁻¹g`, valid for NDAS utilities only.
pub fn naive_cut(center: &CenterTriple, g: &DVector<f64>) -> CutHalfspace {
    CutHalfspace::through(g.component_div(&center.y), center.w.clone())
}
