//! The localization set: the open simplex intersected with the cuts so far.

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::cuts::CutHalfspace;
use crate::wac::{find_interior_point, geometry::simplex_basis, weighted_center, CenterOptions, Polytope, WacError};

/// Cuts whose normal is parallel to `e` within this relative size are
/// constant on the simplex.
const VACUOUS_REL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CutSimplex {
    pub m: usize,
    pub cuts: Vec<CutHalfspace>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LocalizationError {
    #[error("localization set has empty interior after {cuts} cuts")]
    Empty { cuts: usize },
    #[error("analytic center failed: {0}")]
    Center(WacError),
}

impl CutSimplex {
    pub fn new(m: usize) -> Self {
        CutSimplex { m, cuts: Vec::new() }
    }

    pub fn push(&mut self, cut: CutHalfspace) {
        self.cuts.push(cut);
    }

    /// Positive entries summing to one and every cut kept within `tol`.
    pub fn contains(&self, w: &DVector<f64>, tol: f64) -> bool {
        w.len() == self.m
            && w.iter().all(|&v| v > 0.0)
            && (w.sum() - 1.0).abs() <= 1e-9
            && self.cuts.iter().all(|c| c.contains(w, tol))
    }

    /// Smallest cut margin at `w`, each scaled by `‖u‖`.
    pub fn min_margin(&self, w: &DVector<f64>) -> f64 {
        self.cuts.iter().map(|c| c.margin(w) / c.u.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Supremum of `t ≥ 0` keeping `w + t·d` positive and inside every cut.
    /// Cuts already tight at `w` limit `t` only when `d` leaves them.
    pub fn max_step(&self, w: &DVector<f64>, d: &DVector<f64>) -> f64 {
        let mut t = f64::INFINITY;
        for i in 0..self.m {
            if d[i] < 0.0 {
                t = t.min(-w[i] / d[i]);
            }
        }
        for c in &self.cuts {
            let slope = c.u.dot(d);
            if slope < 0.0 {
                t = t.min((c.margin(w).max(0.0)) / -slope);
            }
        }
        t
    }

    /// The simplex and the cuts in coordinates `w = e/m + N z`, one
    /// unit-norm row per constraint.
    pub fn reduced_polytope(&self) -> Result<(Polytope, DMatrix<f64>), LocalizationError> {
        let m = self.m;
        let basis = simplex_basis(m);
        let base = DVector::from_element(m, 1.0 / m as f64);
        let mut rows: Vec<(DVector<f64>, f64)> = Vec::with_capacity(m + self.cuts.len());
        for i in 0..m {
            let r = -basis.row(i).transpose();
            rows.push((r, base[i]));
        }
        for c in &self.cuts {
            let r = -(basis.transpose() * &c.u);
            let rhs = c.u.dot(&base) - c.rhs;
            if r.norm() <= VACUOUS_REL * c.u.norm() {
                if rhs < 0.0 {
                    return Err(LocalizationError::Empty { cuts: self.cuts.len() });
                }
                continue;
            }
            rows.push((r, rhs));
        }
        let d = m - 1;
        let mut a = DMatrix::zeros(rows.len(), d);
        let mut b = DVector::zeros(rows.len());
        for (k, (r, rhs)) in rows.iter().enumerate() {
            let norm = r.norm();
            a.row_mut(k).copy_from(&(r / norm).transpose());
            b[k] = rhs / norm;
        }
        Ok((Polytope::new(a, b), basis))
    }

    /// Analytic center of the localization set. `start` seeds Newton when it
    /// is strictly inside.
    pub fn analytic_center(&self, start: Option<&DVector<f64>>) -> Result<DVector<f64>, LocalizationError> {
        let m = self.m;
        if m == 1 {
            return Ok(DVector::from_element(1, 1.0));
        }
        let (poly, basis) = self.reduced_polytope()?;
        let base = DVector::from_element(m, 1.0 / m as f64);
        let z0 = start.map(|w| basis.transpose() * (w - &base));
        let weights = DVector::from_element(poly.m(), 1.0 / poly.m() as f64);
        // Any strictly interior point will do, so the tolerance sits well
        // above the rounding floor of thin sets.
        let opts = CenterOptions { tol_decrement: 1e-7, tol_grad: 0.0, max_iter: 200 };
        let z = match weighted_center(&poly, &weights, &opts, z0.as_ref()) {
            Ok(c) => c.x,
            Err(WacError::EmptyInterior { .. }) => return Err(LocalizationError::Empty { cuts: self.cuts.len() }),
            Err(WacError::IterationCap { .. } | WacError::LineSearch { .. } | WacError::RankLoss { .. }) => {
                find_interior_point(&poly).map_err(|e| match e {
                    WacError::EmptyInterior { .. } => LocalizationError::Empty { cuts: self.cuts.len() },
                    other => LocalizationError::Center(other),
                })?
            }
            Err(other) => return Err(LocalizationError::Center(other)),
        };
        let w = base + basis * z;
        // Round-off can leave tiny entries off the simplex plane.
        let w = w.map(|v| v.max(f64::MIN_POSITIVE));
        let sum = w.sum();
        Ok(w / sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn bare_simplex_center_is_barycenter() {
        for m in [2, 3, 7] {
            let w = CutSimplex::new(m).analytic_center(None).unwrap();
            assert_relative_eq!(w, DVector::from_element(m, 1.0 / m as f64), epsilon = 1e-10);
        }
    }

    #[test]
    fn half_simplex_center() {
        // {w ∈ Δ₂ : w₁ ≥ w₂}: the segment w₁ ∈ [1/2, 1); its analytic center
        // with uniform weights on {w₂ > 0, w₁ − w₂ ≥ 0, w₁ > 0} maximizes
        // ln w₁ + ln(1 − w₁) + ln(2w₁ − 1).
        let mut loc = CutSimplex::new(2);
        loc.push(CutHalfspace::through(v(&[1.0, -1.0]), v(&[0.5, 0.5])));
        let w = loc.analytic_center(None).unwrap();
        // Derivative 1/w − 1/(1−w) + 2/(2w−1) = 0 gives 6w² − 6w + 1 = 0.
        let w1 = (3.0 + 3f64.sqrt()) / 6.0;
        assert_relative_eq!(w, v(&[w1, 1.0 - w1]), epsilon = 1e-9);
        assert!(loc.contains(&w, 0.0));
    }

    #[test]
    fn contradicting_cuts_are_empty() {
        let mut loc = CutSimplex::new(3);
        loc.push(CutHalfspace::through(v(&[1.0, 0.0, 0.0]), v(&[0.6, 0.2, 0.2])));
        loc.push(CutHalfspace::through(v(&[-1.0, 0.0, 0.0]), v(&[0.4, 0.3, 0.3])));
        assert!(matches!(loc.analytic_center(None), Err(LocalizationError::Empty { .. })));
    }

    #[test]
    fn vacuous_cut_is_skipped_or_empty() {
        let mut loc = CutSimplex::new(3);
        loc.push(CutHalfspace { u: v(&[1.0, 1.0, 1.0]), w_anchor: v(&[0.2, 0.3, 0.5]), rhs: 0.5 });
        assert!(loc.analytic_center(None).is_ok());
        loc.push(CutHalfspace { u: v(&[1.0, 1.0, 1.0]), w_anchor: v(&[0.2, 0.3, 0.5]), rhs: 2.0 });
        assert!(matches!(loc.analytic_center(None), Err(LocalizationError::Empty { .. })));
    }

    #[test]
    fn max_step_respects_cuts_and_positivity() {
        let mut loc = CutSimplex::new(3);
        let w = v(&[0.5, 0.25, 0.25]);
        loc.push(CutHalfspace::through(v(&[1.0, 0.0, -1.0]), w.clone()));
        // Leaving the tight cut is not allowed.
        assert_eq!(loc.max_step(&w, &v(&[-0.1, 0.0, 0.1])), 0.0);
        // Entering it, positivity of w₂ binds.
        assert_relative_eq!(loc.max_step(&w, &v(&[0.1, -0.1, 0.0])), 2.5);
    }
}
