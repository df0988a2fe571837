//! Damped Newton minimization of the weighted log barrier.

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::geometry::scaled_least_squares;
use super::{find_interior_point, CenterTriple, Polytope, WacError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CenterOptions {
    /// Stop when the Newton decrement `sqrt(gᵀH⁻¹g)` falls below this.
    pub tol_decrement: f64,
    /// Stop when `‖∇φ‖_∞` falls below this.
    pub tol_grad: f64,
    pub max_iter: usize,
}

impl Default for CenterOptions {
    fn default() -> Self {
        CenterOptions { tol_decrement: 1e-10, tol_grad: 1e-10, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct NewtonStep {
    pub iteration: usize,
    pub decrement: f64,
    pub step: f64,
}

const ARMIJO: f64 = 1e-4;
/// Smallest `|R_jj|` accepted after column scaling.
const PIVOT_GUARD: f64 = 1e-12;

/// Solves `(BᵀB) d = −Bᵀr` as `min ‖B d + r‖`. Working with `B` instead
/// of `BᵀB` keeps the direction accurate when the Hessian condition number
/// reaches 1e16.
fn newton_direction(bmat: &DMatrix<f64>, r: &DVector<f64>) -> Result<DVector<f64>, WacError> {
    scaled_least_squares(bmat, r, PIVOT_GUARD)
        .map(|d| -d)
        .map_err(|pivot| WacError::RankLoss { pivot, threshold: PIVOT_GUARD })
}

fn barrier(w: &DVector<f64>, s: &DVector<f64>) -> f64 {
    -w.iter().zip(s.iter()).map(|(wi, si)| wi * si.ln()).sum::<f64>()
}

/// The `w`-center of `poly`. `start` is used when strictly interior.
pub fn weighted_center(
    poly: &Polytope,
    w: &DVector<f64>,
    opts: &CenterOptions,
    start: Option<&DVector<f64>>,
) -> Result<CenterTriple, WacError> {
    weighted_center_traced(poly, w, opts, start).map(|(c, _)| c)
}

/// As [`weighted_center`], also returning the per-step diagnostics.
pub fn weighted_center_traced(
    poly: &Polytope,
    w: &DVector<f64>,
    opts: &CenterOptions,
    start: Option<&DVector<f64>>,
) -> Result<(CenterTriple, Vec<NewtonStep>), WacError> {
    let m = poly.m();
    if w.len() != m {
        return Err(WacError::InvalidWeight(format!("expected {m} weights, got {}", w.len())));
    }
    if w.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(WacError::InvalidWeight("weights must be finite and strictly positive".into()));
    }
    let mut x = match start {
        Some(x0) if poly.is_interior(x0) => x0.clone(),
        _ => find_interior_point(poly)?,
    };
    let mut s = poly.slacks(&x);
    let mut phi = barrier(w, &s);
    let mut steps = Vec::new();
    let at = poly.a.transpose();

    for iteration in 0..opts.max_iter {
        let y = w.component_div(&s);
        let grad = &at * &y;
        if !grad.iter().all(|v| v.is_finite()) {
            return Err(WacError::NonFinite { steps });
        }
        if grad.amax() <= opts.tol_grad {
            return Ok((CenterTriple::from_parts(poly, x, y), steps));
        }
        // H = Bᵀ B with B = diag(sqrt(w)/s) A.
        let mut bmat = poly.a.clone();
        for i in 0..m {
            let f = w[i].sqrt() / s[i];
            bmat.row_mut(i).scale_mut(f);
        }
        let d = newton_direction(&bmat, &w.map(f64::sqrt))?;
        let lambda2 = -grad.dot(&d);
        if !lambda2.is_finite() {
            return Err(WacError::NonFinite { steps });
        }
        let decrement = lambda2.max(0.0).sqrt();
        let ad = &poly.a * &d;
        // Near the minimizer the predicted decrease is below the resolution
        // of φ; only strict feasibility is enforced there.
        let check_decrease = lambda2 > 1e-8;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..80 {
            let s_new = &s - &ad * alpha;
            if s_new.iter().all(|&v| v > 0.0) {
                let phi_new = barrier(w, &s_new);
                if !check_decrease || phi_new <= phi - ARMIJO * alpha * lambda2 {
                    x += &d * alpha;
                    s = poly.slacks(&x);
                    phi = barrier(w, &s);
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        steps.push(NewtonStep { iteration, decrement, step: if accepted { alpha } else { 0.0 } });
        if !accepted {
            return Err(WacError::LineSearch { decrement });
        }
        if decrement <= opts.tol_decrement {
            let y = w.component_div(&s);
            return Ok((CenterTriple::from_parts(poly, x, y), steps));
        }
    }
    let decrement = steps.last().map_or(f64::NAN, |s| s.decrement);
    Err(WacError::IterationCap { iterations: opts.max_iter, decrement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn triangle() -> Polytope {
        Polytope::from_rows(3, 1, &[1.0, -1.0, -1.0], &[1.0, 0.0, 0.0])
    }

    #[test]
    fn triangle_uniform_weights() {
        let w = DVector::from_element(3, 1.0 / 3.0);
        let c = weighted_center(&triangle(), &w, &CenterOptions::default(), None).unwrap();
        assert_relative_eq!(c.x[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(c.s, DVector::from_vec(vec![1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0]), epsilon = 1e-12);
        assert_relative_eq!(c.y, DVector::from_vec(vec![1.0, 0.5, 0.5]), epsilon = 1e-12);
        assert!(c.kkt_residual <= 1e-8);
    }

    #[test]
    fn triangle_counterexample_start() {
        let w = DVector::from_vec(vec![0.4, 0.1, 0.5]);
        let c = weighted_center(&triangle(), &w, &CenterOptions::default(), None).unwrap();
        assert_relative_eq!(c.s, DVector::from_vec(vec![0.4, 0.6, 0.6]), epsilon = 1e-12);
        assert_relative_eq!(c.y, DVector::from_vec(vec![1.0, 1.0 / 6.0, 5.0 / 6.0]), epsilon = 1e-12);
    }

    #[test]
    fn symmetric_interval() {
        let p = Polytope::from_rows(2, 1, &[1.0, -1.0], &[1.0, 1.0]);
        let c = weighted_center(&p, &DVector::from_element(2, 0.5), &CenterOptions::default(), None).unwrap();
        assert!(c.x[0].abs() < 1e-14);
        assert_relative_eq!(c.y, DVector::from_element(2, 0.5), epsilon = 1e-14);
    }

    #[test]
    fn warm_start_is_used_and_agrees() {
        let w = DVector::from_vec(vec![0.2, 0.3, 0.5]);
        let cold = weighted_center(&triangle(), &w, &CenterOptions::default(), None).unwrap();
        let x0 = DVector::from_element(1, 0.9);
        let (warm, steps) = weighted_center_traced(&triangle(), &w, &CenterOptions::default(), Some(&x0)).unwrap();
        assert_relative_eq!(cold.x, warm.x, epsilon = 1e-12);
        assert!(!steps.is_empty());
    }

    #[test]
    fn rank_loss_is_reported() {
        // x2 does not appear: H is singular.
        let p = Polytope::from_rows(2, 2, &[1.0, 0.0, -1.0, 0.0], &[1.0, 1.0]);
        let x0 = DVector::zeros(2);
        let w = DVector::from_vec(vec![0.3, 0.7]);
        let err = weighted_center(&p, &w, &CenterOptions::default(), Some(&x0)).unwrap_err();
        assert!(matches!(err, WacError::RankLoss { .. }));
    }

    #[test]
    fn iteration_cap_reports_decrement() {
        let opts = CenterOptions { max_iter: 1, ..Default::default() };
        let x0 = DVector::from_element(1, 0.999);
        let err = weighted_center(&triangle(), &DVector::from_element(3, 1.0 / 3.0), &opts, Some(&x0)).unwrap_err();
        assert!(matches!(err, WacError::IterationCap { iterations: 1, decrement } if decrement > 0.0));
    }
}
