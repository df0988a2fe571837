//! Barrier utility for robust counterparts with convex row margins.
//!
//! `g(x) = cᵀx + μ Σ ψ(b_i − a_iᵀx − f_i(x))` where `ψ = ln` above
//! `log_floor` and its second-order Taylor extension below, so that `g` is
//! finite and concave on all of `ℝⁿ`. As a utility of slacks, `x` is
//! recovered from `s` by least squares on the first rows of `b − Ax`.

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::UtilityError;
use crate::lp_model::{LpInstance, ObjectiveSense};
use crate::serde_util;

/// Convex margins `f_i(x) ≥ 0` subtracted from the slack of row `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Margins {
    Zero,
    /// `f_i(x) = values_i`, e.g. `‖Δb_i‖₁` for right-hand-side boxes.
    Constant { values: Vec<f64> },
    /// `f_i(x) = â_iᵀ|x|`, interval uncertainty in the matrix entries.
    AbsLinear {
        #[serde(with = "serde_util::dmatrix")]
        #[schemars(with = "Vec<Vec<f64>>")]
        a_hat: DMatrix<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RobustBarrier {
    #[serde(with = "serde_util::dmatrix")]
    #[schemars(with = "Vec<Vec<f64>>")]
    pub a: DMatrix<f64>,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub b: DVector<f64>,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub c: DVector<f64>,
    pub mu: f64,
    pub margins: Margins,
    #[serde(default = "default_log_floor")]
    pub log_floor: f64,
}

fn default_log_floor() -> f64 {
    1e-9
}

/// Result of [`RobustBarrier::maximize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RobustMaximizer {
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub x: DVector<f64>,
    pub objective: f64,
    pub value: f64,
    /// Smallest `b_i − a_iᵀx − f_i(x)`.
    pub min_margin: f64,
    pub newton_steps: usize,
}

/// `(ψ, ψ', ψ'')` of the extended logarithm.
fn ext_log(r: f64, r0: f64) -> (f64, f64, f64) {
    if r >= r0 {
        (r.ln(), 1.0 / r, -1.0 / (r * r))
    } else {
        let d = r - r0;
        (r0.ln() + d / r0 - d * d / (2.0 * r0 * r0), 1.0 / r0 - d / (r0 * r0), -1.0 / (r0 * r0))
    }
}

impl RobustBarrier {
    /// The barrier utility of `max cᵀx, a_iᵀx + f_i(x) ≤ b_i` for an
    /// instance in inequality form. Minimization instances are flipped.
    pub fn new(ineq: &LpInstance, margins: Margins, mu: f64) -> Result<Self, UtilityError> {
        if !ineq.is_inequality_form() {
            return Err(UtilityError::Invalid("instance must be in all-<= form with free variables".into()));
        }
        let flip = match ineq.objective_sense {
            ObjectiveSense::Max => 1.0,
            ObjectiveSense::Min => -1.0,
        };
        let rb = RobustBarrier {
            a: ineq.a.clone(),
            b: ineq.b.clone(),
            c: &ineq.c * flip,
            mu,
            margins,
            log_floor: default_log_floor(),
        };
        rb.check(rb.a.nrows())?;
        Ok(rb)
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    /// Parameters are consistent and the slack dimension `m` covers all rows.
    pub fn check(&self, m: usize) -> Result<(), UtilityError> {
        let (rows, n) = self.a.shape();
        if self.b.len() != rows || self.c.len() != n {
            return Err(UtilityError::Dimension(format!("a is {rows}x{n}, b has {}, c has {}", self.b.len(), self.c.len())));
        }
        if m < rows {
            return Err(UtilityError::Dimension(format!("slack vector has {m} entries, barrier needs {rows}")));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(UtilityError::Invalid("mu must be positive".into()));
        }
        if !(self.log_floor > 0.0) {
            return Err(UtilityError::Invalid("log_floor must be positive".into()));
        }
        match &self.margins {
            Margins::Zero => {}
            Margins::Constant { values } => {
                if values.len() != rows || values.iter().any(|v| !(*v >= 0.0)) {
                    return Err(UtilityError::Invalid(format!("need {rows} nonnegative constant margins")));
                }
            }
            Margins::AbsLinear { a_hat } => {
                if a_hat.shape() != (rows, n) || a_hat.iter().any(|v| !(*v >= 0.0)) {
                    return Err(UtilityError::Invalid(format!("a_hat must be a nonnegative {rows}x{n} matrix")));
                }
            }
        }
        Ok(())
    }

    /// `f(x)` with one subgradient per row. With `eta > 0` the absolute value
    /// is replaced by `√(x² + η²) − η`, which never exceeds `|x|`; the third
    /// component then holds the diagonal curvature of `|x_j|`.
    fn margins(&self, x: &DVector<f64>, eta: f64) -> (DVector<f64>, DMatrix<f64>, DVector<f64>) {
        let (rows, n) = self.a.shape();
        match &self.margins {
            Margins::Zero => (DVector::zeros(rows), DMatrix::zeros(rows, n), DVector::zeros(n)),
            Margins::Constant { values } => {
                (DVector::from_column_slice(values), DMatrix::zeros(rows, n), DVector::zeros(n))
            }
            Margins::AbsLinear { a_hat } => {
                let (abs, sign, curv): (Vec<f64>, Vec<f64>, Vec<f64>) = if eta > 0.0 {
                    let r: Vec<f64> = x.iter().map(|v| (v * v + eta * eta).sqrt()).collect();
                    (
                        r.iter().map(|r| r - eta).collect(),
                        x.iter().zip(&r).map(|(v, r)| v / r).collect(),
                        r.iter().map(|r| eta * eta / (r * r * r)).collect(),
                    )
                } else {
                    let sign = |v: &f64| if *v > 0.0 { 1.0 } else if *v < 0.0 { -1.0 } else { 0.0 };
                    (x.iter().map(|v| v.abs()).collect(), x.iter().map(sign).collect(), vec![0.0; n])
                };
                let f = a_hat * DVector::from_vec(abs);
                let mut grad = a_hat.clone();
                for (j, sg) in sign.iter().enumerate() {
                    grad.column_mut(j).scale_mut(*sg);
                }
                (f, grad, DVector::from_vec(curv))
            }
        }
    }

    /// `g(x)`, its gradient, the smallest margin, and the Hessian when asked.
    fn objective_parts(&self, x: &DVector<f64>, eta: f64, hessian: bool) -> (f64, DVector<f64>, f64, Option<DMatrix<f64>>) {
        let (rows, n) = self.a.shape();
        let (f, df, curv) = self.margins(x, eta);
        let r = &self.b - &self.a * x - &f;
        let mut value = self.c.dot(x);
        let mut grad = self.c.clone();
        let mut h = hessian.then(|| DMatrix::zeros(n, n));
        for i in 0..rows {
            let (p, dp, ddp) = ext_log(r[i], self.log_floor);
            value += self.mu * p;
            // ∇r_i = −(a_i + ∇f_i)
            let dr: DVector<f64> = -(self.a.row(i).transpose() + df.row(i).transpose());
            grad += &dr * (self.mu * dp);
            if let Some(h) = h.as_mut() {
                *h += &dr * dr.transpose() * (self.mu * ddp);
                if let Margins::AbsLinear { a_hat } = &self.margins {
                    for j in 0..n {
                        h[(j, j)] -= self.mu * dp * a_hat[(i, j)] * curv[j];
                    }
                }
            }
        }
        (value, grad, r.min(), h)
    }

    /// `cᵀx` in the maximization sense.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        self.c.dot(x)
    }

    /// `g(x)` and a supergradient in `x`.
    pub fn evaluate_point(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let (v, g, _, _) = self.objective_parts(x, 0.0, false);
        (v, g)
    }

    /// Least-squares `x` with `a x = b − s` on the barrier rows.
    pub fn x_of_slacks(&self, s: &DVector<f64>) -> Result<DVector<f64>, UtilityError> {
        let rows = self.rows();
        let rhs = &self.b - s.rows(0, rows);
        self.a
            .clone()
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| UtilityError::Invalid(format!("least squares failed: {e}")))
    }

    /// `U(s) = g(x(s))` with supergradient `−a⁺ᵀ∇g`, padded with zeros
    /// beyond the barrier rows.
    pub fn evaluate_slacks(&self, s: &DVector<f64>) -> Result<(f64, DVector<f64>), UtilityError> {
        self.check(s.len())?;
        let x = self.x_of_slacks(s)?;
        let (value, gx) = self.evaluate_point(&x);
        // a⁺ᵀ gx solves the least-norm system aᵀ z = gx with z in range(a).
        let at = self.a.transpose();
        let z = at
            .svd(true, true)
            .solve(&gx, 1e-12)
            .map_err(|e| UtilityError::Invalid(format!("least squares failed: {e}")))?;
        let mut g = DVector::zeros(s.len());
        g.rows_mut(0, self.rows()).copy_from(&(-z));
        Ok((value, g))
    }

    /// Damped Newton on `g` with the smoothing of `|x|` driven to zero.
    /// The smoothed margins never exceed the true ones, so the bound
    /// `cᵀx* ≤ cᵀx̂ + mμ` against the robust optimum `x*` still holds.
    pub fn maximize(&self, start: Option<&DVector<f64>>) -> Result<RobustMaximizer, UtilityError> {
        self.check(self.rows())?;
        let n = self.a.ncols();
        let mut x = start.cloned().unwrap_or_else(|| DVector::zeros(n));
        let etas: &[f64] = match self.margins {
            Margins::AbsLinear { .. } => &[1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12],
            _ => &[0.0],
        };
        let mut steps = 0;
        for &eta in etas {
            let mut converged = false;
            for _ in 0..200 {
                let (value, grad, _, h) = self.objective_parts(&x, eta, true);
                let neg_h = -h.expect("hessian requested");
                let chol = neg_h
                    .cholesky()
                    .ok_or_else(|| UtilityError::Maximize("hessian is not negative definite".into()))?;
                let d = chol.solve(&grad);
                let lambda2 = grad.dot(&d);
                if !lambda2.is_finite() {
                    return Err(UtilityError::Maximize("non-finite newton step".into()));
                }
                // The predicted gain is below the resolution of g: take the
                // full step, which is safe inside the quadratic region.
                if lambda2 <= 1e-14 * (1.0 + value.abs()) {
                    x += d;
                    converged = true;
                    break;
                }
                let mut alpha = 1.0;
                let mut moved = false;
                for _ in 0..60 {
                    let cand = &x + &d * alpha;
                    let (v_new, _, _, _) = self.objective_parts(&cand, eta, false);
                    if v_new >= value + 1e-4 * alpha * lambda2 {
                        x = cand;
                        moved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                steps += 1;
                if !moved {
                    break;
                }
            }
            if !converged {
                return Err(UtilityError::Maximize(format!("no convergence at smoothing {eta:e}")));
            }
        }
        let (value, _, min_margin, _) = self.objective_parts(&x, 0.0, false);
        if !(min_margin > self.log_floor) {
            return Err(UtilityError::NoSlaterPoint { margin: min_margin });
        }
        Ok(RobustMaximizer { objective: self.objective(&x), x, value, min_margin, newton_steps: steps })
    }
}
