//! Decision-maker utilities over slack vectors and the oracle protocol.
//!
//! Every family returns a value and one supergradient. At kinks of the
//! piecewise families the supergradient is the average of the active
//! one-sided gradients.

mod barrier;
mod elicitation;
mod ndas;
mod oracle;

pub use barrier::{Margins, RobustBarrier, RobustMaximizer};
pub use elicitation::{approx_gradient, default_eps, lift_driving_factors, probe_points, synthetic_priorities};
pub use ndas::{ndas_check, ndas_witness, NdasReport};
pub use oracle::{Oracle, OracleAnswer, OracleError, OracleQuery, QueryKind, SyntheticOracle};

use nalgebra::DVector;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UtilityError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid utility parameters: {0}")]
    Invalid(String),
    #[error("slack vector outside the utility domain at row {row} (value {value})")]
    OutsideDomain { row: usize, value: f64 },
    #[error("robust barrier has no Slater point (smallest margin {margin:.3e})")]
    NoSlaterPoint { margin: f64 },
    #[error("robust barrier maximization failed: {0}")]
    Maximize(String),
}

/// Per-row shape of the probability-driven utility: `u = s` below `eps1`,
/// flat up to `eps2`, then slope −1 down to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PiecewiseRow {
    pub row: usize,
    pub eps1: f64,
    /// `None` means the flat part never ends.
    #[serde(default)]
    pub eps2: Option<f64>,
}

impl PiecewiseRow {
    /// `(u, u')` with `u'` averaged at the kinks.
    fn eval(&self, s: f64) -> (f64, f64) {
        let e2 = self.eps2.unwrap_or(f64::INFINITY);
        if s < self.eps1 {
            (s, 1.0)
        } else if s == self.eps1 {
            (s, if e2 > self.eps1 { 0.5 } else { 0.0 })
        } else if s < e2 {
            (self.eps1, 0.0)
        } else if s == e2 {
            (self.eps1, -0.5)
        } else {
            (self.eps1 - (s - e2), -1.0)
        }
    }
}

/// `⟨coef, s⟩ + constant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AffinePiece {
    pub coef: Vec<f64>,
    #[serde(default)]
    pub constant: f64,
}

impl AffinePiece {
    fn eval(&self, s: &DVector<f64>) -> f64 {
        self.coef.iter().zip(s.iter()).map(|(c, v)| c * v).sum::<f64>() + self.constant
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum UtilitySpec {
    /// `Σ t_i ln s_i`.
    LogWeighted { t: Vec<f64> },
    /// `−(s_i − s_j)²`, 0-based indices.
    QuadraticPair { i: usize, j: usize },
    /// `Σ ln u_i(s_i)` over the listed rows.
    PiecewiseProb { rows: Vec<PiecewiseRow> },
    /// `cᵀx + μ Σ ln(b_i − a_iᵀx − f_i(x))` with `x` recovered from `s`.
    RobustBarrier(Box<RobustBarrier>),
    /// Minimum of affine pieces.
    Custom { pieces: Vec<AffinePiece> },
}

impl UtilitySpec {
    /// Checks parameters against the slack dimension `m`.
    pub fn check(&self, m: usize) -> Result<(), UtilityError> {
        match self {
            UtilitySpec::LogWeighted { t } => {
                if t.len() != m {
                    return Err(UtilityError::Dimension(format!("t has length {}, expected {m}", t.len())));
                }
                if t.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(UtilityError::Invalid("t must be finite and nonnegative".into()));
                }
                if t.iter().all(|&v| v == 0.0) {
                    return Err(UtilityError::Invalid("t must not vanish".into()));
                }
            }
            UtilitySpec::QuadraticPair { i, j } => {
                if *i >= m || *j >= m {
                    return Err(UtilityError::Dimension(format!("pair ({i}, {j}) out of range for {m} rows")));
                }
                if i == j {
                    return Err(UtilityError::Invalid("pair indices must differ".into()));
                }
            }
            UtilitySpec::PiecewiseProb { rows } => {
                if rows.is_empty() {
                    return Err(UtilityError::Invalid("no rows".into()));
                }
                for r in rows {
                    if r.row >= m {
                        return Err(UtilityError::Dimension(format!("row {} out of range for {m} rows", r.row)));
                    }
                    let e2 = r.eps2.unwrap_or(f64::INFINITY);
                    if !(r.eps1 > 0.0 && r.eps1.is_finite() && e2 >= r.eps1) {
                        return Err(UtilityError::Invalid(format!("row {}: need 0 < eps1 <= eps2", r.row)));
                    }
                }
            }
            UtilitySpec::RobustBarrier(rb) => rb.check(m)?,
            UtilitySpec::Custom { pieces } => {
                if pieces.is_empty() {
                    return Err(UtilityError::Invalid("no pieces".into()));
                }
                if let Some(p) = pieces.iter().find(|p| p.coef.len() != m) {
                    return Err(UtilityError::Dimension(format!("piece has {} coefficients, expected {m}", p.coef.len())));
                }
            }
        }
        Ok(())
    }

    /// True for the families whose optimum weight is `S g` up to scaling.
    pub fn is_log_like(&self) -> bool {
        matches!(self, UtilitySpec::LogWeighted { .. })
    }

    pub fn value(&self, s: &DVector<f64>) -> Result<f64, UtilityError> {
        self.evaluate(s).map(|(v, _)| v)
    }

    /// `U(s)` and one supergradient.
    pub fn evaluate(&self, s: &DVector<f64>) -> Result<(f64, DVector<f64>), UtilityError> {
        let m = s.len();
        self.check(m)?;
        match self {
            UtilitySpec::LogWeighted { t } => {
                let mut g = DVector::zeros(m);
                let mut value = 0.0;
                for i in 0..m {
                    if t[i] == 0.0 {
                        continue;
                    }
                    if !(s[i] > 0.0) {
                        return Err(UtilityError::OutsideDomain { row: i, value: s[i] });
                    }
                    value += t[i] * s[i].ln();
                    g[i] = t[i] / s[i];
                }
                Ok((value, g))
            }
            UtilitySpec::QuadraticPair { i, j } => {
                let d = s[*i] - s[*j];
                let mut g = DVector::zeros(m);
                g[*i] = -2.0 * d;
                g[*j] = 2.0 * d;
                Ok((-d * d, g))
            }
            UtilitySpec::PiecewiseProb { rows } => {
                let mut g = DVector::zeros(m);
                let mut value = 0.0;
                for r in rows {
                    let (u, du) = r.eval(s[r.row]);
                    if !(u > 0.0) {
                        return Err(UtilityError::OutsideDomain { row: r.row, value: s[r.row] });
                    }
                    value += u.ln();
                    g[r.row] += du / u;
                }
                Ok((value, g))
            }
            UtilitySpec::RobustBarrier(rb) => rb.evaluate_slacks(s),
            UtilitySpec::Custom { pieces } => {
                let vals: Vec<f64> = pieces.iter().map(|p| p.eval(s)).collect();
                let value = vals.iter().copied().fold(f64::INFINITY, f64::min);
                let tol = 1e-12 * (1.0 + value.abs());
                let active: Vec<usize> = (0..pieces.len()).filter(|&k| vals[k] - value <= tol).collect();
                let mut g = DVector::zeros(m);
                for &k in &active {
                    g += DVector::from_column_slice(&pieces[k].coef);
                }
                Ok((value, g / active.len() as f64))
            }
        }
    }
}

/// The two-piece concave utility `min(3s₁ − s₂, −s₁ + 3s₂)` on three slacks,
/// which is not NDAS.
pub fn two_piece_counterexample() -> UtilitySpec {
    UtilitySpec::Custom {
        pieces: vec![
            AffinePiece { coef: vec![3.0, -1.0, 0.0], constant: 0.0 },
            AffinePiece { coef: vec![-1.0, 3.0, 0.0], constant: 0.0 },
        ],
    }
}
