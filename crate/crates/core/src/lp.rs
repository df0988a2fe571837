//! Thin dense front end over the `microlp` simplex solver.
//!
//! Used for phase-1 problems, boundedness certificates, nominal optima and
//! test oracles. Problems here are small, so rows are passed densely and
//! zeros are dropped.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("linear program solver failed: {0}")]
    Internal(String),
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: DVector<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<(usize, f64)>,
    cmp: Cmp,
    rhs: f64,
}

/// An LP in variables `x` with box bounds and linear rows.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    bounds: Vec<(f64, f64)>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        Self { sense, objective: Vec::new(), bounds: Vec::new(), rows: Vec::new() }
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.bounds.push((lower, upper));
        self.objective.len() - 1
    }

    pub fn add_free_vars(&mut self, costs: &[f64]) -> std::ops::Range<usize> {
        let start = self.objective.len();
        for &c in costs {
            self.add_var(c, f64::NEG_INFINITY, f64::INFINITY);
        }
        start..self.objective.len()
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        let coeffs = coeffs.into_iter().filter(|&(_, a)| a != 0.0).collect();
        self.rows.push(Row { coeffs, cmp, rhs });
    }

    /// Adds `Σ_j dense[j]·x[offset + j] (cmp) rhs`.
    pub fn add_dense_row(&mut self, offset: usize, dense: &[f64], cmp: Cmp, rhs: f64) {
        let coeffs = dense.iter().enumerate().map(|(j, &a)| (offset + j, a)).collect();
        self.add_row(coeffs, cmp, rhs);
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        let dir = match self.sense {
            Sense::Minimize => OptimizationDirection::Minimize,
            Sense::Maximize => OptimizationDirection::Maximize,
        };
        let mut p = Problem::new(dir);
        let vars: Vec<_> = self
            .objective
            .iter()
            .zip(&self.bounds)
            .map(|(&c, &b)| p.add_var(c, b))
            .collect();
        for row in &self.rows {
            let expr: Vec<_> = row.coeffs.iter().map(|&(j, a)| (vars[j], a)).collect();
            let op = match row.cmp {
                Cmp::Le => ComparisonOp::Le,
                Cmp::Ge => ComparisonOp::Ge,
                Cmp::Eq => ComparisonOp::Eq,
            };
            if expr.is_empty() {
                let ok = match row.cmp {
                    Cmp::Le => 0.0 <= row.rhs,
                    Cmp::Ge => 0.0 >= row.rhs,
                    Cmp::Eq => row.rhs == 0.0,
                };
                if !ok {
                    return Err(LpError::Infeasible);
                }
                continue;
            }
            p.add_constraint(expr, op, row.rhs);
        }
        match p.solve() {
            Ok(sol) => {
                let x = DVector::from_iterator(vars.len(), vars.iter().map(|v| *sol.var_value(*v)));
                let objective = self.objective.iter().zip(x.iter()).map(|(c, v)| c * v).sum();
                Ok(LpSolution { x, objective })
            }
            Err(microlp::Error::Infeasible) => Err(LpError::Infeasible),
            Err(microlp::Error::Unbounded) => Err(LpError::Unbounded),
            Err(microlp::Error::InternalError(msg)) => Err(LpError::Internal(msg)),
        }
    }
}
