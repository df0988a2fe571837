//! Standard equality form, LP dual, and the objective floor row.

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{AugmentedLp, LpInstance, ModelError, ObjectiveMap, ObjectiveSense, RowKind, VarBound};
use crate::lp::{Cmp, LinearProgram, LpError, Sense};
use crate::wac::Polytope;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConvertError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("instance is not in all-<= form with free variables")]
    NotInequalityForm,
    #[error("objective floor {v} is not below the nominal optimum {optimum}")]
    FloorTooHigh { v: f64, optimum: f64 },
    #[error("nominal problem is infeasible")]
    Infeasible,
    #[error("nominal problem is unbounded; pass an explicit floor")]
    Unbounded,
    #[error("lp solver failure: {0}")]
    Solver(String),
}

/// How an original column is recovered from the rows of the inequality
/// form: `x_j = shift + Σ sign · z_row`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ColumnMap {
    pub name: String,
    pub shift: f64,
    pub parts: Vec<(usize, f64)>,
}

/// Bookkeeping from the dual construction back to the source problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DualMap {
    /// Converts the dual objective to the source objective.
    pub objective: ObjectiveMap,
    pub columns: Vec<ColumnMap>,
    /// Number of rows coming from inequality slacks; these come first.
    pub slack_rows: usize,
    /// Number of structural rows (one per nonnegative column part).
    pub structural_rows: usize,
    /// Number of rows coming from finite upper bounds.
    pub bound_rows: usize,
}

impl DualMap {
    /// Source-problem primal values from multipliers `z` of the
    /// inequality-form rows.
    pub fn primal_from_multipliers(&self, z: &DVector<f64>) -> Vec<f64> {
        self.columns
            .iter()
            .map(|c| c.shift + c.parts.iter().map(|&(r, s)| s * z[r]).sum::<f64>())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityForm {
    pub lp: LpInstance,
    pub map: DualMap,
}

impl InequalityForm {
    /// Embeds the floor row; `v` is in inequality-form units.
    pub fn embed(&self, v: Option<f64>) -> Result<AugmentedLp, ConvertError> {
        let mut aug = embed_objective(&self.lp, v)?;
        aug.objective_map = self.map.objective;
        Ok(aug)
    }
}

/// Converts to standard equality form `min c'z, A'z = b', z ≥ 0` and returns
/// its dual `max ⟨b',y⟩, A'ᵀy ≤ c'` with `y` free.
///
/// Row order of the result: one row per inequality slack in source row
/// order, then one row per nonnegative column part (free columns contribute
/// two), then one row per finite upper bound.
pub fn to_inequality_form(inst: &LpInstance) -> Result<InequalityForm, ConvertError> {
    inst.check()?;
    let (m, n) = inst.a.shape();
    let sign = match inst.objective_sense {
        ObjectiveSense::Min => 1.0,
        ObjectiveSense::Max => -1.0,
    };

    // Column parts of the standard form: (source column, orientation).
    let mut parts: Vec<(usize, f64)> = Vec::new();
    let mut columns = Vec::with_capacity(n);
    let mut shift = DVector::zeros(n);
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let VarBound { lower, upper } = inst.bounds[j];
        let mut map = ColumnMap { name: inst.col_names[j].clone(), shift: 0.0, parts: Vec::new() };
        if lower.is_finite() {
            shift[j] = lower;
            map.shift = lower;
            map.parts.push((parts.len(), 1.0));
            if upper.is_finite() {
                upper_rows.push((parts.len(), upper - lower));
            }
            parts.push((j, 1.0));
        } else if upper.is_finite() {
            shift[j] = upper;
            map.shift = upper;
            map.parts.push((parts.len(), -1.0));
            parts.push((j, -1.0));
        } else {
            map.parts.push((parts.len(), 1.0));
            parts.push((j, 1.0));
            map.parts.push((parts.len(), -1.0));
            parts.push((j, -1.0));
        }
        columns.push(map);
    }
    let slack_rows: Vec<(usize, f64)> = inst
        .row_kinds
        .iter()
        .enumerate()
        .filter_map(|(i, k)| match k {
            RowKind::Le => Some((i, 1.0)),
            RowKind::Ge => Some((i, -1.0)),
            RowKind::Eq => None,
        })
        .collect();

    let n_parts = parts.len();
    let n_slack = slack_rows.len();
    for map in &mut columns {
        for part in &mut map.parts {
            part.0 += n_slack;
        }
    }
    let ms = m + upper_rows.len();
    let ns = n_slack + n_parts + upper_rows.len();
    let mut a_std = DMatrix::zeros(ms, ns);
    let mut c_std = DVector::zeros(ns);
    for (k, &(i, s)) in slack_rows.iter().enumerate() {
        a_std[(i, k)] = s;
    }
    for (k, &(j, s)) in parts.iter().enumerate() {
        for i in 0..m {
            a_std[(i, n_slack + k)] = s * inst.a[(i, j)];
        }
        c_std[n_slack + k] = sign * s * inst.c[j];
    }
    let mut b_std = DVector::zeros(ms);
    let a_shift = &inst.a * &shift;
    for i in 0..m {
        b_std[i] = inst.b[i] - a_shift[i];
    }
    for (k, &(part, width)) in upper_rows.iter().enumerate() {
        a_std[(m + k, n_slack + part)] = 1.0;
        a_std[(m + k, n_slack + n_parts + k)] = 1.0;
        b_std[m + k] = width;
    }

    let mut row_names = Vec::with_capacity(ns);
    for &(i, _) in &slack_rows {
        row_names.push(format!("slack:{}", inst.row_names[i]));
    }
    for &(j, s) in &parts {
        let tag = if s > 0.0 { "" } else { "-" };
        row_names.push(format!("col:{tag}{}", inst.col_names[j]));
    }
    for &(part, _) in &upper_rows {
        row_names.push(format!("bound:{}", inst.col_names[parts[part].0]));
    }
    let mut col_names: Vec<String> = inst.row_names.clone();
    for &(part, _) in &upper_rows {
        col_names.push(format!("ub:{}", inst.col_names[parts[part].0]));
    }

    let offset = sign * (inst.c.dot(&shift) + inst.objective_constant);
    let lp = LpInstance {
        name: format!("{}-dual", inst.name),
        objective_sense: ObjectiveSense::Max,
        objective_name: inst.objective_name.clone(),
        objective_constant: 0.0,
        c: b_std,
        a: a_std.transpose(),
        row_kinds: vec![RowKind::Le; ns],
        b: c_std,
        bounds: vec![VarBound::FREE; ms],
        row_names,
        col_names,
    };
    let map = DualMap {
        objective: ObjectiveMap { sign, offset },
        columns,
        slack_rows: n_slack,
        structural_rows: n_parts,
        bound_rows: upper_rows.len(),
    };
    Ok(InequalityForm { lp, map })
}

/// Optimum of `max ⟨c,x⟩, Ax ≤ b` (or min when the sense says so) for an
/// instance in inequality form.
pub(crate) fn nominal_optimum(ineq: &LpInstance) -> Result<(f64, DVector<f64>), ConvertError> {
    let mut lp = LinearProgram::new(match ineq.objective_sense {
        ObjectiveSense::Max => Sense::Maximize,
        ObjectiveSense::Min => Sense::Minimize,
    });
    lp.add_free_vars(ineq.c.as_slice());
    for i in 0..ineq.num_rows() {
        let row: Vec<f64> = ineq.a.row(i).iter().copied().collect();
        lp.add_dense_row(0, &row, Cmp::Le, ineq.b[i]);
    }
    match lp.solve() {
        Ok(sol) => Ok((sol.objective, sol.x)),
        Err(LpError::Infeasible) => Err(ConvertError::Infeasible),
        Err(LpError::Unbounded) => Err(ConvertError::Unbounded),
        Err(LpError::Internal(msg)) => Err(ConvertError::Solver(msg)),
    }
}

/// Classical robust baseline for box uncertainty on the right-hand side:
/// `b_i` becomes `b_i − frac·|b_i|` on `rows`, then the nominal LP is
/// solved. Returns the optimum in inequality-form units and its maximizer.
pub fn robust_box_baseline(ineq: &LpInstance, rows: &[usize], frac: f64) -> Result<(f64, DVector<f64>), ConvertError> {
    ineq.check()?;
    if !ineq.is_inequality_form() {
        return Err(ConvertError::NotInequalityForm);
    }
    if let Some(&r) = rows.iter().find(|&&r| r >= ineq.num_rows()) {
        return Err(ConvertError::Model(ModelError::Dimension(format!("row {r} out of range"))));
    }
    let mut shifted = ineq.clone();
    for &r in rows {
        shifted.b[r] -= frac * shifted.b[r].abs();
    }
    nominal_optimum(&shifted)
}

/// Appends `−⟨c,x⟩ ≤ −v` so that the last slack is `⟨c,x⟩ − v`.
///
/// With `v = None` the floor is the nominal optimum minus
/// `max(1, 1e-3·|optimum|)`. A minimization instance is flipped so the
/// appended row always bounds the objective from the good side.
pub fn embed_objective(ineq: &LpInstance, v: Option<f64>) -> Result<AugmentedLp, ConvertError> {
    ineq.check()?;
    if !ineq.is_inequality_form() {
        return Err(ConvertError::NotInequalityForm);
    }
    let flip = match ineq.objective_sense {
        ObjectiveSense::Max => 1.0,
        ObjectiveSense::Min => -1.0,
    };
    let c = &ineq.c * flip;
    let optimum = match nominal_optimum(ineq) {
        Ok((opt, _)) => Some(flip * opt),
        Err(ConvertError::Unbounded) if v.is_some() => None,
        Err(e) => return Err(e),
    };
    let v = match (v, optimum) {
        (Some(v), Some(opt)) if v >= opt => return Err(ConvertError::FloorTooHigh { v, optimum: opt }),
        (Some(v), _) => v,
        (None, Some(opt)) => opt - f64::max(1.0, 1e-3 * opt.abs()),
        (None, None) => unreachable!("unbounded without floor returns early"),
    };
    let (m, n) = ineq.a.shape();
    let mut a = ineq.a.clone().insert_row(m, 0.0);
    for j in 0..n {
        a[(m, j)] = -c[j];
    }
    let b = ineq.b.clone().push(-v);
    let mut row_labels = ineq.row_names.clone();
    row_labels.push(format!("objective>={v}"));
    Ok(AugmentedLp {
        polytope: Polytope::new(a, b),
        c,
        v: Some(v),
        row_labels,
        objective_map: ObjectiveMap { sign: flip, offset: 0.0 },
    })
}
