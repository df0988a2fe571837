//! Approximate gradients from pairwise priorities, and driving factors.

use nalgebra::{DMatrix, DVector};

use super::{UtilityError, UtilitySpec};

/// Relative probe sizes `10⁻³ · s_i`.
pub fn default_eps(s: &DVector<f64>) -> DVector<f64> {
    s * 1e-3
}

/// The `m + 1` points `s, s + ε_1 e_1, …, s + ε_m e_m` the DM compares.
pub fn probe_points(s: &DVector<f64>, eps: &DVector<f64>) -> Vec<DVector<f64>> {
    let mut out = vec![s.clone()];
    for i in 0..s.len() {
        let mut p = s.clone();
        p[i] += eps[i];
        out.push(p);
    }
    out
}

/// `g_i = (p_i − p_0)/ε_i`, the gradient up to the unknown positive scale of
/// the priorities.
pub fn approx_gradient(p: &[f64], eps: &DVector<f64>) -> Result<DVector<f64>, UtilityError> {
    let m = eps.len();
    if p.len() != m + 1 {
        return Err(UtilityError::Dimension(format!("expected {} priorities, got {}", m + 1, p.len())));
    }
    if let Some(k) = p.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(UtilityError::Invalid(format!("priority {k} is not a positive number")));
    }
    if eps.iter().any(|e| !(*e > 0.0)) {
        return Err(UtilityError::Invalid("probe sizes must be positive".into()));
    }
    Ok(DVector::from_fn(m, |i, _| (p[i + 1] - p[0]) / eps[i]))
}

/// Priorities proportional to shifted utilities at the probe points, as an
/// exact synthetic DM would report them.
pub fn synthetic_priorities(spec: &UtilitySpec, s: &DVector<f64>, eps: &DVector<f64>) -> Result<Vec<f64>, UtilityError> {
    let values = probe_points(s, eps).iter().map(|p| spec.value(p)).collect::<Result<Vec<_>, _>>()?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(values.iter().map(|v| v - lo + 1.0).collect())
}

/// `g = Cᵀ g_ξ` for factors `ξ = C s`.
pub fn lift_driving_factors(c: &DMatrix<f64>, g_xi: &DVector<f64>) -> Result<DVector<f64>, UtilityError> {
    if c.nrows() != g_xi.len() {
        return Err(UtilityError::Dimension(format!("{} factors but {} gradient entries", c.nrows(), g_xi.len())));
    }
    Ok(c.transpose() * g_xi)
}
