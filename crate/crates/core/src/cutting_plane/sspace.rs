//! The slack-space run: each answer appends the row `gᵀA x ≤ gᵀA x^k` and
//! the next iterate is a weighted center of the grown polytope.

use nalgebra::DVector;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{stationarity, MoveKind, RunError, RunFailure, RunTrace, StationarityMeasure, StopReason, TraceEntry};
use crate::lp_model::AugmentedLp;
use crate::utility::{Oracle, OracleQuery, QueryKind};
use crate::wac::{weighted_center, CenterOptions, WacError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum NewRowWeights {
    /// `1/m²` on appended rows and `1/m − k/m²` on the original ones, then
    /// uniform once `k ≥ m`.
    Default,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default)]
pub struct SSpaceConfig {
    pub new_row_weights: NewRowWeights,
    pub max_iter: usize,
    pub grad_tol: f64,
    pub stationarity: StationarityMeasure,
    pub center: CenterOptions,
}

impl Default for SSpaceConfig {
    fn default() -> Self {
        SSpaceConfig {
            new_row_weights: NewRowWeights::Default,
            max_iter: 200,
            grad_tol: 1e-6,
            stationarity: StationarityMeasure::ProjectedGradient,
            center: CenterOptions::default(),
        }
    }
}

/// Weights for `m` original rows after `k` appended ones, and whether the
/// default rule had to fall back to uniform weights.
pub fn s_space_weights(rule: NewRowWeights, m: usize, k: usize) -> (DVector<f64>, bool) {
    let total = m + k;
    let mf = m as f64;
    let old = 1.0 / mf - k as f64 / (mf * mf);
    let w = match rule {
        NewRowWeights::Default if old > 0.0 => {
            DVector::from_fn(total, |i, _| if i < m { old } else { 1.0 / (mf * mf) })
        }
        _ => DVector::from_element(total, 1.0 / total as f64),
    };
    let fell_back = rule == NewRowWeights::Default && !(old > 0.0);
    let sum = w.sum();
    (w / sum, fell_back)
}

pub fn run_s_space(aug: &AugmentedLp, oracle: &mut dyn Oracle, config: &SSpaceConfig) -> Result<RunTrace, RunFailure> {
    let base = aug.polytope();
    let m = base.m();
    let mut poly = base.clone();
    let mut trace = RunTrace { y0: DVector::zeros(0), entries: Vec::new(), stop_reason: None };
    let (w, _) = s_space_weights(config.new_row_weights, m, 0);
    let mut center = match weighted_center(&poly, &w, &config.center, None) {
        Ok(c) => c,
        Err(e) => return Err(RunFailure { error: e.into(), trace }),
    };
    trace.y0 = center.y.clone();
    let mut w = w;
    let mut move_kind = MoveKind::Start;
    let mut pending_warnings = Vec::new();
    let mut warned_uniform = false;
    loop {
        let s = center.s.rows(0, m).into_owned();
        let answer = match oracle.answer(&OracleQuery::new(s, QueryKind::Supergradient, None)) {
            Ok(a) => a,
            Err(e) => return Err(RunFailure { error: e.into(), trace }),
        };
        if answer.g.len() != m {
            let error = RunError::Config(format!("answer has {} entries, expected {m}", answer.g.len()));
            return Err(RunFailure { error, trace });
        }
        let stat = stationarity(config.stationarity, &base.a, &answer.g);
        let k = trace.entries.len();
        trace.entries.push(TraceEntry {
            k,
            w: w.clone(),
            center: center.clone(),
            g: answer.g.clone(),
            value: answer.value,
            satisfied: answer.satisfied,
            stationarity: stat,
            cut: None,
            move_kind,
            warnings: std::mem::take(&mut pending_warnings),
        });
        let stop = if answer.satisfied {
            Some(StopReason::DmSatisfied)
        } else if stat <= config.grad_tol {
            Some(StopReason::GradientTolerance)
        } else if trace.entries.len() >= config.max_iter {
            Some(StopReason::IterationCap)
        } else {
            None
        };
        if stop.is_some() {
            trace.stop_reason = stop;
            return Ok(trace);
        }
        let row = base.a.transpose() * &answer.g;
        if row.norm() == 0.0 {
            trace.stop_reason = Some(StopReason::GradientTolerance);
            return Ok(trace);
        }
        let rhs = row.dot(&center.x);
        poly.push_row(&row, rhs);
        let (next_w, fell_back) = s_space_weights(config.new_row_weights, m, k + 1);
        if fell_back && !warned_uniform {
            warned_uniform = true;
            pending_warnings.push(format!("default row weights are nonpositive at k = {}; using uniform weights", k + 1));
        }
        w = next_w;
        center = match weighted_center(&poly, &w, &config.center, None) {
            Ok(c) => c,
            Err(WacError::EmptyInterior { .. }) => {
                trace.entries.last_mut().expect("entry").warnings.push("appended rows emptied the polytope".into());
                trace.stop_reason = Some(StopReason::EmptyLocalization);
                return Ok(trace);
            }
            Err(e) => return Err(RunFailure { error: e.into(), trace }),
        };
        move_kind = MoveKind::PolytopeCut;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::{SyntheticOracle, UtilitySpec};
    use crate::wac::Polytope;
    use approx::assert_relative_eq;

    fn triangle() -> AugmentedLp {
        AugmentedLp::from_polytope(Polytope::from_rows(3, 1, &[1.0, -1.0, -1.0], &[1.0, 0.0, 0.0]))
    }

    #[test]
    fn weights_follow_the_default_rule_then_switch() {
        let (w, fb) = s_space_weights(NewRowWeights::Default, 4, 2);
        assert!(!fb);
        // Old rows 1/4 − 2/16 = 1/8, new rows 1/16, total 5/8.
        assert_relative_eq!(w[0], 0.2, epsilon = 1e-15);
        assert_relative_eq!(w[5], 0.1, epsilon = 1e-15);
        let (w, fb) = s_space_weights(NewRowWeights::Default, 4, 4);
        assert!(fb);
        assert_eq!(w, DVector::from_element(8, 0.125));
    }

    #[test]
    fn triangle_log_utility_limit() {
        let mut oracle = SyntheticOracle::new(UtilitySpec::LogWeighted { t: vec![0.2, 0.3, 0.5] });
        let trace = run_s_space(&triangle(), &mut oracle, &SSpaceConfig::default()).unwrap();
        let s = &trace.last().unwrap().center.s;
        assert_relative_eq!(s.rows(0, 3).into_owned(), DVector::from_vec(vec![0.2, 0.8, 0.8]), epsilon = 1e-3);
        // The working matrix grows by one row per completed iteration.
        for e in &trace.entries {
            assert_eq!(e.center.s.len(), 3 + e.k);
        }
    }

    #[test]
    fn stationary_start_appends_nothing() {
        // Equal weights: the utility peaks at the e/m-center x = 2/3.
        let spec = UtilitySpec::LogWeighted { t: vec![1.0, 1.0, 1.0] };
        let mut oracle = SyntheticOracle::new(spec);
        let aug = AugmentedLp::from_polytope(Polytope::from_rows(3, 1, &[1.0, -1.0, -1.0], &[1.0, 0.0, 0.0]));
        let trace = run_s_space(&aug, &mut oracle, &SSpaceConfig::default()).unwrap();
        assert_eq!(trace.entries.len(), 1);
        assert_eq!(trace.stop_reason, Some(StopReason::GradientTolerance));
        assert_eq!(trace.entries[0].center.s.len(), 3);
    }
}
