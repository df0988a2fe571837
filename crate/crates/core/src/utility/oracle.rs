//! The question/answer protocol between the algorithm and the DM.

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{approx_gradient, default_eps, lift_driving_factors, synthetic_priorities, UtilityError, UtilitySpec};
use crate::serde_util;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Supergradient,
    PairwisePriorities,
    Satisfaction,
}

/// A question about the slack vector `s`. In driving-factor mode `factors`
/// holds `ξ = C s` and the probes live in factor space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct OracleQuery {
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub s: DVector<f64>,
    pub kind: QueryKind,
    #[serde(with = "serde_util::opt_dvector", default)]
    #[schemars(with = "Option<Vec<f64>>")]
    pub factors: Option<DVector<f64>>,
    /// Probe sizes for priority questions.
    #[serde(with = "serde_util::opt_dvector", default)]
    #[schemars(with = "Option<Vec<f64>>")]
    pub eps: Option<DVector<f64>>,
    /// The points to compare: the base point, then one probe per coordinate.
    #[serde(with = "serde_util::dvector_list", default)]
    #[schemars(with = "Vec<Vec<f64>>")]
    pub probes: Vec<DVector<f64>>,
}

impl OracleQuery {
    /// A question at `s`, with factors `ξ = C s` when `c` is given.
    pub fn new(s: DVector<f64>, kind: QueryKind, c: Option<&DMatrix<f64>>) -> Self {
        let factors = c.map(|c| c * &s);
        let (eps, probes) = if kind == QueryKind::PairwisePriorities {
            let base = factors.as_ref().unwrap_or(&s);
            let eps = default_eps(base);
            let probes = super::probe_points(base, &eps);
            (Some(eps), probes)
        } else {
            (None, Vec::new())
        };
        OracleQuery { s, kind, factors, eps, probes }
    }
}

/// A scaled supergradient and a satisfaction bit. `value` is present only
/// for synthetic DMs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct OracleAnswer {
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub g: DVector<f64>,
    #[serde(default)]
    pub satisfied: bool,
    #[serde(default)]
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Utility(#[from] UtilityError),
    #[error("oracle unavailable: {0}")]
    Unavailable(String),
}

pub trait Oracle {
    fn answer(&mut self, query: &OracleQuery) -> Result<OracleAnswer, OracleError>;

    /// Whether the DM is known to follow a weighted-log utility.
    fn is_log_like(&self) -> bool {
        false
    }
}

/// A DM simulated by a utility over slacks, or over driving factors `ξ = C s`
/// when `factors` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SyntheticOracle {
    pub utility: UtilitySpec,
    #[serde(with = "serde_util::opt_dmatrix", default)]
    #[schemars(with = "Option<Vec<Vec<f64>>>")]
    pub factors: Option<DMatrix<f64>>,
}

impl SyntheticOracle {
    pub fn new(utility: UtilitySpec) -> Self {
        SyntheticOracle { utility, factors: None }
    }

    fn point(&self, s: &DVector<f64>) -> DVector<f64> {
        match &self.factors {
            Some(c) => c * s,
            None => s.clone(),
        }
    }

    fn lift(&self, g: DVector<f64>) -> Result<DVector<f64>, UtilityError> {
        match &self.factors {
            Some(c) => lift_driving_factors(c, &g),
            None => Ok(g),
        }
    }

    /// `U` at `s` (through the factors when present).
    pub fn value(&self, s: &DVector<f64>) -> Result<f64, UtilityError> {
        self.utility.value(&self.point(s))
    }

    /// Priorities a consistent DM would give for `query`.
    pub fn priorities(&self, query: &OracleQuery) -> Result<Vec<f64>, UtilityError> {
        let base = self.point(&query.s);
        let eps = query.eps.clone().unwrap_or_else(|| default_eps(&base));
        synthetic_priorities(&self.utility, &base, &eps)
    }
}

impl Oracle for SyntheticOracle {
    fn answer(&mut self, query: &OracleQuery) -> Result<OracleAnswer, OracleError> {
        let xi = self.point(&query.s);
        let (value, g_xi) = self.utility.evaluate(&xi)?;
        let g_xi = match query.kind {
            QueryKind::PairwisePriorities => {
                let eps = query.eps.clone().unwrap_or_else(|| default_eps(&xi));
                approx_gradient(&synthetic_priorities(&self.utility, &xi, &eps)?, &eps)?
            }
            _ => g_xi,
        };
        Ok(OracleAnswer { g: self.lift(g_xi)?, satisfied: false, value: Some(value) })
    }

    fn is_log_like(&self) -> bool {
        self.factors.is_none() && self.utility.is_log_like()
    }
}
