//! Interactive cutting-plane search over weight space, and the S-space
//! variant that cuts the polytope itself.

pub mod cuts;
pub mod localization;
mod sspace;
mod wspace;

pub use cuts::{cut_normal, naive_cut, CutError, CutHalfspace};
pub use localization::{CutSimplex, LocalizationError};
pub use sspace::{run_s_space, s_space_weights, NewRowWeights, SSpaceConfig};
pub use wspace::{run_w_space, RunFailure, WSpaceRun};

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::serde_util;
use crate::utility::OracleError;
use crate::wac::{CenterOptions, CenterTriple, WacError};

/// How the next weight is chosen inside the localization set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// `toward_scaled_gradient` for log-like synthetic utilities, otherwise
    /// `midpoint_bisection`.
    Auto,
    AnalyticCenter,
    TowardScaledGradient,
    /// Midpoints and extrapolation with a fixed dual vector; selects the
    /// first modified variant.
    MidpointBisection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Plain,
    /// Keeps `y = y⁰`; moves by midpoints or extrapolation.
    Modified1,
    /// Keeps `y = y⁰`; averages the undominated slack vectors.
    Modified2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum CutRule {
    /// The cut through `W_{s^k}`, valid for every quasi-concave utility.
    UCut,
    /// Normal `(Y^k)⁻¹g`; only valid under the affine-scaling properties.
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum StationarityMeasure {
    /// `‖P_A g‖`, the part of `g` the polytope can act on.
    ProjectedGradient,
    /// `‖g‖`.
    FullGradient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default)]
pub struct RunConfig {
    pub strategy: Strategy,
    pub variant: Variant,
    pub cut_rule: CutRule,
    pub max_iter: usize,
    pub grad_tol: f64,
    /// Below this `‖Δw‖` the modified variants recenter.
    pub eps_switch: f64,
    pub stationarity: StationarityMeasure,
    pub center: CenterOptions,
    /// Starting weight; the barycenter when absent.
    #[serde(with = "serde_util::opt_dvector")]
    #[schemars(with = "Option<Vec<f64>>")]
    pub w0: Option<DVector<f64>>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            strategy: Strategy::Auto,
            variant: Variant::Plain,
            cut_rule: CutRule::UCut,
            max_iter: 200,
            grad_tol: 1e-6,
            eps_switch: 1e-4,
            stationarity: StationarityMeasure::ProjectedGradient,
            center: CenterOptions::default(),
            w0: None,
        }
    }
}

impl RunConfig {
    pub fn resolved_strategy(&self, log_like: bool) -> Strategy {
        match self.strategy {
            Strategy::Auto if log_like => Strategy::TowardScaledGradient,
            Strategy::Auto => Strategy::MidpointBisection,
            s => s,
        }
    }

    /// The variant actually run: `midpoint_bisection` implies the first
    /// modified variant.
    pub fn effective_variant(&self, log_like: bool) -> Variant {
        match (self.resolved_strategy(log_like), self.variant) {
            (Strategy::MidpointBisection, Variant::Plain) => Variant::Modified1,
            (_, v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GradientTolerance,
    DmSatisfied,
    IterationCap,
    EmptyLocalization,
}

/// How the weight of an iterate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Start,
    AnalyticCenter,
    ScaledGradient,
    Midpoint,
    Extrapolate,
    /// Line search from the current weight toward `Y⁰ŝ`.
    Recenter,
    Average,
    ProjectedGradient,
    /// S-space iterate: the center of the polytope with the appended rows.
    PolytopeCut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TraceEntry {
    pub k: usize,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub w: DVector<f64>,
    pub center: CenterTriple,
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub g: DVector<f64>,
    /// `U(s^k)` when the DM is synthetic.
    pub value: Option<f64>,
    pub satisfied: bool,
    pub stationarity: f64,
    pub cut: Option<CutHalfspace>,
    pub move_kind: MoveKind,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RunTrace {
    #[serde(with = "serde_util::dvector")]
    #[schemars(with = "Vec<f64>")]
    pub y0: DVector<f64>,
    pub entries: Vec<TraceEntry>,
    pub stop_reason: Option<StopReason>,
}

impl RunTrace {
    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("trace entries serialize"));
            out.push('\n');
        }
        out
    }

    pub fn last(&self) -> Option<&TraceEntry> {
        self.entries.last()
    }

    /// The entry with the largest reported value, ties to the lowest index.
    pub fn best(&self) -> Option<&TraceEntry> {
        let mut best: Option<&TraceEntry> = None;
        for e in &self.entries {
            match (best, e.value) {
                (None, _) => best = Some(e),
                (Some(b), Some(v)) if b.value.is_none_or(|bv| v > bv) => best = Some(e),
                _ => {}
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("center computation failed: {0}")]
    Center(#[from] WacError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("cut failed: {0}")]
    Cut(#[from] CutError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("out of phase: {0}")]
    Phase(String),
}

/// `P_A g` through the normal equations of `A`.
pub fn project_range(a: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let ata = a.transpose() * a;
    match ata.cholesky() {
        Some(ch) => a * ch.solve(&(a.transpose() * g)),
        None => {
            let basis = crate::wac::geometry::range_basis(a);
            crate::wac::geometry::project(&basis, g)
        }
    }
}

pub fn stationarity(measure: StationarityMeasure, a: &DMatrix<f64>, g: &DVector<f64>) -> f64 {
    match measure {
        StationarityMeasure::ProjectedGradient => project_range(a, g).norm(),
        StationarityMeasure::FullGradient => g.norm(),
    }
}
