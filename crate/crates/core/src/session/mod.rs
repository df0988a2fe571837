//! Interactive sessions: a weight-space run behind a question/answer state
//! machine, with JSON snapshots.

mod store;

pub use store::{SessionStore, StoreError};

use chrono::{DateTime, Utc};
use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::cutting_plane::{RunConfig, RunError, StopReason, WSpaceRun};
use crate::lp_model::{validate, AugmentedLp, ValidationReport};
use crate::prob_bounds::{feasibility_report, FeasibilityReport, UncertaintySpec};
use crate::serde_util;
use crate::utility::{approx_gradient, lift_driving_factors, Oracle, OracleAnswer, OracleQuery, QueryKind, SyntheticOracle, UtilitySpec};
use crate::wac::CenterTriple;

/// Version of the session document layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Problem {
    pub lp: AugmentedLp,
    #[serde(default)]
    pub uncertainty: Option<UncertaintySpec>,
    /// Driving factors `ξ = C s`, one row per factor.
    #[serde(with = "serde_util::opt_dmatrix", default)]
    #[schemars(with = "Option<Vec<Vec<f64>>>")]
    pub factors: Option<DMatrix<f64>>,
}

impl Problem {
    pub fn new(lp: AugmentedLp) -> Self {
        Problem { lp, uncertainty: None, factors: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    /// A person answers each question.
    Interactive,
    /// A utility answers every question inside `step`.
    Simulated { utility: UtilitySpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default)]
pub struct SessionConfig {
    pub run: RunConfig,
    /// What the DM is asked at each center.
    pub question: QueryKind,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig { run: RunConfig::default(), question: QueryKind::PairwisePriorities }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum Phase {
    AwaitingAnswer { query: OracleQuery },
    ReadyToStep,
    Stopped { reason: StopReason },
}

/// What the DM sends back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnswerInput {
    /// A supergradient over slacks, or over factors when the problem has them.
    Supergradient {
        #[serde(with = "serde_util::dvector")]
        #[schemars(with = "Vec<f64>")]
        g: DVector<f64>,
        #[serde(default)]
        satisfied: bool,
        /// Utility value, recorded in the trace when a scripted DM knows it.
        #[serde(default)]
        value: Option<f64>,
    },
    /// Positive priorities for the probe points of the pending question.
    Priorities {
        p: Vec<f64>,
        #[serde(default)]
        satisfied: bool,
    },
    /// Stop here without a gradient.
    Satisfied,
}

/// An answer tagged with the iterate it responds to. A request whose
/// `iteration` no longer matches is rejected, so a retried submission cannot
/// answer the next question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AnswerRequest {
    #[serde(flatten)]
    pub answer: AnswerInput,
    #[serde(default)]
    pub iteration: Option<usize>,
}

/// One point of the objective and utility history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct HistoryPoint {
    pub k: usize,
    pub objective: f64,
    pub value: Option<f64>,
    pub stationarity: f64,
}

/// What a client renders: the current iterate and its question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SessionView {
    pub schema: u32,
    pub id: String,
    pub mode: Mode,
    pub phase: Phase,
    /// Answers recorded so far.
    pub iteration: usize,
    pub center: CenterTriple,
    /// Objective in the units of the source model.
    pub objective: f64,
    pub row_labels: Vec<String>,
    /// `ξ = C s` when the problem has driving factors.
    #[serde(with = "serde_util::opt_dvector", default)]
    #[schemars(with = "Option<Vec<f64>>")]
    pub factors: Option<DVector<f64>>,
    pub report: Option<FeasibilityReport>,
    pub history: Vec<HistoryPoint>,
    pub created: DateTime<Utc>,
    pub updated: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("answer is for iterate {got}, the pending question is iterate {expected}")]
    Stale { expected: usize, got: usize },
    #[error("problem failed validation: {}", .0.problems.join("; "))]
    Invalid(Box<ValidationReport>),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("wrong phase: {0}")]
    Phase(String),
    #[error("algorithm failure: {0}")]
    Algorithm(String),
    #[error("unsupported session document: {0}")]
    Schema(String),
}

impl SessionError {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            SessionError::Stale { .. } => "stale_question",
            SessionError::Invalid(_) => "validation",
            SessionError::Input(_) => "bad_request",
            SessionError::Phase(_) => "phase",
            SessionError::Algorithm(_) => "algorithm",
            SessionError::Schema(_) => "schema",
        }
    }
}

impl From<RunError> for SessionError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(msg) => SessionError::Input(msg),
            RunError::Phase(msg) => SessionError::Phase(msg),
            other => SessionError::Algorithm(other.to_string()),
        }
    }
}

/// Whether `Auto` may pick the log-utility strategy.
fn log_like(problem: &Problem, mode: &Mode) -> bool {
    match mode {
        Mode::Simulated { utility } => problem.factors.is_none() && utility.is_log_like(),
        Mode::Interactive => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Session {
    pub schema: u32,
    pub id: String,
    pub problem: Problem,
    pub config: SessionConfig,
    pub mode: Mode,
    pub phase: Phase,
    pub run: WSpaceRun,
    /// Bounds at the current center when the problem has uncertainty.
    pub report: Option<FeasibilityReport>,
    pub created: DateTime<Utc>,
    pub updated: DateTime<Utc>,
}

impl Session {
    /// Validates the problem and centers at `w⁰`.
    pub fn create(problem: Problem, config: SessionConfig, mode: Mode) -> Result<Session, SessionError> {
        problem.lp.check().map_err(|e| SessionError::Input(e.to_string()))?;
        let report = validate(&problem.lp);
        if !report.ok() {
            return Err(SessionError::Invalid(Box::new(report)));
        }
        let m = problem.lp.num_rows();
        if let Some(unc) = &problem.uncertainty {
            unc.validate(m).map_err(|e| SessionError::Input(e.to_string()))?;
        }
        if let Some(c) = &problem.factors {
            if c.ncols() != m || c.nrows() == 0 {
                return Err(SessionError::Input(format!("factor matrix must have {m} columns and at least one row")));
            }
        }
        if let Mode::Simulated { utility } = &mode {
            let dim = problem.factors.as_ref().map_or(m, |c| c.nrows());
            utility.check(dim).map_err(|e| SessionError::Input(e.to_string()))?;
        }
        let log_like = log_like(&problem, &mode);
        let run = WSpaceRun::start(problem.lp.polytope().clone(), config.run.clone(), log_like)?;
        let now = Utc::now();
        let mut session = Session {
            schema: SCHEMA_VERSION,
            id: uuid::Uuid::new_v4().simple().to_string(),
            problem,
            config,
            mode,
            phase: Phase::ReadyToStep,
            run,
            report: None,
            created: now,
            updated: now,
        };
        session.sync();
        Ok(session)
    }

    /// Answers recorded so far, which is also the index of a pending question.
    pub fn iteration(&self) -> usize {
        self.run.trace.entries.len()
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        self.run.stop_reason()
    }

    fn query(&self) -> Option<OracleQuery> {
        self.run.query(self.config.question, self.problem.factors.as_ref())
    }

    /// Phase and report from the run.
    fn sync(&mut self) {
        self.phase = match (self.run.stop_reason(), &self.mode) {
            (Some(reason), _) => Phase::Stopped { reason },
            (None, Mode::Interactive) if self.run.awaiting_answer() => {
                Phase::AwaitingAnswer { query: self.query().expect("awaiting answer") }
            }
            _ => Phase::ReadyToStep,
        };
        self.report = self
            .problem
            .uncertainty
            .as_ref()
            .and_then(|unc| feasibility_report(&self.run.current, unc).ok());
        self.updated = Utc::now();
    }

    fn to_answer(&self, input: AnswerInput, query: &OracleQuery) -> Result<OracleAnswer, SessionError> {
        let lift = |g: DVector<f64>| -> Result<DVector<f64>, SessionError> {
            match &self.problem.factors {
                Some(c) => lift_driving_factors(c, &g).map_err(|e| SessionError::Input(e.to_string())),
                None => Ok(g),
            }
        };
        match input {
            AnswerInput::Supergradient { g, satisfied, value } => Ok(OracleAnswer { g: lift(g)?, satisfied, value }),
            AnswerInput::Priorities { p, satisfied } => {
                let eps = query
                    .eps
                    .as_ref()
                    .ok_or_else(|| SessionError::Input("the pending question does not ask for priorities".into()))?;
                let g = approx_gradient(&p, eps).map_err(|e| SessionError::Input(e.to_string()))?;
                Ok(OracleAnswer { g: lift(g)?, satisfied, value: None })
            }
            AnswerInput::Satisfied => {
                Ok(OracleAnswer { g: DVector::zeros(self.problem.lp.num_rows()), satisfied: true, value: None })
            }
        }
    }

    /// Records the DM's answer to the pending question.
    pub fn submit_answer(&mut self, input: AnswerInput) -> Result<(), SessionError> {
        let Phase::AwaitingAnswer { query } = &self.phase else {
            return Err(SessionError::Phase("no question is pending".into()));
        };
        let answer = self.to_answer(input, &query.clone())?;
        let mut run = self.run.clone();
        run.record_answer(&answer)?;
        self.run = run;
        self.sync();
        Ok(())
    }

    /// `submit_answer` guarded by the iterate the client saw.
    pub fn submit(&mut self, req: AnswerRequest) -> Result<(), SessionError> {
        if let Some(got) = req.iteration {
            if got != self.iteration() {
                return Err(SessionError::Stale { expected: self.iteration(), got });
            }
        }
        self.submit_answer(req.answer)
    }

    pub fn view(&self) -> SessionView {
        let lp = &self.problem.lp;
        let history = self
            .run
            .trace
            .entries
            .iter()
            .map(|e| HistoryPoint {
                k: e.k,
                objective: lp.reported_objective(&e.center.x),
                value: e.value,
                stationarity: e.stationarity,
            })
            .collect();
        let center = self.run.current.clone();
        SessionView {
            schema: self.schema,
            id: self.id.clone(),
            mode: self.mode.clone(),
            phase: self.phase.clone(),
            iteration: self.iteration(),
            objective: lp.reported_objective(&center.x),
            factors: self.problem.factors.as_ref().map(|c| c * &center.s),
            center,
            row_labels: lp.row_labels.clone(),
            report: self.report.clone(),
            history,
            created: self.created,
            updated: self.updated,
        }
    }

    /// Interactive: cut and recenter once. Simulated: ask, cut and recenter
    /// until a stopping rule fires.
    pub fn step(&mut self) -> Result<(), SessionError> {
        if self.phase != Phase::ReadyToStep {
            return Err(SessionError::Phase("step needs a ready session".into()));
        }
        let mut run = self.run.clone();
        match &self.mode {
            Mode::Interactive => {
                run.advance()?;
            }
            Mode::Simulated { utility } => {
                let mut oracle = SyntheticOracle { utility: utility.clone(), factors: self.problem.factors.clone() };
                while run.stop_reason().is_none() {
                    if run.awaiting_answer() {
                        let query = run.query(self.config.question, self.problem.factors.as_ref()).expect("pending");
                        let answer = oracle.answer(&query).map_err(|e| SessionError::Algorithm(e.to_string()))?;
                        run.record_answer(&answer)?;
                    } else {
                        run.advance()?;
                    }
                }
            }
        }
        self.run = run;
        self.sync();
        Ok(())
    }

    /// A new session positioned at iterate `at` of this one, awaiting its
    /// answer. The answers before `at` are replayed, so the center matches.
    pub fn fork(&self, at: usize) -> Result<Session, SessionError> {
        let entries = &self.run.trace.entries;
        if at >= entries.len().max(1) {
            return Err(SessionError::Input(format!("iterate {at} is outside the trace of {} entries", entries.len())));
        }
        let log_like = log_like(&self.problem, &self.mode);
        let mut run = WSpaceRun::start(self.problem.lp.polytope().clone(), self.config.run.clone(), log_like)?;
        for e in &entries[..at] {
            let answer = OracleAnswer { g: e.g.clone(), satisfied: e.satisfied, value: e.value };
            run.record_answer(&answer)?;
            if run.advance()?.is_some() {
                return Err(SessionError::Algorithm(format!("replay stopped before iterate {at}")));
            }
        }
        let now = Utc::now();
        let mut fork = Session {
            id: uuid::Uuid::new_v4().simple().to_string(),
            run,
            created: now,
            ..self.clone()
        };
        fork.sync();
        Ok(fork)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sessions serialize")
    }

    pub fn from_json(text: &str) -> Result<Session, SessionError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| SessionError::Schema(e.to_string()))?;
        match value.get("schema").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => return Err(SessionError::Schema(format!("schema {v}, expected {SCHEMA_VERSION}"))),
            None => return Err(SessionError::Schema("missing schema field".into())),
        }
        serde_json::from_value(value).map_err(|e| SessionError::Schema(e.to_string()))
    }

    /// One trace entry per line.
    pub fn trace_jsonl(&self) -> String {
        self.run.trace.to_jsonl()
    }
}
