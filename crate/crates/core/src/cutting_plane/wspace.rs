//! The weight-space run as a resumable state machine.

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{
    cut_normal, naive_cut, stationarity, CutError, CutRule, CutSimplex, LocalizationError, MoveKind, RunConfig,
    RunError, RunTrace, StopReason, Strategy, TraceEntry, Variant,
};
use crate::lp_model::AugmentedLp;
use crate::utility::{Oracle, OracleAnswer, OracleQuery, QueryKind};
use crate::wac::{weighted_center, CenterTriple, Polytope, SimplexPoint};

/// Slack allowed when checking that a modified move stays in the
/// localization set, relative to `‖u‖`.
const CONTAIN_TOL: f64 = 1e-10;
/// An answer contradicts an earlier one when both supergradient
/// inequalities fail by more than this.
const CONTRADICTION_TOL: f64 = 1e-6;
/// Warn once an answer contradicts this many earlier ones.
const CONTRADICTION_COUNT: usize = 3;

/// One weight-space run. Between [`WSpaceRun::record_answer`] and
/// [`WSpaceRun::advance`] the last trace entry belongs to the current center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WSpaceRun {
    pub config: RunConfig,
    pub poly: Polytope,
    pub strategy: Strategy,
    pub variant: Variant,
    pub loc: CutSimplex,
    pub current: CenterTriple,
    pub current_move: MoveKind,
    pub current_warnings: Vec<String>,
    pub answered: bool,
    pub trace: RunTrace,
}

enum Next {
    Point(CenterTriple, MoveKind, Vec<String>),
    Empty(usize),
}

impl WSpaceRun {
    /// Centers at `w⁰` and fixes `y⁰` from that center. `log_like` selects
    /// the automatic strategy.
    pub fn start(poly: Polytope, config: RunConfig, log_like: bool) -> Result<Self, RunError> {
        let m = poly.m();
        if m < 2 {
            return Err(RunError::Config("at least two rows are needed".into()));
        }
        if !(config.grad_tol >= 0.0) || !(config.eps_switch >= 0.0) {
            return Err(RunError::Config("tolerances must be nonnegative".into()));
        }
        let w0 = match &config.w0 {
            Some(w) if w.len() != m => {
                return Err(RunError::Config(format!("w0 has {} entries, expected {m}", w.len())));
            }
            Some(w) => SimplexPoint::normalized(w.clone())?.into_vector(),
            None => SimplexPoint::barycenter(m).into_vector(),
        };
        let center = weighted_center(&poly, &w0, &config.center, None)?;
        let strategy = config.resolved_strategy(log_like);
        let variant = config.effective_variant(log_like);
        let trace = RunTrace { y0: center.y.clone(), entries: Vec::new(), stop_reason: None };
        Ok(WSpaceRun {
            strategy,
            variant,
            loc: CutSimplex::new(m),
            current: center,
            current_move: MoveKind::Start,
            current_warnings: Vec::new(),
            answered: false,
            trace,
            config,
            poly,
        })
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        self.trace.stop_reason
    }

    pub fn awaiting_answer(&self) -> bool {
        self.trace.stop_reason.is_none() && !self.answered
    }

    pub fn y0(&self) -> &DVector<f64> {
        &self.trace.y0
    }

    /// The question for the current center, if one is pending.
    pub fn query(&self, kind: QueryKind, factors: Option<&DMatrix<f64>>) -> Option<OracleQuery> {
        self.awaiting_answer().then(|| OracleQuery::new(self.current.s.clone(), kind, factors))
    }

    /// Records the DM's answer at the current center and applies the
    /// stopping rules.
    pub fn record_answer(&mut self, answer: &OracleAnswer) -> Result<Option<StopReason>, RunError> {
        if !self.awaiting_answer() {
            return Err(RunError::Phase("no question is pending".into()));
        }
        let m = self.poly.m();
        if answer.g.len() != m {
            return Err(RunError::Config(format!("answer has {} entries, expected {m}", answer.g.len())));
        }
        if answer.g.iter().any(|v| !v.is_finite()) {
            return Err(RunError::Config("answer has non-finite entries".into()));
        }
        let mut warnings = std::mem::take(&mut self.current_warnings);
        let clashes = self.contradictions(&self.current.s, &answer.g);
        if clashes >= CONTRADICTION_COUNT {
            warnings.push(format!("answer contradicts {clashes} earlier answers"));
        }
        let stat = stationarity(self.config.stationarity, &self.poly.a, &answer.g);
        let k = self.trace.entries.len();
        self.trace.entries.push(TraceEntry {
            k,
            w: self.current.w.clone(),
            center: self.current.clone(),
            g: answer.g.clone(),
            value: answer.value,
            satisfied: answer.satisfied,
            stationarity: stat,
            cut: None,
            move_kind: self.current_move,
            warnings,
        });
        self.answered = true;
        let stop = if answer.satisfied {
            Some(StopReason::DmSatisfied)
        } else if stat <= self.config.grad_tol {
            Some(StopReason::GradientTolerance)
        } else if self.trace.entries.len() >= self.config.max_iter {
            Some(StopReason::IterationCap)
        } else {
            None
        };
        self.trace.stop_reason = stop;
        Ok(stop)
    }

    /// Past answers `i` with `gᵢᵀ(s − sᵢ) < 0` and `gᵀ(sᵢ − s) < 0`, which
    /// no quasi-concave utility can produce together.
    fn contradictions(&self, s: &DVector<f64>, g: &DVector<f64>) -> usize {
        self.trace
            .entries
            .iter()
            .filter(|e| {
                e.g.dot(&(s - &e.center.s)) < -CONTRADICTION_TOL && g.dot(&(&e.center.s - s)) < -CONTRADICTION_TOL
            })
            .count()
    }

    /// Cuts at the answered center and moves to the next one.
    pub fn advance(&mut self) -> Result<Option<StopReason>, RunError> {
        if self.trace.stop_reason.is_some() || !self.answered {
            return Err(RunError::Phase("advance needs an answered, running iterate".into()));
        }
        let g = self.trace.entries.last().expect("answered implies an entry").g.clone();
        let cut = match self.config.cut_rule {
            CutRule::UCut => match cut_normal(&self.current, &g, &self.trace.y0, &self.poly.a) {
                Ok(c) => c,
                Err(CutError::Stationary) => {
                    let last = self.trace.entries.last_mut().expect("entry");
                    last.warnings.push("A^T g vanishes: stationary".into());
                    self.trace.stop_reason = Some(StopReason::GradientTolerance);
                    return Ok(self.trace.stop_reason);
                }
                Err(e) => return Err(e.into()),
            },
            CutRule::Naive => naive_cut(&self.current, &g),
        };
        self.loc.push(cut.clone());
        self.trace.entries.last_mut().expect("entry").cut = Some(cut);
        let next = match self.variant {
            Variant::Plain => self.plain_move()?,
            Variant::Modified1 => self.modified1_move()?,
            Variant::Modified2 => self.modified2_move()?,
        };
        match next {
            Next::Point(center, kind, warnings) => {
                self.current = center;
                self.current_move = kind;
                self.current_warnings = warnings;
                self.answered = false;
                Ok(None)
            }
            Next::Empty(cuts) => {
                let last = self.trace.entries.last_mut().expect("entry");
                last.warnings.push(format!("localization set is empty after {cuts} cuts"));
                self.trace.stop_reason = Some(StopReason::EmptyLocalization);
                Ok(self.trace.stop_reason)
            }
        }
    }

    /// Asks `oracle` at the current center, records the answer and advances
    /// unless a stopping rule fired.
    pub fn step_with(&mut self, oracle: &mut dyn Oracle, kind: QueryKind) -> Result<Option<StopReason>, RunError> {
        let query = self.query(kind, None).ok_or_else(|| RunError::Phase("no question is pending".into()))?;
        let answer = oracle.answer(&query)?;
        if let Some(stop) = self.record_answer(&answer)? {
            return Ok(Some(stop));
        }
        self.advance()
    }

    fn center_at(&self, w: &DVector<f64>) -> Result<CenterTriple, RunError> {
        Ok(weighted_center(&self.poly, w, &self.config.center, Some(&self.current.x))?)
    }

    /// At fixed `y⁰` the center of `Y⁰s` is `(x, y⁰, s)`.
    fn fixed_dual(&self, x: DVector<f64>) -> CenterTriple {
        CenterTriple::from_parts(&self.poly, x, self.trace.y0.clone())
    }

    fn analytic_center_move(&self, kind: MoveKind, warnings: Vec<String>) -> Result<Next, RunError> {
        match self.loc.analytic_center(None) {
            Ok(w) => Ok(Next::Point(self.center_at(&w)?, kind, warnings)),
            Err(LocalizationError::Empty { cuts }) => Ok(Next::Empty(cuts)),
            Err(LocalizationError::Center(e)) => Err(e.into()),
        }
    }

    fn plain_move(&self) -> Result<Next, RunError> {
        match self.strategy {
            Strategy::TowardScaledGradient => self.scaled_gradient_move(),
            _ => self.analytic_center_move(MoveKind::AnalyticCenter, Vec::new()),
        }
    }

    /// Line search from `w^k` along `S^k g^k − (eᵀS^k g^k) w^k`, which
    /// points at the normalized `S^k g^k` when that is positive and always
    /// enters the newest cut.
    fn scaled_gradient_move(&self) -> Result<Next, RunError> {
        let g = &self.trace.entries.last().expect("entry").g;
        let w = &self.current.w;
        let sg = self.current.s.component_mul(g);
        let beta = sg.sum();
        let d = &sg - w * beta;
        let t_max = self.loc.max_step(w, &d);
        let t = if beta > 0.0 && t_max > 1.0 / beta { 1.0 / beta } else { 0.9 * t_max };
        if !(t.is_finite() && t > 0.0) || d.norm() <= 1e-14 * sg.norm() {
            let warn = vec!["scaled-gradient step blocked; using the analytic center".to_string()];
            return self.analytic_center_move(MoveKind::AnalyticCenter, warn);
        }
        let next = w + d * t;
        if !next.iter().all(|&v| v > 0.0) {
            let warn = vec!["scaled-gradient step left the simplex; using the analytic center".to_string()];
            return self.analytic_center_move(MoveKind::AnalyticCenter, warn);
        }
        let next = SimplexPoint::normalized(next)?.into_vector();
        Ok(Next::Point(self.center_at(&next)?, MoveKind::ScaledGradient, Vec::new()))
    }

    /// `Y⁰s` sums to one only up to the residual of `Aᵀy⁰ = 0`, which
    /// grows with `‖x‖`, so the check renormalizes.
    fn contained(&self, c: &CenterTriple) -> bool {
        let sum = c.w.sum();
        c.s.iter().all(|&v| v > 0.0) && sum > 0.0 && self.loc.contains(&(&c.w / sum), CONTAIN_TOL)
    }

    /// Midpoint when the newest cut keeps the previous iterate, otherwise
    /// extrapolation halfway to the boundary; recenters when the last move
    /// was shorter than `eps_switch`.
    fn modified1_move(&self) -> Result<Next, RunError> {
        let n = self.trace.entries.len();
        if n < 2 {
            return self.recenter_toward();
        }
        let prev = &self.trace.entries[n - 2].center;
        let cur = &self.current;
        if (&cur.w - &prev.w).norm() <= self.config.eps_switch {
            return self.recenter_toward();
        }
        let cut = self.loc.cuts.last().expect("cut pushed");
        if cut.u.dot(&(&prev.w - &cur.w)) >= 0.0 {
            let c = self.fixed_dual((&cur.x + &prev.x) * 0.5);
            if self.contained(&c) {
                return Ok(Next::Point(c, MoveKind::Midpoint, Vec::new()));
            }
            return self.recenter_toward();
        }
        let dx = &cur.x - &prev.x;
        let base = self.trace.y0.component_mul(&cur.s);
        let dw = self.trace.y0.component_mul(&(&cur.s - &prev.s));
        let t_max = self.loc.max_step(&base, &dw);
        let t = 0.5 * t_max;
        if !(t.is_finite() && t > 1e-14) {
            return self.recenter_toward();
        }
        let c = self.fixed_dual(&cur.x + dx * t);
        if self.contained(&c) {
            Ok(Next::Point(c, MoveKind::Extrapolate, Vec::new()))
        } else {
            self.recenter_toward()
        }
    }

    /// Module 2 of the first modified variant: the center `ŝ` of the
    /// analytic center of the localization set, then a line search from
    /// `w^i` along `±(Y⁰ŝ − w^i)`, the sign chosen by the newest cut.
    fn recenter_toward(&self) -> Result<Next, RunError> {
        let w_hat = match self.loc.analytic_center(None) {
            Ok(w) => w,
            Err(LocalizationError::Empty { cuts }) => return Ok(Next::Empty(cuts)),
            Err(LocalizationError::Center(e)) => return Err(e.into()),
        };
        let hat = self.center_at(&w_hat)?;
        let cur = &self.current;
        let target = self.trace.y0.component_mul(&hat.s);
        let mut d = &target - &cur.w;
        let mut dx = &hat.x - &cur.x;
        if let Some(cut) = self.loc.cuts.last() {
            if cut.u.dot(&d) < 0.0 {
                d = -d;
                dx = -dx;
            }
        }
        let t_max = self.loc.max_step(&cur.w, &d);
        let t = if t_max > 1.0 { 1.0 } else { 0.5 * t_max };
        if t.is_finite() && t > 1e-14 {
            let c = self.fixed_dual(&cur.x + dx * t);
            if self.contained(&c) {
                return Ok(Next::Point(c, MoveKind::Recenter, Vec::new()));
            }
        }
        let warn = vec!["fixed-dual line search blocked; using the center of the analytic center".to_string()];
        Ok(Next::Point(hat, MoveKind::AnalyticCenter, warn))
    }

    /// Averages the undominated slack vectors; with a single one, steps
    /// along `P_A g`; recenters when the move is shorter than `eps_switch`.
    fn modified2_move(&self) -> Result<Next, RunError> {
        let entries = &self.trace.entries;
        let undominated: Vec<usize> = (0..entries.len())
            .filter(|&p| {
                entries.iter().all(|e| {
                    let scale = 1e-12 * (1.0 + e.g.norm() * e.center.s.norm());
                    e.g.dot(&(&entries[p].center.s - &e.center.s)) >= -scale
                })
            })
            .collect();
        let candidate = if undominated.len() > 1 {
            let k = undominated.len() as f64;
            let x = undominated.iter().fold(DVector::zeros(self.poly.n()), |acc, &p| acc + &entries[p].center.x) / k;
            let c = self.fixed_dual(x);
            self.contained(&c).then_some((c, MoveKind::Average))
        } else {
            let p = undominated.first().copied().unwrap_or_else(|| self.incumbent());
            self.projected_gradient_step(p).map(|c| (c, MoveKind::ProjectedGradient))
        };
        match candidate {
            Some((c, kind)) if (&c.w - &self.current.w).norm() > self.config.eps_switch => {
                let mut warnings = Vec::new();
                if undominated.is_empty() {
                    warnings.push("no undominated iterate; using the incumbent".into());
                }
                Ok(Next::Point(c, kind, warnings))
            }
            _ => self.analytic_center_move(MoveKind::AnalyticCenter, Vec::new()),
        }
    }

    /// Largest recorded value, ties and unknown values to the lowest index.
    fn incumbent(&self) -> usize {
        self.trace.best().map(|e| e.k).unwrap_or(0)
    }

    fn projected_gradient_step(&self, p: usize) -> Option<CenterTriple> {
        let e = &self.trace.entries[p];
        let a = &self.poly.a;
        let ata = a.transpose() * a;
        let dx = -ata.cholesky()?.solve(&(a.transpose() * &e.g));
        let ds = -(a * &dx);
        let base = self.fixed_dual(e.center.x.clone());
        let dw = self.trace.y0.component_mul(&ds);
        let t_max = self.loc.max_step(&base.w, &dw);
        let alpha = 0.5 * t_max;
        if !(alpha.is_finite() && alpha > 1e-14) {
            return None;
        }
        let c = self.fixed_dual(&e.center.x + dx * alpha);
        self.contained(&c).then_some(c)
    }
}

/// The run together with the trace recorded before a failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct RunFailure {
    pub error: RunError,
    pub trace: RunTrace,
}

/// Runs against a synthetic or scripted oracle until a stopping rule fires.
pub fn run_w_space(aug: &AugmentedLp, oracle: &mut dyn Oracle, config: &RunConfig) -> Result<RunTrace, RunFailure> {
    let fail = |error: RunError, trace: RunTrace| RunFailure { error, trace };
    let mut run = WSpaceRun::start(aug.polytope().clone(), config.clone(), oracle.is_log_like()).map_err(|e| {
        fail(e, RunTrace { y0: DVector::zeros(0), entries: Vec::new(), stop_reason: None })
    })?;
    loop {
        match run.step_with(oracle, QueryKind::Supergradient) {
            Ok(Some(_)) => return Ok(run.trace),
            Ok(None) => {}
            Err(e) => return Err(fail(e, run.trace)),
        }
    }
}
