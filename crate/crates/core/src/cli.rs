//! The `rwac` command line: batch `solve` runs and the `serve` facade.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::cutting_plane::{CutRule, RunConfig, StationarityMeasure, StopReason, Strategy, Variant};
use crate::lp_model::{parse_mps, robust_box_baseline, to_inequality_form, with_bounding_box, with_recession_bounds, InequalityForm, LpInstance};
use crate::prob_bounds::UncertaintySpec;
use crate::session::{Mode, Phase, Problem, Session, SessionConfig, SessionError, SessionStore};
use crate::utility::{Margins, PiecewiseRow, QueryKind, RobustBarrier, UtilitySpec};

/// Big-M of the automatic recession repair.
const AUTO_BOX: f64 = 1e7;

#[derive(Debug, Parser)]
#[command(name = "rwac", version, about = "Interactive weight-space cutting planes for uncertain LPs")]
pub struct Cli {
    /// Log filter, e.g. `info` or `robust_wac=debug`.
    #[arg(long, global = true, env = "RWAC_LOG", default_value = "warn")]
    pub log: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a simulated DM to a stop and write the trace and report.
    Solve(SolveArgs),
    /// Serve the session API over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["mps", "problem"])))]
pub struct SolveArgs {
    /// Model in free or fixed MPS.
    #[arg(long)]
    pub mps: Option<PathBuf>,
    /// Problem JSON: `{"lp": ..., "uncertainty": ..., "factors": ...}`.
    #[arg(long, conflicts_with_all = ["floor", "robust_box"])]
    pub problem: Option<PathBuf>,
    /// `log[:t=..|:i=v,..]`, `quadratic_pair:i,j`, `piecewise:FILE`,
    /// `robust_barrier:mu=..` or `@FILE` with a JSON spec. Rows are 1-based.
    #[arg(long, required_unless_present = "robust_box", conflicts_with = "robust_box")]
    pub utility: Option<String>,
    /// Uncertainty JSON with 0-based row keys.
    #[arg(long)]
    pub uncertainty: Option<PathBuf>,
    /// Objective floor `v`; defaults to slightly below the nominal optimum.
    #[arg(long, allow_negative_numbers = true)]
    pub floor: Option<f64>,
    /// `auto` repairs recession directions, `none` rejects them, a number
    /// adds the box `|x_j| ≤ M`.
    #[arg(long, default_value = "auto", value_parser = parse_box)]
    pub bounding_box: BoundingBox,
    /// `auto`, `analytic_center`, `toward_scaled_gradient` or `midpoint_bisection` [default: auto]
    #[arg(long, value_parser = parse_serde::<Strategy>)]
    pub strategy: Option<Strategy>,
    /// `plain`, `modified1` or `modified2` [default: plain]
    #[arg(long, value_parser = parse_serde::<Variant>)]
    pub variant: Option<Variant>,
    /// `u_cut` or `naive` [default: u_cut]
    #[arg(long, value_parser = parse_serde::<CutRule>)]
    pub cut_rule: Option<CutRule>,
    /// [default: 200]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Stop when the stationarity measure falls below this [default: 1e-6]
    #[arg(long)]
    pub grad_tol: Option<f64>,
    /// `projected_gradient` or `full_gradient` [default: projected_gradient]
    #[arg(long, value_parser = parse_serde::<StationarityMeasure>)]
    pub stationarity: Option<StationarityMeasure>,
    /// What the simulated DM is asked.
    #[arg(long, default_value = "supergradient", value_parser = parse_serde::<QueryKind>)]
    pub question: QueryKind,
    /// Trace as JSON lines.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Final feasibility report as JSON.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
    /// Classical robust baseline instead of a run: `rows=68,71,74 frac=0.2`.
    #[arg(long, num_args = 1..=2, value_names = ["ROWS", "FRAC"], requires = "mps")]
    pub robust_box: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "RWAC_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: String,
    /// Directory for session snapshots; sessions live in memory without it.
    #[arg(long, env = "RWAC_DATA_DIR")]
    pub data_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundingBox {
    Auto,
    None,
    Fixed(f64),
}

fn parse_box(s: &str) -> Result<BoundingBox, String> {
    match s {
        "auto" => Ok(BoundingBox::Auto),
        "none" => Ok(BoundingBox::None),
        _ => match s.parse::<f64>() {
            Ok(m) if m > 0.0 && m.is_finite() => Ok(BoundingBox::Fixed(m)),
            _ => Err(format!("expected auto, none or a positive number, got {s:?}")),
        },
    }
}

/// Enum flags spelled as their JSON names.
fn parse_serde<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Algorithm(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Input(_) => "input",
            CliError::Algorithm(_) => "algorithm",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Algorithm(_) => 1,
            _ => 2,
        }
    }

    fn to_json(&self) -> String {
        serde_json::json!({ "kind": self.kind(), "detail": self.to_string() }).to_string()
    }
}

impl From<SessionError> for CliError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Algorithm(msg) => CliError::Algorithm(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// 1-based row list such as `68,71,74`, returned 0-based.
fn parse_rows(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(r) if r >= 1 => Ok(r - 1),
            _ => Err(CliError::Input(format!("bad row {t:?}; rows are 1-based"))),
        })
        .collect()
}

/// Parses the utility mini-language against `m` slack rows. `ineq` is the
/// inequality form the barrier needs, `unc` supplies its margins.
pub fn parse_utility(spec: &str, m: usize, ineq: Option<&LpInstance>, unc: Option<&UncertaintySpec>) -> Result<UtilitySpec, CliError> {
    if let Some(path) = spec.strip_prefix('@') {
        return read_json(Path::new(path));
    }
    let (family, args) = spec.split_once(':').unwrap_or((spec, ""));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::Input(format!("bad number {t:?} in {spec:?}")));
    match family {
        "log" if args.is_empty() => Ok(UtilitySpec::LogWeighted { t: vec![1.0 / m as f64; m] }),
        "log" => {
            if let Some(list) = args.strip_prefix("t=") {
                let t = list.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
                return Ok(UtilitySpec::LogWeighted { t });
            }
            let mut t = vec![0.0; m];
            for item in args.split(',') {
                let (row, val) = item.split_once('=').ok_or_else(|| CliError::Input(format!("expected ROW=WEIGHT, got {item:?}")))?;
                let r = parse_rows(row)?[0];
                *t.get_mut(r).ok_or_else(|| CliError::Input(format!("row {} out of range", r + 1)))? = num(val)?;
            }
            Ok(UtilitySpec::LogWeighted { t })
        }
        "quadratic_pair" => match parse_rows(args)?.as_slice() {
            [i, j] => Ok(UtilitySpec::QuadraticPair { i: *i, j: *j }),
            _ => Err(CliError::Input("quadratic_pair takes two rows".into())),
        },
        "piecewise" => {
            let text = read(Path::new(args))?;
            if let Ok(spec) = serde_json::from_str::<UtilitySpec>(&text) {
                return Ok(spec);
            }
            let rows: Vec<PiecewiseRow> = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{args}: {e}")))?;
            Ok(UtilitySpec::PiecewiseProb { rows })
        }
        "robust_barrier" => {
            let mu = num(args.strip_prefix("mu=").ok_or_else(|| CliError::Input("expected robust_barrier:mu=VALUE".into()))?)?;
            let ineq = ineq.ok_or_else(|| CliError::Input("robust_barrier needs an --mps model".into()))?;
            let margins = match unc {
                Some(unc) => Margins::Constant {
                    values: (0..ineq.num_rows()).map(|i| unc.rows.get(&i).map_or(0.0, |r| r.l1())).collect(),
                },
                None => Margins::Zero,
            };
            Ok(UtilitySpec::RobustBarrier(Box::new(RobustBarrier::new(ineq, margins, mu).map_err(input)?)))
        }
        other => Err(CliError::Input(format!("unknown utility family {other:?}"))),
    }
}

/// What `solve` prints as its last line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub iterations: usize,
    pub stop_reason: Option<StopReason>,
    pub objective: f64,
    /// Utility at the final answered iterate.
    pub value: Option<f64>,
    pub stationarity: Option<f64>,
    /// Rows added by the bounding-box repair.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub repairs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineSummary {
    pub baseline_objective: f64,
    /// 1-based.
    pub rows: Vec<usize>,
    pub frac: f64,
}

fn load_mps(path: &Path) -> Result<InequalityForm, CliError> {
    let inst = parse_mps(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    to_inequality_form(&inst).map_err(input)
}

fn run_config(args: &SolveArgs) -> RunConfig {
    let d = RunConfig::default();
    RunConfig {
        strategy: args.strategy.unwrap_or(d.strategy),
        variant: args.variant.unwrap_or(d.variant),
        cut_rule: args.cut_rule.unwrap_or(d.cut_rule),
        max_iter: args.max_iter.unwrap_or(d.max_iter),
        grad_tol: args.grad_tol.unwrap_or(d.grad_tol),
        stationarity: args.stationarity.unwrap_or(d.stationarity),
        ..d
    }
}

pub fn robust_baseline(path: &Path, tokens: &[String]) -> Result<BaselineSummary, CliError> {
    let (mut rows, mut frac) = (None, None);
    for t in tokens.iter().flat_map(|t| t.split_whitespace()) {
        match t.split_once('=') {
            Some(("rows", v)) => rows = Some(parse_rows(v)?),
            Some(("frac", v)) => frac = Some(v.parse::<f64>().map_err(|_| CliError::Input(format!("bad frac {v:?}")))?),
            _ => return Err(CliError::Input(format!("expected rows=... or frac=..., got {t:?}"))),
        }
    }
    let rows = rows.ok_or_else(|| CliError::Input("--robust-box needs rows=...".into()))?;
    let frac = frac.ok_or_else(|| CliError::Input("--robust-box needs frac=...".into()))?;
    let form = load_mps(path)?;
    let (obj, _) = robust_box_baseline(&form.lp, &rows, frac).map_err(|e| CliError::Algorithm(e.to_string()))?;
    Ok(BaselineSummary { baseline_objective: form.map.objective.apply(obj), rows: rows.iter().map(|r| r + 1).collect(), frac })
}

/// Builds the problem and runs a simulated session to its stop.
pub fn solve_session(args: &SolveArgs) -> Result<(Session, Vec<String>), CliError> {
    let mut unc = args.uncertainty.as_deref().map(read_json::<UncertaintySpec>).transpose()?;
    let (problem, ineq, repairs) = match (&args.mps, &args.problem) {
        (Some(path), _) => {
            let form = load_mps(path)?;
            let aug = form.embed(args.floor).map_err(input)?;
            let (aug, repairs) = match args.bounding_box {
                BoundingBox::Auto => with_recession_bounds(&aug, AUTO_BOX)
                    .map_err(|rep| CliError::Input(format!("cannot repair: {}", rep.problems.join("; "))))?,
                BoundingBox::None => (aug, Vec::new()),
                BoundingBox::Fixed(big_m) => (with_bounding_box(&aug, big_m), vec![format!("|x_j| <= {big_m}")]),
            };
            for r in &repairs {
                log::warn!("added bounding row {r}");
            }
            (Problem::new(aug), Some(form.lp), repairs)
        }
        (None, Some(path)) => {
            let p: Problem = read_json(path)?;
            if unc.is_none() {
                unc = p.uncertainty.clone();
            }
            (p, None, Vec::new())
        }
        (None, None) => return Err(CliError::Input("one of --mps or --problem is required".into())),
    };
    let problem = Problem { uncertainty: unc, ..problem };
    let dim = problem.factors.as_ref().map_or(problem.lp.num_rows(), |c| c.nrows());
    let spec = args.utility.as_deref().ok_or_else(|| CliError::Input("--utility is required".into()))?;
    let utility = parse_utility(spec, dim, ineq.as_ref(), problem.uncertainty.as_ref())?;
    let config = SessionConfig { run: run_config(args), question: args.question };
    let mut session = Session::create(problem, config, Mode::Simulated { utility })?;
    session.step()?;
    Ok((session, repairs))
}

pub fn summarize(session: &Session, repairs: Vec<String>) -> Summary {
    let last = session.run.trace.last();
    Summary {
        iterations: session.iteration(),
        stop_reason: session.stop_reason(),
        objective: session.problem.lp.reported_objective(&session.run.current.x),
        value: last.and_then(|e| e.value),
        stationarity: last.map(|e| e.stationarity),
        repairs,
    }
}

fn solve(args: &SolveArgs) -> Result<(), CliError> {
    if let Some(tokens) = &args.robust_box {
        let path = args.mps.as_deref().ok_or_else(|| CliError::Input("--robust-box needs --mps".into()))?;
        println!("{}", serde_json::to_string(&robust_baseline(path, tokens)?).expect("summary serializes"));
        return Ok(());
    }
    let (session, repairs) = solve_session(args)?;
    if let Some(path) = &args.trace_out {
        write(path, &session.trace_jsonl())?;
    }
    if let Some(report) = &session.report {
        print!("{}", report.to_table());
        if let Some(path) = &args.report_out {
            write(path, &serde_json::to_string_pretty(report).expect("reports serialize"))?;
        }
    }
    debug_assert!(matches!(session.phase, Phase::Stopped { .. }));
    println!("{}", serde_json::to_string(&summarize(&session, repairs)).expect("summary serializes"));
    Ok(())
}

fn serve(args: &ServeArgs) -> Result<(), CliError> {
    let store = match &args.data_dir {
        Some(dir) => SessionStore::open(dir).map_err(|e| CliError::Io { path: dir.clone(), source: std::io::Error::other(e.to_string()) })?,
        None => SessionStore::in_memory(),
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Io { path: PathBuf::new(), source: e })?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.listen)
            .await
            .map_err(|source| CliError::Io { path: PathBuf::from(&args.listen), source })?;
        log::info!("listening on {}", listener.local_addr().map_or(args.listen.clone(), |a| a.to_string()));
        crate::api::serve(listener, Arc::new(store))
            .await
            .map_err(|source| CliError::Io { path: PathBuf::from(&args.listen), source })
    })
}

/// Entry point of the `rwac` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log).init();
    let result = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Serve(args) => serve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
