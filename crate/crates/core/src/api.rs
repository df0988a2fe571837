//! HTTP/JSON facade over the session store.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::cutting_plane::RunTrace;
use crate::lp_model::ValidationReport;
use crate::prob_bounds::{FeasibilityReport, UncertaintySpec};
use crate::session::{AnswerRequest, Mode, Problem, Session, SessionConfig, SessionError, SessionStore, SessionView, StoreError};
use crate::utility::UtilitySpec;

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
pub struct CreateRequest {
    pub problem: Problem,
    #[serde(default)]
    pub config: SessionConfig,
    #[serde(default = "interactive")]
    pub mode: Mode,
}

fn interactive() -> Mode {
    Mode::Interactive
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
pub struct ForkRequest {
    /// Iterate to reopen, 0-based.
    pub at: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
pub struct ApiError {
    pub status: u16,
    pub kind: String,
    pub detail: String,
    /// The full validation report when `kind` is `validation`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<Box<ValidationReport>>,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, detail: impl Into<String>) -> Self {
        ApiError { status: status.as_u16(), kind: kind.to_string(), detail: detail.into(), report: None }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match &e {
            SessionError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
            SessionError::Input(_) | SessionError::Schema(_) => StatusCode::BAD_REQUEST,
            SessionError::Phase(_) | SessionError::Stale { .. } => StatusCode::CONFLICT,
            SessionError::Algorithm(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let mut err = ApiError::new(status, e.kind(), e.to_string());
        if let SessionError::Invalid(report) = e {
            err.report = Some(report);
        }
        err
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, "not_found", e.to_string()),
            StoreError::Session(e) => e.into(),
            StoreError::Io(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "io", e.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.body_text())
    }
}

type ApiResult<T> = Result<T, ApiError>;
type Store = Arc<SessionStore>;

/// Runs blocking session work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn create(State(store): State<Store>, body: Result<Json<CreateRequest>, JsonRejection>) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let Json(req) = body?;
    let view = blocking(move || {
        let session = Session::create(req.problem, req.config, req.mode)?;
        Ok(store.insert(session)?.view())
    })
    .await?;
    Ok((StatusCode::CREATED, Json(view)))
}

async fn list(State(store): State<Store>) -> Json<Vec<String>> {
    Json(store.ids())
}

async fn show(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    Ok(Json(store.get(&id)?.view()))
}

async fn answer(
    State(store): State<Store>,
    Path(id): Path<String>,
    body: Result<Json<AnswerRequest>, JsonRejection>,
) -> ApiResult<Json<SessionView>> {
    let Json(req) = body?;
    let view = blocking(move || Ok(store.update(&id, |s| s.submit(req))?.view())).await?;
    Ok(Json(view))
}

async fn step(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let view = blocking(move || Ok(store.update(&id, Session::step)?.view())).await?;
    Ok(Json(view))
}

#[derive(Debug, Deserialize)]
struct TraceQuery {
    format: Option<String>,
}

async fn trace(State(store): State<Store>, Path(id): Path<String>, Query(q): Query<TraceQuery>) -> ApiResult<Response> {
    let session = store.get(&id)?;
    match q.format.as_deref() {
        None | Some("json") => Ok(Json(session.run.trace).into_response()),
        Some("jsonl") => Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], session.trace_jsonl()).into_response()),
        Some(other) => Err(ApiError::new(StatusCode::BAD_REQUEST, "bad_request", format!("unknown trace format {other:?}"))),
    }
}

async fn report(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<Json<FeasibilityReport>> {
    store
        .get(&id)?
        .report
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("session {id} has no uncertainty spec")))
}

async fn fork(
    State(store): State<Store>,
    Path(id): Path<String>,
    body: Result<Json<ForkRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let Json(req) = body?;
    let view = blocking(move || {
        let forked = store.get(&id)?.fork(req.at)?;
        Ok(store.insert(forked)?.view())
    })
    .await?;
    Ok((StatusCode::CREATED, Json(view)))
}

async fn export(State(store): State<Store>, Path(id): Path<String>) -> ApiResult<Response> {
    let text = store.get(&id)?.to_json();
    Ok(([(header::CONTENT_TYPE, "application/json")], text).into_response())
}

async fn import(State(store): State<Store>, body: Bytes) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.to_string()))?;
    let session = Session::from_json(text)?;
    if store.get(&session.id).is_ok() {
        return Err(ApiError::new(StatusCode::CONFLICT, "conflict", format!("session {} already exists", session.id)));
    }
    Ok((StatusCode::CREATED, Json(store.insert(session)?.view())))
}

/// JSON schemas of every request and response body, by name.
pub fn schemas() -> BTreeMap<&'static str, schemars::schema::RootSchema> {
    use schemars::schema_for;
    BTreeMap::from([
        ("answer_request", schema_for!(AnswerRequest)),
        ("create_request", schema_for!(CreateRequest)),
        ("error", schema_for!(ApiError)),
        ("feasibility_report", schema_for!(FeasibilityReport)),
        ("fork_request", schema_for!(ForkRequest)),
        ("run_trace", schema_for!(RunTrace)),
        ("session", schema_for!(Session)),
        ("session_view", schema_for!(SessionView)),
        ("uncertainty_spec", schema_for!(UncertaintySpec)),
        ("utility_spec", schema_for!(UtilitySpec)),
    ])
}

async fn schema_index() -> Json<Vec<&'static str>> {
    Json(schemas().into_keys().collect())
}

async fn schema(Path(name): Path<String>) -> ApiResult<Json<schemars::schema::RootSchema>> {
    schemas()
        .remove(name.as_str())
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no schema named {name}")))
}

async fn fallback() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/schemas", get(schema_index))
        .route("/schemas/{name}", get(schema))
        .route("/sessions", post(create).get(list))
        .route("/sessions/import", post(import))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/step", post(step))
        .route("/sessions/{id}/trace", get(trace))
        .route("/sessions/{id}/report", get(report))
        .route("/sessions/{id}/fork", post(fork))
        .route("/sessions/{id}/export", get(export))
        .fallback(fallback)
        .with_state(store)
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, store: Arc<SessionStore>) -> std::io::Result<()> {
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
