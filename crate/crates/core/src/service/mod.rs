//! HTTP service over the pipeline.
//!
//! Sessions are identified by the `X-Session-Token` header. Selections and finished
//! OCEL files live under the data directory and survive restarts; sessions,
//! uploaded datasets and job records do not.

mod state;

use std::collections::BTreeMap;
use std::fs;
use std::net::SocketAddr;
use std::path::PathBuf;

use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::identify::{SelectionDocument, TableSelection};
use crate::ingest::{Format, RowSource};
use crate::ocel::{serialize_ocel, ExtractionConfig};
use crate::workspace::{HubLimit, Sources};
use crate::{Error, ErrorKind, Settings, Workspace};

pub use state::{session_token, AppState, Job, JobState, Progress, Session, DEFAULT_DATASET};

/// Header carrying the session token.
pub const SESSION_HEADER: &str = "x-session-token";

/// Every route as `(method, path)`.
pub const ROUTES: &[(&str, &str)] = &[
    ("POST", "/datasets"),
    ("GET", "/classes"),
    ("GET", "/graph/neighborhood"),
    ("POST", "/sessions"),
    ("POST", "/selections"),
    ("GET", "/selections/{id}"),
    ("PATCH", "/selections/{id}"),
    ("POST", "/selections/{id}/expand"),
    ("GET", "/selections/{id}/ranking"),
    ("POST", "/extractions"),
    ("GET", "/jobs/{id}"),
    ("GET", "/jobs/{id}/result"),
];

const UPLOAD_LIMIT: usize = 512 * 1024 * 1024;

/// Error response with body `{"error","detail"}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    error: String,
    detail: String,
}

impl ApiError {
    fn new(status: StatusCode, error: &str, detail: impl Into<String>) -> Self {
        ApiError {
            status,
            error: error.to_string(),
            detail: detail.into(),
        }
    }

    fn bad_request(error: &str, detail: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, error, detail)
    }

    fn not_found(error: &str, detail: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, error, detail)
    }

    fn conflict(error: &str, detail: impl Into<String>) -> Self {
        ApiError::new(StatusCode::CONFLICT, error, detail)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Usage | ErrorKind::Parse | ErrorKind::Extraction | ErrorKind::Validation => {
                StatusCode::BAD_REQUEST
            }
            ErrorKind::UnknownEntity => StatusCode::NOT_FOUND,
            ErrorKind::Io => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

macro_rules! api_from {
    ($($t:ty),*) => {$(
        impl From<$t> for ApiError {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}
api_from!(crate::identify::IdentifyError, crate::graph::GraphError, crate::ocel::OcelError, crate::ingest::IngestError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.error, "detail": self.detail }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/datasets", post(upload_dataset).layer(DefaultBodyLimit::max(UPLOAD_LIMIT)))
        .route("/classes", get(list_classes))
        .route("/graph/neighborhood", get(neighborhood))
        .route("/sessions", post(create_session))
        .route("/selections", post(create_selection))
        .route("/selections/{id}", get(get_selection).patch(toggle_selection))
        .route("/selections/{id}/expand", post(expand_selection))
        .route("/selections/{id}/ranking", get(rank_selection))
        .route("/extractions", post(start_extraction))
        .route("/jobs/{id}", get(get_job))
        .route("/jobs/{id}/result", get(get_job_result))
        .fallback(|| async { ApiError::not_found("not_found", "no such route") })
        .with_state(state)
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub data_dir: PathBuf,
    pub settings: Settings,
    /// Dataset directory registered as `default` at startup.
    pub dataset: Option<PathBuf>,
}

/// Builds the state for `config`, loading the startup dataset if any.
pub fn app_state(config: &ServiceConfig) -> crate::Result<AppState> {
    let state = AppState::new(&config.data_dir, config.settings)?;
    if let Some(dir) = &config.dataset {
        state.register_dataset(DEFAULT_DATASET, Workspace::open(dir, config.settings)?);
    }
    Ok(state)
}

/// Serves until interrupted.
pub async fn serve(config: ServiceConfig) -> crate::Result<()> {
    let state = app_state(&config)?;
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    tracing::info!(address = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn session_id(headers: &HeaderMap) -> Option<&str> {
    headers.get(SESSION_HEADER).and_then(|v| v.to_str().ok())
}

/// The session named by the request, if any; an unknown token is a 404.
fn session(state: &AppState, headers: &HeaderMap) -> ApiResult<Option<Session>> {
    match session_id(headers) {
        None => Ok(None),
        Some(id) => state
            .touch_session(id)
            .map(Some)
            .ok_or_else(|| ApiError::not_found("unknown_session", format!("unknown session `{id}`"))),
    }
}

/// The dataset of the request's session, else `?dataset=`, else `default`.
fn workspace(state: &AppState, headers: &HeaderMap, requested: Option<&str>) -> ApiResult<std::sync::Arc<Workspace>> {
    let id = match session(state, headers)? {
        Some(s) => s.dataset,
        None => requested.unwrap_or(DEFAULT_DATASET).to_string(),
    };
    state
        .dataset(&id)
        .ok_or_else(|| ApiError::not_found("unknown_dataset", format!("unknown dataset `{id}`")))
}

fn selection_document(id: &str, selection: TableSelection) -> Json<SelectionDocument> {
    Json(SelectionDocument {
        id: id.to_string(),
        selection,
    })
}

fn parse_hub_limit(text: Option<&str>) -> ApiResult<Option<HubLimit>> {
    text.map(|t| t.parse::<HubLimit>())
        .transpose()
        .map_err(|m| ApiError::bad_request("invalid_hub_limit", m))
}

async fn upload_dataset(State(state): State<AppState>, mut multipart: Multipart) -> ApiResult<(StatusCode, Json<Value>)> {
    let bad = |m: String| ApiError::bad_request("invalid_upload", m);
    let mut catalog = None;
    let mut relationships = None;
    let mut classes = None;
    let mut rows = BTreeMap::new();
    while let Some(field) = multipart.next_field().await.map_err(|e| bad(e.to_string()))? {
        let name = field.name().unwrap_or_default().to_string();
        let file_name = field.file_name().unwrap_or_default().to_string();
        let bytes = field.bytes().await.map_err(|e| bad(e.to_string()))?.to_vec();
        let format = file_name
            .rsplit_once('.')
            .and_then(|(_, ext)| Format::from_extension(ext))
            .unwrap_or(Format::Csv);
        match name.as_str() {
            "catalog" => catalog = Some((bytes, format)),
            "relationships" => relationships = Some((bytes, format)),
            "classes" => classes = Some((bytes, format)),
            "rows" => {
                let table = file_name.strip_suffix(".csv").unwrap_or(&file_name).to_string();
                if table.is_empty() {
                    return Err(bad("row files need a `<TABLE>.csv` file name".into()));
                }
                rows.insert(table, RowSource::from(bytes));
            }
            other => return Err(bad(format!("unexpected field `{other}`"))),
        }
    }
    let sources = Sources {
        catalog: catalog.ok_or_else(|| bad("missing `catalog` part".into()))?,
        relationships,
        classes: classes.ok_or_else(|| bad("missing `classes` part".into()))?,
        rows,
    };
    let settings = *state.settings();
    let workspace = tokio::task::spawn_blocking(move || Workspace::from_sources(sources, settings))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let summary = workspace.summary();
    state.register_dataset(&id, workspace);
    Ok((StatusCode::CREATED, Json(json!({ "dataset_id": id, "summary": summary }))))
}

#[derive(Deserialize)]
struct DatasetQuery {
    dataset: Option<String>,
}

async fn list_classes(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(q): Query<DatasetQuery>,
) -> ApiResult<Json<Value>> {
    let ws = workspace(&state, &headers, q.dataset.as_deref())?;
    Ok(Json(json!({ "classes": ws.classes().classes() })))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct NeighborhoodQuery {
    node: Option<String>,
    depth: Option<usize>,
    hub_limit: Option<String>,
    dataset: Option<String>,
}

async fn neighborhood(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(q): Query<NeighborhoodQuery>,
) -> ApiResult<Response> {
    let ws = workspace(&state, &headers, q.dataset.as_deref())?;
    let node = q.node.ok_or_else(|| ApiError::bad_request("missing_parameter", "`node` is required"))?;
    let limit = parse_hub_limit(q.hub_limit.as_deref())?;
    let depth = q.depth.unwrap_or(1);
    let doc = tokio::task::spawn_blocking(move || ws.neighborhood(&node, depth, limit))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(([(header::CONTENT_TYPE, "application/json")], doc.to_json()).into_response())
}

#[derive(Deserialize, Default)]
struct SessionRequest {
    dataset: Option<String>,
}

async fn create_session(
    State(state): State<AppState>,
    body: Option<Json<SessionRequest>>,
) -> ApiResult<(StatusCode, Json<Session>)> {
    let dataset = body.and_then(|Json(b)| b.dataset).unwrap_or_else(|| DEFAULT_DATASET.to_string());
    if state.dataset(&dataset).is_none() {
        return Err(ApiError::not_found("unknown_dataset", format!("unknown dataset `{dataset}`")));
    }
    Ok((StatusCode::CREATED, Json(state.create_session(&dataset))))
}

#[derive(Deserialize)]
struct SelectionRequest {
    class_id: String,
}

async fn create_selection(
    State(state): State<AppState>,
    headers: HeaderMap,
    Json(req): Json<SelectionRequest>,
) -> ApiResult<(StatusCode, Json<SelectionDocument>)> {
    let ws = workspace(&state, &headers, None)?;
    let sel = ws.identifier().start_selection(&req.class_id)?;
    let id = state.inner.store.save(&sel)?;
    if let Some(session) = session_id(&headers) {
        state.set_session_selection(session, &id);
    }
    Ok((StatusCode::CREATED, selection_document(&id, sel)))
}

async fn get_selection(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SelectionDocument>> {
    let sel = state.inner.store.load(&id)?;
    Ok(selection_document(&id, sel))
}

#[derive(Deserialize)]
struct ToggleRequest {
    table: String,
    included: bool,
}

async fn toggle_selection(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(id): Path<String>,
    Json(req): Json<ToggleRequest>,
) -> ApiResult<Json<SelectionDocument>> {
    let ws = workspace(&state, &headers, None)?;
    let lock = state.selection_lock(&id);
    let _guard = lock.lock().await;
    let sel = state.inner.store.load(&id)?;
    let next = ws.identifier().toggle_table(&sel, &req.table, req.included)?;
    if next != sel {
        state.inner.store.update(&id, &next)?;
    }
    Ok(selection_document(&id, next))
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "camelCase")]
struct ExpandRequest {
    depth: Option<usize>,
    hub_limit: Option<Value>,
}

async fn expand_selection(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(id): Path<String>,
    body: Option<Json<ExpandRequest>>,
) -> ApiResult<Json<SelectionDocument>> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let limit = match &req.hub_limit {
        None | Some(Value::Null) => None,
        Some(Value::Number(n)) => parse_hub_limit(Some(&n.to_string()))?,
        Some(Value::String(s)) => parse_hub_limit(Some(s))?,
        Some(other) => return Err(ApiError::bad_request("invalid_hub_limit", format!("unsupported hub limit {other}"))),
    };
    let ws = workspace(&state, &headers, None)?;
    let lock = state.selection_lock(&id);
    let _guard = lock.lock().await;
    let sel = state.inner.store.load(&id)?;
    let next = ws
        .identifier()
        .expand_selection(&sel, req.depth.unwrap_or(1), ws.hub_limit(limit))?;
    if next != sel {
        state.inner.store.update(&id, &next)?;
    }
    Ok(selection_document(&id, next))
}

async fn rank_selection(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(id): Path<String>,
) -> ApiResult<Json<Value>> {
    let ws = workspace(&state, &headers, None)?;
    let sel = state.inner.store.load(&id)?;
    let ranking = ws.identifier().rank_candidates(&sel)?;
    Ok(Json(json!({ "candidates": ranking })))
}

#[derive(Deserialize)]
struct ExtractionRequest {
    config: ExtractionConfig,
    /// Defaults to the session's current selection.
    selection: Option<String>,
}

async fn start_extraction(
    State(state): State<AppState>,
    headers: HeaderMap,
    Json(req): Json<ExtractionRequest>,
) -> ApiResult<(StatusCode, Json<Job>)> {
    let session = session(&state, &headers)?
        .ok_or_else(|| ApiError::bad_request("missing_session", format!("`{SESSION_HEADER}` header required")))?;
    let ws = workspace(&state, &headers, None)?;
    let selection_id = req
        .selection
        .or(session.selection.clone())
        .ok_or_else(|| ApiError::bad_request("no_selection", "the session has no selection"))?;
    let selection = state.inner.store.load(&selection_id)?;
    selection.validate(ws.classes())?;
    req.config.validate(&selection, ws.catalog(), ws.classes())?;

    let job = state
        .begin_job(&session.id, &selection_id, req.config.tables.len())
        .ok_or_else(|| ApiError::conflict("job_running", "an extraction is already running for this session"))?;
    let job_id = job.id.clone();

    let worker = state.clone();
    let config = req.config;
    tokio::task::spawn_blocking(move || run_job(&worker, &job_id, &ws, &selection, &config));
    Ok((StatusCode::CREATED, Json(job)))
}

fn run_job(state: &AppState, id: &str, ws: &Workspace, selection: &TableSelection, config: &ExtractionConfig) {
    state.update_job(id, |j| {
        j.advance(JobState::Running);
    });
    let outcome = ws
        .extract(selection, config, |done, total| state.update_job(id, |j| j.report(done, total)))
        .and_then(|log| {
            let path = state.result_path(id);
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, serialize_ocel(&log))?;
            fs::rename(&tmp, &path)?;
            Ok(())
        });
    match outcome {
        Ok(()) => state.update_job(id, |j| {
            j.result = Some(format!("/jobs/{}/result", j.id));
            j.advance(JobState::Done);
        }),
        Err(e) => {
            tracing::warn!(job = id, error = %e, "extraction failed");
            state.update_job(id, |j| {
                j.error = Some(e.to_string());
                j.advance(JobState::Failed);
            })
        }
    }
}

/// A job record, reconstructed from its result file after a restart.
fn find_job(state: &AppState, id: &str) -> ApiResult<Job> {
    if let Some(job) = state.job(id) {
        return Ok(job);
    }
    if state::valid_id(id) && state.result_path(id).is_file() {
        return Ok(Job {
            id: id.to_string(),
            session: None,
            selection: None,
            state: JobState::Done,
            progress: Progress { done: 0, total: 0 },
            error: None,
            result: Some(format!("/jobs/{id}/result")),
        });
    }
    Err(ApiError::not_found("unknown_job", format!("unknown job `{id}`")))
}

async fn get_job(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Job>> {
    find_job(&state, &id).map(Json)
}

async fn get_job_result(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let job = find_job(&state, &id)?;
    if job.state != JobState::Done {
        let detail = match job.state {
            JobState::Failed => format!("job failed: {}", job.error.unwrap_or_default()),
            _ => "job has not finished".to_string(),
        };
        return Err(ApiError::conflict("job_not_done", detail));
    }
    let bytes = tokio::fs::read(state.result_path(&id))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "io_error", e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}
