//! HTTP API over the environment.
//!
//! Every JSON body carries `"v": "v1"`. Session responses echo the new
//! `actions_remaining` and `mode` at the top level. Errors are
//! `{"v", "code", "message"}` with a status that reflects the cause.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use anyhow::{Context, Result};
use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use searchenv_core::backend::{fetch_and_extract, search, BackendError, SearchProvider, RESULTS_PER_WINDOW};
use searchenv_core::env::{ActionKind, EnvError};
use searchenv_core::trajectory::{validate_trajectory, JsonlStore, StoreError, Trajectory, Violation};
use searchenv_core::{Action, Session, WIRE_VERSION};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tracing::info;

use crate::cli::ServeArgs;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    violations: Option<Vec<Violation>>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), violations: None }
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no session {id}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({"v": WIRE_VERSION, "code": self.code, "message": self.message});
        if let Some(v) = self.violations {
            body["violations"] = serde_json::to_value(v).unwrap_or(Value::Null);
        }
        (self.status, Json(body)).into_response()
    }
}

impl From<BackendError> for ApiError {
    fn from(e: BackendError) -> Self {
        let (status, code) = match &e {
            BackendError::InvalidQuery(_) => (StatusCode::BAD_REQUEST, "invalid_query"),
            BackendError::InvalidUrl(_) => (StatusCode::BAD_REQUEST, "invalid_url"),
            BackendError::UnsupportedContent { .. } => (StatusCode::UNSUPPORTED_MEDIA_TYPE, "unsupported_content"),
            BackendError::Unavailable(_) => (StatusCode::BAD_GATEWAY, "backend_unavailable"),
            BackendError::MissingSnapshot(_) => (StatusCode::BAD_GATEWAY, "missing_snapshot"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<EnvError> for ApiError {
    fn from(e: EnvError) -> Self {
        let (status, code) = match &e {
            EnvError::Backend(b) => return b.clone().into(),
            EnvError::IllegalAction { .. } => (StatusCode::CONFLICT, "illegal_action"),
            EnvError::SessionClosed => (StatusCode::CONFLICT, "session_closed"),
            EnvError::NothingToUndo => (StatusCode::CONFLICT, "nothing_to_undo"),
            EnvError::InvalidQuestion => (StatusCode::BAD_REQUEST, "invalid_question"),
            EnvError::InvalidBudget => (StatusCode::BAD_REQUEST, "invalid_budget"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::ValidationFailed(v) => invalid(v),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "store_error", other.to_string()),
        }
    }
}

fn invalid(violations: Vec<Violation>) -> ApiError {
    let message = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
    ApiError {
        violations: Some(violations),
        ..ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "validation_failed", message)
    }
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
}

type ApiResult<T> = Result<T, ApiError>;

fn parse<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.to_string()))
}

struct SessionEntry {
    session: Session,
    created_at: String,
}

type SessionSlot = Arc<tokio::sync::Mutex<SessionEntry>>;

enum Records {
    File(JsonlStore),
    Memory(Mutex<Vec<Trajectory>>),
}

pub struct AppState {
    provider: Arc<dyn SearchProvider>,
    max_actions: usize,
    sessions: Mutex<HashMap<String, SessionSlot>>,
    records: Records,
}

impl AppState {
    pub fn new(provider: Arc<dyn SearchProvider>, max_actions: usize, store: Option<JsonlStore>) -> Self {
        AppState {
            provider,
            max_actions,
            sessions: Mutex::default(),
            records: match store {
                Some(s) => Records::File(s),
                None => Records::Memory(Mutex::default()),
            },
        }
    }

    fn slot(&self, id: &str) -> ApiResult<SessionSlot> {
        self.sessions.lock().unwrap().get(id).cloned().ok_or_else(|| ApiError::not_found(id))
    }

    fn record(&self, t: &Trajectory) -> ApiResult<u64> {
        match &self.records {
            Records::File(store) => Ok(store.append(t)?),
            Records::Memory(list) => {
                let violations = validate_trajectory(t);
                if !violations.is_empty() {
                    return Err(invalid(violations));
                }
                let mut list = list.lock().unwrap();
                let id = list.len() as u64 + 1;
                let mut stored = t.clone();
                stored.id = Some(id);
                list.push(stored);
                Ok(id)
            }
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/session", post(create_session))
        .route("/session/{id}", get(get_session))
        .route("/session/{id}/action", post(session_action))
        .route("/session/{id}/undo", post(session_undo))
        .route("/session/{id}/reset", post(session_reset))
        .route("/search", post(search_endpoint))
        .route("/extract", post(extract_endpoint))
        .route("/record", post(record_endpoint))
        .with_state(state)
}

/// Bind and serve until Ctrl-C. Builds its own runtime, so the caller must
/// not be inside one.
pub fn serve_blocking(args: ServeArgs, provider: Arc<dyn SearchProvider>, max_actions: usize) -> Result<()> {
    let store = args.store.as_ref().map(JsonlStore::open).transpose()?;
    let state = Arc::new(AppState::new(provider, max_actions, store));
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.addr)
            .await
            .with_context(|| format!("cannot listen on {}", args.addr))?;
        info!(addr = %args.addr, "serving");
        axum::serve(listener, router(state.clone()))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .context("server error")
    })?;
    drop(runtime);
    drop(state);
    Ok(())
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn session_view(id: &str, entry: &SessionEntry) -> Value {
    let state = entry.session.state();
    let legal: Vec<ActionKind> = state.legal_actions();
    json!({
        "v": WIRE_VERSION,
        "id": id,
        "created_at": entry.created_at,
        "actions_remaining": state.actions_remaining,
        "mode": state.mode(),
        "finished": state.is_closed(),
        "legal_actions": legal,
        "steps": entry.session.steps().len(),
        "state": state,
    })
}

#[derive(Deserialize)]
struct CreateSession {
    question: String,
    #[serde(default)]
    max_actions: Option<usize>,
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<Value>> {
    let req: CreateSession = parse(&body)?;
    let session = Session::new(&req.question, req.max_actions.unwrap_or(app.max_actions), app.provider.clone())?;
    let id = uuid::Uuid::new_v4().to_string();
    let entry = SessionEntry { session, created_at: now() };
    let view = session_view(&id, &entry);
    app.sessions.lock().unwrap().insert(id, Arc::new(tokio::sync::Mutex::new(entry)));
    Ok(Json(view))
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let slot = app.slot(&id)?;
    let entry = slot.lock().await;
    Ok(Json(session_view(&id, &entry)))
}

/// Run `f` on the session off the async workers. Requests for the same
/// session queue on its lock in arrival order.
async fn with_session<T, F>(app: &AppState, id: &str, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&mut SessionEntry, &str) -> ApiResult<T> + Send + 'static,
{
    let slot = app.slot(id)?;
    let mut guard = slot.lock_owned().await;
    let id = id.to_string();
    tokio::task::spawn_blocking(move || f(&mut guard, &id)).await.map_err(internal)?
}

async fn session_action(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let action: Action = parse(&body)?;
    let view = with_session(&app, &id, move |entry, id| {
        entry.session.apply(action)?;
        Ok(session_view(id, entry))
    })
    .await?;
    Ok(Json(view))
}

async fn session_undo(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let view = with_session(&app, &id, |entry, id| {
        entry.session.undo()?;
        Ok(session_view(id, entry))
    })
    .await?;
    Ok(Json(view))
}

async fn session_reset(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let view = with_session(&app, &id, |entry, id| {
        entry.session.reset();
        Ok(session_view(id, entry))
    })
    .await?;
    Ok(Json(view))
}

#[derive(Deserialize)]
struct SearchRequest {
    query: String,
    #[serde(default)]
    offset: usize,
}

#[derive(Serialize)]
struct SearchResponse {
    v: &'static str,
    query: String,
    offset: usize,
    results: Vec<searchenv_core::backend::SearchResult>,
    has_more: bool,
}

async fn search_endpoint(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<SearchResponse>> {
    let req: SearchRequest = parse(&body)?;
    let provider = app.provider.clone();
    tokio::task::spawn_blocking(move || {
        let results = search(&*provider, &req.query, req.offset)?;
        let has_more = results.len() == RESULTS_PER_WINDOW
            && !search(&*provider, &req.query, req.offset + RESULTS_PER_WINDOW)?.is_empty();
        Ok(Json(SearchResponse {
            v: WIRE_VERSION,
            query: req.query.trim().to_string(),
            offset: req.offset,
            results,
            has_more,
        }))
    })
    .await
    .map_err(internal)?
}

#[derive(Deserialize)]
struct ExtractRequest {
    url: String,
}

async fn extract_endpoint(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<Value>> {
    let req: ExtractRequest = parse(&body)?;
    let provider = app.provider.clone();
    let snap =
        tokio::task::spawn_blocking(move || fetch_and_extract(&*provider, &req.url)).await.map_err(internal)??;
    let doc = &snap.document;
    Ok(Json(json!({
        "v": WIRE_VERSION,
        "url": doc.url,
        "title": doc.title,
        "body": doc.body,
        "windows": doc.windows,
        "fetched_at": snap.fetched_at,
        "html_sha256": snap.html_sha256,
    })))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RecordRequest {
    Session {
        session_id: String,
        #[serde(default)]
        answer: Option<String>,
        #[serde(default)]
        referenced_facts: Option<Vec<usize>>,
    },
    Trajectory(Box<Trajectory>),
}

async fn record_endpoint(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<Value>> {
    let req: RecordRequest = parse(&body)?;
    let trajectory = match req {
        RecordRequest::Trajectory(t) => *t,
        RecordRequest::Session { session_id, answer, referenced_facts } => {
            let slot = app.slot(&session_id)?;
            let entry = slot.lock().await;
            entry.session.trajectory(answer, referenced_facts)
        }
    };
    let state = app.clone();
    let (id, trajectory) = tokio::task::spawn_blocking(move || state.record(&trajectory).map(|id| (id, trajectory)))
        .await
        .map_err(internal)??;
    let mut stored = trajectory;
    stored.id = Some(id);
    Ok(Json(json!({"v": WIRE_VERSION, "id": id, "trajectory": stored})))
}
