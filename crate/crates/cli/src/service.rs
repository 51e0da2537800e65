//! HTTP front end for one interactive calibration session.
//!
//! Every handler takes the session lock for the duration of a request, so
//! mutations are serialized. Responses are JSON except the two image routes.

use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use trackbench_core::geometry::GeometryError;
use trackbench_core::session::{CalibrationSession, KeypointStatus, SessionError};
use trackbench_core::{KeypointPair, Point2};

#[derive(Default)]
pub struct ServiceState {
    session: RwLock<Option<CalibrationSession>>,
    next_id: AtomicU64,
}

pub type SharedState = Arc<ServiceState>;

impl ServiceState {
    pub fn new() -> SharedState {
        Arc::new(Self::default())
    }

    /// Starts (or replaces) the active session.
    pub fn start(&self, camera: &std::path::Path, twin: &std::path::Path) -> Result<String, SessionError> {
        let n = self.next_id.fetch_add(1, Ordering::Relaxed) + 1;
        let session = CalibrationSession::start(format!("session-{n}"), camera, twin)?;
        let id = session.id().to_string();
        *self.session.write().expect("session lock") = Some(session);
        Ok(id)
    }
}

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/session", post(start_session).get(get_session))
        .route("/image/camera", get(camera_image))
        .route("/image/twin", get(twin_image))
        .route("/keypoints", post(add_keypoint))
        .route("/keypoints/{index}", delete(remove_keypoint))
        .route("/diagnostics", get(diagnostics))
        .route("/error-curve", get(error_curve))
        .route("/export", post(export))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            kind,
            message: message.into(),
        }
    }

    fn no_session() -> Self {
        Self::new(StatusCode::NOT_FOUND, "no_session", "no calibration session; POST /session first")
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.kind, "message": self.message }))).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_body", e.body_text())
    }
}

impl From<GeometryError> for ApiError {
    fn from(e: GeometryError) -> Self {
        let (status, kind) = match &e {
            GeometryError::TooFewPoints { .. } => (StatusCode::CONFLICT, "too_few_points"),
            GeometryError::IndexOutOfRange { .. } => (StatusCode::NOT_FOUND, "index_out_of_range"),
            GeometryError::OutOfBounds { .. } => (StatusCode::BAD_REQUEST, "out_of_bounds"),
            GeometryError::DuplicateCameraPoint { .. } => (StatusCode::BAD_REQUEST, "duplicate_camera_point"),
            GeometryError::DegenerateConfiguration(_) => (StatusCode::BAD_REQUEST, "degenerate_configuration"),
            _ => (StatusCode::BAD_REQUEST, "invalid_keypoint"),
        };
        Self::new(status, kind, e.to_string())
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Geometry(g) => g.into(),
            SessionError::FileNotFound(_) => Self::new(StatusCode::BAD_REQUEST, "file_not_found", e.to_string()),
            SessionError::InvalidImage { .. } => Self::new(StatusCode::BAD_REQUEST, "invalid_image", e.to_string()),
            SessionError::Export { .. } => Self::new(StatusCode::BAD_REQUEST, "export_failed", e.to_string()),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn with_session<T>(state: &ServiceState, f: impl FnOnce(&CalibrationSession) -> ApiResult<T>) -> ApiResult<T> {
    let guard = state.session.read().expect("session lock");
    f(guard.as_ref().ok_or_else(ApiError::no_session)?)
}

fn with_session_mut<T>(state: &ServiceState, f: impl FnOnce(&mut CalibrationSession) -> ApiResult<T>) -> ApiResult<T> {
    let mut guard = state.session.write().expect("session lock");
    f(guard.as_mut().ok_or_else(ApiError::no_session)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StartBody {
    camera_path: PathBuf,
    twin_path: PathBuf,
}

async fn start_session(State(state): State<SharedState>, body: Result<Json<StartBody>, JsonRejection>) -> ApiResult<Json<Value>> {
    let Json(body) = body?;
    state.start(&body.camera_path, &body.twin_path)?;
    with_session(&state, |s| Ok(Json(json!(s.summary()))))
}

async fn get_session(State(state): State<SharedState>) -> ApiResult<Json<Value>> {
    with_session(&state, |s| Ok(Json(json!(s.summary()))))
}

fn png(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "image/png")], bytes).into_response()
}

async fn camera_image(State(state): State<SharedState>) -> ApiResult<Response> {
    with_session(&state, |s| Ok(png(s.camera_png().to_vec())))
}

async fn twin_image(State(state): State<SharedState>) -> ApiResult<Response> {
    with_session(&state, |s| Ok(png(s.twin_png().to_vec())))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairBody {
    camera: [f64; 2],
    twin: [f64; 2],
    #[serde(default)]
    label: Option<String>,
}

async fn add_keypoint(State(state): State<SharedState>, body: Result<Json<PairBody>, JsonRejection>) -> ApiResult<Json<KeypointStatus>> {
    let Json(body) = body?;
    let pair = KeypointPair::new(
        Point2::camera(body.camera[0], body.camera[1])?,
        Point2::twin(body.twin[0], body.twin[1])?,
        body.label,
    )?;
    with_session_mut(&state, |s| Ok(Json(s.add(pair)?)))
}

async fn remove_keypoint(State(state): State<SharedState>, Path(index): Path<String>) -> ApiResult<Json<KeypointStatus>> {
    let index: usize = index
        .parse()
        .map_err(|_| ApiError::new(StatusCode::NOT_FOUND, "index_out_of_range", format!("no keypoint `{index}`")))?;
    with_session_mut(&state, |s| Ok(Json(s.remove(index)?)))
}

async fn diagnostics(State(state): State<SharedState>) -> ApiResult<Json<KeypointStatus>> {
    with_session(&state, |s| match s.status() {
        KeypointStatus::Pending { count } => Err(GeometryError::TooFewPoints { required: 4, found: count }.into()),
        status => Ok(Json(status)),
    })
}

async fn error_curve(State(state): State<SharedState>) -> ApiResult<Json<Value>> {
    with_session(&state, |s| Ok(Json(json!({ "points": s.error_curve()? }))))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExportBody {
    path: PathBuf,
}

async fn export(State(state): State<SharedState>, body: Result<Json<ExportBody>, JsonRejection>) -> ApiResult<Json<Value>> {
    let Json(body) = body?;
    with_session(&state, |s| {
        s.export(&body.path)?;
        Ok(Json(json!({ "path": body.path, "count": s.keypoints().len() })))
    })
}

/// Binds `addr` and serves until the process ends.
pub async fn serve(addr: std::net::SocketAddr, state: SharedState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("calibration service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
