//! Read-only HTTP facade over a loaded artifact set.
//!
//! | route                              | body                          |
//! |------------------------------------|-------------------------------|
//! | `GET /recommend?seed&engine&n`     | array of recommendation views |
//! | `GET /compare?seed&n`              | side-by-side comparison view  |
//! | `GET /journals/similarity?a&b`     | `{a, b, similarity}`          |
//! | `GET /healthz`                     | artifact fingerprints         |
//!
//! Every non-200 response carries `{code, message}`. Until the artifacts
//! finish loading every route answers 503.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use axum::extract::{Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use scholarec_core::api::{self, ApiError, ErrorKind};
use scholarec_core::artifacts::{ArtifactPaths, Fingerprints, LoadedArtifacts};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub artifacts: ArtifactPaths,
    pub default_n: usize,
    /// Allowed browser origin; any origin when `None`.
    pub cors_origin: Option<String>,
}

impl ServiceConfig {
    pub fn for_data_dir(dir: &Path, listen: SocketAddr) -> Self {
        ServiceConfig {
            listen,
            artifacts: ArtifactPaths::in_dir(dir),
            default_n: api::DEFAULT_N,
            cors_origin: None,
        }
    }
}

type Loaded = Result<Arc<LoadedArtifacts>, String>;

/// Shared, write-once service state.
#[derive(Clone)]
pub struct AppState {
    slot: Arc<OnceLock<Loaded>>,
    default_n: usize,
}

impl AppState {
    pub fn loading(default_n: usize) -> Self {
        AppState { slot: Arc::new(OnceLock::new()), default_n }
    }

    pub fn ready(artifacts: Arc<LoadedArtifacts>, default_n: usize) -> Self {
        let state = Self::loading(default_n);
        state.finish(Ok(artifacts));
        state
    }

    /// Publishes the load result; later calls are ignored.
    pub fn finish(&self, loaded: Loaded) {
        let _ = self.slot.set(loaded);
    }

    fn artifacts(&self) -> Result<&Arc<LoadedArtifacts>, ApiError> {
        match self.slot.get() {
            None => Err(ApiError::new(ErrorKind::Unavailable, "loading", "artifacts are still loading")),
            Some(Err(message)) => Err(ApiError::new(ErrorKind::Unavailable, "load_failed", message.clone())),
            Some(Ok(artifacts)) => Ok(artifacts),
        }
    }
}

struct Failure(ApiError);

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        Failure(e)
    }
}

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        let status = match self.0.kind {
            ErrorKind::BadRequest => StatusCode::BAD_REQUEST,
            ErrorKind::NotFound => StatusCode::NOT_FOUND,
            ErrorKind::NoText => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorKind::Unavailable => StatusCode::SERVICE_UNAVAILABLE,
        };
        (status, Json(self.0.body())).into_response()
    }
}

type Params = Query<HashMap<String, String>>;

fn required<'a>(params: &'a HashMap<String, String>, name: &str) -> Result<&'a str, ApiError> {
    params
        .get(name)
        .map(String::as_str)
        .filter(|v| !v.is_empty())
        .ok_or_else(|| ApiError::new(ErrorKind::BadRequest, "missing_parameter", format!("query parameter `{name}` is required")))
}

async fn recommend(State(state): State<AppState>, Query(params): Params) -> Result<Response, Failure> {
    let artifacts = state.artifacts()?;
    let seed = required(&params, "seed")?;
    let engine = required(&params, "engine")?;
    let n = api::parse_n(params.get("n").map(String::as_str), state.default_n)?;
    Ok(Json(api::recommend_view(artifacts, seed, engine, n)?).into_response())
}

async fn compare(State(state): State<AppState>, Query(params): Params) -> Result<Response, Failure> {
    let artifacts = state.artifacts()?;
    let seed = required(&params, "seed")?;
    let n = api::parse_n(params.get("n").map(String::as_str), state.default_n)?;
    Ok(Json(api::compare_view(artifacts, seed, n)?).into_response())
}

async fn journal_similarity(State(state): State<AppState>, Query(params): Params) -> Result<Response, Failure> {
    let artifacts = state.artifacts()?;
    let a = required(&params, "a")?;
    let b = required(&params, "b")?;
    Ok(Json(api::journal_similarity_view(artifacts, a, b)?).into_response())
}

/// Body of `GET /healthz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub engines: Vec<String>,
    pub fingerprints: Fingerprints,
}

async fn healthz(State(state): State<AppState>) -> Result<Json<Health>, Failure> {
    let artifacts = state.artifacts()?;
    Ok(Json(Health {
        status: "ok".into(),
        engines: artifacts.engines.names().into_iter().map(String::from).collect(),
        fingerprints: artifacts.fingerprints.clone(),
    }))
}

async fn fallback() -> Failure {
    Failure(ApiError::new(ErrorKind::NotFound, "no_route", "no such endpoint"))
}

fn cors(origin: Option<&str>) -> anyhow::Result<CorsLayer> {
    let allow = match origin {
        None => AllowOrigin::any(),
        Some(origin) => AllowOrigin::exact(HeaderValue::from_str(origin)?),
    };
    Ok(CorsLayer::new().allow_origin(allow).allow_methods([axum::http::Method::GET]))
}

/// The full route table with CORS for `cors_origin`.
pub fn router(state: AppState, cors_origin: Option<&str>) -> anyhow::Result<Router> {
    Ok(Router::new()
        .route("/recommend", get(recommend))
        .route("/compare", get(compare))
        .route("/journals/similarity", get(journal_similarity))
        .route("/healthz", get(healthz))
        .fallback(fallback)
        .with_state(state)
        .layer(cors(cors_origin)?))
}

/// Binds, starts loading artifacts in the background, and serves until
/// interrupted.
pub async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    let state = AppState::loading(config.default_n);
    let app = router(state.clone(), config.cors_origin.as_deref())?;
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    let paths = config.artifacts.clone();
    tokio::task::spawn_blocking(move || {
        let loaded = LoadedArtifacts::load(&paths).map(Arc::new).map_err(|e| e.to_string());
        match &loaded {
            Ok(_) => eprintln!("artifacts loaded"),
            Err(message) => eprintln!("failed to load artifacts: {message}"),
        }
        state.finish(loaded);
    });
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
