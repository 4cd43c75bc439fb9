//! HTTP service answering "is this app an official Umrah agency app?" with a
//! model trained by the `umrahguard` CLI.
//!
//! `POST /verify` takes `{name?, description, permissions?, download_count?,
//! rating?, size_mb?, days_since_update?}` and returns the label, confidence,
//! top contributing features, model version and handler latency.
//! `GET /health` answers 200 once the model is loaded and 503 before.

mod request;

use std::net::SocketAddr;
use std::path::Path;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::json;
use umrahguard_core::classifiers::{load_model, ModelFileError, TrainedModel};
use umrahguard_core::textprep::TextPipeline;

pub use request::{FieldError, VerifyRequest};

/// Number of contributing features returned per prediction.
pub const TOP_FEATURES: usize = 5;

/// Shared, immutable-after-load service state.
pub struct ServiceState {
    model: OnceLock<TrainedModel>,
    text: TextPipeline,
}

impl ServiceState {
    pub fn new(text: TextPipeline) -> Arc<Self> {
        Arc::new(ServiceState {
            model: OnceLock::new(),
            text,
        })
    }

    pub fn with_model(model: TrainedModel, text: TextPipeline) -> Arc<Self> {
        let state = Self::new(text);
        let _ = state.model.set(model);
        state
    }

    /// Loads the model file. Only the first successful call has any effect.
    pub fn load(&self, path: &Path) -> Result<(), ModelFileError> {
        let model = load_model(path)?;
        let _ = self.model.set(model);
        Ok(())
    }

    pub fn model(&self) -> Option<&TrainedModel> {
        self.model.get()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopFeature {
    pub name: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyResponse {
    pub label: String,
    pub confidence: f64,
    pub top_features: Vec<TopFeature>,
    pub model_version: String,
    pub latency_ms: f64,
}

/// Runs one request against a loaded model.
pub fn verify(model: &TrainedModel, text: &TextPipeline, request: VerifyRequest) -> VerifyResponse {
    let start = Instant::now();
    let record = request.into_record(&model.pipeline.meta_stats);
    let explanation = model.explain(&record, text, TOP_FEATURES);
    VerifyResponse {
        label: explanation.label.as_str().to_string(),
        confidence: explanation.confidence,
        top_features: explanation
            .top_features
            .into_iter()
            .map(|f| TopFeature {
                name: f.name,
                weight: f.weight,
            })
            .collect(),
        model_version: model.version.clone(),
        latency_ms: start.elapsed().as_secs_f64() * 1000.0,
    }
}

fn unavailable() -> Response {
    (
        StatusCode::SERVICE_UNAVAILABLE,
        Json(json!({"status": "loading", "error": "model not loaded"})),
    )
        .into_response()
}

async fn handle_verify(State(state): State<Arc<ServiceState>>, body: Bytes) -> Response {
    let Some(model) = state.model() else {
        return unavailable();
    };
    match VerifyRequest::parse(&body) {
        Ok(request) => Json(verify(model, &state.text, request)).into_response(),
        Err(errors) => (
            StatusCode::BAD_REQUEST,
            Json(json!({"error": "invalid request", "fields": errors})),
        )
            .into_response(),
    }
}

async fn handle_health(State(state): State<Arc<ServiceState>>) -> Response {
    match state.model() {
        Some(model) => Json(json!({"status": "ok", "model_version": model.version})).into_response(),
        None => unavailable(),
    }
}

pub fn router(state: Arc<ServiceState>) -> Router {
    Router::new()
        .route("/verify", post(handle_verify))
        .route("/health", get(handle_health))
        .with_state(state)
}

/// Binds `addr`, then loads the model in the background so `/health`
/// reports 503 until it is ready. Runs until the server stops.
pub async fn serve(addr: SocketAddr, model_path: &Path, text: TextPipeline) -> std::io::Result<()> {
    let state = ServiceState::new(text);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    let loader = Arc::clone(&state);
    let path = model_path.to_path_buf();
    let loading = tokio::task::spawn_blocking(move || loader.load(&path));
    let server = tokio::spawn(async move { axum::serve(listener, router(state)).await });
    match loading.await {
        Ok(Ok(())) => eprintln!("model loaded from {}", model_path.display()),
        Ok(Err(e)) => {
            server.abort();
            return Err(std::io::Error::other(e.to_string()));
        }
        Err(e) => {
            server.abort();
            return Err(std::io::Error::other(e.to_string()));
        }
    }
    server.await.map_err(std::io::Error::other)?
}
