//! JSON API: `POST /api/analyze`, `GET /api/health`, `GET /api/examples`,
//! and the UI bundle at `/` when one is configured.

use std::path::PathBuf;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::json;
use sgi_core::service::{run_analysis, AnalysisOptions, AnalysisRequest, DEFAULT_TIMEOUT, EXAMPLES};
use tower_http::services::ServeDir;

#[derive(Debug, Clone)]
pub struct ApiConfig {
    /// Budget per analysis request.
    pub timeout: Duration,
    /// Directory holding a built UI (`index.html` and assets).
    pub ui_dir: Option<PathBuf>,
}

impl Default for ApiConfig {
    fn default() -> Self {
        ApiConfig { timeout: DEFAULT_TIMEOUT, ui_dir: None }
    }
}

#[derive(Serialize)]
struct Failure<'a> {
    status: &'static str,
    stage: &'a str,
    error: String,
}

fn bad_request(stage: &str, error: String) -> Response {
    (StatusCode::BAD_REQUEST, Json(Failure { status: "failed", stage, error })).into_response()
}

async fn analyze(State(config): State<ApiConfig>, body: Bytes) -> Response {
    let req: AnalysisRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return bad_request("request", e.to_string()),
    };
    if let Err(e) = req.resolve() {
        return bad_request(e.stage(), e.to_string());
    }
    let options = AnalysisOptions { timeout: config.timeout, ..Default::default() };
    match tokio::task::spawn_blocking(move || run_analysis(&req, &options)).await {
        Ok(result) => ([(header::CONTENT_TYPE, "application/json")], result.to_json()).into_response(),
        Err(e) => {
            let body = Failure { status: "failed", stage: "analysis", error: e.to_string() };
            (StatusCode::INTERNAL_SERVER_ERROR, Json(body)).into_response()
        }
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

async fn examples() -> Json<serde_json::Value> {
    let list: Vec<serde_json::Value> = EXAMPLES
        .iter()
        .map(|(name, text)| {
            let structure: serde_json::Value = serde_json::from_str(text).expect("bundled examples are JSON");
            json!({ "name": name, "structure": structure })
        })
        .collect();
    Json(serde_json::Value::Array(list))
}

async fn no_ui() -> Response {
    let text = "No UI bundle is configured. The JSON API is served under /api.\n";
    (StatusCode::NOT_FOUND, text).into_response()
}

pub fn router(config: ApiConfig) -> Router {
    let ui = config.ui_dir.clone().filter(|d| d.join("index.html").is_file());
    let api = Router::new()
        .route("/api/analyze", post(analyze))
        .route("/api/health", get(health))
        .route("/api/examples", get(examples))
        .with_state(config);
    match ui {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(no_ui)),
    }
}

/// Serves until interrupted.
pub async fn serve(addr: std::net::SocketAddr, config: ApiConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
