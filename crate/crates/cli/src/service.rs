//! Stateless HTTP sizing service.

use axum::body::Bytes;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::json;
use zerog_core::env::{MissionConstraintsRaw, VehicleParamsRaw};
use zerog_core::presets;

use crate::sizing::{size_request, FieldError, SizeError, SizeRequest};

#[derive(Debug, Clone, Serialize)]
pub struct PresetEntry {
    pub name: &'static str,
    pub vehicle: VehicleParamsRaw,
    pub constraints: MissionConstraintsRaw,
}

pub fn preset_list() -> Vec<PresetEntry> {
    presets::all()
        .into_iter()
        .map(|(name, p)| PresetEntry {
            name,
            vehicle: p.to_raw(),
            constraints: MissionConstraintsRaw::default(),
        })
        .collect()
}

pub fn router() -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/presets", get(list_presets))
        .route("/api/size", post(size))
}

async fn health() -> &'static str {
    "ok"
}

async fn list_presets() -> Json<Vec<PresetEntry>> {
    Json(preset_list())
}

fn bad_request(errors: Vec<FieldError>) -> Response {
    (StatusCode::BAD_REQUEST, Json(json!({ "errors": errors }))).into_response()
}

async fn size(body: Bytes) -> Response {
    let req: SizeRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => {
            return bad_request(vec![FieldError {
                field: "body".into(),
                message: e.to_string(),
            }])
        }
    };
    let outcome = tokio::task::spawn_blocking(move || size_request(&req)).await;
    match outcome {
        Ok(Ok(payload)) => (StatusCode::OK, Json(payload)).into_response(),
        Ok(Err(SizeError::Invalid(errors))) => bad_request(errors),
        Ok(Err(e)) => (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({ "error": e.to_string() }))).into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({ "error": e.to_string() }))).into_response(),
    }
}

/// Serves until the process is stopped.
pub async fn serve(bind: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
