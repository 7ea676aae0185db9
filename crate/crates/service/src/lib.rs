//! HTTP read API over an immutable knowledge graph snapshot.
//!
//! ```text
//! GET /api/health
//! GET /api/concepts?prefix=&limit=
//! GET /api/ego?concept=&predicates=&direction=&limit=
//! GET /api/sentence?doc_id=&sent_index=
//! ```
//!
//! Anything else falls through to the optional static directory.

use std::collections::{BTreeSet, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use biocs::api::{ErrorBody, Health, DEFAULT_CONCEPT_LIMIT, DEFAULT_EGO_LIMIT};
use biocs::kg::{Direction, KnowledgeGraph, SentenceRef};
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

type Params = Result<Query<HashMap<String, String>>, QueryRejection>;

pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }

    fn not_found(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { error: self.message })).into_response()
    }
}

fn params(p: Params) -> Result<HashMap<String, String>, ApiError> {
    p.map(|Query(q)| q).map_err(|e| ApiError::bad_request(e.body_text()))
}

fn limit(q: &HashMap<String, String>, default: usize) -> Result<usize, ApiError> {
    match q.get("limit").map(|s| s.trim()).filter(|s| !s.is_empty()) {
        None => Ok(default),
        Some(s) => s
            .parse()
            .map_err(|_| ApiError::bad_request(format!("limit must be a non-negative integer, got {s:?}"))),
    }
}

fn required<'a>(q: &'a HashMap<String, String>, name: &str) -> Result<&'a str, ApiError> {
    q.get(name)
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| ApiError::bad_request(format!("missing parameter {name}")))
}

async fn health() -> Json<Health> {
    Json(Health { status: "ok".into() })
}

async fn concepts(State(kg): State<Arc<KnowledgeGraph>>, q: Params) -> Result<Response, ApiError> {
    let q = params(q)?;
    let limit = limit(&q, DEFAULT_CONCEPT_LIMIT)?;
    let prefix = q.get("prefix").map(String::as_str).unwrap_or("");
    Ok(Json(kg.concepts(prefix, limit)).into_response())
}

async fn ego(State(kg): State<Arc<KnowledgeGraph>>, q: Params) -> Result<Response, ApiError> {
    let q = params(q)?;
    let concept = required(&q, "concept")?;
    let limit = limit(&q, DEFAULT_EGO_LIMIT)?;
    let direction: Direction = q
        .get("direction")
        .map(|s| s.trim())
        .unwrap_or("")
        .parse()
        .map_err(|e: biocs::Error| ApiError::bad_request(e.to_string()))?;
    let predicates: BTreeSet<String> = q
        .get("predicates")
        .map(|s| {
            s.split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default();
    Ok(Json(kg.query_ego(concept, &predicates, direction, limit)).into_response())
}

async fn sentence(State(kg): State<Arc<KnowledgeGraph>>, q: Params) -> Result<Response, ApiError> {
    let q = params(q)?;
    let doc_id = required(&q, "doc_id")?;
    let raw = required(&q, "sent_index")?;
    let sent_index: usize = raw
        .parse()
        .map_err(|_| ApiError::bad_request(format!("sent_index must be a non-negative integer, got {raw:?}")))?;
    match kg.sentence(doc_id, sent_index) {
        Some(text) => Ok(Json(SentenceRef {
            doc_id: doc_id.to_string(),
            sent_index,
            text: text.to_string(),
        })
        .into_response()),
        None => Err(ApiError::not_found(format!("no sentence {doc_id}#{sent_index}"))),
    }
}

pub fn router(kg: Arc<KnowledgeGraph>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/concepts", get(concepts))
        .route("/api/ego", get(ego))
        .route("/api/sentence", get(sentence))
        .with_state(kg);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until the process is stopped.
pub async fn serve(kg: KnowledgeGraph, addr: SocketAddr, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    serve_on(listener, kg, static_dir).await
}

pub async fn serve_on(listener: TcpListener, kg: KnowledgeGraph, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    tracing::info!(
        addr = %listener.local_addr()?,
        nodes = kg.nodes.len(),
        edges = kg.edges.len(),
        "serving knowledge graph"
    );
    axum::serve(listener, router(Arc::new(kg), static_dir)).await
}
