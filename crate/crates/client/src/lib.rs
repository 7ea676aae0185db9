//! Thin async client for the `/api/*` endpoints served by `biocs-service`.

use biocs::api::{ErrorBody, Health};
use biocs::kg::{CenterNode, Direction, EgoGraph, SentenceRef};
use serde::de::DeserializeOwned;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("request failed: {0}")]
    Http(#[from] reqwest::Error),
    #[error("server returned {status}: {message}")]
    Api { status: u16, message: String },
}

pub type Result<T> = std::result::Result<T, ClientError>;

#[derive(Debug, Clone)]
pub struct EgoQuery {
    pub concept: String,
    pub predicates: Vec<String>,
    pub direction: Direction,
    pub limit: Option<usize>,
}

impl EgoQuery {
    pub fn new(concept: impl Into<String>) -> Self {
        EgoQuery {
            concept: concept.into(),
            predicates: Vec::new(),
            direction: Direction::Both,
            limit: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base_url` is the server root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base_url: impl Into<String>) -> Self {
        Client {
            base: base_url.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    async fn get<T: DeserializeOwned>(&self, path: &str, query: &[(&str, String)]) -> Result<T> {
        let resp = self
            .http
            .get(format!("{}{path}", self.base))
            .query(query)
            .send()
            .await?;
        let status = resp.status();
        if status.is_success() {
            return Ok(resp.json().await?);
        }
        let message = match resp.json::<ErrorBody>().await {
            Ok(body) => body.error,
            Err(_) => status.canonical_reason().unwrap_or("error").to_string(),
        };
        Err(ClientError::Api {
            status: status.as_u16(),
            message,
        })
    }

    pub async fn health(&self) -> Result<Health> {
        self.get("/api/health", &[]).await
    }

    pub async fn concepts(&self, prefix: &str, limit: Option<usize>) -> Result<Vec<CenterNode>> {
        let mut q = vec![("prefix", prefix.to_string())];
        if let Some(l) = limit {
            q.push(("limit", l.to_string()));
        }
        self.get("/api/concepts", &q).await
    }

    pub async fn ego(&self, query: &EgoQuery) -> Result<EgoGraph> {
        let mut q = vec![
            ("concept", query.concept.clone()),
            ("direction", query.direction.to_string()),
        ];
        if !query.predicates.is_empty() {
            q.push(("predicates", query.predicates.join(",")));
        }
        if let Some(l) = query.limit {
            q.push(("limit", l.to_string()));
        }
        self.get("/api/ego", &q).await
    }

    pub async fn sentence(&self, doc_id: &str, sent_index: usize) -> Result<SentenceRef> {
        self.get(
            "/api/sentence",
            &[("doc_id", doc_id.to_string()), ("sent_index", sent_index.to_string())],
        )
        .await
    }
}
