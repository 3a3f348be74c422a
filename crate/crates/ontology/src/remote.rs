//! HTTP clients for remote extractors, embedders and link predictors.
//!
//! All three speak JSON over POST:
//!
//! * extractor: `{"text", "doc_id", "chunk_index", "model"?, "temperature"}`
//!   answered by `{"mentions": [{"text", "attributes"}], "relations": [{"head", "kind", "tail"}]}`;
//! * embedder: `{"text"}` answered by `{"embedding": [f64...]}`;
//! * link predictor: `{"graph", "pairs": [[src, dst]...]}` answered by `{"scores": [f64...]}`.

use std::time::Duration;

use reqwest::blocking::Client;
use serde::{Deserialize, Serialize};

use ontokit_core::features::TextEncoder;

use crate::fusion::{LinkPredictor, PredictError};
use crate::model::OntologyGraph;
use crate::unstructured::{DocumentChunk, ExtractError, Extraction, Extractor};

pub const EXTRACTOR_URL_ENV: &str = "ONTOKIT_EXTRACTOR_URL";
pub const EMBEDDER_URL_ENV: &str = "ONTOKIT_EMBEDDER_URL";
pub const DEFAULT_TEMPERATURE: f64 = 0.1;

fn client(timeout: Duration) -> Client {
    Client::builder().timeout(timeout).build().expect("HTTP client builds without TLS configuration")
}

fn post<Req: Serialize, Resp: for<'de> Deserialize<'de>>(c: &Client, url: &str, body: &Req) -> Result<Resp, String> {
    let resp = c.post(url).json(body).send().map_err(|e| e.to_string())?;
    let status = resp.status();
    if !status.is_success() {
        return Err(format!("HTTP {status}"));
    }
    resp.json().map_err(|e| format!("malformed response: {e}"))
}

pub struct RemoteExtractor {
    url: String,
    model: Option<String>,
    temperature: f64,
    client: Client,
}

impl RemoteExtractor {
    pub fn new(url: impl Into<String>, model: Option<String>) -> Self {
        Self { url: url.into(), model, temperature: DEFAULT_TEMPERATURE, client: client(Duration::from_secs(120)) }
    }
}

#[derive(Serialize)]
struct ExtractRequest<'a> {
    text: &'a str,
    doc_id: &'a str,
    chunk_index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a str>,
    temperature: f64,
}

impl Extractor for RemoteExtractor {
    fn id(&self) -> String {
        format!("remote:{}@t={}", self.model.as_deref().unwrap_or("default"), self.temperature)
    }

    fn extract(&self, chunk: &DocumentChunk) -> Result<Extraction, ExtractError> {
        let req = ExtractRequest {
            text: &chunk.text,
            doc_id: &chunk.doc_id,
            chunk_index: chunk.chunk_index,
            model: self.model.as_deref(),
            temperature: self.temperature,
        };
        post(&self.client, &self.url, &req).map_err(|message| ExtractError { extractor: self.id(), message })
    }
}

pub struct RemoteEncoder {
    url: String,
    dim: usize,
    client: Client,
}

impl RemoteEncoder {
    pub fn new(url: impl Into<String>, dim: usize) -> Self {
        Self { url: url.into(), dim, client: client(Duration::from_secs(60)) }
    }
}

#[derive(Deserialize)]
struct EmbedResponse {
    embedding: Vec<f64>,
}

impl TextEncoder for RemoteEncoder {
    fn id(&self) -> String {
        format!("remote-embedder-{}", self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    /// Failures are logged and give a zero vector, which never matches.
    fn encode(&self, text: &str) -> Vec<f64> {
        match post::<_, EmbedResponse>(&self.client, &self.url, &serde_json::json!({ "text": text })) {
            Ok(r) if r.embedding.len() == self.dim => r.embedding,
            Ok(r) => {
                log::warn!("event=embedding_dimension expected={} got={}", self.dim, r.embedding.len());
                vec![0.0; self.dim]
            }
            Err(e) => {
                log::warn!("event=embedding_failed error=\"{e}\"");
                vec![0.0; self.dim]
            }
        }
    }
}

pub struct RemoteLinkPredictor {
    url: String,
    client: Client,
}

impl RemoteLinkPredictor {
    pub fn new(url: impl Into<String>) -> Self {
        Self { url: url.into(), client: client(Duration::from_secs(300)) }
    }
}

#[derive(Deserialize)]
struct ScoreResponse {
    scores: Vec<f64>,
}

impl LinkPredictor for RemoteLinkPredictor {
    fn id(&self) -> String {
        format!("remote:{}", self.url)
    }

    fn score_pairs(&self, g: &OntologyGraph, pairs: &[(String, String)]) -> Result<Vec<f64>, PredictError> {
        let body = serde_json::json!({ "graph": g, "pairs": pairs });
        post::<_, ScoreResponse>(&self.client, &self.url, &body)
            .map(|r| r.scores)
            .map_err(|message| PredictError { predictor: self.id(), message })
    }
}
