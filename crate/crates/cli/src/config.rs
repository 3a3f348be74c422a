//! Run configuration: defaults, then an optional JSON file, then
//! environment variables, then command-line flags.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use ontokit_core::dataset::BuildConfig;
use ontokit_core::features::DEFAULT_DIM;
use ontokit_core::grader::GradeOptions;
use ontokit_ontology::pipeline::OntologyConfig;
use ontokit_ontology::remote::{EMBEDDER_URL_ENV, EXTRACTOR_URL_ENV};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Endpoints {
    pub extractor_url: Option<String>,
    pub extractor_model: Option<String>,
    pub embedder_url: Option<String>,
    pub embedder_dim: usize,
    pub predictor_url: Option<String>,
}

impl Default for Endpoints {
    fn default() -> Self {
        Self { extractor_url: None, extractor_model: None, embedder_url: None, embedder_dim: DEFAULT_DIM, predictor_url: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed shared by every stage.
    pub seed: u64,
    pub workers: Option<usize>,
    /// Split sizes, task mix and audit rate. Its own seed field is replaced
    /// by `seed`.
    pub dataset: BuildConfig,
    pub grading: GradeOptions,
    /// Relation weights, thresholds, chunking and alignment settings.
    pub ontology: OntologyConfig,
    pub endpoints: Endpoints,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::User(format!("config {}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::User(format!("config {}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        if let Ok(url) = std::env::var(EXTRACTOR_URL_ENV) {
            if !url.is_empty() {
                cfg.endpoints.extractor_url = Some(url);
            }
        }
        if let Ok(url) = std::env::var(EMBEDDER_URL_ENV) {
            if !url.is_empty() {
                cfg.endpoints.embedder_url = Some(url);
            }
        }
        Ok(cfg)
    }

    /// Copies the master seed into every stage and checks the numeric
    /// settings.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        self.dataset.master_seed = self.seed;
        self.ontology.structured.discovery.seed = self.seed;
        self.ontology.structured.layer.seed = self.seed;
        if self.workers == Some(0) {
            return Err(CliError::User("workers must be at least 1".into()));
        }
        self.ontology.structured.discovery.weights.validate().map_err(|e| CliError::User(e.to_string()))?;
        let t = &self.ontology.text.disambiguation.thresholds;
        for (name, v) in [("edit", t.edit), ("containment", t.containment), ("semantic", t.semantic), ("alignment", self.ontology.align.threshold)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(CliError::User(format!("{name} threshold must lie in [0, 1], got {v}")));
            }
        }
        if self.ontology.text.chunk_overlap >= self.ontology.text.chunk_size {
            return Err(CliError::User("chunk_overlap must be smaller than chunk_size".into()));
        }
        if self.ontology.structured.layer.core_k == 0 {
            return Err(CliError::User("core_k must be at least 1".into()));
        }
        Ok(self)
    }
}
