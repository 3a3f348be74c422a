//! End-to-end ontology build over a table directory and a document
//! directory. Either input may be absent.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use ontokit_core::features::TextEncoder;

use crate::fusion::{align, apply_tags, fuse, tag_nodes, AlignConfig, FusionError, FusionMapping};
use crate::model::OntologyGraph;
use crate::structured::{build_structured, CsvDirSource, SourceError, StructuredBuild, StructuredConfig, StructuredError, TokenKeyDetector};
use crate::unstructured::{build_unstructured, Document, Extractor, TextBuild, TextConfig, TextGraphError};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OntologyConfig {
    pub structured: StructuredConfig,
    pub text: TextConfig,
    pub align: AlignConfig,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("no input: give a table directory, a document directory, or both")]
    NoInput,
    #[error("cannot read documents in {path}: {message}")]
    Documents { path: String, message: String },
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Structured(#[from] StructuredError),
    #[error(transparent)]
    Text(#[from] TextGraphError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
}

/// Every `*.txt` file in `dir`, sorted by name; the id is the file stem.
pub fn load_documents(dir: &Path) -> Result<Vec<Document>, PipelineError> {
    let fail = |message: String| PipelineError::Documents { path: dir.display().to_string(), message };
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| fail(e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).map_err(|e| fail(format!("{}: {e}", p.display())))?;
            let id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(Document { id, text })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OntologyBuild {
    pub structured: Option<StructuredBuild>,
    /// The text graph with alignment tags applied.
    pub text: Option<TextBuild>,
    pub mapping: Option<FusionMapping>,
    pub fused: Option<OntologyGraph>,
}

impl OntologyBuild {
    /// The most complete graph produced.
    pub fn final_graph(&self) -> Option<&OntologyGraph> {
        self.fused
            .as_ref()
            .or(self.structured.as_ref().map(|s| &s.graph))
            .or(self.text.as_ref().map(|t| &t.graph))
    }
}

pub fn build_ontology(
    tables: Option<&Path>,
    docs: Option<&Path>,
    cfg: &OntologyConfig,
    extractor: &dyn Extractor,
    encoder: &dyn TextEncoder,
) -> Result<OntologyBuild, PipelineError> {
    if tables.is_none() && docs.is_none() {
        return Err(PipelineError::NoInput);
    }
    let structured = match tables {
        Some(dir) => {
            let source = CsvDirSource::open(dir)?;
            Some(build_structured(&source, &TokenKeyDetector::default(), &cfg.structured)?)
        }
        None => None,
    };
    let text = match docs {
        Some(dir) => {
            let documents = load_documents(dir)?;
            let mut t = build_unstructured(&documents, &cfg.text, extractor, encoder)?;
            t.graph = apply_tags(&t.graph, &tag_nodes(&t.graph, cfg.align.tag_neighbors));
            Some(t)
        }
        None => None,
    };
    let (mapping, fused) = match (&structured, &text) {
        (Some(s), Some(t)) => {
            let m = align(&t.graph, &s.graph, &cfg.align, Some(encoder));
            let f = fuse(&s.graph, &t.graph, &m)?;
            (Some(m), Some(f))
        }
        _ => {
            log::info!("event=fusion_skipped reason=single_source");
            (None, None)
        }
    };
    Ok(OntologyBuild { structured, text, mapping, fused })
}
