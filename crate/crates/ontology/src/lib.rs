//! Ontology construction from relational tables and free text, plus the
//! fusion of both into one graph.

pub mod fusion;
pub mod model;
pub mod pipeline;
pub mod remote;
pub mod structured;
pub mod text;
pub mod unstructured;

pub use model::{EdgeKind, NodeKind, OntoEdge, OntoNode, OntologyGraph};
