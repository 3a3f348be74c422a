//! Graph-reasoning benchmark toolkit: graph model, seeded generation,
//! task oracles, recorded reasoning traces, dataset assembly and grading.

pub mod algo;
pub mod answer;
pub mod dataset;
pub mod generate;
pub mod grader;
pub mod features;
pub mod graph;
pub mod instance;
pub mod records;
pub mod task;
pub mod trace;

pub use answer::Answer;
pub use graph::{Edge, Graph, GraphError, NodeId, Weight};
pub use task::{Category, Difficulty, Family, TaskKind};
