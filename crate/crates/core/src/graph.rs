//! Immutable labeled graph shared by every task, trace and dataset record.
//!
//! Node ids are always `0..num_nodes`. Undirected edges are stored with
//! `src < dst`; self-loops and parallel edges are rejected at construction.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type NodeId = usize;

/// Edge weights are positive integers; unweighted graphs use 1 everywhere.
pub type Weight = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: Weight,
}

impl Edge {
    pub fn new(src: NodeId, dst: NodeId, weight: Weight) -> Self {
        Self { src, dst, weight }
    }

    pub fn unit(src: NodeId, dst: NodeId) -> Self {
        Self::new(src, dst, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge_index: node id {id} out of range for {num_nodes} nodes")]
    NodeOutOfRange { id: NodeId, num_nodes: usize },
    #[error("edge_index: self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("edge_index: duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge_weight: edge ({0}, {1}) has non-positive weight")]
    NonPositiveWeight(NodeId, NodeId),
    #[error("edge_weight: unweighted graph has weight {2} on edge ({0}, {1})")]
    UnweightedWithWeight(NodeId, NodeId, Weight),
    #[error("node_labels: expected {expected} labels, found {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("x: expected {expected} feature rows, found {found}")]
    FeatureRows { expected: usize, found: usize },
    #[error("x: ragged feature matrix (row {row} has {len} columns, expected {expected})")]
    RaggedFeatures { row: usize, len: usize, expected: usize },
    #[error("edge_index: expected two rows of equal length")]
    EdgeIndexShape,
    #[error("edge_weight: expected {expected} weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("malformed graph text: {0}")]
    Malformed(String),
}

/// Adjacency entry: neighbor id and the weight of the connecting edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Adj {
    pub node: NodeId,
    pub weight: Weight,
}

#[derive(Debug, Clone)]
pub struct Graph {
    directed: bool,
    weighted: bool,
    num_nodes: usize,
    edges: Vec<Edge>,
    node_labels: Vec<String>,
    node_features: Option<Vec<Vec<f64>>>,
    // Derived; sorted by neighbor id. For undirected graphs `out_adj == in_adj`.
    out_adj: Vec<Vec<Adj>>,
    in_adj: Vec<Vec<Adj>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.directed == other.directed
            && self.weighted == other.weighted
            && self.num_nodes == other.num_nodes
            && self.edges == other.edges
            && self.node_labels == other.node_labels
            && self.node_features == other.node_features
    }
}

impl Graph {
    /// Builds a graph with decimal-id labels and no features.
    pub fn new(
        directed: bool,
        weighted: bool,
        num_nodes: usize,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        let labels = (0..num_nodes).map(|i| i.to_string()).collect();
        Self::with_labels(directed, weighted, num_nodes, edges, labels)
    }

    pub fn with_labels(
        directed: bool,
        weighted: bool,
        num_nodes: usize,
        mut edges: Vec<Edge>,
        node_labels: Vec<String>,
    ) -> Result<Self, GraphError> {
        if node_labels.len() != num_nodes {
            return Err(GraphError::LabelCount {
                expected: num_nodes,
                found: node_labels.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for e in edges.iter_mut() {
            for id in [e.src, e.dst] {
                if id >= num_nodes {
                    return Err(GraphError::NodeOutOfRange { id, num_nodes });
                }
            }
            if e.src == e.dst {
                return Err(GraphError::SelfLoop(e.src));
            }
            if e.weight == 0 {
                return Err(GraphError::NonPositiveWeight(e.src, e.dst));
            }
            if !weighted && e.weight != 1 {
                return Err(GraphError::UnweightedWithWeight(e.src, e.dst, e.weight));
            }
            if !directed && e.src > e.dst {
                std::mem::swap(&mut e.src, &mut e.dst);
            }
            if !seen.insert((e.src, e.dst)) {
                return Err(GraphError::DuplicateEdge(e.src, e.dst));
            }
        }

        let mut out_adj = vec![Vec::new(); num_nodes];
        let mut in_adj = vec![Vec::new(); num_nodes];
        for e in &edges {
            out_adj[e.src].push(Adj { node: e.dst, weight: e.weight });
            in_adj[e.dst].push(Adj { node: e.src, weight: e.weight });
            if !directed {
                out_adj[e.dst].push(Adj { node: e.src, weight: e.weight });
                in_adj[e.src].push(Adj { node: e.dst, weight: e.weight });
            }
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_by_key(|a| a.node);
        }

        Ok(Self {
            directed,
            weighted,
            num_nodes,
            edges,
            node_labels,
            node_features: None,
            out_adj,
            in_adj,
        })
    }

    /// Attaches a feature matrix, one row per node.
    pub fn with_features(mut self, features: Vec<Vec<f64>>) -> Result<Self, GraphError> {
        if features.len() != self.num_nodes {
            return Err(GraphError::FeatureRows {
                expected: self.num_nodes,
                found: features.len(),
            });
        }
        if let Some(width) = features.first().map(Vec::len) {
            if let Some((row, r)) = features.iter().enumerate().find(|(_, r)| r.len() != width) {
                return Err(GraphError::RaggedFeatures {
                    row,
                    len: r.len(),
                    expected: width,
                });
            }
        }
        self.node_features = Some(features);
        Ok(self)
    }

    pub fn without_features(mut self) -> Self {
        self.node_features = None;
        self
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_labels(&self) -> &[String] {
        &self.node_labels
    }

    pub fn node_features(&self) -> Option<&[Vec<f64>]> {
        self.node_features.as_deref()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.num_nodes
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v < self.num_nodes
    }

    pub fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                id: v,
                num_nodes: self.num_nodes,
            })
        }
    }

    /// Out-neighbors (all neighbors when undirected), ascending by id.
    pub fn out_adj(&self, v: NodeId) -> &[Adj] {
        &self.out_adj[v]
    }

    /// In-neighbors (all neighbors when undirected), ascending by id.
    pub fn in_adj(&self, v: NodeId) -> &[Adj] {
        &self.in_adj[v]
    }

    /// Ascending neighbor ids; out-neighbors for directed graphs.
    pub fn neighbors_ordered(&self, v: NodeId) -> Result<Vec<NodeId>, GraphError> {
        self.check_node(v)?;
        Ok(self.out_adj[v].iter().map(|a| a.node).collect())
    }

    /// Neighbors ignoring direction, ascending and deduplicated.
    pub fn undirected_neighbors(&self, v: NodeId) -> Vec<NodeId> {
        if !self.directed {
            return self.out_adj[v].iter().map(|a| a.node).collect();
        }
        let mut all: Vec<NodeId> = self.out_adj[v]
            .iter()
            .chain(self.in_adj[v].iter())
            .map(|a| a.node)
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    /// Weight of the edge `u -> v` (either orientation when undirected).
    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<Weight> {
        if u >= self.num_nodes || v >= self.num_nodes {
            return None;
        }
        self.out_adj[u]
            .binary_search_by_key(&v, |a| a.node)
            .ok()
            .map(|i| self.out_adj[u][i].weight)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_weight(u, v).is_some()
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Serializes to the canonical JSON text format.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let record: GraphRecord =
            serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        record.try_into()
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = if self.directed { "->" } else { "-" };
        write!(
            f,
            "{} graph with {} nodes:",
            if self.directed { "directed" } else { "undirected" },
            self.num_nodes
        )?;
        for e in &self.edges {
            if self.weighted {
                write!(f, " {}{}{} (w={})", e.src, arrow, e.dst, e.weight)?;
            } else {
                write!(f, " {}{}{}", e.src, arrow, e.dst)?;
            }
        }
        Ok(())
    }
}

/// Wire form of a [`Graph`]. Fields are declared alphabetically so the
/// serialized key order is stable.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphRecord {
    pub directed: bool,
    pub edge_index: Vec<Vec<NodeId>>,
    pub edge_weight: Vec<Weight>,
    pub node_labels: Vec<String>,
    pub num_nodes: usize,
    pub weighted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Vec<f64>>>,
}

impl From<&Graph> for GraphRecord {
    fn from(g: &Graph) -> Self {
        let (src, dst) = g.edges.iter().map(|e| (e.src, e.dst)).unzip();
        Self {
            directed: g.directed,
            edge_index: vec![src, dst],
            edge_weight: g.edges.iter().map(|e| e.weight).collect(),
            node_labels: g.node_labels.clone(),
            num_nodes: g.num_nodes,
            weighted: g.weighted,
            x: g.node_features.clone(),
        }
    }
}

impl TryFrom<GraphRecord> for Graph {
    type Error = GraphError;

    fn try_from(r: GraphRecord) -> Result<Self, GraphError> {
        let [src, dst] = <[Vec<NodeId>; 2]>::try_from(r.edge_index)
            .map_err(|_| GraphError::EdgeIndexShape)?;
        if src.len() != dst.len() {
            return Err(GraphError::EdgeIndexShape);
        }
        if r.edge_weight.len() != src.len() {
            return Err(GraphError::WeightCount {
                expected: src.len(),
                found: r.edge_weight.len(),
            });
        }
        let edges = src
            .into_iter()
            .zip(dst)
            .zip(r.edge_weight)
            .map(|((s, d), w)| Edge::new(s, d, w))
            .collect();
        let g = Graph::with_labels(r.directed, r.weighted, r.num_nodes, edges, r.node_labels)?;
        match r.x {
            Some(x) => g.with_features(x),
            None => Ok(g),
        }
    }
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GraphRecord::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let record = GraphRecord::deserialize(deserializer)?;
        Graph::try_from(record).map_err(serde::de::Error::custom)
    }
}
