//! Typed ontology graph shared by the tabular, text and fused layers.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Category,
    Table,
    Column,
    Instance,
    Entity,
    Document,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    #[serde(rename = "foreign_key")]
    ForeignKey,
    #[serde(rename = "belongs_to")]
    BelongsTo,
    #[serde(rename = "instance_of")]
    InstanceOf,
    #[serde(rename = "category_of")]
    CategoryOf,
    #[serde(rename = "MENTIONS")]
    Mentions,
    #[serde(rename = "RELATES_TO")]
    RelatesTo,
    #[serde(rename = "IS_A")]
    IsA,
    #[serde(rename = "aligned_with")]
    AlignedWith,
}

impl EdgeKind {
    pub fn name(self) -> &'static str {
        match self {
            EdgeKind::ForeignKey => "foreign_key",
            EdgeKind::BelongsTo => "belongs_to",
            EdgeKind::InstanceOf => "instance_of",
            EdgeKind::CategoryOf => "category_of",
            EdgeKind::Mentions => "MENTIONS",
            EdgeKind::RelatesTo => "RELATES_TO",
            EdgeKind::IsA => "IS_A",
            EdgeKind::AlignedWith => "aligned_with",
        }
    }
}

/// Attribute key -> value -> provenance entries that asserted it.
pub type Attributes = BTreeMap<String, BTreeMap<String, BTreeSet<String>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OntoNode {
    pub id: String,
    pub kind: NodeKind,
    pub name: String,
    pub description: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: Attributes,
    /// Set on table nodes once the backbone has been computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backbone: Option<bool>,
}

impl OntoNode {
    pub fn new(id: impl Into<String>, kind: NodeKind, name: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind,
            name: name.into(),
            description: description.into(),
            tags: Vec::new(),
            attributes: BTreeMap::new(),
            backbone: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OntoEdge {
    pub src: String,
    pub dst: String,
    pub kind: EdgeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    /// Sorted, duplicate-free.
    #[serde(default)]
    pub provenance: Vec<String>,
}

impl OntoEdge {
    pub fn new(src: impl Into<String>, dst: impl Into<String>, kind: EdgeKind, provenance: impl Into<String>) -> Self {
        Self { src: src.into(), dst: dst.into(), kind, confidence: None, provenance: vec![provenance.into()] }
    }

    pub fn with_confidence(mut self, c: f64) -> Self {
        self.confidence = Some(c);
        self
    }

    fn key(&self) -> (String, String, EdgeKind) {
        (self.src.clone(), self.dst.clone(), self.kind)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("node id {0} already exists with different content")]
    IdCollision(String),
    #[error("edge {src} -[{kind}]-> {dst} references unknown node {missing}")]
    DanglingEdge { src: String, dst: String, kind: &'static str, missing: String },
    #[error("instance node {0} must have exactly one instance_of edge, found {1}")]
    InstanceLink(String, usize),
    #[error("foreign_key edge {0} -> {1} must join two column nodes")]
    ForeignKeyEndpoints(String, String),
    #[error("malformed graph JSON: {0}")]
    Json(String),
}

/// Node and edge lists in insertion order. Parallel edges with the same
/// `(src, dst, kind)` are merged, keeping the union of their provenance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "GraphRepr", into = "GraphRepr")]
pub struct OntologyGraph {
    nodes: Vec<OntoNode>,
    edges: Vec<OntoEdge>,
    node_ix: HashMap<String, usize>,
    edge_ix: HashMap<(String, String, EdgeKind), usize>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    nodes: Vec<OntoNode>,
    edges: Vec<OntoEdge>,
}

impl From<GraphRepr> for OntologyGraph {
    fn from(r: GraphRepr) -> Self {
        let mut g = OntologyGraph::default();
        for n in r.nodes {
            // later duplicates are dropped here; `from_json` reports them
            if !g.node_ix.contains_key(&n.id) {
                g.node_ix.insert(n.id.clone(), g.nodes.len());
                g.nodes.push(n);
            }
        }
        for e in r.edges {
            g.merge_edge(e);
        }
        g
    }
}

impl From<OntologyGraph> for GraphRepr {
    fn from(g: OntologyGraph) -> Self {
        GraphRepr { nodes: g.nodes, edges: g.edges }
    }
}

impl OntologyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[OntoNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[OntoEdge] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&OntoNode> {
        self.node_ix.get(id).map(|&i| &self.nodes[i])
    }

    pub fn node_mut(&mut self, id: &str) -> Option<&mut OntoNode> {
        self.node_ix.get(id).map(|&i| &mut self.nodes[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.node_ix.contains_key(id)
    }

    pub fn edge(&self, src: &str, dst: &str, kind: EdgeKind) -> Option<&OntoEdge> {
        self.edge_ix.get(&(src.to_string(), dst.to_string(), kind)).map(|&i| &self.edges[i])
    }

    /// Adds a node. Re-adding an identical node is a no-op.
    pub fn add_node(&mut self, node: OntoNode) -> Result<(), ModelError> {
        match self.node_ix.get(&node.id) {
            Some(&i) if self.nodes[i] == node => Ok(()),
            Some(_) => Err(ModelError::IdCollision(node.id)),
            None => {
                self.node_ix.insert(node.id.clone(), self.nodes.len());
                self.nodes.push(node);
                Ok(())
            }
        }
    }

    /// Adds or merges an edge; both endpoints must already exist.
    pub fn add_edge(&mut self, edge: OntoEdge) -> Result<(), ModelError> {
        for end in [&edge.src, &edge.dst] {
            if !self.contains(end) {
                return Err(ModelError::DanglingEdge {
                    src: edge.src.clone(),
                    dst: edge.dst.clone(),
                    kind: edge.kind.name(),
                    missing: end.clone(),
                });
            }
        }
        self.merge_edge(edge);
        Ok(())
    }

    fn merge_edge(&mut self, mut edge: OntoEdge) {
        edge.provenance.sort();
        edge.provenance.dedup();
        match self.edge_ix.get(&edge.key()) {
            Some(&i) => {
                let cur = &mut self.edges[i];
                let mut prov: BTreeSet<String> = cur.provenance.drain(..).collect();
                prov.extend(edge.provenance);
                cur.provenance = prov.into_iter().collect();
                cur.confidence = match (cur.confidence, edge.confidence) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                };
            }
            None => {
                self.edge_ix.insert(edge.key(), self.edges.len());
                self.edges.push(edge);
            }
        }
    }

    /// Ids of nodes adjacent to `id` in either direction, sorted.
    pub fn neighbors(&self, id: &str) -> BTreeSet<&str> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.src == id {
                    Some(e.dst.as_str())
                } else if e.dst == id {
                    Some(e.src.as_str())
                } else {
                    None
                }
            })
            .collect()
    }

    /// Undirected adjacency sets keyed by node id.
    pub fn adjacency(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> =
            self.nodes.iter().map(|n| (n.id.as_str(), BTreeSet::new())).collect();
        for e in &self.edges {
            if e.src != e.dst {
                adj.entry(e.src.as_str()).or_default().insert(e.dst.as_str());
                adj.entry(e.dst.as_str()).or_default().insert(e.src.as_str());
            }
        }
        adj
    }

    pub fn count_nodes(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    pub fn count_edges(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn node_counts(&self) -> BTreeMap<NodeKind, usize> {
        let mut m = BTreeMap::new();
        for n in &self.nodes {
            *m.entry(n.kind).or_insert(0) += 1;
        }
        m
    }

    pub fn edge_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for e in &self.edges {
            *m.entry(e.kind.name()).or_insert(0) += 1;
        }
        m
    }

    /// Structural invariants: no dangling edges, one `instance_of` per
    /// instance, foreign keys between columns.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut instance_links: HashMap<&str, usize> = HashMap::new();
        for e in &self.edges {
            for end in [&e.src, &e.dst] {
                if !self.contains(end) {
                    return Err(ModelError::DanglingEdge {
                        src: e.src.clone(),
                        dst: e.dst.clone(),
                        kind: e.kind.name(),
                        missing: end.clone(),
                    });
                }
            }
            match e.kind {
                EdgeKind::InstanceOf => *instance_links.entry(e.src.as_str()).or_insert(0) += 1,
                EdgeKind::ForeignKey => {
                    let col = |id: &str| self.node(id).is_some_and(|n| n.kind == NodeKind::Column);
                    if !col(&e.src) || !col(&e.dst) {
                        return Err(ModelError::ForeignKeyEndpoints(e.src.clone(), e.dst.clone()));
                    }
                }
                _ => {}
            }
        }
        for n in self.nodes.iter().filter(|n| n.kind == NodeKind::Instance) {
            let k = instance_links.get(n.id.as_str()).copied().unwrap_or(0);
            if k != 1 {
                return Err(ModelError::InstanceLink(n.id.clone(), k));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    /// Parses and validates; duplicate node ids are rejected.
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let repr: GraphRepr = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        let mut seen = BTreeSet::new();
        for n in &repr.nodes {
            if !seen.insert(n.id.clone()) {
                return Err(ModelError::IdCollision(n.id.clone()));
            }
        }
        let g = OntologyGraph::from(repr);
        g.validate()?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> OntologyGraph {
        let mut g = OntologyGraph::new();
        g.add_node(OntoNode::new("t", NodeKind::Table, "orders", "")).unwrap();
        g.add_node(OntoNode::new("i", NodeKind::Instance, "orders row 0", "")).unwrap();
        g.add_edge(OntoEdge::new("i", "t", EdgeKind::InstanceOf, "rows")).unwrap();
        g
    }

    #[test]
    fn parallel_edges_merge_provenance() {
        let mut g = tiny();
        g.add_edge(OntoEdge::new("i", "t", EdgeKind::InstanceOf, "again")).unwrap();
        g.add_edge(OntoEdge::new("i", "t", EdgeKind::InstanceOf, "rows")).unwrap();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edges()[0].provenance, vec!["again", "rows"]);
    }

    #[test]
    fn collisions_and_dangling_edges() {
        let mut g = tiny();
        assert!(g.add_node(OntoNode::new("t", NodeKind::Table, "orders", "")).is_ok());
        assert_eq!(
            g.add_node(OntoNode::new("t", NodeKind::Table, "other", "")),
            Err(ModelError::IdCollision("t".into()))
        );
        assert!(matches!(
            g.add_edge(OntoEdge::new("t", "nope", EdgeKind::BelongsTo, "x")),
            Err(ModelError::DanglingEdge { .. })
        ));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = tiny();
        let back = OntologyGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let text = g.to_json().replace("instance_of", "belongs_to");
        assert_eq!(OntologyGraph::from_json(&text), Err(ModelError::InstanceLink("i".into(), 0)));
        assert!(g.to_json().contains("\"kind\": \"instance_of\""));
    }
}
