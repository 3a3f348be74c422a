//! Cross-source alignment, graph fusion and link prediction.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use ontokit_core::features::{cosine, TextEncoder};

use crate::model::{EdgeKind, ModelError, NodeKind, OntoEdge, OntologyGraph};
use crate::text::{content_tokens, sorted_jaccard};

pub const DEFAULT_TAG_NEIGHBORS: usize = 5;
pub const DEFAULT_ALIGN_THRESHOLD: f64 = 0.5;

fn is_text_node(kind: NodeKind) -> bool {
    matches!(kind, NodeKind::Entity | NodeKind::Document)
}

/// Tags for every entity and document node: tokens of the node name, of its
/// attribute values, and of the names of its `k` best-connected neighboring
/// entities (by degree, then id). Lowercased, stopword-free, deduplicated.
pub fn tag_nodes(g: &OntologyGraph, k: usize) -> BTreeMap<String, Vec<String>> {
    let adj = g.adjacency();
    let degree = |id: &str| adj.get(id).map_or(0, BTreeSet::len);
    g.nodes()
        .iter()
        .filter(|n| is_text_node(n.kind))
        .map(|n| {
            let mut words = vec![n.name.clone()];
            words.extend(n.attributes.values().flat_map(|vals| vals.keys().cloned()));
            let mut neigh: Vec<&str> = adj[n.id.as_str()]
                .iter()
                .copied()
                .filter(|m| g.node(m).is_some_and(|x| x.kind == NodeKind::Entity))
                .collect();
            neigh.sort_by(|a, b| degree(b).cmp(&degree(a)).then(a.cmp(b)));
            words.extend(neigh.into_iter().take(k).map(|m| g.node(m).expect("adjacent node exists").name.clone()));
            (n.id.clone(), content_tokens(&words.join(" ")))
        })
        .collect()
}

/// Copy of `g` with the given tags written onto its nodes.
pub fn apply_tags(g: &OntologyGraph, tags: &BTreeMap<String, Vec<String>>) -> OntologyGraph {
    let mut out = g.clone();
    for (id, t) in tags {
        if let Some(n) = out.node_mut(id) {
            n.tags = t.clone();
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignTargets {
    #[default]
    Instances,
    InstancesAndTables,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignConfig {
    pub threshold: f64,
    pub targets: AlignTargets,
    /// Blend the tag score 50/50 with embedding cosine.
    pub embedding_blend: bool,
    pub tag_neighbors: usize,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_ALIGN_THRESHOLD,
            targets: AlignTargets::Instances,
            embedding_blend: false,
            tag_neighbors: DEFAULT_TAG_NEIGHBORS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub text_node: String,
    pub structured_node: String,
    pub score: f64,
    /// Shared tokens.
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionMapping {
    pub pairs: Vec<AlignedPair>,
    pub threshold: f64,
}

impl FusionMapping {
    pub fn empty(threshold: f64) -> Self {
        Self { pairs: Vec::new(), threshold }
    }
}

/// Maps each tagged text node to at most one structured node: the best
/// Jaccard match between its tags and the structured node's description
/// tokens, ties going to the smaller id, kept when at or above threshold.
pub fn align(
    gu: &OntologyGraph,
    gs: &OntologyGraph,
    cfg: &AlignConfig,
    encoder: Option<&dyn TextEncoder>,
) -> FusionMapping {
    let targets: Vec<(&str, Vec<String>, &str)> = gs
        .nodes()
        .iter()
        .filter(|n| {
            n.kind == NodeKind::Instance || (cfg.targets == AlignTargets::InstancesAndTables && n.kind == NodeKind::Table)
        })
        .map(|n| (n.id.as_str(), content_tokens(&n.description), n.description.as_str()))
        .collect();
    let target_vecs: Option<Vec<Vec<f64>>> = match (cfg.embedding_blend, encoder) {
        (true, Some(enc)) => Some(targets.par_iter().map(|(_, _, d)| enc.encode(d)).collect()),
        _ => None,
    };

    let texts: Vec<_> = gu.nodes().iter().filter(|n| is_text_node(n.kind) && !n.tags.is_empty()).collect();
    let pairs: Vec<Option<AlignedPair>> = texts
        .par_iter()
        .map(|u| {
            let mut tags = u.tags.clone();
            tags.sort();
            tags.dedup();
            let u_vec = target_vecs.as_ref().and(encoder).map(|enc| enc.encode(&tags.join(" ")));
            let mut best: Option<(f64, usize)> = None;
            for (i, (_, toks, _)) in targets.iter().enumerate() {
                let mut score = sorted_jaccard(&tags, toks);
                if let (Some(uv), Some(tv)) = (&u_vec, &target_vecs) {
                    score = 0.5 * score + 0.5 * cosine(uv, &tv[i]);
                }
                let better = match best {
                    None => true,
                    Some((s, j)) => score > s || (score == s && targets[i].0 < targets[j].0),
                };
                if better {
                    best = Some((score, i));
                }
            }
            let (score, i) = best?;
            (score >= cfg.threshold).then(|| {
                let evidence = tags.iter().filter(|t| targets[i].1.binary_search(t).is_ok()).cloned().collect();
                AlignedPair { text_node: u.id.clone(), structured_node: targets[i].0.to_string(), score, evidence }
            })
        })
        .collect();
    FusionMapping { pairs: pairs.into_iter().flatten().collect(), threshold: cfg.threshold }
}

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("node id collision between sources: {0}")]
    IdCollision(String),
    #[error("mapping references unknown node {0}")]
    UnknownNode(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Union of both graphs plus one `aligned_with` edge per mapped pair.
/// Neither input is otherwise changed.
pub fn fuse(gs: &OntologyGraph, gu: &OntologyGraph, mapping: &FusionMapping) -> Result<OntologyGraph, FusionError> {
    let mut g = gs.clone();
    for n in gu.nodes() {
        g.add_node(n.clone()).map_err(|e| match e {
            ModelError::IdCollision(id) => FusionError::IdCollision(id),
            other => FusionError::Model(other),
        })?;
    }
    for e in gu.edges() {
        g.add_edge(e.clone())?;
    }
    for p in &mapping.pairs {
        for id in [&p.text_node, &p.structured_node] {
            if !g.contains(id) {
                return Err(FusionError::UnknownNode(id.clone()));
            }
        }
        g.add_edge(
            OntoEdge::new(&p.text_node, &p.structured_node, EdgeKind::AlignedWith, "alignment").with_confidence(p.score),
        )?;
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedLink {
    pub src: String,
    pub dst: String,
    pub score: f64,
    /// Always true; predictions are never written into the graph.
    pub predicted: bool,
}

#[derive(Debug, Error)]
#[error("link predictor {predictor}: {message}")]
pub struct PredictError {
    pub predictor: String,
    pub message: String,
}

pub trait LinkPredictor: Sync {
    fn id(&self) -> String;
    /// One score per pair, in order.
    fn score_pairs(&self, g: &OntologyGraph, pairs: &[(String, String)]) -> Result<Vec<f64>, PredictError>;
}

/// Jaccard similarity of the two nodes' undirected neighbor sets.
#[derive(Debug, Clone, Copy, Default)]
pub struct SharedNeighborPredictor;

impl LinkPredictor for SharedNeighborPredictor {
    fn id(&self) -> String {
        "shared-neighbors".into()
    }

    fn score_pairs(&self, g: &OntologyGraph, pairs: &[(String, String)]) -> Result<Vec<f64>, PredictError> {
        let adj = g.adjacency();
        Ok(pairs
            .par_iter()
            .map(|(a, b)| {
                let (na, nb) = (&adj[a.as_str()], &adj[b.as_str()]);
                let inter = na.intersection(nb).count();
                let union = na.len() + nb.len() - inter;
                if union == 0 {
                    0.0
                } else {
                    inter as f64 / union as f64
                }
            })
            .collect())
    }
}

/// Non-adjacent pairs of same-kind nodes, ordered by id.
pub fn candidate_pairs(g: &OntologyGraph) -> Vec<(String, String)> {
    let adj = g.adjacency();
    let mut by_kind: BTreeMap<NodeKind, Vec<&str>> = BTreeMap::new();
    for n in g.nodes() {
        by_kind.entry(n.kind).or_default().push(n.id.as_str());
    }
    let mut out = Vec::new();
    for ids in by_kind.values_mut() {
        ids.sort_unstable();
        for (i, a) in ids.iter().enumerate() {
            for b in &ids[i + 1..] {
                if !adj[a].contains(b) {
                    out.push((a.to_string(), b.to_string()));
                }
            }
        }
    }
    out
}

/// The `budget` highest-scoring candidate links with a positive score,
/// ties broken by ids. The graph is left untouched.
pub fn predict_links(
    g: &OntologyGraph,
    predictor: &dyn LinkPredictor,
    budget: usize,
) -> Result<Vec<PredictedLink>, PredictError> {
    let pairs = candidate_pairs(g);
    let scores = predictor.score_pairs(g, &pairs)?;
    if scores.len() != pairs.len() {
        return Err(PredictError {
            predictor: predictor.id(),
            message: format!("returned {} scores for {} pairs", scores.len(), pairs.len()),
        });
    }
    let mut links: Vec<PredictedLink> = pairs
        .into_iter()
        .zip(scores)
        .filter(|(_, s)| *s > 0.0)
        .map(|((src, dst), score)| PredictedLink { src, dst, score, predicted: true })
        .collect();
    links.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| (&a.src, &a.dst).cmp(&(&b.src, &b.dst))));
    links.truncate(budget);
    Ok(links)
}
