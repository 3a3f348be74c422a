//! Training-stage record formats: graph-token alignment records, multi-task
//! instruction records, and curriculum ordering.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{GraphOrigin, TaskSample};
use crate::generate::{derive_seed, rng_from_seed};
use crate::graph::{Graph, NodeId};
use crate::task::Family;

/// Upper bound on tokens per alignment record.
pub const MAX_TOKENS: usize = 8;

/// A graph whose nodes carry a meta-type and a description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypedGraph {
    pub id: String,
    pub node_types: Vec<String>,
    pub node_descriptions: Vec<String>,
    pub type_descriptions: BTreeMap<String, String>,
}

impl TypedGraph {
    /// Types synthetic nodes by structural role: source / sink / interior /
    /// isolated for directed graphs, leaf / interior / isolated otherwise.
    pub fn structural(id: impl Into<String>, g: &Graph) -> Self {
        let mut types = Vec::with_capacity(g.num_nodes());
        let mut descriptions = Vec::with_capacity(g.num_nodes());
        for v in g.nodes() {
            let (ind, outd) = (g.in_adj(v).len(), g.out_adj(v).len());
            let kind = if g.is_directed() {
                match (ind, outd) {
                    (0, 0) => "isolated",
                    (0, _) => "source",
                    (_, 0) => "sink",
                    _ => "interior",
                }
            } else {
                match outd {
                    0 => "isolated",
                    1 => "leaf",
                    _ => "interior",
                }
            };
            types.push(kind.to_string());
            descriptions.push(if g.is_directed() {
                format!("node {} with in-degree {ind} and out-degree {outd}", g.node_labels()[v])
            } else {
                format!("node {} with degree {outd}", g.node_labels()[v])
            });
        }
        let type_descriptions = [
            ("source", "a node with outgoing edges only"),
            ("sink", "a node with incoming edges only"),
            ("interior", "a node with edges on both sides"),
            ("leaf", "a node with exactly one neighbor"),
            ("isolated", "a node without edges"),
        ]
        .into_iter()
        .filter(|(t, _)| types.iter().any(|x| x == t))
        .map(|(t, d)| (t.to_string(), d.to_string()))
        .collect();
        Self {
            id: id.into(),
            node_types: types,
            node_descriptions: descriptions,
            type_descriptions,
        }
    }

    pub fn meta_types(&self) -> Vec<&str> {
        self.type_descriptions.keys().map(String::as_str).collect()
    }

    fn nodes_of(&self, meta: &str) -> Vec<NodeId> {
        (0..self.node_types.len()).filter(|&v| self.node_types[v] == meta).collect()
    }

    /// Text line for one token; shared by emission and lookup.
    pub fn describe(&self, token: &TokenRef) -> Option<String> {
        let desc = self.node_descriptions.get(token.node)?;
        if self.node_types.get(token.node)? != &token.meta_type {
            return None;
        }
        let type_desc = self.type_descriptions.get(&token.meta_type)?;
        Some(format!("{desc}; {}: {type_desc}", token.meta_type))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentKind {
    Intra,
    Inter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenRef {
    pub node: NodeId,
    pub meta_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentRecord {
    pub kind: AlignmentKind,
    pub graph_ref: String,
    pub token_refs: Vec<TokenRef>,
    pub target_text: String,
}

/// Joins token descriptions in token order, one per line.
pub fn target_text(graph: &TypedGraph, tokens: &[TokenRef]) -> Option<String> {
    let lines: Option<Vec<String>> = tokens.iter().map(|t| graph.describe(t)).collect();
    Some(lines?.join("\n"))
}

/// One record per graph. Intra records draw tokens from a single meta-type;
/// inter records from at least two. Graphs with fewer than two meta-types
/// are skipped for inter records.
pub fn emit_alignment_pairs(graphs: &[TypedGraph], kind: AlignmentKind, seed: u64) -> Vec<AlignmentRecord> {
    let mut out = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let mut rng = rng_from_seed(derive_seed(seed, i as u64));
        let metas: Vec<&str> = g.meta_types().into_iter().filter(|m| !g.nodes_of(m).is_empty()).collect();
        let mut tokens: Vec<TokenRef> = Vec::new();
        match kind {
            AlignmentKind::Intra => {
                let Some(meta) = metas.choose(&mut rng) else {
                    log::warn!("graph={} skipped=intra reason=no typed nodes", g.id);
                    continue;
                };
                let pool = g.nodes_of(meta);
                let k = rng.random_range(1..=pool.len().min(MAX_TOKENS));
                for &node in pool.choose_multiple(&mut rng, k) {
                    tokens.push(TokenRef {
                        node,
                        meta_type: meta.to_string(),
                    });
                }
            }
            AlignmentKind::Inter => {
                if metas.len() < 2 {
                    log::warn!("graph={} skipped=inter reason=single meta-type", g.id);
                    continue;
                }
                let m = rng.random_range(2..=metas.len());
                let chosen: Vec<&str> = metas.choose_multiple(&mut rng, m).copied().collect();
                // one guaranteed token per chosen type, then fill
                let mut rest = Vec::new();
                for meta in &chosen {
                    let mut pool = g.nodes_of(meta);
                    pool.shuffle(&mut rng);
                    tokens.push(TokenRef {
                        node: pool[0],
                        meta_type: meta.to_string(),
                    });
                    rest.extend(pool[1..].iter().map(|&node| TokenRef {
                        node,
                        meta_type: meta.to_string(),
                    }));
                }
                rest.shuffle(&mut rng);
                let room = MAX_TOKENS.saturating_sub(tokens.len());
                let extra = rng.random_range(0..=room.min(rest.len()));
                tokens.extend(rest.into_iter().take(extra));
                tokens.shuffle(&mut rng);
            }
        }
        let target_text = target_text(g, &tokens).expect("tokens come from the graph");
        out.push(AlignmentRecord {
            kind,
            graph_ref: g.id.clone(),
            token_refs: tokens,
            target_text,
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextKind {
    ExplicitTopology,
    SchemaEnhanced,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiTaskRecord {
    pub id: String,
    pub family: Family,
    pub context_kind: ContextKind,
    pub instruction: String,
    pub answer: String,
    pub graph_ref: String,
}

/// Family of a concrete sample. Traced tasks count as reasoning only when
/// the sample carries its chain of thought; otherwise their list or path
/// output makes them generative.
pub fn sample_family(s: &TaskSample) -> Family {
    match (s.task.family(), &s.cot) {
        (Family::Reasoning, None) => Family::Generative,
        (f, _) => f,
    }
}

pub fn emit_multitask_records(samples: &[TaskSample]) -> Vec<MultiTaskRecord> {
    samples
        .iter()
        .map(|s| {
            let family = sample_family(s);
            let answer = match (&s.cot, family) {
                (Some(cot), Family::Reasoning) => cot.clone(),
                _ => s.answer_text.clone(),
            };
            MultiTaskRecord {
                id: s.id.clone(),
                family,
                context_kind: match s.origin {
                    GraphOrigin::Synthetic => ContextKind::ExplicitTopology,
                    GraphOrigin::Ontology => ContextKind::SchemaEnhanced,
                },
                instruction: s.instruction.clone(),
                answer,
                graph_ref: s.id.clone(),
            }
        })
        .collect()
}

/// Stable sort by (tier, family, id): simple before medium before difficult,
/// predictive before reasoning before generative within a tier.
pub fn curriculum_order(mut samples: Vec<TaskSample>) -> Vec<TaskSample> {
    samples.sort_by(|a, b| {
        (a.difficulty, sample_family(a), &a.id).cmp(&(b.difficulty, sample_family(b), &b.id))
    });
    samples
}
