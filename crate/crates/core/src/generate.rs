//! Seeded random graph generation.
//!
//! A random spanning tree is planted first when connectivity is required,
//! then the remaining edge budget is drawn uniformly without replacement
//! from the non-edges. DAGs orient every edge along a random permutation.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, Graph, NodeId, Weight};

/// Benchmark graph bounds: nodes and edges per generated graph.
pub const BENCH_NODES: Range = Range::new(5, 50);
pub const BENCH_EDGES: Range = Range::new(5, 200);

/// Inclusive integer interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Range {
    pub min: usize,
    pub max: usize,
}

impl Range {
    pub const fn new(min: usize, max: usize) -> Self {
        Self { min, max }
    }

    pub const fn exactly(n: usize) -> Self {
        Self { min: n, max: n }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.min <= v && v <= self.max
    }

    pub fn within(&self, outer: &Range) -> bool {
        outer.min <= self.min && self.max <= outer.max
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub node_range: Range,
    pub edge_range: Range,
    pub directed: bool,
    pub weighted: bool,
    pub weight_range: Range,
    pub connectivity_required: bool,
    pub acyclic_required: bool,
}

impl Default for GraphSpec {
    fn default() -> Self {
        Self {
            node_range: BENCH_NODES,
            edge_range: BENCH_EDGES,
            directed: false,
            weighted: false,
            weight_range: Range::new(1, 10),
            connectivity_required: false,
            acyclic_required: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("infeasible spec: {0}")]
    Infeasible(String),
}

impl GraphSpec {
    pub fn nodes(mut self, min: usize, max: usize) -> Self {
        self.node_range = Range::new(min, max);
        self
    }

    pub fn edges(mut self, min: usize, max: usize) -> Self {
        self.edge_range = Range::new(min, max);
        self
    }

    pub fn directed(mut self, directed: bool) -> Self {
        self.directed = directed;
        self
    }

    pub fn weighted(mut self, weighted: bool) -> Self {
        self.weighted = weighted;
        self
    }

    pub fn connected(mut self, required: bool) -> Self {
        self.connectivity_required = required;
        self
    }

    pub fn acyclic(mut self, required: bool) -> Self {
        self.acyclic_required = required;
        self
    }

    /// Largest edge count a simple graph on `n` nodes admits under this spec.
    pub fn max_edges(&self, n: usize) -> usize {
        let pairs = n * n.saturating_sub(1) / 2;
        if self.directed && !self.acyclic_required {
            2 * pairs
        } else {
            pairs
        }
    }

    fn min_edges(&self, n: usize) -> usize {
        if self.connectivity_required {
            self.edge_range.min.max(n.saturating_sub(1))
        } else {
            self.edge_range.min
        }
    }

    /// Node counts for which some edge count satisfies every constraint.
    pub fn feasible_node_counts(&self) -> Vec<usize> {
        (self.node_range.min..=self.node_range.max)
            .filter(|&n| self.min_edges(n) <= self.edge_range.max.min(self.max_edges(n)))
            .collect()
    }

    /// Structural validity; does not enforce benchmark bounds.
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.node_range.min == 0 || self.node_range.min > self.node_range.max {
            return Err(SpecError::Invalid(format!(
                "node_range [{}, {}] is empty or contains 0",
                self.node_range.min, self.node_range.max
            )));
        }
        if self.edge_range.min > self.edge_range.max {
            return Err(SpecError::Invalid(format!(
                "edge_range [{}, {}] is empty",
                self.edge_range.min, self.edge_range.max
            )));
        }
        if self.weight_range.min == 0 || self.weight_range.min > self.weight_range.max {
            return Err(SpecError::Invalid(format!(
                "weight_range [{}, {}] must be a non-empty range of positive integers",
                self.weight_range.min, self.weight_range.max
            )));
        }
        if self.edge_range.max > self.max_edges(self.node_range.max) {
            return Err(SpecError::Invalid(format!(
                "edge_range upper bound {} exceeds {} possible edges on {} nodes",
                self.edge_range.max,
                self.max_edges(self.node_range.max),
                self.node_range.max
            )));
        }
        if self.feasible_node_counts().is_empty() {
            return Err(SpecError::Infeasible(format!(
                "no node count in [{}, {}] admits an edge count in [{}, {}]{}",
                self.node_range.min,
                self.node_range.max,
                self.edge_range.min,
                self.edge_range.max,
                if self.connectivity_required {
                    " with a connecting tree of n-1 edges"
                } else {
                    ""
                }
            )));
        }
        Ok(())
    }

    /// Validity plus the benchmark's 5–50 node / 5–200 edge window.
    pub fn validate_benchmark(&self) -> Result<(), SpecError> {
        self.validate()?;
        if !self.node_range.within(&BENCH_NODES) || !self.edge_range.within(&BENCH_EDGES) {
            return Err(SpecError::Invalid(format!(
                "benchmark specs need nodes within [5, 50] and edges within [5, 200], got {:?} / {:?}",
                self.node_range, self.edge_range
            )));
        }
        Ok(())
    }
}

/// Mixes a master seed with an index (SplitMix64 finalizer) so that
/// per-sample seeds do not depend on scheduling.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn generate_graph(spec: &GraphSpec, seed: u64) -> Result<Graph, SpecError> {
    spec.validate()?;
    let mut rng = rng_from_seed(seed);

    let counts = spec.feasible_node_counts();
    let n = counts[rng.random_range(0..counts.len())];
    let m = rng.random_range(spec.min_edges(n)..=spec.edge_range.max.min(spec.max_edges(n)));

    // Position of each node in a random order; DAG edges run forward in it.
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut position = vec![0usize; n];
    for (pos, &v) in order.iter().enumerate() {
        position[v] = pos;
    }

    let orient = |rng: &mut ChaCha8Rng, a: NodeId, b: NodeId| -> (NodeId, NodeId) {
        if !spec.directed {
            (a.min(b), a.max(b))
        } else if spec.acyclic_required {
            if position[a] < position[b] {
                (a, b)
            } else {
                (b, a)
            }
        } else if rng.random_bool(0.5) {
            (a, b)
        } else {
            (b, a)
        }
    };

    let mut present = vec![false; n * n];
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::with_capacity(m);
    if spec.connectivity_required {
        for i in 1..n {
            let parent = order[rng.random_range(0..i)];
            let (s, d) = orient(&mut rng, parent, order[i]);
            present[s * n + d] = true;
            pairs.push((s, d));
        }
    }

    // Remaining non-edges in a fixed enumeration order, then sample.
    let mut candidates = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if s == d || present[s * n + d] {
                continue;
            }
            let allowed = if !spec.directed {
                s < d && !present[d * n + s]
            } else if spec.acyclic_required {
                position[s] < position[d]
            } else {
                true
            };
            if allowed {
                candidates.push((s, d));
            }
        }
    }
    let extra = m - pairs.len();
    for i in index::sample(&mut rng, candidates.len(), extra).into_iter() {
        pairs.push(candidates[i]);
    }
    pairs.sort_unstable();

    let edges = pairs
        .into_iter()
        .map(|(s, d)| {
            let w: Weight = if spec.weighted {
                rng.random_range(spec.weight_range.min as u64..=spec.weight_range.max as u64)
            } else {
                1
            };
            Edge::new(s, d, w)
        })
        .collect();
    Graph::new(spec.directed, spec.weighted, n, edges).map_err(|e| SpecError::Invalid(e.to_string()))
}
