//! Exact implementations of the nineteen benchmark tasks.
//!
//! Every tie is broken by ascending node id so that traversal orders,
//! topological orders, shortest paths and spanning trees are canonical.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId, Weight};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgoError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0} requires a directed graph")]
    DirectedRequired(&'static str),
    #[error("{0} requires an undirected graph")]
    UndirectedRequired(&'static str),
    #[error("degree mode {mode:?} does not match a {} graph", if *.directed { "directed" } else { "undirected" })]
    ModeMismatch { mode: DegreeMode, directed: bool },
    #[error("{0} requires a connected graph")]
    Disconnected(&'static str),
    #[error("graph has a cycle; nodes never dequeued: {stuck:?}")]
    Cycle { stuck: Vec<NodeId> },
    #[error("node {target} is unreachable from {from}")]
    Unreachable { from: NodeId, target: NodeId },
    #[error("source and sink must differ (both {0})")]
    SameSourceSink(NodeId),
    #[error("pagerank did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, AlgoError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Traversal {
    Bfs,
    Dfs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    Undirected,
    In,
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborhoodQuery {
    Neighbors(NodeId),
    Common(NodeId, NodeId),
    Predecessors(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Connected,
    Cyclic,
    Bipartite,
}

pub fn traverse(g: &Graph, kind: Traversal, start: NodeId) -> Result<Vec<NodeId>> {
    g.check_node(start)?;
    let mut visited = vec![false; g.num_nodes()];
    let mut order = Vec::new();
    match kind {
        Traversal::Bfs => {
            let mut queue = VecDeque::from([start]);
            visited[start] = true;
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for a in g.out_adj(u) {
                    if !visited[a.node] {
                        visited[a.node] = true;
                        queue.push_back(a.node);
                    }
                }
            }
        }
        Traversal::Dfs => {
            // (node, index of next neighbor to try): recursive preorder
            let mut stack = vec![(start, 0usize)];
            visited[start] = true;
            order.push(start);
            while let Some((u, next)) = stack.last_mut() {
                let adj = g.out_adj(*u);
                match adj[*next..].iter().position(|a| !visited[a.node]) {
                    Some(offset) => {
                        let v = adj[*next + offset].node;
                        *next += offset + 1;
                        visited[v] = true;
                        order.push(v);
                        stack.push((v, 0));
                    }
                    None => {
                        stack.pop();
                    }
                }
            }
        }
    }
    Ok(order)
}

pub fn node_degree(g: &Graph, v: NodeId, mode: DegreeMode) -> Result<usize> {
    g.check_node(v)?;
    match (g.is_directed(), mode) {
        (false, DegreeMode::Undirected) => Ok(g.out_adj(v).len()),
        (true, DegreeMode::Out) => Ok(g.out_adj(v).len()),
        (true, DegreeMode::In) => Ok(g.in_adj(v).len()),
        (directed, mode) => Err(AlgoError::ModeMismatch { mode, directed }),
    }
}

/// Sorted node set answering a neighborhood query.
pub fn neighborhood(g: &Graph, query: NeighborhoodQuery) -> Result<Vec<NodeId>> {
    match query {
        NeighborhoodQuery::Neighbors(v) => Ok(g.neighbors_ordered(v)?),
        NeighborhoodQuery::Common(u, v) => {
            let nu = g.neighbors_ordered(u)?;
            let nv = g.neighbors_ordered(v)?;
            Ok(sorted_intersection(&nu, &nv))
        }
        NeighborhoodQuery::Predecessors(v) => {
            if !g.is_directed() {
                return Err(AlgoError::DirectedRequired("predecessors"));
            }
            g.check_node(v)?;
            Ok(g.in_adj(v).iter().map(|a| a.node).collect())
        }
    }
}

fn sorted_intersection(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub fn edge_exists(g: &Graph, u: NodeId, v: NodeId) -> Result<bool> {
    g.check_node(u)?;
    g.check_node(v)?;
    Ok(g.has_edge(u, v))
}

/// Component id per node, ignoring edge direction.
fn weak_components(g: &Graph) -> (usize, Vec<usize>) {
    let mut comp = vec![usize::MAX; g.num_nodes()];
    let mut count = 0;
    for s in g.nodes() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in g.undirected_neighbors(u) {
                if comp[v] == usize::MAX {
                    comp[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (count, comp)
}

pub fn connected_components(g: &Graph) -> usize {
    weak_components(g).0
}

fn has_directed_cycle(g: &Graph) -> bool {
    let mut indeg: Vec<usize> = g.nodes().map(|v| g.in_adj(v).len()).collect();
    let mut queue: Vec<NodeId> = g.nodes().filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(u) = queue.pop() {
        removed += 1;
        for a in g.out_adj(u) {
            indeg[a.node] -= 1;
            if indeg[a.node] == 0 {
                queue.push(a.node);
            }
        }
    }
    removed < g.num_nodes()
}

fn two_color(g: &Graph) -> bool {
    let mut color = vec![None; g.num_nodes()];
    for s in g.nodes() {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].unwrap();
            for v in g.undirected_neighbors(u) {
                match color[v] {
                    None => {
                        color[v] = Some(!cu);
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => return false,
                    Some(_) => {}
                }
            }
        }
    }
    true
}

pub fn boolean_property(g: &Graph, kind: Property) -> bool {
    match kind {
        Property::Connected => connected_components(g) <= 1,
        Property::Cyclic if g.is_directed() => has_directed_cycle(g),
        // a simple undirected forest has exactly n - c edges
        Property::Cyclic => g.num_edges() + connected_components(g) > g.num_nodes(),
        Property::Bipartite => two_color(g),
    }
}

/// Hop distances from `s` over the undirected view; `None` if unreachable.
fn hop_distances(g: &Graph, s: NodeId) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.num_nodes()];
    dist[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for v in g.undirected_neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Longest shortest hop distance, ignoring edge direction.
pub fn diameter(g: &Graph) -> Result<usize> {
    if g.num_nodes() == 0 || connected_components(g) != 1 {
        return Err(AlgoError::Disconnected("diameter"));
    }
    Ok(g.nodes()
        .map(|s| hop_distances(g, s).into_iter().flatten().max().unwrap_or(0))
        .max()
        .unwrap_or(0))
}

/// |N(u) ∩ N(v)| / |N(u) ∪ N(v)|, or 0 when both neighborhoods are empty.
pub fn jaccard(g: &Graph, u: NodeId, v: NodeId) -> Result<f64> {
    let nu = g.neighbors_ordered(u)?;
    let nv = g.neighbors_ordered(v)?;
    let inter = sorted_intersection(&nu, &nv).len();
    let union = nu.len() + nv.len() - inter;
    Ok(if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    })
}

/// Kahn's algorithm with a min-id frontier.
pub fn topological_sort(g: &Graph) -> Result<Vec<NodeId>> {
    if !g.is_directed() {
        return Err(AlgoError::DirectedRequired("topological_sort"));
    }
    let mut indeg: Vec<usize> = g.nodes().map(|v| g.in_adj(v).len()).collect();
    let mut frontier: BinaryHeap<Reverse<NodeId>> =
        g.nodes().filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(g.num_nodes());
    while let Some(Reverse(u)) = frontier.pop() {
        order.push(u);
        for a in g.out_adj(u) {
            indeg[a.node] -= 1;
            if indeg[a.node] == 0 {
                frontier.push(Reverse(a.node));
            }
        }
    }
    if order.len() < g.num_nodes() {
        let mut done = vec![false; g.num_nodes()];
        for &v in &order {
            done[v] = true;
        }
        let stuck = g.nodes().filter(|&v| !done[v]).collect();
        return Err(AlgoError::Cycle { stuck });
    }
    Ok(order)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedPath {
    pub nodes: Vec<NodeId>,
    pub weight: Weight,
}

/// Dijkstra; equal-distance frontier nodes are settled in id order and a
/// predecessor only changes on strict improvement.
pub fn shortest_path(g: &Graph, s: NodeId, t: NodeId) -> Result<WeightedPath> {
    g.check_node(s)?;
    g.check_node(t)?;
    let n = g.num_nodes();
    let mut dist: Vec<Option<Weight>> = vec![None; n];
    let mut pred: Vec<Option<NodeId>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::from([Reverse((0, s))]);
    dist[s] = Some(0);
    while let Some(Reverse((d, u))) = heap.pop() {
        if settled[u] || dist[u] != Some(d) {
            continue;
        }
        settled[u] = true;
        if u == t {
            break;
        }
        for a in g.out_adj(u) {
            if settled[a.node] {
                continue;
            }
            let cand = d + a.weight;
            if dist[a.node].is_none_or(|old| cand < old) {
                dist[a.node] = Some(cand);
                pred[a.node] = Some(u);
                heap.push(Reverse((cand, a.node)));
            }
        }
    }
    let weight = dist[t].filter(|_| settled[t]).ok_or(AlgoError::Unreachable {
        from: s,
        target: t,
    })?;
    let mut nodes = vec![t];
    let mut cur = t;
    while let Some(p) = pred[cur] {
        nodes.push(p);
        cur = p;
    }
    nodes.reverse();
    Ok(WeightedPath { nodes, weight })
}

/// Edmonds–Karp: BFS augmenting paths in the residual network, weights
/// read as capacities.
pub fn maximum_flow(g: &Graph, s: NodeId, t: NodeId) -> Result<Weight> {
    if !g.is_directed() {
        return Err(AlgoError::DirectedRequired("maximum_flow"));
    }
    g.check_node(s)?;
    g.check_node(t)?;
    if s == t {
        return Err(AlgoError::SameSourceSink(s));
    }
    let n = g.num_nodes();
    let mut residual = vec![vec![0u64; n]; n];
    for e in g.edges() {
        residual[e.src][e.dst] += e.weight;
    }
    // residual arcs exist in both directions of every edge
    let adjacency: Vec<Vec<NodeId>> = g.nodes().map(|v| g.undirected_neighbors(v)).collect();

    let mut flow = 0;
    loop {
        let mut parent = vec![None; n];
        parent[s] = Some(s);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &v in &adjacency[u] {
                if parent[v].is_none() && residual[u][v] > 0 {
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        if parent[t].is_none() {
            return Ok(flow);
        }
        let mut bottleneck = Weight::MAX;
        let mut v = t;
        while v != s {
            let u = parent[v].unwrap();
            bottleneck = bottleneck.min(residual[u][v]);
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = parent[v].unwrap();
            residual[u][v] -= bottleneck;
            residual[v][u] += bottleneck;
            v = u;
        }
        flow += bottleneck;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PagerankParams {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PagerankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tolerance: 1e-8,
            max_iterations: 10_000,
        }
    }
}

/// Damped power iteration. Undirected edges act as two arcs and dangling
/// nodes spread their mass uniformly.
pub fn pagerank(g: &Graph, params: PagerankParams) -> Result<Vec<f64>> {
    let PagerankParams {
        damping,
        tolerance,
        max_iterations,
    } = params;
    if !(damping > 0.0 && damping < 1.0) {
        return Err(AlgoError::InvalidParameter(format!(
            "damping {damping} not in (0, 1)"
        )));
    }
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(AlgoError::InvalidParameter(format!(
            "tolerance {tolerance} must be positive"
        )));
    }
    let n = g.num_nodes();
    if n == 0 {
        return Ok(Vec::new());
    }
    let nf = n as f64;
    let out_deg: Vec<usize> = g.nodes().map(|v| g.out_adj(v).len()).collect();
    let mut rank = vec![1.0 / nf; n];
    for _ in 0..max_iterations {
        let dangling: f64 = g.nodes().filter(|&v| out_deg[v] == 0).map(|v| rank[v]).sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        let mut next = vec![base; n];
        for u in g.nodes().filter(|&u| out_deg[u] > 0) {
            let share = damping * rank[u] / out_deg[u] as f64;
            for a in g.out_adj(u) {
                next[a.node] += share;
            }
        }
        let delta = rank
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        rank = next;
        if delta < tolerance {
            return Ok(rank);
        }
    }
    Err(AlgoError::NoConvergence(max_iterations))
}

/// Local clustering coefficient of `v` in an undirected graph.
pub fn clustering_coefficient(g: &Graph, v: NodeId) -> Result<f64> {
    if g.is_directed() {
        return Err(AlgoError::UndirectedRequired("clustering_coefficient"));
    }
    let nbrs = g.neighbors_ordered(v)?;
    let k = nbrs.len();
    if k < 2 {
        return Ok(0.0);
    }
    let mut links = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if g.has_edge(a, b) {
                links += 1;
            }
        }
    }
    Ok(2.0 * links as f64 / (k * (k - 1)) as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningTree {
    /// Edges as `(min id, max id)`, sorted.
    pub edges: Vec<(NodeId, NodeId)>,
    pub weight: Weight,
}

/// Prim from node 0; the next node is the minimum `(key, id)` pair.
pub fn minimum_spanning_tree(g: &Graph) -> Result<SpanningTree> {
    if g.is_directed() {
        return Err(AlgoError::UndirectedRequired("minimum_spanning_tree"));
    }
    let n = g.num_nodes();
    if n == 0 {
        return Ok(SpanningTree {
            edges: Vec::new(),
            weight: 0,
        });
    }
    let mut key: Vec<Option<Weight>> = vec![None; n];
    let mut parent: Vec<Option<NodeId>> = vec![None; n];
    let mut in_tree = vec![false; n];
    let mut heap = BinaryHeap::from([Reverse((0, 0))]);
    key[0] = Some(0);
    let mut edges = Vec::with_capacity(n - 1);
    let mut weight = 0;
    while let Some(Reverse((k, u))) = heap.pop() {
        if in_tree[u] || key[u] != Some(k) {
            continue;
        }
        in_tree[u] = true;
        if let Some(p) = parent[u] {
            edges.push((p.min(u), p.max(u)));
            weight += k;
        }
        for a in g.out_adj(u) {
            if !in_tree[a.node] && key[a.node].is_none_or(|old| a.weight < old) {
                key[a.node] = Some(a.weight);
                parent[a.node] = Some(u);
                heap.push(Reverse((a.weight, a.node)));
            }
        }
    }
    if edges.len() + 1 < n {
        return Err(AlgoError::Disconnected("minimum_spanning_tree"));
    }
    edges.sort_unstable();
    Ok(SpanningTree { edges, weight })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn undirected(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(false, false, n, edges.iter().map(|&(a, b)| Edge::unit(a, b)).collect()).unwrap()
    }

    fn directed(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(true, false, n, edges.iter().map(|&(a, b)| Edge::unit(a, b)).collect()).unwrap()
    }

    fn weighted(directed: bool, n: usize, edges: &[(usize, usize, u64)]) -> Graph {
        Graph::new(
            directed,
            true,
            n,
            edges.iter().map(|&(a, b, w)| Edge::new(a, b, w)).collect(),
        )
        .unwrap()
    }

    fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        undirected(n, &edges)
    }

    fn star() -> Graph {
        undirected(5, &[(0, 1), (0, 2), (0, 3), (0, 4)])
    }

    #[test]
    fn traversal_examples() {
        let single = undirected(1, &[]);
        assert_eq!(traverse(&single, Traversal::Bfs, 0).unwrap(), vec![0]);
        assert_eq!(traverse(&star(), Traversal::Bfs, 0).unwrap(), vec![0, 1, 2, 3, 4]);
        let g = undirected(5, &[(0, 2), (0, 1), (1, 3), (2, 4)]);
        assert_eq!(traverse(&g, Traversal::Dfs, 0).unwrap(), vec![0, 1, 3, 2, 4]);
        assert_eq!(traverse(&g, Traversal::Bfs, 0).unwrap(), vec![0, 1, 2, 3, 4]);
        assert!(traverse(&g, Traversal::Bfs, 5).is_err());
        // directed: only reachable nodes
        let d = directed(3, &[(1, 0)]);
        assert_eq!(traverse(&d, Traversal::Dfs, 0).unwrap(), vec![0]);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(node_degree(&undirected(3, &[(0, 1)]), 2, DegreeMode::Undirected).unwrap(), 0);
        for v in 0..5 {
            assert_eq!(node_degree(&complete(5), v, DegreeMode::Undirected).unwrap(), 4);
        }
        let d = directed(3, &[(0, 1), (2, 1)]);
        assert_eq!(node_degree(&d, 1, DegreeMode::In).unwrap(), 2);
        assert_eq!(node_degree(&d, 1, DegreeMode::Out).unwrap(), 0);
        assert!(matches!(
            node_degree(&d, 1, DegreeMode::Undirected),
            Err(AlgoError::ModeMismatch { .. })
        ));
    }

    #[test]
    fn neighborhood_examples() {
        let g = star();
        assert_eq!(
            neighborhood(&g, NeighborhoodQuery::Common(0, 0)).unwrap(),
            neighborhood(&g, NeighborhoodQuery::Neighbors(0)).unwrap()
        );
        assert_eq!(neighborhood(&g, NeighborhoodQuery::Common(1, 2)).unwrap(), vec![0]);
        let chain = directed(3, &[(0, 1), (1, 2)]);
        assert_eq!(neighborhood(&chain, NeighborhoodQuery::Predecessors(2)).unwrap(), vec![1]);
        assert!(matches!(
            neighborhood(&g, NeighborhoodQuery::Predecessors(0)),
            Err(AlgoError::DirectedRequired(_))
        ));
    }

    #[test]
    fn edge_existence_examples() {
        let g = undirected(6, &[(2, 5)]);
        assert!(edge_exists(&g, 5, 2).unwrap());
        assert!(!edge_exists(&g, 0, 1).unwrap());
        assert!(edge_exists(&g, 0, 6).is_err());
        let d = directed(3, &[(0, 1)]);
        assert!(!edge_exists(&d, 1, 0).unwrap());
    }

    #[test]
    fn boolean_property_examples() {
        let tree = undirected(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        assert!(boolean_property(&tree, Property::Connected));
        assert!(!boolean_property(&tree, Property::Cyclic));
        assert!(boolean_property(&tree, Property::Bipartite));
        let c5 = undirected(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        assert!(!boolean_property(&c5, Property::Bipartite));
        assert!(boolean_property(&c5, Property::Cyclic));
        // directed: a diamond has no directed cycle
        let diamond = directed(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert!(!boolean_property(&diamond, Property::Cyclic));
        assert!(boolean_property(&directed(2, &[(0, 1), (1, 0)]), Property::Cyclic));
        // weakly connected counts as connected
        assert!(boolean_property(&directed(3, &[(1, 0), (1, 2)]), Property::Connected));
    }

    #[test]
    fn component_examples() {
        assert_eq!(connected_components(&complete(4)), 1);
        assert_eq!(connected_components(&undirected(6, &[])), 6);
        assert_eq!(connected_components(&undirected(5, &[(0, 1), (2, 3)])), 3);
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&complete(5)).unwrap(), 1);
        let path: Vec<_> = (0..6).map(|i| (i, i + 1)).collect();
        assert_eq!(diameter(&undirected(7, &path)).unwrap(), 6);
        assert!(matches!(
            diameter(&undirected(3, &[(0, 1)])),
            Err(AlgoError::Disconnected(_))
        ));
    }

    #[test]
    fn jaccard_examples() {
        let g = star();
        assert_eq!(jaccard(&g, 0, 0).unwrap(), 1.0);
        assert_eq!(jaccard(&undirected(3, &[(0, 1)]), 2, 2).unwrap(), 0.0);
        assert_eq!(jaccard(&g, 1, 2).unwrap(), 1.0);
        assert_eq!(jaccard(&g, 0, 1).unwrap(), 0.0);
        let g = undirected(4, &[(0, 2), (0, 3), (1, 2)]);
        assert_eq!(jaccard(&g, 0, 1).unwrap(), 0.5);
    }

    #[test]
    fn topological_examples() {
        assert_eq!(topological_sort(&directed(4, &[])).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(topological_sort(&directed(3, &[(2, 1), (1, 0)])).unwrap(), vec![2, 1, 0]);
        let cyc = directed(4, &[(0, 1), (1, 2), (2, 1), (2, 3)]);
        assert_eq!(
            topological_sort(&cyc).unwrap_err(),
            AlgoError::Cycle { stuck: vec![1, 2, 3] }
        );
        assert!(topological_sort(&undirected(2, &[])).is_err());
    }

    #[test]
    fn shortest_path_examples() {
        let g = weighted(true, 3, &[(0, 1, 4)]);
        assert_eq!(
            shortest_path(&g, 0, 0).unwrap(),
            WeightedPath { nodes: vec![0], weight: 0 }
        );
        assert_eq!(
            shortest_path(&g, 0, 1).unwrap(),
            WeightedPath { nodes: vec![0, 1], weight: 4 }
        );
        assert!(matches!(shortest_path(&g, 1, 0), Err(AlgoError::Unreachable { .. })));
        // two equal routes 0-1-3 and 0-2-3: the lower id predecessor wins
        let g = weighted(false, 4, &[(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1)]);
        assert_eq!(shortest_path(&g, 0, 3).unwrap().nodes, vec![0, 1, 3]);
        let g = weighted(false, 4, &[(0, 1, 5), (0, 2, 1), (2, 1, 1), (1, 3, 1)]);
        assert_eq!(
            shortest_path(&g, 0, 3).unwrap(),
            WeightedPath { nodes: vec![0, 2, 1, 3], weight: 3 }
        );
    }

    #[test]
    fn max_flow_examples() {
        let g = weighted(true, 2, &[(0, 1, 9)]);
        assert_eq!(maximum_flow(&g, 0, 1).unwrap(), 9);
        let g = weighted(true, 4, &[(0, 1, 3), (1, 3, 3), (0, 2, 4), (2, 3, 4)]);
        assert_eq!(maximum_flow(&g, 0, 3).unwrap(), 7);
        assert!(matches!(maximum_flow(&g, 2, 2), Err(AlgoError::SameSourceSink(2))));
        // needs a reverse residual arc
        let g = weighted(
            true,
            4,
            &[(0, 1, 1), (0, 2, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1)],
        );
        assert_eq!(maximum_flow(&g, 0, 3).unwrap(), 2);
        assert_eq!(maximum_flow(&g, 3, 0).unwrap(), 0);
    }

    #[test]
    fn pagerank_examples() {
        let r = pagerank(&undirected(2, &[(0, 1)]), PagerankParams::default()).unwrap();
        assert!((r[0] - 0.5).abs() < 1e-9 && (r[1] - 0.5).abs() < 1e-9);
        let r = pagerank(&directed(4, &[(0, 1), (1, 2), (2, 0), (3, 0)]), PagerankParams::default())
            .unwrap();
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        let bad = PagerankParams { damping: 1.0, ..Default::default() };
        assert!(pagerank(&star(), bad).is_err());
        let capped = PagerankParams { max_iterations: 1, ..Default::default() };
        assert_eq!(
            pagerank(&directed(3, &[(0, 1)]), capped).unwrap_err(),
            AlgoError::NoConvergence(1)
        );
    }

    #[test]
    fn clustering_examples() {
        let tri = undirected(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(clustering_coefficient(&tri, 0).unwrap(), 1.0);
        assert_eq!(clustering_coefficient(&star(), 1).unwrap(), 0.0);
        assert_eq!(clustering_coefficient(&star(), 0).unwrap(), 0.0);
        let g = undirected(4, &[(0, 1), (0, 2), (0, 3), (1, 2)]);
        assert!((clustering_coefficient(&g, 0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(clustering_coefficient(&directed(2, &[(0, 1)]), 0).is_err());
    }

    #[test]
    fn mst_examples() {
        let tree = weighted(false, 4, &[(0, 1, 3), (1, 2, 5), (1, 3, 2)]);
        let mst = minimum_spanning_tree(&tree).unwrap();
        assert_eq!(mst.edges, vec![(0, 1), (1, 2), (1, 3)]);
        assert_eq!(mst.weight, 10);
        let flat = weighted(false, 4, &[(0, 1, 2), (1, 2, 2), (2, 3, 2), (0, 3, 2), (0, 2, 2)]);
        assert_eq!(minimum_spanning_tree(&flat).unwrap().weight, 6);
        assert!(matches!(
            minimum_spanning_tree(&weighted(false, 3, &[(0, 1, 1)])),
            Err(AlgoError::Disconnected(_))
        ));
        assert!(minimum_spanning_tree(&directed(2, &[(0, 1)])).is_err());
    }
}
