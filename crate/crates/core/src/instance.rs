//! Task instances: a graph, the query parameters, the instruction text and
//! the oracle answer, all derived from one seed.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algo::{self, AlgoError, DegreeMode, NeighborhoodQuery, PagerankParams, Property, Traversal};
use crate::answer::Answer;
use crate::generate::{derive_seed, generate_graph, rng_from_seed, GraphSpec, Range};
use crate::graph::{Graph, NodeId};
use crate::task::{Difficulty, TaskKind};
use crate::trace::{render_trace, trace_query, TraceQuery};

/// Bumped whenever instruction wording changes.
pub const TEMPLATE_VERSION: &str = "instructions-v1";

/// Query arguments of a task. Serialized without a tag; the field names
/// identify the variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaskParams {
    SourceTarget { source: NodeId, target: NodeId },
    Pair { u: NodeId, v: NodeId },
    Node { node: NodeId },
    None {},
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskInstance {
    pub task: TaskKind,
    pub graph: Graph,
    pub params: TaskParams,
    pub instruction: String,
    pub answer: Answer,
    pub cot: Option<String>,
}

/// Node and edge windows per difficulty tier, all inside the benchmark
/// bounds.
pub fn tier_bounds(tier: Difficulty) -> (Range, Range) {
    match tier {
        Difficulty::Simple => (Range::new(5, 15), Range::new(5, 40)),
        Difficulty::Medium => (Range::new(5, 25), Range::new(5, 80)),
        Difficulty::Difficult => (Range::new(8, 50), Range::new(10, 200)),
    }
}

fn tiered(task: TaskKind) -> GraphSpec {
    let (nodes, edges) = tier_bounds(task.difficulty());
    GraphSpec::default().nodes(nodes.min, nodes.max).edges(edges.min, edges.max)
}

/// Graph spec honoring the task's preconditions. Some tasks draw a variant
/// (directed or not, tree or not) to balance their answers.
pub fn graph_spec_for(task: TaskKind, rng: &mut ChaCha8Rng) -> GraphSpec {
    use TaskKind::*;
    let base = tiered(task);
    match task {
        Bfs | Dfs => base.directed(rng.random_bool(0.5)).connected(true),
        NodeDegree | CommonNeighbors | JaccardSimilarity => base,
        NeighborQuery | EdgeExistence => base.directed(rng.random_bool(0.5)),
        Connectivity => {
            if rng.random_bool(0.5) {
                base.connected(true)
            } else {
                base.nodes(12, 25).edges(5, 14)
            }
        }
        CycleDetection => {
            let directed = rng.random_bool(0.5);
            match (directed, rng.random_bool(0.5)) {
                (true, acyclic) => base.directed(true).acyclic(acyclic),
                (false, true) => tree_spec(rng, 6, 25),
                (false, false) => base.connected(true),
            }
        }
        Bipartiteness => {
            if rng.random_bool(0.5) {
                tree_spec(rng, 6, 25)
            } else {
                base.edges(5, 30)
            }
        }
        ConnectedComponents => base.nodes(10, 25).edges(5, 30),
        Diameter => base.connected(true).edges(10, 80),
        Predecessor => base.directed(true),
        TopologicalSort => base.directed(true).acyclic(true),
        ShortestPath => base.directed(rng.random_bool(0.5)).weighted(true).connected(true),
        MaximumFlow => base.directed(true).weighted(true).connected(true),
        Pagerank => base.directed(true),
        ClusteringCoefficient => base.edges(10, 80),
        MinimumSpanningTree => base.weighted(true).connected(true),
    }
}

fn tree_spec(rng: &mut ChaCha8Rng, min: usize, max: usize) -> GraphSpec {
    let n = rng.random_range(min..=max);
    GraphSpec::default().nodes(n, n).edges(n - 1, n - 1).connected(true)
}

/// Nodes reachable from `s` by directed (or undirected) edges, excluding `s`.
fn reachable_from(g: &Graph, s: NodeId) -> Vec<NodeId> {
    let mut order = algo::traverse(g, Traversal::Bfs, s).expect("node in range");
    order.retain(|&v| v != s);
    order.sort_unstable();
    order
}

fn pick_params(task: TaskKind, g: &Graph, rng: &mut ChaCha8Rng) -> Option<TaskParams> {
    use TaskKind::*;
    let n = g.num_nodes();
    let any = |rng: &mut ChaCha8Rng| rng.random_range(0..n);
    let pair = |rng: &mut ChaCha8Rng| {
        let u = rng.random_range(0..n);
        let v = (u + rng.random_range(1..n)) % n;
        TaskParams::Pair { u, v }
    };
    Some(match task {
        Bfs | Dfs | NodeDegree | NeighborQuery | Predecessor | Pagerank | ClusteringCoefficient => {
            TaskParams::Node { node: any(rng) }
        }
        EdgeExistence => {
            if rng.random_bool(0.5) && g.num_edges() > 0 {
                let e = g.edges()[rng.random_range(0..g.num_edges())];
                // undirected edges are asked in either orientation
                if !g.is_directed() && rng.random_bool(0.5) {
                    TaskParams::Pair { u: e.dst, v: e.src }
                } else {
                    TaskParams::Pair { u: e.src, v: e.dst }
                }
            } else {
                pair(rng)
            }
        }
        CommonNeighbors | JaccardSimilarity => pair(rng),
        ShortestPath | MaximumFlow => {
            let sources: Vec<NodeId> = g.nodes().filter(|&v| !g.out_adj(v).is_empty()).collect();
            let source = *sources.choose(rng)?;
            let target = *reachable_from(g, source).choose(rng)?;
            TaskParams::SourceTarget { source, target }
        }
        Connectivity | CycleDetection | Bipartiteness | ConnectedComponents | Diameter
        | TopologicalSort | MinimumSpanningTree => TaskParams::None {},
    })
}

fn node_param(params: TaskParams) -> Result<NodeId, AlgoError> {
    match params {
        TaskParams::Node { node } => Ok(node),
        other => Err(AlgoError::InvalidParameter(format!("expected a node, got {other:?}"))),
    }
}

fn pair_param(params: TaskParams) -> Result<(NodeId, NodeId), AlgoError> {
    match params {
        TaskParams::Pair { u, v } => Ok((u, v)),
        TaskParams::SourceTarget { source, target } => Ok((source, target)),
        other => Err(AlgoError::InvalidParameter(format!("expected a node pair, got {other:?}"))),
    }
}

/// The gold answer: runs the task's oracle on `g` with `params`.
pub fn solve(task: TaskKind, g: &Graph, params: TaskParams) -> Result<Answer, AlgoError> {
    use TaskKind::*;
    Ok(match task {
        Bfs => Answer::Sequence(algo::traverse(g, Traversal::Bfs, node_param(params)?)?),
        Dfs => Answer::Sequence(algo::traverse(g, Traversal::Dfs, node_param(params)?)?),
        NodeDegree => {
            let mode = if g.is_directed() { DegreeMode::Out } else { DegreeMode::Undirected };
            Answer::Count(algo::node_degree(g, node_param(params)?, mode)? as u64)
        }
        NeighborQuery => Answer::NodeSet(algo::neighborhood(
            g,
            NeighborhoodQuery::Neighbors(node_param(params)?),
        )?),
        EdgeExistence => {
            let (u, v) = pair_param(params)?;
            Answer::Boolean(algo::edge_exists(g, u, v)?)
        }
        Connectivity => Answer::Boolean(algo::boolean_property(g, Property::Connected)),
        CycleDetection => Answer::Boolean(algo::boolean_property(g, Property::Cyclic)),
        Bipartiteness => Answer::Boolean(algo::boolean_property(g, Property::Bipartite)),
        ConnectedComponents => Answer::Count(algo::connected_components(g) as u64),
        Diameter => Answer::Count(algo::diameter(g)? as u64),
        CommonNeighbors => {
            let (u, v) = pair_param(params)?;
            Answer::NodeSet(algo::neighborhood(g, NeighborhoodQuery::Common(u, v))?)
        }
        JaccardSimilarity => {
            let (u, v) = pair_param(params)?;
            Answer::real(algo::jaccard(g, u, v)?)
        }
        Predecessor => Answer::NodeSet(algo::neighborhood(
            g,
            NeighborhoodQuery::Predecessors(node_param(params)?),
        )?),
        TopologicalSort => Answer::Sequence(algo::topological_sort(g)?),
        ShortestPath => {
            let (s, t) = pair_param(params)?;
            let p = algo::shortest_path(g, s, t)?;
            Answer::Path {
                nodes: p.nodes,
                weight: p.weight,
            }
        }
        MaximumFlow => {
            let (s, t) = pair_param(params)?;
            Answer::Count(algo::maximum_flow(g, s, t)?)
        }
        Pagerank => {
            let v = node_param(params)?;
            g.check_node(v)?;
            Answer::real(algo::pagerank(g, PagerankParams::default())?[v])
        }
        ClusteringCoefficient => Answer::real(algo::clustering_coefficient(g, node_param(params)?)?),
        MinimumSpanningTree => {
            let t = algo::minimum_spanning_tree(g)?;
            Answer::EdgeSet {
                edges: t.edges,
                weight: t.weight,
            }
        }
    })
}

/// Trace query for a traced task, `None` otherwise.
pub fn trace_query_for(task: TaskKind, params: TaskParams) -> Option<TraceQuery> {
    match (task, params) {
        (TaskKind::ShortestPath, TaskParams::SourceTarget { source, target }) => {
            Some(TraceQuery::ShortestPath { source, target })
        }
        (TaskKind::TopologicalSort, _) => Some(TraceQuery::TopologicalSort),
        (TaskKind::MinimumSpanningTree, _) => Some(TraceQuery::MinimumSpanningTree),
        (TaskKind::Predecessor, TaskParams::Node { node }) => Some(TraceQuery::Predecessor { node }),
        _ => None,
    }
}

fn describe_graph(g: &Graph) -> String {
    let arrow = if g.is_directed() { "->" } else { "-" };
    let edges: Vec<String> = g
        .edges()
        .iter()
        .map(|e| {
            if g.is_weighted() {
                format!("{}{arrow}{} (weight {})", e.src, e.dst, e.weight)
            } else {
                format!("{}{arrow}{}", e.src, e.dst)
            }
        })
        .collect();
    format!(
        "You are given a{} {} graph with {} nodes numbered 0 to {}. Edges: {}.",
        if g.is_weighted() { " weighted" } else { "n" },
        if g.is_directed() { "directed" } else { "undirected" },
        g.num_nodes(),
        g.num_nodes() - 1,
        edges.join(", ")
    )
}

/// One fixed template per task, filled with the graph and parameters.
pub fn instruction(task: TaskKind, g: &Graph, params: TaskParams) -> String {
    use TaskKind::*;
    let (a, b) = match params {
        TaskParams::Node { node } => (node, node),
        TaskParams::Pair { u, v } => (u, v),
        TaskParams::SourceTarget { source, target } => (source, target),
        TaskParams::None {} => (0, 0),
    };
    let question = match task {
        Bfs => format!(
            "List the nodes in breadth-first order starting from node {a}, visiting neighbors in ascending id order. Format: Answer: [v1, v2, ...]"
        ),
        Dfs => format!(
            "List the nodes in depth-first preorder starting from node {a}, visiting neighbors in ascending id order. Format: Answer: [v1, v2, ...]"
        ),
        NodeDegree => format!(
            "What is the {}degree of node {a}? Format: Answer: <integer>",
            if g.is_directed() { "out-" } else { "" }
        ),
        NeighborQuery => format!(
            "Which nodes are {}neighbors of node {a}? Format: Answer: [v1, v2, ...] in ascending order",
            if g.is_directed() { "out-" } else { "" }
        ),
        EdgeExistence => format!("Is there an edge from node {a} to node {b}? Format: Answer: Yes or No"),
        Connectivity => "Is the graph connected? Format: Answer: Yes or No".to_string(),
        CycleDetection => "Does the graph contain a cycle? Format: Answer: Yes or No".to_string(),
        Bipartiteness => "Is the graph bipartite? Format: Answer: Yes or No".to_string(),
        ConnectedComponents => "How many connected components does the graph have? Format: Answer: <integer>".to_string(),
        Diameter => "What is the diameter of the graph, counted in edges? Format: Answer: <integer>".to_string(),
        CommonNeighbors => format!(
            "Which nodes are neighbors of both node {a} and node {b}? Format: Answer: [v1, v2, ...] in ascending order"
        ),
        JaccardSimilarity => format!(
            "What is the Jaccard similarity of the neighborhoods of node {a} and node {b}? Format: Answer: <number with 4 decimals>"
        ),
        Predecessor => format!(
            "Which nodes have an edge pointing to node {a}? Format: Answer: [v1, v2, ...] in ascending order"
        ),
        TopologicalSort => "Give a topological order of the nodes, always taking the smallest available id first. Format: Answer: [v1, v2, ...]".to_string(),
        ShortestPath => format!(
            "Find the shortest path from node {a} to node {b}. Format: Answer: [v1, ..., vk] with total weight <integer>"
        ),
        MaximumFlow => format!(
            "Treating edge weights as capacities, what is the maximum flow from node {a} to node {b}? Format: Answer: <integer>"
        ),
        Pagerank => format!(
            "What is the PageRank score of node {a} with damping factor 0.85? Format: Answer: <number with 4 decimals>"
        ),
        ClusteringCoefficient => format!(
            "What is the local clustering coefficient of node {a}? Format: Answer: <number with 4 decimals>"
        ),
        MinimumSpanningTree => "Find a minimum spanning tree. Format: Answer: [(u1, v1), (u2, v2), ...] with total weight <integer>".to_string(),
    };
    format!("{} {question}", describe_graph(g))
}

/// Builds the instance for `task` from `seed`. Generation is retried with
/// derived seeds when a draw admits no valid parameters (for example a
/// source with nothing reachable), so the result depends only on the seed.
pub fn make_instance(task: TaskKind, seed: u64, with_cot: bool) -> TaskInstance {
    for attempt in 0u64.. {
        let mut rng = rng_from_seed(derive_seed(seed, attempt));
        let spec = graph_spec_for(task, &mut rng);
        let g = generate_graph(&spec, rng.random()).expect("task specs are feasible");
        let Some(params) = pick_params(task, &g, &mut rng) else {
            continue;
        };
        let answer = solve(task, &g, params).expect("task preconditions hold by construction");
        let cot = if with_cot {
            trace_query_for(task, params).map(|q| {
                render_trace(&trace_query(&g, q).expect("traced task preconditions hold"))
            })
        } else {
            None
        };
        return TaskInstance {
            task,
            instruction: instruction(task, &g, params),
            graph: g,
            params,
            answer,
            cot,
        };
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{BENCH_EDGES, BENCH_NODES};

    #[test]
    fn instances_respect_bounds_and_preconditions() {
        for task in TaskKind::ALL {
            for seed in 0..30 {
                let inst = make_instance(task, seed, true);
                let g = &inst.graph;
                assert!(BENCH_NODES.contains(g.num_nodes()), "{task}: {} nodes", g.num_nodes());
                assert!(BENCH_EDGES.contains(g.num_edges()), "{task}: {} edges", g.num_edges());
                assert_eq!(solve(task, g, inst.params).unwrap(), inst.answer);
                assert_eq!(inst.cot.is_some(), task.is_traced(), "{task}");
                if let Some(cot) = &inst.cot {
                    assert_eq!(cot.lines().last().unwrap(), inst.answer.to_text());
                }
            }
        }
    }

    #[test]
    fn same_seed_same_instance() {
        for task in TaskKind::ALL {
            assert_eq!(make_instance(task, 9, true), make_instance(task, 9, true));
        }
    }

    #[test]
    fn params_serialize_by_field_names() {
        let p = TaskParams::SourceTarget { source: 1, target: 4 };
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"source":1,"target":4}"#);
        assert_eq!(serde_json::to_string(&TaskParams::None {}).unwrap(), "{}");
        for p in [p, TaskParams::Pair { u: 0, v: 2 }, TaskParams::Node { node: 3 }, TaskParams::None {}] {
            let back: TaskParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn instruction_mentions_parameters() {
        let g = Graph::new(true, false, 3, vec![crate::graph::Edge::unit(0, 1)]).unwrap();
        let text = instruction(TaskKind::EdgeExistence, &g, TaskParams::Pair { u: 0, v: 2 });
        assert!(text.contains("directed graph with 3 nodes"));
        assert!(text.contains("Edges: 0->1."));
        assert!(text.contains("from node 0 to node 2"));
    }
}
