//! Per-task comparison of the fast implementations against the brute-force
//! references on small seeded graphs.

use rand::Rng;

use ontokit_core::algo::{self, DegreeMode, NeighborhoodQuery, PagerankParams, Property, Traversal};
use ontokit_core::generate::{generate_graph, rng_from_seed, GraphSpec};
use ontokit_core::graph::{Graph, NodeId};
use ontokit_core::task::TaskKind;

use crate as brute;

/// PageRank agreement required between power iteration and the linear solve.
pub const PAGERANK_TOLERANCE: f64 = 1e-6;

/// Small graph satisfying the task's preconditions (at most 9 nodes; 7 for
/// spanning-tree enumeration).
pub fn small_graph(task: TaskKind, seed: u64) -> Graph {
    use TaskKind::*;
    let mut rng = rng_from_seed(seed);
    let directed = rng.random_bool(0.5);
    let spec = GraphSpec::default().nodes(2, 9).edges(1, 18);
    let spec = match task {
        NodeDegree | NeighborQuery | EdgeExistence | Bfs | Dfs | Pagerank => spec.directed(directed),
        Connectivity | ConnectedComponents | Bipartiteness | CommonNeighbors | JaccardSimilarity
        | ClusteringCoefficient => spec.nodes(2, 9).edges(1, 14),
        CycleDetection => spec.directed(directed).acyclic(directed && rng.random_bool(0.5)).edges(1, 12),
        Diameter => spec.connected(true),
        Predecessor => spec.directed(true),
        TopologicalSort => spec.directed(true).acyclic(rng.random_bool(0.8)),
        ShortestPath => spec.nodes(2, 8).edges(1, 16).directed(directed).weighted(true),
        MaximumFlow => spec.nodes(2, 8).edges(1, 20).directed(true).weighted(true),
        MinimumSpanningTree => spec.nodes(2, 7).edges(1, 12).weighted(true).connected(true),
    };
    generate_graph(&spec, rng.random()).expect("small specs are feasible")
}

fn pick_two(g: &Graph, seed: u64) -> (NodeId, NodeId) {
    let mut rng = rng_from_seed(seed ^ 0x5eed);
    let n = g.num_nodes();
    let u = rng.random_range(0..n);
    let v = (u + rng.random_range(1..n)) % n;
    (u, v)
}

fn same<T: PartialEq + std::fmt::Debug>(what: &str, fast: T, slow: T) -> Result<(), String> {
    if fast == slow {
        Ok(())
    } else {
        Err(format!("{what}: implementation {fast:?} vs reference {slow:?}"))
    }
}

fn close(what: &str, fast: f64, slow: f64, tol: f64) -> Result<(), String> {
    if (fast - slow).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: implementation {fast} vs reference {slow}"))
    }
}

/// Compares one task on the graph drawn from `seed`.
pub fn check(task: TaskKind, seed: u64) -> Result<(), String> {
    use TaskKind::*;
    let g = small_graph(task, seed);
    let (u, v) = pick_two(&g, seed);
    let err = |e: algo::AlgoError| e.to_string();
    match task {
        Bfs => same("bfs", algo::traverse(&g, Traversal::Bfs, u).map_err(err)?, brute::bfs_levels(&g, u)),
        Dfs => same("dfs", algo::traverse(&g, Traversal::Dfs, u).map_err(err)?, brute::dfs_recursive(&g, u)),
        NodeDegree => {
            if g.is_directed() {
                same("out-degree", algo::node_degree(&g, u, DegreeMode::Out).map_err(err)?, brute::scan_degree(&g, u))?;
                same(
                    "in-degree",
                    algo::node_degree(&g, u, DegreeMode::In).map_err(err)?,
                    brute::scan_predecessors(&g, u).len(),
                )
            } else {
                same("degree", algo::node_degree(&g, u, DegreeMode::Undirected).map_err(err)?, brute::scan_degree(&g, u))
            }
        }
        NeighborQuery => same(
            "neighbors",
            algo::neighborhood(&g, NeighborhoodQuery::Neighbors(u)).map_err(err)?,
            brute::scan_neighbors(&g, u),
        ),
        EdgeExistence => {
            same("edge", algo::edge_exists(&g, u, v).map_err(err)?, brute::scan_edge(&g, u, v))?;
            let e = g.edges()[seed as usize % g.num_edges()];
            same("present edge", algo::edge_exists(&g, e.src, e.dst).map_err(err)?, true)
        }
        Connectivity => same(
            "connected",
            algo::boolean_property(&g, Property::Connected),
            brute::component_count(&g) == 1,
        ),
        CycleDetection => same("cyclic", algo::boolean_property(&g, Property::Cyclic), brute::has_cycle(&g)),
        Bipartiteness => same("bipartite", algo::boolean_property(&g, Property::Bipartite), brute::is_bipartite(&g)),
        ConnectedComponents => same("components", algo::connected_components(&g), brute::component_count(&g)),
        Diameter => same("diameter", algo::diameter(&g).ok(), brute::diameter(&g)),
        CommonNeighbors => same(
            "common",
            algo::neighborhood(&g, NeighborhoodQuery::Common(u, v)).map_err(err)?,
            brute::common_neighbors(&g, u, v),
        ),
        JaccardSimilarity => close("jaccard", algo::jaccard(&g, u, v).map_err(err)?, brute::jaccard(&g, u, v), 1e-12),
        Predecessor => same(
            "predecessors",
            algo::neighborhood(&g, NeighborhoodQuery::Predecessors(u)).map_err(err)?,
            brute::scan_predecessors(&g, u),
        ),
        TopologicalSort => {
            let fast = algo::topological_sort(&g).ok();
            if let Some(order) = &fast {
                if !brute::is_topological(&g, order) {
                    return Err(format!("topological_sort: {order:?} is not a valid order"));
                }
            }
            same("topological_sort", fast, brute::topological_by_scan(&g, false))
        }
        ShortestPath => {
            let slow = brute::shortest_path_weight(&g, u, v);
            match algo::shortest_path(&g, u, v) {
                Ok(p) => {
                    same("path weight", Some(p.weight), slow)?;
                    same("path endpoints", (p.nodes.first(), p.nodes.last()), (Some(&u), Some(&v)))?;
                    same("path edges", brute::path_weight(&g, &p.nodes), Some(p.weight))
                }
                Err(algo::AlgoError::Unreachable { .. }) => same("unreachable", None, slow),
                Err(e) => Err(e.to_string()),
            }
        }
        MaximumFlow => same("max flow", algo::maximum_flow(&g, u, v).map_err(err)?, brute::min_cut(&g, u, v)),
        Pagerank => {
            let fast = algo::pagerank(&g, PagerankParams::default()).map_err(err)?;
            let slow = brute::pagerank_linear(&g, 0.85);
            fast.iter()
                .zip(&slow)
                .enumerate()
                .try_for_each(|(i, (a, b))| close(&format!("pagerank[{i}]"), *a, *b, PAGERANK_TOLERANCE))
        }
        ClusteringCoefficient => close(
            "clustering",
            algo::clustering_coefficient(&g, u).map_err(err)?,
            brute::clustering(&g, u),
            1e-12,
        ),
        MinimumSpanningTree => {
            let t = algo::minimum_spanning_tree(&g).map_err(err)?;
            same("mst weight", Some(t.weight), brute::mst_weight(&g))?;
            let trees = brute::spanning_trees(&g);
            same("mst is a spanning tree", trees.iter().any(|(es, _)| *es == t.edges), true)
        }
    }
}
