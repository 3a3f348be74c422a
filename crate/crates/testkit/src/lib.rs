//! Brute-force reference implementations for small graphs.
//!
//! Everything here works from the raw edge list (never the adjacency
//! caches of [`Graph`]) and favors exhaustive search over cleverness, so the
//! results are independent evidence for the fast implementations.

pub mod equivalence;

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use ontokit_core::graph::{Graph, NodeId, Weight};

/// Dense adjacency matrix of edge weights; undirected edges fill both cells.
pub fn weight_matrix(g: &Graph) -> Vec<Vec<Option<Weight>>> {
    let n = g.num_nodes();
    let mut m = vec![vec![None; n]; n];
    for e in g.edges() {
        m[e.src][e.dst] = Some(e.weight);
        if !g.is_directed() {
            m[e.dst][e.src] = Some(e.weight);
        }
    }
    m
}

fn arcs(g: &Graph) -> Vec<(NodeId, NodeId, Weight)> {
    let mut out = Vec::new();
    for e in g.edges() {
        out.push((e.src, e.dst, e.weight));
        if !g.is_directed() {
            out.push((e.dst, e.src, e.weight));
        }
    }
    out
}

/// Out-neighbors by scanning every edge; ascending.
pub fn scan_neighbors(g: &Graph, v: NodeId) -> Vec<NodeId> {
    let set: BTreeSet<NodeId> = arcs(g).into_iter().filter(|a| a.0 == v).map(|a| a.1).collect();
    set.into_iter().collect()
}

pub fn scan_predecessors(g: &Graph, v: NodeId) -> Vec<NodeId> {
    let set: BTreeSet<NodeId> = arcs(g).into_iter().filter(|a| a.1 == v).map(|a| a.0).collect();
    set.into_iter().collect()
}

pub fn scan_degree(g: &Graph, v: NodeId) -> usize {
    g.edges()
        .iter()
        .filter(|e| e.src == v || (!g.is_directed() && e.dst == v))
        .count()
}

pub fn scan_edge(g: &Graph, u: NodeId, v: NodeId) -> bool {
    g.edges()
        .iter()
        .any(|e| (e.src, e.dst) == (u, v) || (!g.is_directed() && (e.dst, e.src) == (u, v)))
}

/// Breadth-first simulation with an explicit frontier list per level.
pub fn bfs_levels(g: &Graph, start: NodeId) -> Vec<NodeId> {
    let m = weight_matrix(g);
    let n = g.num_nodes();
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut order = vec![start];
    let mut level = vec![start];
    while !level.is_empty() {
        let mut next = Vec::new();
        for &u in &level {
            for v in 0..n {
                if m[u][v].is_some() && !seen[v] {
                    seen[v] = true;
                    next.push(v);
                }
            }
        }
        order.extend(&next);
        level = next;
    }
    order
}

/// Recursive preorder with ascending neighbor order.
pub fn dfs_recursive(g: &Graph, start: NodeId) -> Vec<NodeId> {
    fn go(m: &[Vec<Option<Weight>>], u: NodeId, seen: &mut [bool], out: &mut Vec<NodeId>) {
        seen[u] = true;
        out.push(u);
        for v in 0..m.len() {
            if m[u][v].is_some() && !seen[v] {
                go(m, v, seen, out);
            }
        }
    }
    let m = weight_matrix(g);
    let mut seen = vec![false; g.num_nodes()];
    let mut out = Vec::new();
    go(&m, start, &mut seen, &mut out);
    out
}

/// Union-find over edges ignoring direction.
pub fn component_count(g: &Graph) -> usize {
    let n = g.num_nodes();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] == x {
            x
        } else {
            let r = root(p, p[x]);
            p[x] = r;
            r
        }
    }
    for e in g.edges() {
        let (a, b) = (root(&mut parent, e.src), root(&mut parent, e.dst));
        parent[a] = b;
    }
    (0..n).filter(|&v| root(&mut parent, v) == v).count()
}

/// Boolean transitive closure (Floyd–Warshall).
pub fn reachability(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.num_nodes();
    let m = weight_matrix(g);
    let mut r: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| m[i][j].is_some()).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

/// Directed: some node reaches itself. Undirected: removing some edge
/// leaves its endpoints connected.
pub fn has_cycle(g: &Graph) -> bool {
    if g.is_directed() {
        let r = reachability(g);
        return (0..g.num_nodes()).any(|v| r[v][v]);
    }
    g.edges().iter().enumerate().any(|(i, e)| {
        let rest: Vec<_> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, e)| *e)
            .collect();
        let h = Graph::new(false, g.is_weighted(), g.num_nodes(), rest).expect("subgraph is valid");
        reachability(&h)[e.src][e.dst]
    })
}

/// Tries every 2-coloring.
pub fn is_bipartite(g: &Graph) -> bool {
    let n = g.num_nodes();
    assert!(n <= 20, "exhaustive coloring is for small graphs");
    (0u32..1 << n).any(|mask| {
        g.edges()
            .iter()
            .all(|e| (mask >> e.src & 1) != (mask >> e.dst & 1))
    })
}

/// All-pairs hop distances over the undirected view (Floyd–Warshall).
pub fn hop_apsp(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.num_nodes();
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for e in g.edges() {
        d[e.src][e.dst] = Some(1);
        d[e.dst][e.src] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// `None` when the graph is disconnected.
pub fn diameter(g: &Graph) -> Option<usize> {
    let d = hop_apsp(g);
    let mut best = 0;
    for row in &d {
        for x in row {
            best = best.max((*x)?);
        }
    }
    Some(best)
}

pub fn common_neighbors(g: &Graph, u: NodeId, v: NodeId) -> Vec<NodeId> {
    let a: BTreeSet<_> = scan_neighbors(g, u).into_iter().collect();
    let b: BTreeSet<_> = scan_neighbors(g, v).into_iter().collect();
    a.intersection(&b).copied().collect()
}

pub fn jaccard(g: &Graph, u: NodeId, v: NodeId) -> f64 {
    let a: BTreeSet<_> = scan_neighbors(g, u).into_iter().collect();
    let b: BTreeSet<_> = scan_neighbors(g, v).into_iter().collect();
    let union = a.union(&b).count();
    if union == 0 {
        0.0
    } else {
        a.intersection(&b).count() as f64 / union as f64
    }
}

/// Repeatedly places the smallest (or largest) node whose predecessors are
/// all placed. `None` when the graph has a cycle.
pub fn topological_by_scan(g: &Graph, largest_first: bool) -> Option<Vec<NodeId>> {
    let n = g.num_nodes();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let ready = |v: &NodeId| !placed[*v] && g.edges().iter().all(|e| e.dst != *v || placed[e.src]);
        let next = if largest_first {
            (0..n).rev().find(ready)
        } else {
            (0..n).find(ready)
        }?;
        placed[next] = true;
        order.push(next);
    }
    Some(order)
}

pub fn is_topological(g: &Graph, order: &[NodeId]) -> bool {
    let n = g.num_nodes();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return false;
        }
        pos[v] = i;
    }
    order.len() == n && g.edges().iter().all(|e| pos[e.src] < pos[e.dst])
}

/// Every simple path from `s` to `t` with its weight.
pub fn all_simple_paths(g: &Graph, s: NodeId, t: NodeId) -> Vec<(Vec<NodeId>, Weight)> {
    fn go(
        m: &[Vec<Option<Weight>>],
        t: NodeId,
        path: &mut Vec<NodeId>,
        on: &mut [bool],
        w: Weight,
        out: &mut Vec<(Vec<NodeId>, Weight)>,
    ) {
        let u = *path.last().unwrap();
        if u == t {
            out.push((path.clone(), w));
            return;
        }
        for v in 0..m.len() {
            if let Some(x) = m[u][v] {
                if !on[v] {
                    on[v] = true;
                    path.push(v);
                    go(m, t, path, on, w + x, out);
                    path.pop();
                    on[v] = false;
                }
            }
        }
    }
    let m = weight_matrix(g);
    let mut on = vec![false; g.num_nodes()];
    on[s] = true;
    let mut out = Vec::new();
    go(&m, t, &mut vec![s], &mut on, 0, &mut out);
    out
}

/// Minimum path weight by enumeration; `None` if unreachable.
pub fn shortest_path_weight(g: &Graph, s: NodeId, t: NodeId) -> Option<Weight> {
    all_simple_paths(g, s, t).into_iter().map(|(_, w)| w).min()
}

/// An optimal path chosen with the opposite tie-break (lexicographically
/// largest among optimal paths).
pub fn alternate_shortest_path(g: &Graph, s: NodeId, t: NodeId) -> Option<(Vec<NodeId>, Weight)> {
    let paths = all_simple_paths(g, s, t);
    let best = paths.iter().map(|p| p.1).min()?;
    paths.into_iter().filter(|p| p.1 == best).max()
}

pub fn path_weight(g: &Graph, nodes: &[NodeId]) -> Option<Weight> {
    let m = weight_matrix(g);
    nodes.windows(2).map(|w| m[w[0]][w[1]]).sum()
}

/// Minimum s-t cut over every vertex bipartition (max-flow/min-cut).
pub fn min_cut(g: &Graph, s: NodeId, t: NodeId) -> Weight {
    let n = g.num_nodes();
    assert!(n <= 20, "cut enumeration is for small graphs");
    let mut best = Weight::MAX;
    for mask in 0u32..1 << n {
        let side = |v: NodeId| mask >> v & 1 == 1;
        if !side(s) || side(t) {
            continue;
        }
        let cut: Weight = arcs(g)
            .into_iter()
            .filter(|&(a, b, _)| side(a) && !side(b))
            .map(|(_, _, w)| w)
            .sum();
        best = best.min(cut);
    }
    best
}

/// PageRank as the solution of `(I - d Pᵀ) r = (1 - d)/n`, where `P` is the
/// row-stochastic transition matrix with dangling rows spread uniformly.
pub fn pagerank_linear(g: &Graph, damping: f64) -> Vec<f64> {
    let n = g.num_nodes();
    let nf = n as f64;
    let mut p = DMatrix::<f64>::zeros(n, n);
    let m = weight_matrix(g);
    for u in 0..n {
        let out: Vec<usize> = (0..n).filter(|&v| m[u][v].is_some()).collect();
        if out.is_empty() {
            for v in 0..n {
                p[(u, v)] = 1.0 / nf;
            }
        } else {
            for &v in &out {
                p[(u, v)] = 1.0 / out.len() as f64;
            }
        }
    }
    let a = DMatrix::<f64>::identity(n, n) - p.transpose() * damping;
    let b = DVector::<f64>::from_element(n, (1.0 - damping) / nf);
    let r = a.lu().solve(&b).expect("I - dPᵀ is nonsingular for d < 1");
    r.iter().copied().collect()
}

/// Local clustering coefficient by enumerating neighbor pairs.
pub fn clustering(g: &Graph, v: NodeId) -> f64 {
    let nb = scan_neighbors(g, v);
    let k = nb.len();
    if k < 2 {
        return 0.0;
    }
    let mut tri = 0;
    for i in 0..k {
        for j in i + 1..k {
            if scan_edge(g, nb[i], nb[j]) {
                tri += 1;
            }
        }
    }
    tri as f64 / (k * (k - 1) / 2) as f64
}

/// Every spanning tree as (sorted edge list, weight), by trying every
/// (n-1)-subset of edges.
pub fn spanning_trees(g: &Graph) -> Vec<(Vec<(NodeId, NodeId)>, Weight)> {
    let n = g.num_nodes();
    let k = n.saturating_sub(1);
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn rec(
        g: &Graph,
        start: usize,
        k: usize,
        pick: &mut Vec<usize>,
        out: &mut Vec<(Vec<(NodeId, NodeId)>, Weight)>,
    ) {
        if pick.len() == k {
            let chosen: Vec<_> = pick.iter().map(|&i| g.edges()[i]).collect();
            let h = Graph::new(false, true, g.num_nodes(), chosen.clone()).expect("subgraph");
            if component_count(&h) == 1 {
                let mut es: Vec<_> = chosen.iter().map(|e| (e.src.min(e.dst), e.src.max(e.dst))).collect();
                es.sort_unstable();
                out.push((es, chosen.iter().map(|e| e.weight).sum()));
            }
            return;
        }
        for i in start..g.edges().len() {
            if g.edges().len() - i < k - pick.len() {
                break;
            }
            pick.push(i);
            rec(g, i + 1, k, pick, out);
            pick.pop();
        }
    }
    rec(g, 0, k, &mut pick, &mut out);
    out
}

pub fn mst_weight(g: &Graph) -> Option<Weight> {
    spanning_trees(g).into_iter().map(|t| t.1).min()
}

/// An optimal spanning tree other than the lexicographically smallest one
/// when several exist.
pub fn alternate_spanning_tree(g: &Graph) -> Option<(Vec<(NodeId, NodeId)>, Weight)> {
    let trees = spanning_trees(g);
    let best = trees.iter().map(|t| t.1).min()?;
    trees.into_iter().filter(|t| t.1 == best).max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ontokit_core::graph::Edge;

    #[test]
    fn triangle_facts() {
        let g = Graph::new(false, true, 3, vec![Edge::new(0, 1, 1), Edge::new(1, 2, 2), Edge::new(0, 2, 4)]).unwrap();
        assert!(has_cycle(&g));
        assert!(!is_bipartite(&g));
        assert_eq!(diameter(&g), Some(1));
        assert_eq!(shortest_path_weight(&g, 0, 2), Some(3));
        assert_eq!(mst_weight(&g), Some(3));
        assert_eq!(spanning_trees(&g).len(), 3);
        assert!((clustering(&g, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pagerank_sums_to_one() {
        let g = Graph::new(true, false, 3, vec![Edge::unit(0, 1), Edge::unit(1, 2)]).unwrap();
        let r = pagerank_linear(&g, 0.85);
        assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cut_of_a_chain() {
        let g = Graph::new(true, true, 3, vec![Edge::new(0, 1, 5), Edge::new(1, 2, 3)]).unwrap();
        assert_eq!(min_cut(&g, 0, 2), 3);
    }
}
