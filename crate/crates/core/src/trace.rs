//! Stepwise execution recorder for the four traced algorithms (Dijkstra,
//! Kahn, Prim, predecessor scan), plus a replayer that rebuilds the answer
//! from the recorded transitions alone.
//!
//! Every step stores the full algorithm state *after* the step. Replay keeps
//! its own copy of the state, applies the transition the step describes,
//! checks that it was legal for the graph, and compares the result with the
//! snapshot.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algo::AlgoError;
use crate::answer::{render_list, Answer, ANSWER_PREFIX};
use crate::graph::{Graph, NodeId, Weight};
use crate::task::TaskKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Init,
    Select,
    Update,
    Skip,
    Finalize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Focus {
    Node { node: NodeId },
    Edge { src: NodeId, dst: NodeId, weight: Weight },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum TraceState {
    Dijkstra {
        /// `None` is infinity.
        dist: Vec<Option<Weight>>,
        /// Settle order.
        settled: Vec<NodeId>,
    },
    Kahn {
        in_degree: Vec<usize>,
        /// Zero in-degree nodes not yet removed, ascending.
        frontier: Vec<NodeId>,
        order: Vec<NodeId>,
    },
    Prim {
        key: Vec<Option<Weight>>,
        /// Nodes in the order they joined the tree.
        in_tree: Vec<NodeId>,
    },
    Predecessor {
        found: Vec<NodeId>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub index: usize,
    pub phase: Phase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub focus: Option<Focus>,
    pub state: TraceState,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceQuery {
    ShortestPath { source: NodeId, target: NodeId },
    TopologicalSort,
    MinimumSpanningTree,
    Predecessor { node: NodeId },
}

impl TraceQuery {
    pub fn task(&self) -> TaskKind {
        match self {
            TraceQuery::ShortestPath { .. } => TaskKind::ShortestPath,
            TraceQuery::TopologicalSort => TaskKind::TopologicalSort,
            TraceQuery::MinimumSpanningTree => TaskKind::MinimumSpanningTree,
            TraceQuery::Predecessor { .. } => TaskKind::Predecessor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceOutcome {
    Solved { answer: Answer },
    Unreachable { source: NodeId, target: NodeId },
    Cycle { stuck: Vec<NodeId> },
}

impl TraceOutcome {
    pub fn answer(&self) -> Option<&Answer> {
        match self {
            TraceOutcome::Solved { answer } => Some(answer),
            _ => None,
        }
    }

    fn text(&self) -> String {
        match self {
            TraceOutcome::Solved { answer } => answer.to_text(),
            TraceOutcome::Unreachable { source, target } => {
                format!("{ANSWER_PREFIX} node {target} is unreachable from node {source}")
            }
            TraceOutcome::Cycle { stuck } => format!(
                "{ANSWER_PREFIX} the graph has a cycle; nodes never removed: {}",
                render_list(stuck)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasoningTrace {
    pub task: TaskKind,
    pub query: TraceQuery,
    pub steps: Vec<TraceStep>,
    pub final_answer: TraceOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {reason}")]
pub struct ReplayError {
    pub step: usize,
    pub reason: String,
}

fn fmt_dist(d: Option<Weight>) -> String {
    d.map_or_else(|| "infinity".to_string(), |d| d.to_string())
}

fn arrow(g: &Graph) -> &'static str {
    if g.is_directed() {
        "->"
    } else {
        "-"
    }
}

struct Recorder {
    steps: Vec<TraceStep>,
}

impl Recorder {
    fn push(&mut self, phase: Phase, focus: Option<Focus>, state: TraceState, text: String) {
        let index = self.steps.len();
        self.steps.push(TraceStep {
            index,
            phase,
            focus,
            state,
            text,
        });
    }

    fn finish(mut self, query: TraceQuery, state: TraceState, outcome: TraceOutcome) -> ReasoningTrace {
        self.push(Phase::Finalize, None, state, outcome.text());
        ReasoningTrace {
            task: query.task(),
            query,
            steps: self.steps,
            final_answer: outcome,
        }
    }
}

fn edge_focus(src: NodeId, dst: NodeId, weight: Weight) -> Option<Focus> {
    Some(Focus::Edge { src, dst, weight })
}

/// Dijkstra from `s`, stopping once `t` is settled.
pub fn trace_dijkstra(g: &Graph, s: NodeId, t: NodeId) -> Result<ReasoningTrace, AlgoError> {
    g.check_node(s)?;
    g.check_node(t)?;
    let n = g.num_nodes();
    let arrow = arrow(g);
    let mut dist: Vec<Option<Weight>> = vec![None; n];
    let mut pred: Vec<Option<NodeId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut settled = Vec::new();
    dist[s] = Some(0);
    let snap = |dist: &Vec<Option<Weight>>, settled: &Vec<NodeId>| TraceState::Dijkstra {
        dist: dist.clone(),
        settled: settled.clone(),
    };

    let mut rec = Recorder { steps: Vec::new() };
    rec.push(
        Phase::Init,
        Some(Focus::Node { node: s }),
        snap(&dist, &settled),
        format!("Initialize distances from source {s}: dist({s}) = 0 and every other node starts at infinity."),
    );
    loop {
        let next = g
            .nodes()
            .filter(|&v| !done[v])
            .filter_map(|v| dist[v].map(|d| (d, v)))
            .min();
        let Some((d, u)) = next else { break };
        done[u] = true;
        settled.push(u);
        rec.push(
            Phase::Select,
            Some(Focus::Node { node: u }),
            snap(&dist, &settled),
            format!("Visit node {u}, the unvisited node with the smallest tentative distance {d}."),
        );
        if u == t {
            break;
        }
        for a in g.out_adj(u).iter().filter(|a| !done[a.node]) {
            let v = a.node;
            let cand = d + a.weight;
            let old = dist[v];
            if old.is_none_or(|o| cand < o) {
                dist[v] = Some(cand);
                pred[v] = Some(u);
                rec.push(
                    Phase::Update,
                    edge_focus(u, v, a.weight),
                    snap(&dist, &settled),
                    format!(
                        "Edge {u}{arrow}{v} with weight {}: dist({v}) improves from {} to {d} + {} = {cand}.",
                        a.weight,
                        fmt_dist(old),
                        a.weight
                    ),
                );
            } else {
                rec.push(
                    Phase::Skip,
                    edge_focus(u, v, a.weight),
                    snap(&dist, &settled),
                    format!(
                        "Edge {u}{arrow}{v} with weight {}: {d} + {} = {cand} does not improve dist({v}) = {}.",
                        a.weight,
                        a.weight,
                        fmt_dist(old)
                    ),
                );
            }
        }
    }
    let outcome = if done[t] {
        let mut nodes = vec![t];
        while let Some(p) = pred[*nodes.last().unwrap()] {
            nodes.push(p);
        }
        nodes.reverse();
        TraceOutcome::Solved {
            answer: Answer::Path {
                nodes,
                weight: dist[t].unwrap(),
            },
        }
    } else {
        TraceOutcome::Unreachable { source: s, target: t }
    };
    let state = snap(&dist, &settled);
    Ok(rec.finish(TraceQuery::ShortestPath { source: s, target: t }, state, outcome))
}

/// Kahn's algorithm, always removing the smallest-id zero in-degree node.
pub fn trace_kahn(g: &Graph) -> Result<ReasoningTrace, AlgoError> {
    if !g.is_directed() {
        return Err(AlgoError::DirectedRequired("topological_sort"));
    }
    let mut in_degree: Vec<usize> = g.nodes().map(|v| g.in_adj(v).len()).collect();
    let mut frontier: Vec<NodeId> = g.nodes().filter(|&v| in_degree[v] == 0).collect();
    let mut order = Vec::new();
    let snap = |in_degree: &Vec<usize>, frontier: &Vec<NodeId>, order: &Vec<NodeId>| {
        TraceState::Kahn {
            in_degree: in_degree.clone(),
            frontier: frontier.clone(),
            order: order.clone(),
        }
    };

    let mut rec = Recorder { steps: Vec::new() };
    let mut listing = String::new();
    for (v, d) in in_degree.iter().enumerate() {
        if v > 0 {
            listing.push_str(", ");
        }
        let _ = write!(listing, "{v}:{d}");
    }
    rec.push(
        Phase::Init,
        None,
        snap(&in_degree, &frontier, &order),
        format!(
            "Count incoming edges per node ({listing}); nodes with in-degree 0 are {}.",
            render_list(&frontier)
        ),
    );
    while !frontier.is_empty() {
        let u = frontier.remove(0);
        order.push(u);
        rec.push(
            Phase::Select,
            Some(Focus::Node { node: u }),
            snap(&in_degree, &frontier, &order),
            format!("Remove node {u}, the smallest id with in-degree 0, and append it to the order."),
        );
        for a in g.out_adj(u) {
            let v = a.node;
            in_degree[v] -= 1;
            let joined = in_degree[v] == 0;
            if joined {
                let pos = frontier.partition_point(|&x| x < v);
                frontier.insert(pos, v);
            }
            rec.push(
                Phase::Update,
                edge_focus(u, v, a.weight),
                snap(&in_degree, &frontier, &order),
                format!(
                    "Edge {u}->{v}: the in-degree of {v} drops from {} to {}{}.",
                    in_degree[v] + 1,
                    in_degree[v],
                    if joined { " and it becomes available" } else { "" }
                ),
            );
        }
    }
    let outcome = if order.len() == g.num_nodes() {
        TraceOutcome::Solved {
            answer: Answer::Sequence(order.clone()),
        }
    } else {
        let mut placed = vec![false; g.num_nodes()];
        for &v in &order {
            placed[v] = true;
        }
        TraceOutcome::Cycle {
            stuck: g.nodes().filter(|&v| !placed[v]).collect(),
        }
    };
    let state = snap(&in_degree, &frontier, &order);
    Ok(rec.finish(TraceQuery::TopologicalSort, state, outcome))
}

/// Prim from node 0 with `(key, id)` selection.
pub fn trace_prim(g: &Graph) -> Result<ReasoningTrace, AlgoError> {
    if g.is_directed() {
        return Err(AlgoError::UndirectedRequired("minimum_spanning_tree"));
    }
    let n = g.num_nodes();
    if crate::algo::connected_components(g) > 1 {
        return Err(AlgoError::Disconnected("minimum_spanning_tree"));
    }
    let mut key: Vec<Option<Weight>> = vec![None; n];
    let mut parent: Vec<Option<NodeId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut in_tree = Vec::new();
    let mut edges = Vec::new();
    let mut total = 0;
    let snap = |key: &Vec<Option<Weight>>, in_tree: &Vec<NodeId>| TraceState::Prim {
        key: key.clone(),
        in_tree: in_tree.clone(),
    };

    let mut rec = Recorder { steps: Vec::new() };
    if n > 0 {
        key[0] = Some(0);
    }
    rec.push(
        Phase::Init,
        (n > 0).then_some(Focus::Node { node: 0 }),
        snap(&key, &in_tree),
        "Start the tree at node 0: key(0) = 0 and every other key is infinity.".to_string(),
    );
    while let Some((k, u)) = g
        .nodes()
        .filter(|&v| !done[v])
        .filter_map(|v| key[v].map(|k| (k, v)))
        .min()
    {
        done[u] = true;
        in_tree.push(u);
        let via = match parent[u] {
            Some(p) => {
                edges.push((p.min(u), p.max(u)));
                total += k;
                format!(" through edge {p}-{u}")
            }
            None => String::new(),
        };
        rec.push(
            Phase::Select,
            Some(Focus::Node { node: u }),
            snap(&key, &in_tree),
            format!("Add node {u} with the smallest key {k} to the tree{via}."),
        );
        for a in g.out_adj(u).iter().filter(|a| !done[a.node]) {
            let v = a.node;
            let old = key[v];
            if old.is_none_or(|o| a.weight < o) {
                key[v] = Some(a.weight);
                parent[v] = Some(u);
                rec.push(
                    Phase::Update,
                    edge_focus(u, v, a.weight),
                    snap(&key, &in_tree),
                    format!(
                        "Edge {u}-{v} with weight {} lowers key({v}) from {} to {}.",
                        a.weight,
                        fmt_dist(old),
                        a.weight
                    ),
                );
            } else {
                rec.push(
                    Phase::Skip,
                    edge_focus(u, v, a.weight),
                    snap(&key, &in_tree),
                    format!(
                        "Edge {u}-{v} with weight {} does not lower key({v}) = {}.",
                        a.weight,
                        fmt_dist(old)
                    ),
                );
            }
        }
    }
    edges.sort_unstable();
    let outcome = TraceOutcome::Solved {
        answer: Answer::EdgeSet { edges, weight: total },
    };
    let state = snap(&key, &in_tree);
    Ok(rec.finish(TraceQuery::MinimumSpanningTree, state, outcome))
}

fn sorted_edges(g: &Graph) -> Vec<(NodeId, NodeId, Weight)> {
    let mut edges: Vec<_> = g.edges().iter().map(|e| (e.src, e.dst, e.weight)).collect();
    edges.sort_unstable();
    edges
}

/// Scans every edge in `(src, dst)` order, collecting those that end at `v`.
pub fn trace_predecessors(g: &Graph, v: NodeId) -> Result<ReasoningTrace, AlgoError> {
    if !g.is_directed() {
        return Err(AlgoError::DirectedRequired("predecessor"));
    }
    g.check_node(v)?;
    let mut found = Vec::new();
    let mut rec = Recorder { steps: Vec::new() };
    rec.push(
        Phase::Init,
        Some(Focus::Node { node: v }),
        TraceState::Predecessor { found: Vec::new() },
        format!("Scan all {} edges for those that end at node {v}.", g.num_edges()),
    );
    for (a, b, w) in sorted_edges(g) {
        if b == v {
            found.push(a);
            rec.push(
                Phase::Update,
                edge_focus(a, b, w),
                TraceState::Predecessor { found: found.clone() },
                format!("Edge {a}->{b} ends at {v}, so {a} is a predecessor."),
            );
        } else {
            rec.push(
                Phase::Skip,
                edge_focus(a, b, w),
                TraceState::Predecessor { found: found.clone() },
                format!("Edge {a}->{b} does not end at {v}."),
            );
        }
    }
    let outcome = TraceOutcome::Solved {
        answer: Answer::node_set(found.clone()),
    };
    Ok(rec.finish(
        TraceQuery::Predecessor { node: v },
        TraceState::Predecessor { found },
        outcome,
    ))
}

/// Traces whichever algorithm answers `query`.
pub fn trace_query(g: &Graph, query: TraceQuery) -> Result<ReasoningTrace, AlgoError> {
    match query {
        TraceQuery::ShortestPath { source, target } => trace_dijkstra(g, source, target),
        TraceQuery::TopologicalSort => trace_kahn(g),
        TraceQuery::MinimumSpanningTree => trace_prim(g),
        TraceQuery::Predecessor { node } => trace_predecessors(g, node),
    }
}

/// One numbered line per step; the finalize step renders as the
/// `Answer: …` line.
pub fn render_trace(trace: &ReasoningTrace) -> String {
    let mut out = String::new();
    for step in &trace.steps {
        if !out.is_empty() {
            out.push('\n');
        }
        if step.phase == Phase::Finalize {
            out.push_str(&step.text);
        } else {
            let _ = write!(out, "Step {}: {}", step.index + 1, step.text);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Replay

fn fail<T>(step: usize, reason: impl Into<String>) -> Result<T, ReplayError> {
    Err(ReplayError {
        step,
        reason: reason.into(),
    })
}

fn expect_edge(g: &Graph, idx: usize, focus: Option<Focus>) -> Result<(NodeId, NodeId, Weight), ReplayError> {
    match focus {
        Some(Focus::Edge { src, dst, weight }) => {
            if g.edge_weight(src, dst) != Some(weight) {
                return fail(idx, format!("edge {src}->{dst} with weight {weight} is not in the graph"));
            }
            Ok((src, dst, weight))
        }
        other => fail(idx, format!("expected an edge focus, found {other:?}")),
    }
}

fn expect_node(idx: usize, focus: Option<Focus>) -> Result<NodeId, ReplayError> {
    match focus {
        Some(Focus::Node { node }) => Ok(node),
        other => fail(idx, format!("expected a node focus, found {other:?}")),
    }
}

fn check_snapshot(idx: usize, actual: &TraceState, expected: TraceState) -> Result<(), ReplayError> {
    if *actual != expected {
        return fail(idx, format!("snapshot {actual:?} disagrees with replayed state {expected:?}"));
    }
    Ok(())
}

fn check_shape(trace: &ReasoningTrace) -> Result<(), ReplayError> {
    for (i, step) in trace.steps.iter().enumerate() {
        if step.index != i {
            return fail(i, format!("index {} out of sequence", step.index));
        }
        let last = i + 1 == trace.steps.len();
        if (step.phase == Phase::Finalize) != last {
            return fail(i, "exactly one finalize step is allowed and it must be last");
        }
    }
    match trace.steps.first() {
        Some(s) if s.phase == Phase::Init || trace.steps.len() == 1 => Ok(()),
        Some(_) => fail(0, "trace must open with an init step"),
        None => fail(0, "empty trace"),
    }
}

/// Rebuilds the outcome from the recorded transitions without running the
/// algorithm. Fails at the first step whose transition is illegal or whose
/// snapshot disagrees with the replayed state.
pub fn replay_trace(g: &Graph, trace: &ReasoningTrace) -> Result<TraceOutcome, ReplayError> {
    check_shape(trace)?;
    if trace.task != trace.query.task() {
        return fail(0, "task does not match query");
    }
    let outcome = match trace.query {
        TraceQuery::ShortestPath { source, target } => replay_dijkstra(g, trace, source, target)?,
        TraceQuery::TopologicalSort => replay_kahn(g, trace)?,
        TraceQuery::MinimumSpanningTree => replay_prim(g, trace)?,
        TraceQuery::Predecessor { node } => replay_predecessors(g, trace, node)?,
    };
    let last = trace.steps.len() - 1;
    if outcome != trace.final_answer {
        return fail(last, format!("recorded answer {:?} differs from replay {outcome:?}", trace.final_answer));
    }
    if trace.steps[last].text != outcome.text() {
        return fail(last, "finalize text does not state the replayed answer");
    }
    Ok(outcome)
}

fn replay_dijkstra(g: &Graph, trace: &ReasoningTrace, s: NodeId, t: NodeId) -> Result<TraceOutcome, ReplayError> {
    let n = g.num_nodes();
    if s >= n || t >= n {
        return fail(0, "query node out of range");
    }
    let mut dist: Vec<Option<Weight>> = vec![None; n];
    let mut pred: Vec<Option<NodeId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut settled: Vec<NodeId> = Vec::new();
    let mut pending: std::collections::VecDeque<NodeId> = Default::default();
    dist[s] = Some(0);

    for step in &trace.steps {
        let idx = step.index;
        match step.phase {
            Phase::Init => {}
            Phase::Select => {
                if !pending.is_empty() {
                    return fail(idx, format!("edges to {pending:?} were never examined"));
                }
                let u = expect_node(idx, step.focus)?;
                if u >= n || done[u] {
                    return fail(idx, format!("node {u} cannot be visited"));
                }
                let Some(d) = dist[u] else {
                    return fail(idx, format!("node {u} has infinite distance"));
                };
                if let Some(&(bd, bv)) = g
                    .nodes()
                    .filter(|&v| !done[v])
                    .filter_map(|v| dist[v].map(|d| (d, v)))
                    .collect::<Vec<_>>()
                    .iter()
                    .min()
                {
                    if (bd, bv) != (d, u) {
                        return fail(idx, format!("node {bv} at distance {bd} should be visited before {u}"));
                    }
                }
                if let Some(&prev) = settled.last() {
                    if dist[prev] > Some(d) {
                        return fail(idx, "settled distances decreased");
                    }
                }
                done[u] = true;
                settled.push(u);
                if u != t {
                    pending = g.out_adj(u).iter().map(|a| a.node).filter(|&v| !done[v]).collect();
                }
            }
            Phase::Update | Phase::Skip => {
                let (u, v, w) = expect_edge(g, idx, step.focus)?;
                if settled.last() != Some(&u) || pending.pop_front() != Some(v) {
                    return fail(idx, format!("edge {u}->{v} examined out of turn"));
                }
                let cand = dist[u].unwrap() + w;
                let improves = dist[v].is_none_or(|o| cand < o);
                match (step.phase, improves) {
                    (Phase::Update, true) => {
                        dist[v] = Some(cand);
                        pred[v] = Some(u);
                    }
                    (Phase::Skip, false) => {}
                    (Phase::Update, false) => return fail(idx, format!("update on {u}->{v} does not improve")),
                    _ => return fail(idx, format!("skip on {u}->{v} hides an improvement")),
                }
            }
            Phase::Finalize => {
                if !pending.is_empty() {
                    return fail(idx, format!("edges to {pending:?} were never examined"));
                }
                let reachable_left = g.nodes().any(|v| !done[v] && dist[v].is_some());
                if !done[t] && reachable_left {
                    return fail(idx, "finalized while reachable nodes remain");
                }
            }
        }
        let expected = TraceState::Dijkstra {
            dist: dist.clone(),
            settled: settled.clone(),
        };
        check_snapshot(idx, &step.state, expected)?;
    }
    Ok(if done[t] {
        let mut nodes = vec![t];
        while let Some(p) = pred[*nodes.last().unwrap()] {
            if nodes.len() > n {
                return fail(trace.steps.len() - 1, "predecessor chain loops");
            }
            nodes.push(p);
        }
        nodes.reverse();
        TraceOutcome::Solved {
            answer: Answer::Path {
                nodes,
                weight: dist[t].unwrap(),
            },
        }
    } else {
        TraceOutcome::Unreachable { source: s, target: t }
    })
}

fn replay_kahn(g: &Graph, trace: &ReasoningTrace) -> Result<TraceOutcome, ReplayError> {
    let n = g.num_nodes();
    let mut in_degree: Vec<usize> = g.nodes().map(|v| g.in_adj(v).len()).collect();
    let mut frontier: Vec<NodeId> = g.nodes().filter(|&v| in_degree[v] == 0).collect();
    let mut order: Vec<NodeId> = Vec::new();
    let mut pending: std::collections::VecDeque<NodeId> = Default::default();
    let mut current = None;

    for step in &trace.steps {
        let idx = step.index;
        match step.phase {
            Phase::Init => {}
            Phase::Select => {
                if !pending.is_empty() {
                    return fail(idx, format!("edges to {pending:?} were never examined"));
                }
                let u = expect_node(idx, step.focus)?;
                if frontier.first() != Some(&u) {
                    return fail(idx, format!("node {u} is not the smallest available node"));
                }
                frontier.remove(0);
                order.push(u);
                current = Some(u);
                pending = g.out_adj(u).iter().map(|a| a.node).collect();
            }
            Phase::Update => {
                let (u, v, _) = expect_edge(g, idx, step.focus)?;
                if current != Some(u) || pending.pop_front() != Some(v) {
                    return fail(idx, format!("edge {u}->{v} examined out of turn"));
                }
                if in_degree[v] == 0 {
                    return fail(idx, format!("in-degree of {v} would become negative"));
                }
                in_degree[v] -= 1;
                if in_degree[v] == 0 {
                    let pos = frontier.partition_point(|&x| x < v);
                    frontier.insert(pos, v);
                }
            }
            Phase::Skip => return fail(idx, "Kahn traces have no skip steps"),
            Phase::Finalize => {
                if !pending.is_empty() || !frontier.is_empty() {
                    return fail(idx, "finalized with work remaining");
                }
            }
        }
        let expected = TraceState::Kahn {
            in_degree: in_degree.clone(),
            frontier: frontier.clone(),
            order: order.clone(),
        };
        check_snapshot(idx, &step.state, expected)?;
    }
    Ok(if order.len() == n {
        TraceOutcome::Solved {
            answer: Answer::Sequence(order),
        }
    } else {
        let mut placed = vec![false; n];
        for &v in &order {
            placed[v] = true;
        }
        TraceOutcome::Cycle {
            stuck: (0..n).filter(|&v| !placed[v]).collect(),
        }
    })
}

fn replay_prim(g: &Graph, trace: &ReasoningTrace) -> Result<TraceOutcome, ReplayError> {
    let n = g.num_nodes();
    let mut key: Vec<Option<Weight>> = vec![None; n];
    let mut parent: Vec<Option<NodeId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut in_tree: Vec<NodeId> = Vec::new();
    let mut edges = Vec::new();
    let mut total = 0;
    let mut pending: std::collections::VecDeque<NodeId> = Default::default();
    if n > 0 {
        key[0] = Some(0);
    }

    for step in &trace.steps {
        let idx = step.index;
        match step.phase {
            Phase::Init => {}
            Phase::Select => {
                if !pending.is_empty() {
                    return fail(idx, format!("edges to {pending:?} were never examined"));
                }
                let u = expect_node(idx, step.focus)?;
                let best = g
                    .nodes()
                    .filter(|&v| !done[v])
                    .filter_map(|v| key[v].map(|k| (k, v)))
                    .min();
                let Some((k, b)) = best else {
                    return fail(idx, "no node is available");
                };
                if b != u {
                    return fail(idx, format!("node {b} with key {k} should join before {u}"));
                }
                done[u] = true;
                in_tree.push(u);
                if let Some(p) = parent[u] {
                    edges.push((p.min(u), p.max(u)));
                    total += k;
                }
                pending = g.out_adj(u).iter().map(|a| a.node).filter(|&v| !done[v]).collect();
            }
            Phase::Update | Phase::Skip => {
                let (u, v, w) = expect_edge(g, idx, step.focus)?;
                if in_tree.last() != Some(&u) || pending.pop_front() != Some(v) {
                    return fail(idx, format!("edge {u}-{v} examined out of turn"));
                }
                let lowers = key[v].is_none_or(|o| w < o);
                match (step.phase, lowers) {
                    (Phase::Update, true) => {
                        key[v] = Some(w);
                        parent[v] = Some(u);
                    }
                    (Phase::Skip, false) => {}
                    (Phase::Update, false) => return fail(idx, format!("update on {u}-{v} does not lower the key")),
                    _ => return fail(idx, format!("skip on {u}-{v} hides a lower key")),
                }
            }
            Phase::Finalize => {
                if !pending.is_empty() || in_tree.len() != n {
                    return fail(idx, "finalized before the tree spans every node");
                }
            }
        }
        let expected = TraceState::Prim {
            key: key.clone(),
            in_tree: in_tree.clone(),
        };
        check_snapshot(idx, &step.state, expected)?;
    }
    edges.sort_unstable();
    Ok(TraceOutcome::Solved {
        answer: Answer::EdgeSet { edges, weight: total },
    })
}

fn replay_predecessors(g: &Graph, trace: &ReasoningTrace, v: NodeId) -> Result<TraceOutcome, ReplayError> {
    if v >= g.num_nodes() {
        return fail(0, "query node out of range");
    }
    let mut pending: std::collections::VecDeque<_> = sorted_edges(g).into();
    let mut found = Vec::new();
    for step in &trace.steps {
        let idx = step.index;
        match step.phase {
            Phase::Init => {}
            Phase::Select => return fail(idx, "predecessor scans have no select steps"),
            Phase::Update | Phase::Skip => {
                let (a, b, w) = expect_edge(g, idx, step.focus)?;
                if pending.pop_front() != Some((a, b, w)) {
                    return fail(idx, format!("edge {a}->{b} scanned out of order"));
                }
                match (step.phase, b == v) {
                    (Phase::Update, true) => found.push(a),
                    (Phase::Skip, false) => {}
                    _ => return fail(idx, format!("edge {a}->{b} misclassified")),
                }
            }
            Phase::Finalize => {
                if !pending.is_empty() {
                    return fail(idx, format!("{} edges were never scanned", pending.len()));
                }
            }
        }
        check_snapshot(idx, &step.state, TraceState::Predecessor { found: found.clone() })?;
    }
    Ok(TraceOutcome::Solved {
        answer: Answer::node_set(found),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn wg(directed: bool, n: usize, edges: &[(usize, usize, u64)]) -> Graph {
        Graph::new(directed, true, n, edges.iter().map(|&(a, b, w)| Edge::new(a, b, w)).collect()).unwrap()
    }

    fn phases(t: &ReasoningTrace) -> Vec<Phase> {
        t.steps.iter().map(|s| s.phase).collect()
    }

    #[test]
    fn dijkstra_source_equals_target() {
        let g = wg(true, 3, &[(0, 1, 2)]);
        let t = trace_dijkstra(&g, 1, 1).unwrap();
        assert_eq!(phases(&t), vec![Phase::Init, Phase::Select, Phase::Finalize]);
        assert_eq!(
            t.final_answer.answer(),
            Some(&Answer::Path { nodes: vec![1], weight: 0 })
        );
        assert_eq!(replay_trace(&g, &t).unwrap(), t.final_answer);
    }

    #[test]
    fn dijkstra_single_edge_records_relaxation() {
        let g = wg(true, 2, &[(0, 1, 4)]);
        let t = trace_dijkstra(&g, 0, 1).unwrap();
        let update = t.steps.iter().find(|s| s.phase == Phase::Update).unwrap();
        assert_eq!(update.focus, Some(Focus::Edge { src: 0, dst: 1, weight: 4 }));
        assert!(update.text.contains("from infinity to 0 + 4 = 4"), "{}", update.text);
        assert_eq!(
            update.state,
            TraceState::Dijkstra { dist: vec![Some(0), Some(4)], settled: vec![0] }
        );
        assert_eq!(t.final_answer.answer(), Some(&Answer::Path { nodes: vec![0, 1], weight: 4 }));
    }

    #[test]
    fn dijkstra_unreachable_finalizes() {
        let g = wg(true, 3, &[(1, 0, 1)]);
        let t = trace_dijkstra(&g, 0, 2).unwrap();
        assert_eq!(t.final_answer, TraceOutcome::Unreachable { source: 0, target: 2 });
        assert_eq!(t.steps.last().unwrap().phase, Phase::Finalize);
        assert_eq!(replay_trace(&g, &t).unwrap(), t.final_answer);
    }

    #[test]
    fn corrupted_distance_is_caught_at_its_step() {
        let g = wg(false, 4, &[(0, 1, 2), (1, 2, 2), (0, 2, 5), (2, 3, 1)]);
        let mut t = trace_dijkstra(&g, 0, 3).unwrap();
        let k = t.steps.iter().position(|s| s.phase == Phase::Update).unwrap();
        if let TraceState::Dijkstra { dist, .. } = &mut t.steps[k].state {
            dist[1] = Some(99);
        }
        assert_eq!(replay_trace(&g, &t).unwrap_err().step, k);
    }

    #[test]
    fn kahn_edgeless_and_chain() {
        let g = Graph::new(true, false, 3, vec![]).unwrap();
        let t = trace_kahn(&g).unwrap();
        let selected: Vec<_> = t
            .steps
            .iter()
            .filter(|s| s.phase == Phase::Select)
            .map(|s| s.focus)
            .collect();
        assert_eq!(
            selected,
            vec![0, 1, 2].into_iter().map(|node| Some(Focus::Node { node })).collect::<Vec<_>>()
        );

        let chain = Graph::new(true, false, 2, vec![Edge::unit(0, 1)]).unwrap();
        let t = trace_kahn(&chain).unwrap();
        let updates: Vec<_> = t.steps.iter().filter(|s| s.phase == Phase::Update).collect();
        assert_eq!(updates.len(), 1);
        assert!(updates[0].text.contains("drops from 1 to 0"));
        assert_eq!(replay_trace(&chain, &t).unwrap(), t.final_answer);
    }

    #[test]
    fn kahn_cycle_records_stuck_nodes() {
        let g = Graph::new(true, false, 3, vec![Edge::unit(1, 2), Edge::unit(2, 1)]).unwrap();
        let t = trace_kahn(&g).unwrap();
        assert_eq!(t.final_answer, TraceOutcome::Cycle { stuck: vec![1, 2] });
        assert_eq!(replay_trace(&g, &t).unwrap(), t.final_answer);
    }

    #[test]
    fn prim_two_nodes() {
        let g = wg(false, 2, &[(0, 1, 1)]);
        let t = trace_prim(&g).unwrap();
        assert_eq!(
            phases(&t),
            vec![Phase::Init, Phase::Select, Phase::Update, Phase::Select, Phase::Finalize]
        );
        assert_eq!(t.final_answer.answer(), Some(&Answer::EdgeSet { edges: vec![(0, 1)], weight: 1 }));
        assert!(trace_prim(&wg(false, 3, &[(0, 1, 1)])).is_err());
    }

    #[test]
    fn prim_tree_input_keeps_all_edges() {
        let g = wg(false, 4, &[(0, 1, 3), (1, 2, 9), (1, 3, 2)]);
        let t = trace_prim(&g).unwrap();
        assert_eq!(
            t.final_answer.answer(),
            Some(&Answer::EdgeSet { edges: vec![(0, 1), (1, 2), (1, 3)], weight: 14 })
        );
    }

    #[test]
    fn predecessor_examples() {
        let g = Graph::new(true, false, 3, vec![Edge::unit(0, 1), Edge::unit(2, 1)]).unwrap();
        let t = trace_predecessors(&g, 0).unwrap();
        assert!(t.steps[1..t.steps.len() - 1].iter().all(|s| s.phase == Phase::Skip));
        assert_eq!(t.final_answer.answer(), Some(&Answer::NodeSet(vec![])));

        let g = Graph::new(true, false, 3, vec![Edge::unit(0, 2), Edge::unit(1, 2)]).unwrap();
        let t = trace_predecessors(&g, 2).unwrap();
        assert_eq!(t.steps.iter().filter(|s| s.phase == Phase::Update).count(), 2);
        assert_eq!(t.final_answer.answer(), Some(&Answer::NodeSet(vec![0, 1])));
        assert!(trace_predecessors(&Graph::new(false, false, 2, vec![]).unwrap(), 0).is_err());
    }

    #[test]
    fn render_is_deterministic_and_ends_with_answer() {
        let g = wg(false, 3, &[(0, 1, 2), (1, 2, 3)]);
        let t = trace_dijkstra(&g, 0, 2).unwrap();
        let text = render_trace(&t);
        assert_eq!(text, render_trace(&t));
        assert_eq!(text.lines().count(), t.steps.len());
        assert_eq!(text.lines().last().unwrap(), "Answer: [0, 1, 2] with total weight 5");
        assert!(text.starts_with("Step 1: "));
    }

    #[test]
    fn finalize_only_trace_renders_single_answer_line() {
        let t = ReasoningTrace {
            task: TaskKind::TopologicalSort,
            query: TraceQuery::TopologicalSort,
            steps: vec![TraceStep {
                index: 0,
                phase: Phase::Finalize,
                focus: None,
                state: TraceState::Kahn { in_degree: vec![], frontier: vec![], order: vec![] },
                text: "Answer: []".into(),
            }],
            final_answer: TraceOutcome::Solved { answer: Answer::Sequence(vec![]) },
        };
        assert_eq!(render_trace(&t), "Answer: []");
        let empty = Graph::new(true, false, 0, vec![]).unwrap();
        assert_eq!(replay_trace(&empty, &t).unwrap(), t.final_answer);
    }

    #[test]
    fn trace_json_shape() {
        let g = Graph::new(true, false, 2, vec![Edge::unit(0, 1)]).unwrap();
        let t = trace_predecessors(&g, 1).unwrap();
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        assert_eq!(v["task"], "predecessor");
        let step = &v["steps"][1];
        for key in ["index", "phase", "focus", "state", "text"] {
            assert!(step.get(key).is_some(), "missing {key}");
        }
        let back: ReasoningTrace = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }
}
