//! Task-specific grading of model outputs against dataset samples.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algo::{self, Traversal};
use crate::answer::{last_answer_body, parse_body, Answer};
use crate::dataset::TaskSample;
use crate::graph::{Graph, NodeId, Weight};
use crate::instance::TaskParams;
use crate::task::{Category, TaskKind};

/// Allowed gap between real answers after both are rounded to 4 decimals.
pub const REAL_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DfsMode {
    /// Exact match with the ascending-id preorder.
    #[default]
    Canonical,
    /// Any order a depth-first search could produce.
    Validity,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeOptions {
    pub dfs_mode: DfsMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub correct: bool,
    pub reason: String,
}

impl Verdict {
    fn ok() -> Self {
        Self {
            correct: true,
            reason: "correct".into(),
        }
    }

    fn wrong(reason: impl Into<String>) -> Self {
        Self {
            correct: false,
            reason: reason.into(),
        }
    }
}

/// Parses the last `Answer:` line of `text` by the task's grammar.
pub fn parse_answer(text: &str, task: TaskKind) -> Option<Answer> {
    parse_body(last_answer_body(text)?, task)
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn check_topological(g: &Graph, order: &[NodeId]) -> Result<(), String> {
    let n = g.num_nodes();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(format!("not a permutation of the nodes (node {v})"));
        }
        pos[v] = i;
    }
    if order.len() != n {
        return Err(format!("lists {} of {n} nodes", order.len()));
    }
    for e in g.edges() {
        if pos[e.src] > pos[e.dst] {
            return Err(format!("edge {}->{} violated", e.src, e.dst));
        }
    }
    Ok(())
}

fn path_weight(g: &Graph, nodes: &[NodeId]) -> Result<Weight, String> {
    nodes.windows(2).try_fold(0, |acc, w| {
        g.edge_weight(w[0], w[1])
            .map(|x| acc + x)
            .ok_or_else(|| format!("edge {}->{} is not in the graph", w[0], w[1]))
    })
}

fn check_spanning_tree(g: &Graph, edges: &[(NodeId, NodeId)]) -> Result<Weight, String> {
    let n = g.num_nodes();
    if edges.len() + 1 != n.max(1) {
        return Err(format!("{} edges cannot span {n} nodes", edges.len()));
    }
    let mut parent: Vec<NodeId> = (0..n).collect();
    fn find(p: &mut [NodeId], mut x: NodeId) -> NodeId {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut total = 0;
    for &(a, b) in edges {
        let w = g.edge_weight(a, b).ok_or_else(|| format!("edge ({a}, {b}) is not in the graph"))?;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return Err(format!("edge ({a}, {b}) closes a cycle"));
        }
        parent[ra] = rb;
        total += w;
    }
    Ok(total)
}

/// Whether `order` is a preorder some depth-first search from `start` could
/// produce when neighbors may be taken in any order.
fn check_dfs_order(g: &Graph, start: NodeId, order: &[NodeId]) -> Result<(), String> {
    let n = g.num_nodes();
    if order.first() != Some(&start) {
        return Err(format!("does not start at node {start}"));
    }
    let mut visited = vec![false; n];
    let mut stack = vec![start];
    visited[start] = true;
    for &v in &order[1..] {
        if v >= n || visited[v] {
            return Err(format!("node {v} repeated or out of range"));
        }
        loop {
            let Some(&top) = stack.last() else {
                return Err(format!("node {v} is not reachable from {start}"));
            };
            if g.out_adj(top).iter().any(|a| a.node == v) {
                break;
            }
            if g.out_adj(top).iter().any(|a| !visited[a.node]) {
                return Err(format!("node {v} visited before finishing node {top}"));
            }
            stack.pop();
        }
        visited[v] = true;
        stack.push(v);
    }
    let reach = algo::traverse(g, Traversal::Dfs, start).map_err(|e| e.to_string())?;
    if reach.len() != order.len() {
        return Err(format!("visits {} of {} reachable nodes", order.len(), reach.len()));
    }
    Ok(())
}

pub fn grade_sample(sample: &TaskSample, model_text: &str, opts: GradeOptions) -> Verdict {
    let Some(got) = parse_answer(model_text, sample.task) else {
        return Verdict::wrong("unparsable");
    };
    let gold = &sample.answer;
    if got.shape() != gold.shape() {
        return Verdict::wrong(format!("answer shape {:?} does not fit {}", got.shape(), sample.task));
    }
    let g = &sample.graph;
    let result: Result<(), String> = match (sample.task, gold, &got) {
        (TaskKind::TopologicalSort, _, Answer::Sequence(order)) => check_topological(g, order),
        (TaskKind::Dfs, _, Answer::Sequence(order)) if opts.dfs_mode == DfsMode::Validity => {
            match sample.params {
                TaskParams::Node { node } => check_dfs_order(g, node, order),
                _ => Err("sample has no start node".into()),
            }
        }
        (_, Answer::Sequence(a), Answer::Sequence(b)) => {
            if a == b {
                Ok(())
            } else {
                Err("exact order".into())
            }
        }
        (_, Answer::NodeSet(a), Answer::NodeSet(b)) => {
            if a == b {
                Ok(())
            } else {
                Err("set mismatch".into())
            }
        }
        (_, Answer::Real(a), Answer::Real(b)) => {
            if (round4(*a) - round4(*b)).abs() <= REAL_TOLERANCE {
                Ok(())
            } else {
                Err(format!("value {b} differs from {a}"))
            }
        }
        (TaskKind::ShortestPath, Answer::Path { weight: best, .. }, Answer::Path { nodes, weight }) => {
            let (s, t) = match sample.params {
                TaskParams::SourceTarget { source, target } => (source, target),
                _ => return Verdict::wrong("sample has no source and target"),
            };
            if nodes.first() != Some(&s) || nodes.last() != Some(&t) {
                Err(format!("path does not run from {s} to {t}"))
            } else {
                path_weight(g, nodes).and_then(|w| {
                    if w != *best {
                        Err(format!("path weight {w} is not the optimum {best}"))
                    } else if *weight != w {
                        Err(format!("stated weight {weight} differs from path weight {w}"))
                    } else {
                        Ok(())
                    }
                })
            }
        }
        (TaskKind::MinimumSpanningTree, Answer::EdgeSet { weight: best, .. }, Answer::EdgeSet { edges, weight }) => {
            check_spanning_tree(g, edges).and_then(|w| {
                if w != *best {
                    Err(format!("tree weight {w} is not the optimum {best}"))
                } else if *weight != w {
                    Err(format!("stated weight {weight} differs from tree weight {w}"))
                } else {
                    Ok(())
                }
            })
        }
        (_, a, b) => {
            if a == b {
                Ok(())
            } else {
                Err(format!("expected {} got {}", a.body(), b.body()))
            }
        }
    };
    match result {
        Ok(()) => Verdict::ok(),
        Err(reason) => Verdict::wrong(reason),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelAnswer {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradeError {
    #[error("duplicate answer id {0}")]
    DuplicateAnswer(String),
    #[error("duplicate sample id {0}")]
    DuplicateSample(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub correct: usize,
    pub total: usize,
}

impl Tally {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }

    /// Percentage to two decimals, rounded half up from the exact ratio.
    pub fn percent(&self) -> String {
        if self.total == 0 {
            return "0.00%".into();
        }
        let (c, t) = (self.correct as u128, self.total as u128);
        let hundredths = (c * 20_000 + t) / (2 * t);
        format!("{}.{:02}%", hundredths / 100, hundredths % 100)
    }

    fn add(&mut self, correct: bool) {
        self.total += 1;
        self.correct += usize::from(correct);
    }
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} = {}", self.correct, self.total, self.percent())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub id: String,
    pub task: TaskKind,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeReport {
    pub overall: Tally,
    pub overall_accuracy: f64,
    pub overall_percent: String,
    pub per_task: BTreeMap<TaskKind, Tally>,
    pub per_category: BTreeMap<Category, Tally>,
    pub failures: Vec<Failure>,
}

/// Grades every sample; samples without an answer count as incorrect.
pub fn grade_run(
    samples: &[TaskSample],
    answers: &[ModelAnswer],
    opts: GradeOptions,
) -> Result<GradeReport, GradeError> {
    let mut seen = BTreeSet::new();
    for s in samples {
        if !seen.insert(s.id.as_str()) {
            return Err(GradeError::DuplicateSample(s.id.clone()));
        }
    }
    let mut by_id: BTreeMap<&str, &str> = BTreeMap::new();
    for a in answers {
        if by_id.insert(a.id.as_str(), a.text.as_str()).is_some() {
            return Err(GradeError::DuplicateAnswer(a.id.clone()));
        }
    }
    for id in by_id.keys().filter(|id| !seen.contains(*id)) {
        log::warn!("answer_id={id} ignored=no matching sample");
    }
    let verdicts: Vec<Verdict> = samples
        .par_iter()
        .map(|s| match by_id.get(s.id.as_str()) {
            Some(text) => grade_sample(s, text, opts),
            None => Verdict::wrong("missing answer"),
        })
        .collect();

    let mut overall = Tally::default();
    let mut per_task: BTreeMap<TaskKind, Tally> = BTreeMap::new();
    let mut per_category: BTreeMap<Category, Tally> = BTreeMap::new();
    let mut failures = Vec::new();
    for (s, v) in samples.iter().zip(verdicts) {
        overall.add(v.correct);
        per_task.entry(s.task).or_default().add(v.correct);
        per_category.entry(s.task.category()).or_default().add(v.correct);
        if !v.correct {
            failures.push(Failure {
                id: s.id.clone(),
                task: s.task,
                reason: v.reason,
            });
        }
    }
    failures.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(GradeReport {
        overall_accuracy: overall.accuracy(),
        overall_percent: overall.percent(),
        overall,
        per_task,
        per_category,
        failures,
    })
}

/// Task-by-model accuracy matrix as CSV (one row per task, one column per
/// model), ready for heatmap plotting.
pub fn accuracy_matrix_csv(reports: &[(String, GradeReport)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["task".to_string(), "category".to_string()];
    header.extend(reports.iter().map(|(name, _)| name.clone()));
    w.write_record(&header).expect("in-memory write");
    for task in TaskKind::ALL {
        let mut row = vec![task.name().to_string(), task.category().name().to_string()];
        for (_, r) in reports {
            row.push(match r.per_task.get(&task) {
                Some(t) if t.total > 0 => format!("{:.4}", t.accuracy()),
                _ => String::new(),
            });
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{build_eval_set, GraphOrigin};
    use crate::graph::Edge;
    use crate::instance::{instruction, solve};

    fn sample(task: TaskKind, g: Graph, params: TaskParams) -> TaskSample {
        let answer = solve(task, &g, params).unwrap();
        TaskSample {
            id: "s".into(),
            task,
            difficulty: task.difficulty(),
            instruction: instruction(task, &g, params),
            cot: None,
            answer_text: answer.to_text(),
            answer,
            params,
            origin: GraphOrigin::Synthetic,
            graph: g,
        }
    }

    fn grade(s: &TaskSample, text: &str) -> Verdict {
        grade_sample(s, text, GradeOptions::default())
    }

    #[test]
    fn bfs_requires_exact_order() {
        let g = Graph::new(false, false, 3, vec![Edge::unit(0, 1), Edge::unit(0, 2)]).unwrap();
        let s = sample(TaskKind::Bfs, g, TaskParams::Node { node: 0 });
        assert!(grade(&s, "Answer: [0, 1, 2]").correct);
        let v = grade(&s, "Answer: [0, 2, 1]");
        assert!(!v.correct);
        assert_eq!(v.reason, "exact order");
    }

    #[test]
    fn alternative_shortest_path_is_accepted() {
        let g = Graph::new(
            false,
            true,
            4,
            vec![Edge::new(0, 1, 1), Edge::new(1, 3, 1), Edge::new(0, 2, 1), Edge::new(2, 3, 1)],
        )
        .unwrap();
        let s = sample(TaskKind::ShortestPath, g, TaskParams::SourceTarget { source: 0, target: 3 });
        assert_eq!(s.answer_text, "Answer: [0, 1, 3] with total weight 2");
        assert!(grade(&s, "Answer: [0, 2, 3] with total weight 2").correct);
        assert!(!grade(&s, "Answer: [0, 2, 3] with total weight 3").correct);
        assert!(!grade(&s, "Answer: [0, 3] with total weight 1").correct);
    }

    #[test]
    fn topological_violation_names_the_edge() {
        let g = Graph::new(true, false, 3, vec![Edge::unit(0, 1), Edge::unit(2, 1)]).unwrap();
        let s = sample(TaskKind::TopologicalSort, g, TaskParams::None {});
        assert!(grade(&s, "Answer: [2, 0, 1]").correct);
        let v = grade(&s, "Answer: [0, 1, 2]");
        assert!(!v.correct);
        assert_eq!(v.reason, "edge 2->1 violated");
    }

    #[test]
    fn spanning_tree_alternatives() {
        let g = Graph::new(false, true, 3, vec![Edge::new(0, 1, 1), Edge::new(1, 2, 1), Edge::new(0, 2, 1)]).unwrap();
        let s = sample(TaskKind::MinimumSpanningTree, g, TaskParams::None {});
        assert!(grade(&s, "Answer: [(0, 2), (1, 2)] with total weight 2").correct);
        assert!(!grade(&s, "Answer: [(0, 1)] with total weight 1").correct);
    }

    #[test]
    fn dfs_modes() {
        let g = Graph::new(false, false, 3, vec![Edge::unit(0, 1), Edge::unit(0, 2)]).unwrap();
        let s = sample(TaskKind::Dfs, g, TaskParams::Node { node: 0 });
        assert!(!grade(&s, "Answer: [0, 2, 1]").correct);
        let lax = GradeOptions { dfs_mode: DfsMode::Validity };
        assert!(grade_sample(&s, "Answer: [0, 2, 1]", lax).correct);
        assert!(!grade_sample(&s, "Answer: [0, 2]", lax).correct);
    }

    #[test]
    fn real_tolerance() {
        let g = Graph::new(false, false, 3, vec![Edge::unit(0, 1), Edge::unit(1, 2)]).unwrap();
        let s = sample(TaskKind::JaccardSimilarity, g, TaskParams::Pair { u: 0, v: 2 });
        assert!(grade(&s, "Answer: 1.0").correct);
        assert!(grade(&s, "Answer: 0.9991").correct);
        assert!(!grade(&s, "Answer: 0.9980").correct);
        assert_eq!(grade(&s, "I give up").reason, "unparsable");
    }

    #[test]
    fn percent_arithmetic() {
        assert_eq!(Tally { correct: 170, total: 190 }.percent(), "89.47%");
        assert_eq!(Tally { correct: 190, total: 190 }.percent(), "100.00%");
        assert_eq!(Tally { correct: 0, total: 190 }.percent(), "0.00%");
        assert_eq!(Tally { correct: 1, total: 8 }.percent(), "12.50%");
    }

    #[test]
    fn run_level_rules() {
        let (samples, _) = build_eval_set(11).unwrap();
        let gold: Vec<ModelAnswer> = samples
            .iter()
            .map(|s| ModelAnswer { id: s.id.clone(), text: s.answer_text.clone() })
            .collect();
        let r = grade_run(&samples, &gold, GradeOptions::default()).unwrap();
        assert_eq!(r.overall_percent, "100.00%");
        let empty = grade_run(&samples, &[], GradeOptions::default()).unwrap();
        assert_eq!(empty.overall_percent, "0.00%");
        assert_eq!(empty.failures.len(), 190);
        let mut dup = gold.clone();
        dup.push(gold[0].clone());
        assert!(matches!(grade_run(&samples, &dup, GradeOptions::default()), Err(GradeError::DuplicateAnswer(_))));
        let mut shuffled = gold;
        shuffled.reverse();
        assert_eq!(grade_run(&samples, &shuffled, GradeOptions::default()).unwrap(), r);
        let csv = accuracy_matrix_csv(&[("gold".into(), r)]);
        assert_eq!(csv.lines().count(), 20);
        assert!(csv.starts_with("task,category,gold\nbfs,traversal,1.0000"));
    }
}
