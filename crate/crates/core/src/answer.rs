//! Task-typed answers and the canonical `Answer: …` text grammar shared by
//! the dataset builder, trace renderer and grader.

use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::graph::{NodeId, Weight};
use crate::task::{AnswerShape, TaskKind};

pub const ANSWER_PREFIX: &str = "Answer:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Answer {
    /// Ordered node list (traversals, topological order).
    Sequence(Vec<NodeId>),
    /// Sorted node set.
    NodeSet(Vec<NodeId>),
    Count(u64),
    Boolean(bool),
    /// Kept at the four decimals it is rendered with.
    Real(f64),
    Path { nodes: Vec<NodeId>, weight: Weight },
    EdgeSet { edges: Vec<(NodeId, NodeId)>, weight: Weight },
}

impl Answer {
    pub fn node_set(mut nodes: Vec<NodeId>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        Answer::NodeSet(nodes)
    }

    /// Rounds through the four-decimal rendering so that render/parse is exact.
    pub fn real(x: f64) -> Self {
        Answer::Real(format!("{x:.4}").parse().expect("formatted float parses"))
    }

    pub fn shape(&self) -> AnswerShape {
        match self {
            Answer::Sequence(_) => AnswerShape::Sequence,
            Answer::NodeSet(_) => AnswerShape::NodeSet,
            Answer::Count(_) => AnswerShape::Count,
            Answer::Boolean(_) => AnswerShape::Boolean,
            Answer::Real(_) => AnswerShape::Real,
            Answer::Path { .. } => AnswerShape::Path,
            Answer::EdgeSet { .. } => AnswerShape::EdgeSet,
        }
    }

    /// Text after the `Answer:` prefix.
    pub fn body(&self) -> String {
        match self {
            Answer::Sequence(v) | Answer::NodeSet(v) => render_list(v),
            Answer::Count(c) => c.to_string(),
            Answer::Boolean(b) => if *b { "Yes" } else { "No" }.to_string(),
            Answer::Real(x) => format!("{x:.4}"),
            Answer::Path { nodes, weight } => {
                format!("{} with total weight {weight}", render_list(nodes))
            }
            Answer::EdgeSet { edges, weight } => {
                let inner: Vec<String> = edges.iter().map(|(a, b)| format!("({a}, {b})")).collect();
                format!("[{}] with total weight {weight}", inner.join(", "))
            }
        }
    }

    pub fn to_text(&self) -> String {
        format!("{ANSWER_PREFIX} {}", self.body())
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(crate) fn render_list(v: &[NodeId]) -> String {
    let inner: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", inner.join(", "))
}

static INT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+").unwrap());
static REAL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?").unwrap());
static BRACKETS: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[([^\]]*)\]").unwrap());
static PAIR: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)").unwrap());
static WEIGHT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)weight\D*?(\d+)").unwrap());
static BOOL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(yes|no|true|false)\b").unwrap());

fn ints(s: &str) -> Option<Vec<NodeId>> {
    INT.find_iter(s).map(|m| m.as_str().parse().ok()).collect()
}

/// Parses an answer body according to the task's grammar. Returns `None`
/// when the body has no readable answer of the right shape.
pub fn parse_body(body: &str, task: TaskKind) -> Option<Answer> {
    let body = body.trim();
    let bracketed = BRACKETS.captures(body);
    match task.answer_shape() {
        AnswerShape::Sequence | AnswerShape::NodeSet => {
            let items = match &bracketed {
                Some(c) => ints(&c[1])?,
                None if body.chars().next().is_some_and(|c| c.is_ascii_digit()) => {
                    // bare "0, 1, 2" up to the first non-list character
                    let end = body
                        .find(|c: char| !(c.is_ascii_digit() || c == ',' || c.is_whitespace()))
                        .unwrap_or(body.len());
                    ints(&body[..end])?
                }
                None => return None,
            };
            Some(if task.answer_shape() == AnswerShape::Sequence {
                Answer::Sequence(items)
            } else {
                Answer::node_set(items)
            })
        }
        AnswerShape::Count => INT.find(body)?.as_str().parse().ok().map(Answer::Count),
        AnswerShape::Boolean => {
            let word = BOOL.captures(body)?[1].to_ascii_lowercase();
            Some(Answer::Boolean(word == "yes" || word == "true"))
        }
        AnswerShape::Real => REAL.find(body)?.as_str().parse().ok().map(Answer::Real),
        AnswerShape::Path => {
            let c = bracketed?;
            let nodes = ints(&c[1])?;
            let rest = &body[c.get(0)?.end()..];
            let weight = WEIGHT.captures(rest)?[1].parse().ok()?;
            Some(Answer::Path { nodes, weight })
        }
        AnswerShape::EdgeSet => {
            let c = bracketed?;
            let edges = PAIR
                .captures_iter(&c[1])
                .map(|p| Some((p[1].parse().ok()?, p[2].parse().ok()?)))
                .collect::<Option<Vec<(NodeId, NodeId)>>>()?;
            let rest = &body[c.get(0)?.end()..];
            let weight = WEIGHT.captures(rest)?[1].parse().ok()?;
            Some(Answer::EdgeSet { edges, weight })
        }
    }
}

/// Body of the last line containing `Answer:`, if any.
pub fn last_answer_body(text: &str) -> Option<&str> {
    text.lines()
        .rev()
        .find_map(|line| line.rfind(ANSWER_PREFIX).map(|i| &line[i + ANSWER_PREFIX.len()..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_each_shape() {
        assert_eq!(Answer::Sequence(vec![0, 1, 2]).to_text(), "Answer: [0, 1, 2]");
        assert_eq!(Answer::NodeSet(vec![]).to_text(), "Answer: []");
        assert_eq!(Answer::Boolean(true).to_text(), "Answer: Yes");
        assert_eq!(Answer::real(1.0 / 3.0).to_text(), "Answer: 0.3333");
        assert_eq!(
            Answer::Path { nodes: vec![0, 2], weight: 7 }.to_text(),
            "Answer: [0, 2] with total weight 7"
        );
        assert_eq!(
            Answer::EdgeSet { edges: vec![(0, 1), (1, 3)], weight: 5 }.to_text(),
            "Answer: [(0, 1), (1, 3)] with total weight 5"
        );
    }

    #[test]
    fn parses_tolerantly() {
        let p = |s: &str, t| parse_body(last_answer_body(s).unwrap(), t);
        assert_eq!(
            p("first I think...\nAnswer: Yes", TaskKind::CycleDetection),
            Some(Answer::Boolean(true))
        );
        assert_eq!(
            p("Answer: [0, 1, 2]", TaskKind::Bfs),
            Some(Answer::Sequence(vec![0, 1, 2]))
        );
        assert_eq!(
            p("Answer: 2, 0, 1.", TaskKind::Dfs),
            Some(Answer::Sequence(vec![2, 0, 1]))
        );
        assert_eq!(
            p("Answer: [3, 1]", TaskKind::Predecessor),
            Some(Answer::NodeSet(vec![1, 3]))
        );
        assert_eq!(
            p("Answer: the degree is 4", TaskKind::NodeDegree),
            Some(Answer::Count(4))
        );
        assert_eq!(
            p("Answer: path [0,3] , weight = 12", TaskKind::ShortestPath),
            Some(Answer::Path { nodes: vec![0, 3], weight: 12 })
        );
        assert_eq!(p("Answer: no idea", TaskKind::Pagerank), None);
        assert_eq!(p("Answer: no", TaskKind::Connectivity), Some(Answer::Boolean(false)));
        assert!(last_answer_body("nothing here").is_none());
    }

    #[test]
    fn last_answer_line_wins() {
        let text = "Answer: [1]\nOn reflection:\nAnswer: [2]";
        assert_eq!(last_answer_body(text).unwrap().trim(), "[2]");
    }
}
