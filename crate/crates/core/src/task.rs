//! The nineteen benchmark tasks and their static classification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Bfs,
    Dfs,
    NodeDegree,
    NeighborQuery,
    EdgeExistence,
    Connectivity,
    CycleDetection,
    Bipartiteness,
    ConnectedComponents,
    Diameter,
    CommonNeighbors,
    JaccardSimilarity,
    Predecessor,
    TopologicalSort,
    ShortestPath,
    MaximumFlow,
    Pagerank,
    ClusteringCoefficient,
    MinimumSpanningTree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Traversal,
    Property,
    Similarity,
    PathsFlows,
    Centrality,
    Tree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Simple,
    Medium,
    Difficult,
}

/// Instruction family used by multi-task records; ordered for curricula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Predictive,
    Reasoning,
    Generative,
}

/// Shape of a task's gold answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnswerShape {
    Sequence,
    NodeSet,
    Count,
    Boolean,
    Real,
    Path,
    EdgeSet,
}

impl TaskKind {
    pub const ALL: [TaskKind; 19] = [
        TaskKind::Bfs,
        TaskKind::Dfs,
        TaskKind::NodeDegree,
        TaskKind::NeighborQuery,
        TaskKind::EdgeExistence,
        TaskKind::Connectivity,
        TaskKind::CycleDetection,
        TaskKind::Bipartiteness,
        TaskKind::ConnectedComponents,
        TaskKind::Diameter,
        TaskKind::CommonNeighbors,
        TaskKind::JaccardSimilarity,
        TaskKind::Predecessor,
        TaskKind::TopologicalSort,
        TaskKind::ShortestPath,
        TaskKind::MaximumFlow,
        TaskKind::Pagerank,
        TaskKind::ClusteringCoefficient,
        TaskKind::MinimumSpanningTree,
    ];

    /// Tasks with a recorded chain-of-thought trace.
    pub const TRACED: [TaskKind; 4] = [
        TaskKind::ShortestPath,
        TaskKind::TopologicalSort,
        TaskKind::MinimumSpanningTree,
        TaskKind::Predecessor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Bfs => "bfs",
            TaskKind::Dfs => "dfs",
            TaskKind::NodeDegree => "node_degree",
            TaskKind::NeighborQuery => "neighbor_query",
            TaskKind::EdgeExistence => "edge_existence",
            TaskKind::Connectivity => "connectivity",
            TaskKind::CycleDetection => "cycle_detection",
            TaskKind::Bipartiteness => "bipartiteness",
            TaskKind::ConnectedComponents => "connected_components",
            TaskKind::Diameter => "diameter",
            TaskKind::CommonNeighbors => "common_neighbors",
            TaskKind::JaccardSimilarity => "jaccard_similarity",
            TaskKind::Predecessor => "predecessor",
            TaskKind::TopologicalSort => "topological_sort",
            TaskKind::ShortestPath => "shortest_path",
            TaskKind::MaximumFlow => "maximum_flow",
            TaskKind::Pagerank => "pagerank",
            TaskKind::ClusteringCoefficient => "clustering_coefficient",
            TaskKind::MinimumSpanningTree => "minimum_spanning_tree",
        }
    }

    pub fn category(self) -> Category {
        use TaskKind::*;
        match self {
            Bfs | Dfs => Category::Traversal,
            NodeDegree | NeighborQuery | EdgeExistence | Connectivity | CycleDetection
            | Bipartiteness | ConnectedComponents | Diameter => Category::Property,
            CommonNeighbors | JaccardSimilarity => Category::Similarity,
            Predecessor | TopologicalSort | ShortestPath | MaximumFlow => Category::PathsFlows,
            Pagerank | ClusteringCoefficient => Category::Centrality,
            MinimumSpanningTree => Category::Tree,
        }
    }

    pub fn difficulty(self) -> Difficulty {
        use TaskKind::*;
        match self {
            Bfs | Dfs | NodeDegree | NeighborQuery | EdgeExistence => Difficulty::Simple,
            Connectivity | CycleDetection | Bipartiteness | ConnectedComponents
            | CommonNeighbors | JaccardSimilarity | Predecessor | ClusteringCoefficient => {
                Difficulty::Medium
            }
            Diameter | TopologicalSort | ShortestPath | MaximumFlow | Pagerank
            | MinimumSpanningTree => Difficulty::Difficult,
        }
    }

    pub fn is_traced(self) -> bool {
        Self::TRACED.contains(&self)
    }

    pub fn answer_shape(self) -> AnswerShape {
        use TaskKind::*;
        match self {
            Bfs | Dfs | TopologicalSort => AnswerShape::Sequence,
            NeighborQuery | CommonNeighbors | Predecessor => AnswerShape::NodeSet,
            NodeDegree | ConnectedComponents | Diameter | MaximumFlow => AnswerShape::Count,
            EdgeExistence | Connectivity | CycleDetection | Bipartiteness => AnswerShape::Boolean,
            JaccardSimilarity | Pagerank | ClusteringCoefficient => AnswerShape::Real,
            ShortestPath => AnswerShape::Path,
            MinimumSpanningTree => AnswerShape::EdgeSet,
        }
    }

    /// Multi-task family: scalar answers are predictive, traced tasks are
    /// reasoning, remaining list outputs are generative.
    pub fn family(self) -> Family {
        if self.is_traced() {
            return Family::Reasoning;
        }
        match self.answer_shape() {
            AnswerShape::Count | AnswerShape::Boolean | AnswerShape::Real => Family::Predictive,
            _ => Family::Generative,
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown task {s:?}"))
    }
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Traversal,
        Category::Property,
        Category::Similarity,
        Category::PathsFlows,
        Category::Centrality,
        Category::Tree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Traversal => "traversal",
            Category::Property => "property",
            Category::Similarity => "similarity",
            Category::PathsFlows => "paths_flows",
            Category::Centrality => "centrality",
            Category::Tree => "tree",
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Difficulty::Simple => "simple",
            Difficulty::Medium => "medium",
            Difficulty::Difficult => "difficult",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn nineteen_tasks_six_categories() {
        let unique: BTreeSet<_> = TaskKind::ALL.iter().collect();
        assert_eq!(unique.len(), 19);
        let cats: BTreeSet<_> = TaskKind::ALL.iter().map(|t| t.category()).collect();
        assert_eq!(cats.len(), 6);
        let count = |c| TaskKind::ALL.iter().filter(|t| t.category() == c).count();
        assert_eq!(count(Category::Traversal), 2);
        assert_eq!(count(Category::Property), 8);
        assert_eq!(count(Category::Similarity), 2);
        assert_eq!(count(Category::PathsFlows), 4);
        assert_eq!(count(Category::Centrality), 2);
        assert_eq!(count(Category::Tree), 1);
    }

    #[test]
    fn tier_exemplars() {
        assert_eq!(TaskKind::Bfs.difficulty(), Difficulty::Simple);
        assert_eq!(TaskKind::NodeDegree.difficulty(), Difficulty::Simple);
        assert_eq!(TaskKind::Connectivity.difficulty(), Difficulty::Medium);
        assert_eq!(TaskKind::ShortestPath.difficulty(), Difficulty::Difficult);
        assert_eq!(TaskKind::Pagerank.difficulty(), Difficulty::Difficult);
    }

    #[test]
    fn names_round_trip_through_serde_and_fromstr() {
        for t in TaskKind::ALL {
            assert_eq!(t.name().parse::<TaskKind>().unwrap(), t);
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{}\"", t.name()));
        }
    }

    #[test]
    fn family_partition_is_total_and_disjoint() {
        let mut seen = BTreeSet::new();
        for family in [Family::Predictive, Family::Reasoning, Family::Generative] {
            for t in TaskKind::ALL.into_iter().filter(|t| t.family() == family) {
                assert!(seen.insert(t), "{t} in two families");
            }
        }
        assert_eq!(seen.len(), 19);
        assert_eq!(TaskKind::EdgeExistence.family(), Family::Predictive);
        assert_eq!(TaskKind::ShortestPath.family(), Family::Reasoning);
        assert_eq!(TaskKind::Bfs.family(), Family::Generative);
    }
}
