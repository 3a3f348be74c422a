use std::collections::BTreeSet;

use proptest::prelude::*;

use ontokit_ontology::fusion::{align, fuse, predict_links, AlignConfig, FusionMapping, SharedNeighborPredictor};
use ontokit_ontology::model::{EdgeKind, NodeKind, OntoEdge, OntoNode, OntologyGraph};

const KINDS: [NodeKind; 2] = [NodeKind::Entity, NodeKind::Document];

fn graph(prefix: &str, n: usize, kinds: &[u8], edges: &[(usize, usize)]) -> OntologyGraph {
    let mut g = OntologyGraph::new();
    for i in 0..n {
        let kind = KINDS[kinds.get(i).copied().unwrap_or(0) as usize % 2];
        let mut node = OntoNode::new(format!("{prefix}{i:02}"), kind, format!("n{i}"), format!("node {i} row"));
        node.tags = vec![format!("t{}", i % 4), format!("t{}", i % 3)];
        node.tags.sort();
        node.tags.dedup();
        g.add_node(node).unwrap();
    }
    for &(a, b) in edges {
        if a < n && b < n && a != b {
            g.add_edge(OntoEdge::new(format!("{prefix}{a:02}"), format!("{prefix}{b:02}"), EdgeKind::RelatesTo, "t")).unwrap();
        }
    }
    g
}

/// Every same-kind non-adjacent pair scored from the raw edge list.
fn brute_links(g: &OntologyGraph) -> Vec<(String, String, f64)> {
    let neighbors = |id: &str| -> BTreeSet<String> {
        g.edges()
            .iter()
            .filter_map(|e| {
                if e.src == id {
                    Some(e.dst.clone())
                } else if e.dst == id {
                    Some(e.src.clone())
                } else {
                    None
                }
            })
            .collect()
    };
    let mut out = Vec::new();
    for a in g.nodes() {
        for b in g.nodes() {
            if a.id >= b.id || a.kind != b.kind || neighbors(&a.id).contains(&b.id) {
                continue;
            }
            let (na, nb) = (neighbors(&a.id), neighbors(&b.id));
            let union = na.union(&nb).count();
            let score = if union == 0 { 0.0 } else { na.intersection(&nb).count() as f64 / union as f64 };
            if score > 0.0 {
                out.push((a.id.clone(), b.id.clone(), score));
            }
        }
    }
    out.sort_by(|x, y| y.2.total_cmp(&x.2).then((&x.0, &x.1).cmp(&(&y.0, &y.1))));
    out
}

fn graph_strategy() -> impl Strategy<Value = OntologyGraph> {
    (1usize..=20).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(0u8..2, n),
            prop::collection::vec((0..n, 0..n), 0..40),
        )
            .prop_map(|(n, kinds, edges)| graph("u", n, &kinds, &edges))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn predicted_links_match_exhaustive_scoring(g in graph_strategy(), budget in 0usize..30) {
        let before = g.clone();
        let links = predict_links(&g, &SharedNeighborPredictor, budget).unwrap();
        let mut expect = brute_links(&g);
        expect.truncate(budget);
        prop_assert_eq!(links.len(), expect.len());
        for (l, (a, b, s)) in links.iter().zip(&expect) {
            prop_assert_eq!((&l.src, &l.dst), (a, b));
            prop_assert!((l.score - s).abs() < 1e-12);
            prop_assert!(l.predicted);
        }
        prop_assert_eq!(g, before);
    }

    #[test]
    fn fusion_is_a_union_and_idempotent(gu in graph_strategy(), structured in 1usize..10) {
        let mut gs = OntologyGraph::new();
        gs.add_node(OntoNode::new("table", NodeKind::Table, "table", "")).unwrap();
        for i in 0..structured {
            gs.add_node(OntoNode::new(format!("s{i}"), NodeKind::Instance, format!("s{i}"), format!("t{} t{} row", i % 4, i % 3))).unwrap();
            gs.add_edge(OntoEdge::new(format!("s{i}"), "table", EdgeKind::InstanceOf, "rows")).unwrap();
        }
        let empty = fuse(&gs, &gu, &FusionMapping::empty(0.5)).unwrap();
        prop_assert_eq!(empty.edges().len(), gs.edges().len() + gu.edges().len());
        prop_assert_eq!(empty.nodes().len(), gs.nodes().len() + gu.nodes().len());

        let m = align(&gu, &gs, &AlignConfig::default(), None);
        let mut seen = BTreeSet::new();
        for p in &m.pairs {
            prop_assert!(p.score >= m.threshold);
            prop_assert!(seen.insert(p.text_node.clone()), "text node mapped twice");
        }
        let fused = fuse(&gs, &gu, &m).unwrap();
        prop_assert_eq!(fused.count_edges(EdgeKind::AlignedWith), m.pairs.len());
        prop_assert_eq!(fuse(&fused, &gu, &m).unwrap(), fused.clone());
        prop_assert!(fused.validate().is_ok());
    }
}
