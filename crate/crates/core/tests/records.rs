use std::collections::BTreeSet;

use ontokit_core::dataset::{generate_samples, BuildConfig, Split};
use ontokit_core::generate::{derive_seed, generate_graph, GraphSpec};
use ontokit_core::records::{
    emit_alignment_pairs, emit_multitask_records, target_text, AlignmentKind, TypedGraph,
};
use ontokit_core::task::{Family, TaskKind};

fn typed_graphs(count: u64) -> Vec<TypedGraph> {
    (0..count)
        .map(|i| {
            let spec = GraphSpec::default().nodes(5, 20).edges(5, 40).directed(i % 2 == 0);
            let g = generate_graph(&spec, derive_seed(99, i)).unwrap();
            TypedGraph::structural(format!("g{i}"), &g)
        })
        .collect()
}

#[test]
fn target_text_is_reconstructible_by_lookup() {
    let graphs = typed_graphs(1000);
    let mut checked = 0;
    for kind in [AlignmentKind::Intra, AlignmentKind::Inter] {
        let records = emit_alignment_pairs(&graphs, kind, 5);
        // inter records skip graphs whose nodes all share one role
        let single = graphs.iter().filter(|g| g.meta_types().len() < 2).count();
        let expected = if kind == AlignmentKind::Intra { 1000 } else { 1000 - single };
        assert_eq!(records.len(), expected, "{kind:?}");
        checked += records.len();
        for r in &records {
            let g = graphs.iter().find(|g| g.id == r.graph_ref).unwrap();
            assert_eq!(target_text(g, &r.token_refs).as_deref(), Some(r.target_text.as_str()));
            let metas: BTreeSet<_> = r.token_refs.iter().map(|t| t.meta_type.as_str()).collect();
            match kind {
                AlignmentKind::Intra => assert_eq!(metas.len(), 1),
                AlignmentKind::Inter => assert!(metas.len() >= 2),
            }
        }
        assert_eq!(emit_alignment_pairs(&graphs, kind, 5), records);
    }
    assert!(checked >= 1000);
}

#[test]
fn family_partition_covers_every_task_once() {
    let cfg = BuildConfig::default();
    let samples = generate_samples(Split::Stage2, 0..190, &cfg);
    let records = emit_multitask_records(&samples);
    let mut family_of = std::collections::BTreeMap::new();
    for (s, r) in samples.iter().zip(&records) {
        let prev = family_of.insert(s.task, r.family);
        assert!(prev.is_none_or(|f| f == r.family), "{} in two families", s.task);
    }
    assert_eq!(family_of.len(), 19);
    for t in TaskKind::TRACED {
        assert_eq!(family_of[&t], Family::Reasoning);
    }
    assert_eq!(family_of[&TaskKind::EdgeExistence], Family::Predictive);
    assert_eq!(family_of[&TaskKind::Pagerank], Family::Predictive);
    assert_eq!(family_of[&TaskKind::Bfs], Family::Generative);
}
