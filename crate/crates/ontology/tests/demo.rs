use std::path::PathBuf;

use ontokit_ontology::model::{EdgeKind, NodeKind};
use ontokit_ontology::pipeline::{build_ontology, OntologyBuild, OntologyConfig};
use ontokit_ontology::unstructured::{default_encoder, PatternExtractor};

fn demo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/demo")
}

fn build(tables: bool, docs: bool) -> OntologyBuild {
    let d = demo();
    build_ontology(
        tables.then(|| d.join("tables")).as_deref(),
        docs.then(|| d.join("docs")).as_deref(),
        &OntologyConfig::default(),
        &PatternExtractor,
        &default_encoder(),
    )
    .unwrap()
}

#[test]
fn demo_builds_all_layers() {
    let b = build(true, true);
    let s = b.structured.as_ref().unwrap();
    let rels: Vec<String> = s.relations.iter().map(|r| format!("{} -> {} ({:.3})", r.src, r.dst, r.phi)).collect();
    assert_eq!(rels.len(), 2, "{rels:#?}");
    assert!(rels[0].starts_with("orders.customer_id -> customers.id") || rels[1].starts_with("orders.customer_id -> customers.id"));
    assert!(s.graph.count_edges(EdgeKind::ForeignKey) >= 1);

    let t = b.text.as_ref().unwrap();
    for kind in [EdgeKind::Mentions, EdgeKind::RelatesTo, EdgeKind::IsA] {
        assert!(t.graph.count_edges(kind) >= 1, "{kind:?}");
    }
    let globex: Vec<_> = t.entities.iter().filter(|e| e.aliases.iter().any(|a| a.contains("Globex"))).collect();
    assert_eq!(globex.len(), 1, "{globex:#?}");

    let fused = b.fused.as_ref().unwrap();
    let aligned: Vec<_> = b.mapping.as_ref().unwrap().pairs.iter().map(|p| (&p.text_node, &p.structured_node)).collect();
    assert!(fused.count_edges(EdgeKind::AlignedWith) >= 1);
    assert!(
        aligned.iter().any(|(u, s)| u.as_str() == "u:entity:Acme Corporation" && s.as_str() == "s:instance:customers#0"),
        "{aligned:#?}"
    );
    fused.validate().unwrap();
    assert_eq!(fused.count_nodes(NodeKind::Instance), 20 + 8 + 60);

    let again = build(true, true);
    assert_eq!(again.fused.unwrap().to_json(), fused.to_json());
}

#[test]
fn either_wing_runs_alone() {
    let b = build(true, false);
    assert!(b.text.is_none() && b.fused.is_none());
    assert!(b.final_graph().unwrap().count_edges(EdgeKind::ForeignKey) >= 1);
    let b = build(false, true);
    assert!(b.structured.is_none() && b.fused.is_none());
    assert!(b.final_graph().unwrap().count_nodes(NodeKind::Entity) > 0);
}
