use std::collections::BTreeMap;

use proptest::prelude::*;

use ontokit_core::features::TextEncoder;
use ontokit_ontology::unstructured::{
    chunk_document, containment_ratio, disambiguate, normalize_mention, surface_edit_similarity, surface_match,
    ContainmentMode, DisambiguationConfig, DocumentChunk, Extractor, MatchThresholds, MentionRecord, MergeRule,
    NormalizationRules, PatternExtractor, Tokenizer, WordTokenizer,
};

fn records(texts: &[&str]) -> Vec<MentionRecord> {
    texts
        .iter()
        .map(|t| MentionRecord { text: t.to_string(), attributes: BTreeMap::new(), provenance: "d#0".into() })
        .collect()
}

/// Fixed vectors for named strings; everything else gets its own axis.
struct TableEncoder(Vec<(&'static str, Vec<f64>)>);

impl TextEncoder for TableEncoder {
    fn id(&self) -> String {
        "table".into()
    }
    fn dim(&self) -> usize {
        64
    }
    fn encode(&self, text: &str) -> Vec<f64> {
        if let Some((_, v)) = self.0.iter().find(|(k, _)| *k == text) {
            let mut out = v.clone();
            out.resize(64, 0.0);
            return out;
        }
        let mut out = vec![0.0; 64];
        out[2 + (ontokit_core::features::fnv1a(text.as_bytes()) % 62) as usize] = 1.0;
        out
    }
}

fn surface_only() -> DisambiguationConfig {
    DisambiguationConfig { semantic: false, ..Default::default() }
}

fn groups(cfg: &DisambiguationConfig, enc: &dyn TextEncoder, texts: &[&str]) -> Vec<Vec<String>> {
    disambiguate(&records(texts), cfg, enc).into_iter().map(|e| e.aliases).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn chunks_cover_with_exact_overlap(n in 0usize..3000, size in 2usize..400, overlap_frac in 0.0f64..0.9) {
        let overlap = ((size as f64) * overlap_frac) as usize;
        let text = (0..n).map(|i| format!("t{i}")).collect::<Vec<_>>().join(" ");
        let chunks = chunk_document("d", &text, &WordTokenizer, size, overlap).unwrap();
        if n == 0 {
            prop_assert!(chunks.is_empty());
        } else {
            prop_assert_eq!(chunks[0].token_start, 0);
            prop_assert_eq!(chunks.last().unwrap().token_end, n);
            for w in chunks.windows(2) {
                prop_assert_eq!(w[0].token_end - w[1].token_start, overlap);
                prop_assert_eq!(w[0].token_end - w[0].token_start, size);
            }
            for (i, c) in chunks.iter().enumerate() {
                prop_assert_eq!(c.chunk_index, i);
                prop_assert_eq!(WordTokenizer.tokenize(&c.text).len(), c.token_end - c.token_start);
            }
        }
    }

    #[test]
    fn normalization_is_idempotent(m in "[A-Za-z&.,'  ]{0,30}( (Co\\.|Ltd\\.|Inc|Corp|Intl))*") {
        let r = NormalizationRules::default();
        let once = normalize_mention(&m, &r);
        prop_assert_eq!(normalize_mention(&once, &r), once);
    }

    #[test]
    fn surface_match_is_symmetric(a in "[a-cA-C ]{0,10}", b in "[a-cA-C ]{0,10}") {
        let t = MatchThresholds::default();
        prop_assert_eq!(surface_match(&a, &b, &t), surface_match(&b, &a, &t));
        prop_assert!((surface_edit_similarity(&a, &b) - surface_edit_similarity(&b, &a)).abs() < 1e-15);
    }

    #[test]
    fn case_fold_duplicates_always_merge(m in "[A-Za-z][A-Za-z ]{0,20}") {
        let upper = m.to_uppercase();
        let lower = m.to_lowercase();
        let g = groups(&surface_only(), &TableEncoder(vec![]), &[&m, &upper, &lower]);
        prop_assert_eq!(g.len(), 1);
    }
}

#[test]
fn surface_thresholds_at_the_boundary() {
    // 20 characters, 3 substitutions: 1 - 3/20 = 0.85
    let (a, b) = ("abcdefghijklmnopqrst", "abcdefghijklmnopquvw");
    assert!((surface_edit_similarity(a, b) - 0.85).abs() < 1e-12);
    assert_eq!(groups(&surface_only(), &TableEncoder(vec![]), &[a, b]).len(), 1);
    // 19 characters, 3 substitutions: 0.842
    let (a, b) = ("abcdefghijklmnopqrs", "abcdefghijklmnopuvw");
    assert_eq!(groups(&surface_only(), &TableEncoder(vec![]), &[a, b]).len(), 2);

    // 6 of 10 characters: 0.6
    assert_eq!(containment_ratio("abcdef", "abcdefghij", ContainmentMode::LongerLength), Some(0.6));
    assert_eq!(groups(&surface_only(), &TableEncoder(vec![]), &["abcdef", "abcdefghij"]).len(), 1);
    // 5 of 9 characters: 0.556
    assert_eq!(groups(&surface_only(), &TableEncoder(vec![]), &["abcde", "abcdefghi"]).len(), 2);
}

#[test]
fn semantic_threshold_at_the_boundary() {
    let at = 0.85f64;
    let below = 0.84f64;
    let enc = TableEncoder(vec![
        ("northwind", vec![1.0, 0.0]),
        ("southgate", vec![at, (1.0 - at * at).sqrt()]),
        ("eastfield", vec![below, -(1.0 - below * below).sqrt()]),
    ]);
    let cfg = DisambiguationConfig::default();
    let g = groups(&cfg, &enc, &["northwind", "southgate"]);
    assert_eq!(g.len(), 1, "cosine exactly at threshold merges");
    let g = groups(&cfg, &enc, &["northwind", "eastfield"]);
    assert_eq!(g.len(), 2, "cosine just below threshold does not");
}

#[test]
fn merges_close_transitively_across_layers() {
    let enc = TableEncoder(vec![("globex", vec![1.0, 0.0]), ("gx holdings", vec![0.9, (1.0f64 - 0.81).sqrt()])]);
    let ents = disambiguate(
        &records(&["Globex", "GLOBEX", "Globex Co., Ltd.", "GX Holdings", "Initech"]),
        &DisambiguationConfig::default(),
        &enc,
    );
    assert_eq!(ents.len(), 2);
    let globex = ents.iter().find(|e| e.aliases.len() == 4).expect("one merged entity");
    let rules: Vec<MergeRule> = globex.merge_trace.iter().map(|s| s.rule).collect();
    assert_eq!(rules, vec![MergeRule::Surface, MergeRule::NormalizedSurface, MergeRule::Semantic]);
    assert_eq!(globex.merge_trace.len(), globex.aliases.len() - 1);
}

#[test]
fn acme_corp_needs_normalization() {
    let r = containment_ratio("ACME Corp", "ACME Corporation", ContainmentMode::LongerLength).unwrap();
    assert_eq!(r, 9.0 / 16.0);
    let g = groups(&surface_only(), &TableEncoder(vec![]), &["ACME Corp", "ACME Corporation"]);
    assert_eq!(g.len(), 1);
    let ents = disambiguate(&records(&["ACME Corp", "ACME Corporation"]), &surface_only(), &TableEncoder(vec![]));
    assert_eq!(ents[0].merge_trace[0].rule, MergeRule::NormalizedSurface);
}

#[test]
fn conflicting_attributes_are_all_kept() {
    let mut recs = records(&["Acme", "ACME"]);
    recs[0].attributes.insert("city".into(), "Berlin".into());
    recs[1].attributes.insert("city".into(), "Bonn".into());
    recs[1].provenance = "d2#0".into();
    let ents = disambiguate(&recs, &surface_only(), &TableEncoder(vec![]));
    let city = &ents[0].attributes["city"];
    assert_eq!(city.keys().collect::<Vec<_>>(), vec!["Berlin", "Bonn"]);
    assert!(city["Bonn"].contains("d2#0"));
}

#[test]
fn extraction_is_deterministic() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/demo/docs/supplier_note.txt")).unwrap();
    let chunk = DocumentChunk { doc_id: "d".into(), chunk_index: 0, token_start: 0, token_end: 0, text };
    let a = PatternExtractor.extract(&chunk).unwrap();
    for _ in 0..5 {
        assert_eq!(PatternExtractor.extract(&chunk).unwrap(), a);
    }
    assert!(a.mentions.iter().any(|m| m.text == "Globex Co., Ltd."));
}
