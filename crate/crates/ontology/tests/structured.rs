use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use ontokit_ontology::structured::{
    confidence, discover_relations, k_core, name_similarity, normalized_name, profile_column, scan_schema,
    ColumnRef, ConfidenceWeights, DeclaredType, DiscoveryConfig, MemorySource, OverlapMode, TokenKeyDetector,
};
use ontokit_ontology::text::levenshtein;

fn adjacency(n: usize, edges: &[(usize, usize)]) -> (Vec<String>, Vec<(usize, usize)>) {
    let names = (0..n).map(|i| format!("n{i}")).collect();
    let edges = edges.iter().copied().filter(|(a, b)| a != b && *a < n && *b < n).collect();
    (names, edges)
}

/// Largest vertex set whose induced subgraph has minimum degree >= k, by
/// enumerating every subset.
fn brute_core(n: usize, edges: &[(usize, usize)], k: usize) -> BTreeSet<usize> {
    let mut best = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let inside = |v: usize| mask & (1 << v) != 0;
        let ok = (0..n).filter(|&v| inside(v)).all(|v| {
            let nb: BTreeSet<usize> = edges
                .iter()
                .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
                .filter(|&u| inside(u))
                .collect();
            nb.len() >= k
        });
        if ok && mask.count_ones() as usize > best.len() {
            best = (0..n).filter(|&v| inside(v)).collect();
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn k_core_matches_subset_search(
        n in 1usize..=8,
        raw in prop::collection::vec((0usize..8, 0usize..8), 0..20),
        k in 1usize..=4,
    ) {
        let (names, edges) = adjacency(n, &raw);
        let mut adj: BTreeMap<&str, BTreeSet<&str>> = names.iter().map(|s| (s.as_str(), BTreeSet::new())).collect();
        for &(a, b) in &edges {
            adj.get_mut(names[a].as_str()).unwrap().insert(names[b].as_str());
            adj.get_mut(names[b].as_str()).unwrap().insert(names[a].as_str());
        }
        let core = k_core(&adj, k).unwrap();
        let expect: BTreeSet<&str> = brute_core(n, &edges, k).into_iter().map(|i| names[i].as_str()).collect();
        prop_assert_eq!(&core, &expect);

        // peeling the core again changes nothing
        let sub: BTreeMap<&str, BTreeSet<&str>> = core
            .iter()
            .map(|v| (*v, adj[v].iter().copied().filter(|u| core.contains(u)).collect()))
            .collect();
        prop_assert_eq!(k_core(&sub, k).unwrap(), core);
    }

    #[test]
    fn edit_distance_matches_reference(a in "[a-zé_ ]{0,12}", b in "[a-zé_ ]{0,12}") {
        prop_assert_eq!(levenshtein(&a, &b), strsim::levenshtein(&a, &b));
    }

    #[test]
    fn name_similarity_is_max_of_components(
        ta in "[a-z]{3,8}s", ca in "[a-z]{1,6}(_[a-z]{1,6}){0,2}",
        tb in "[a-z]{3,8}s", cb in "[a-z]{1,6}(_[a-z]{1,6}){0,2}",
    ) {
        let (a, b) = (ColumnRef::new(&ta, &ca), ColumnRef::new(&tb, &cb));
        let (na, nb) = (normalized_name(&ta, &ca), normalized_name(&tb, &cb));
        let (sa, sb): (BTreeSet<_>, BTreeSet<_>) = (na.iter().collect(), nb.iter().collect());
        let jac = sa.intersection(&sb).count() as f64 / sa.union(&sb).count() as f64;
        let edit = strsim::normalized_levenshtein(&na.join(" "), &nb.join(" "));
        let s = name_similarity(&a, &b);
        prop_assert!((s - jac.max(edit)).abs() < 1e-12, "{} vs {}", s, jac.max(edit));
        prop_assert!((s - name_similarity(&b, &a)).abs() < 1e-12);
    }

    #[test]
    fn relations_do_not_depend_on_window(seed in any::<u64>(), tables in 2usize..7) {
        let src = random_source(seed, tables);
        let scan = scan_schema(&src, &TokenKeyDetector::default()).unwrap();
        let base = discover_relations(&src, &scan.tables, &DiscoveryConfig { window: 1, ..Default::default() });
        for w in [2, 3, 10] {
            let other = discover_relations(&src, &scan.tables, &DiscoveryConfig { window: w, ..Default::default() });
            prop_assert_eq!(&other, &base);
        }
        let weights = ConfidenceWeights::default();
        let mut sources = BTreeSet::new();
        for r in &base {
            prop_assert!(r.phi > weights.threshold);
            prop_assert_eq!(r.phi, weights.name * r.s_name + weights.type_compat * r.i_type + weights.overlap * r.s_overlap + weights.cardinality * r.s_card);
            prop_assert!(sources.insert(r.src.clone()), "two relations from {}", r.src);
            prop_assert_ne!(&r.src.table, &r.dst.table);
        }
        prop_assert!(base.windows(2).all(|w| w[0].phi >= w[1].phi));
    }
}

/// Tables with a shared key space so that some relations are accepted.
fn random_source(seed: u64, tables: usize) -> MemorySource {
    let mut state = seed | 1;
    let mut next = move |m: u64| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state % m
    };
    let mut src = MemorySource::default();
    for t in 0..tables {
        let name = format!("table{t}s");
        let rows = 5 + next(30) as usize;
        let ref_table = if t > 0 { Some(next(t as u64)) } else { None };
        let mut cols = vec![("id", DeclaredType::Integer), ("label", DeclaredType::Text)];
        let ref_col = ref_table.map(|r| format!("table{r}_id"));
        if let Some(c) = &ref_col {
            cols.push((c.as_str(), DeclaredType::Integer));
        }
        let data = (0..rows)
            .map(|i| {
                let mut row = vec![Some(i.to_string()), Some(format!("l{}", next(5)))];
                if ref_col.is_some() {
                    row.push(Some(next(5).to_string()));
                }
                row
            })
            .collect();
        src = src.with_table(&name, &cols, data);
    }
    src
}

#[test]
fn profiles_are_seed_deterministic() {
    let rows = (0..5000).map(|i| vec![if i % 10 == 0 { None } else { Some((i % 1234).to_string()) }]).collect();
    let src = MemorySource::default().with_table("t", &[("v", DeclaredType::Integer)], rows);
    let a = profile_column(&src, "t", "v", 7).unwrap();
    assert_eq!(a, profile_column(&src, "t", "v", 7).unwrap());
    assert_ne!(a.sample, profile_column(&src, "t", "v", 8).unwrap().sample);
    assert_eq!(a.sample.len(), 1000);
    assert!((a.null_ratio - 0.1).abs() < 1e-12);
}

#[test]
fn confidence_is_symmetric_in_its_components() {
    let src = MemorySource::default()
        .with_table("customers", &[("id", DeclaredType::Integer)], (0..10).map(|i| vec![Some(i.to_string())]).collect())
        .with_table("orders", &[("customer_id", DeclaredType::Decimal)], (0..30).map(|i| vec![Some(format!("{}.0", i % 8))]).collect());
    let a = profile_column(&src, "customers", "id", 0).unwrap();
    let b = profile_column(&src, "orders", "customer_id", 0).unwrap();
    let w = ConfidenceWeights::default();
    let (ab, ba) = (confidence(&a, &b, &w, OverlapMode::MinContainment), confidence(&b, &a, &w, OverlapMode::MinContainment));
    assert_eq!(ab, ba);
    assert_eq!(ab.src, ColumnRef::new("orders", "customer_id"));
    assert_eq!(ab.s_overlap, 1.0, "numeric values compare by value");
}

#[test]
fn random_sources_produce_relations() {
    let found: usize = (0..50)
        .map(|seed| {
            let src = random_source(seed, 5);
            let scan = scan_schema(&src, &TokenKeyDetector::default()).unwrap();
            discover_relations(&src, &scan.tables, &DiscoveryConfig::default()).len()
        })
        .sum();
    assert!(found >= 50, "window-invariance property would be vacuous: {found}");
}
