//! Every task against its brute-force reference on small seeded graphs.

use ontokit_core::task::TaskKind;
use ontokit_testkit::equivalence;

#[test]
fn all_tasks_match_references() {
    let mut failures = Vec::new();
    for task in TaskKind::ALL {
        for seed in 0..300 {
            if let Err(e) = equivalence::check(task, seed) {
                failures.push(format!("{task} seed {seed}: {e}"));
            }
        }
    }
    assert!(failures.is_empty(), "{} mismatches:\n{}", failures.len(), failures.join("\n"));
}
