use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ontokit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontokit"))
        .args(args)
        .env_remove("ONTOKIT_EXTRACTOR_URL")
        .env_remove("ONTOKIT_EMBEDDER_URL")
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn demo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../ontology/fixtures/demo")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn eval_set(dir: &Path) -> PathBuf {
    let out = dir.join("data");
    let r = ontokit(&["dataset", "--out", s(&out), "--eval-only", "--seed", "3"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    out.join("eval.jsonl")
}

/// Gold answers straight from the eval file.
fn gold_answers(eval: &Path) -> String {
    fs::read_to_string(eval)
        .unwrap()
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            serde_json::json!({ "id": v["id"], "text": v["answer_text"] }).to_string() + "\n"
        })
        .collect()
}

#[test]
fn eval_only_writes_190_samples_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let eval = eval_set(dir.path());
    assert_eq!(fs::read_to_string(&eval).unwrap().lines().count(), 190);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("data/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 3);
    assert_eq!(manifest["splits"]["eval"]["count"], 190);
    assert!(!dir.path().join("data/stage1.jsonl").exists());
}

#[test]
fn same_seed_gives_identical_eval_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(fs::read(eval_set(a.path())).unwrap(), fs::read(eval_set(b.path())).unwrap());
}

#[test]
fn grading_gold_answers_reports_full_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let eval = eval_set(dir.path());
    let answers = dir.path().join("answers.jsonl");
    fs::write(&answers, gold_answers(&eval)).unwrap();
    let out = dir.path().join("report");
    let r = ontokit(&["grade", "--eval", s(&eval), "--answers", s(&answers), "--out", s(&out), "--model", "gold"]);
    assert!(r.status.success());
    assert!(String::from_utf8_lossy(&r.stdout).contains("accuracy=100.00%"));
    let csv = fs::read_to_string(out.join("accuracy.csv")).unwrap();
    assert!(csv.lines().next().unwrap().contains("gold"));
    assert!(out.join("report.json").exists());
}

#[test]
fn duplicate_answer_ids_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let eval = eval_set(dir.path());
    let gold = gold_answers(&eval);
    let first = gold.lines().next().unwrap();
    let answers = dir.path().join("answers.jsonl");
    fs::write(&answers, format!("{gold}{first}\n")).unwrap();
    let r = ontokit(&["grade", "--eval", s(&eval), "--answers", s(&answers), "--out", s(&dir.path().join("r"))]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn missing_and_malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.jsonl");
    let r = ontokit(&["grade", "--eval", s(&missing), "--answers", s(&missing), "--out", s(dir.path())]);
    assert_eq!(r.status.code(), Some(2));

    let eval = eval_set(dir.path());
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"id\": \"x\", \"text\": \"ok\"}\nnot json\n").unwrap();
    let r = ontokit(&["grade", "--eval", s(&eval), "--answers", s(&bad), "--out", s(dir.path())]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("line 2"));

    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, "{\"no_such_field\": 1}").unwrap();
    let r = ontokit(&["--config", s(&cfg), "dataset", "--out", s(dir.path()), "--eval-only"]);
    assert_eq!(r.status.code(), Some(2));

    let r = ontokit(&["build-ontology", "--out", s(dir.path())]);
    assert_eq!(r.status.code(), Some(2));

    let r = ontokit(&["no-such-command"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let r = ontokit(&["dataset", "--out", s(&blocker.join("sub")), "--eval-only"]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn build_ontology_on_the_demo_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("onto");
    let (tables, docs) = (demo().join("tables"), demo().join("docs"));
    let r = ontokit(&["build-ontology", "--tables", s(&tables), "--docs", s(&docs), "--out", s(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for f in ["structured.json", "relations.json", "text.json", "entities.json", "mapping.json", "fused.json", "summary.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let fused = fs::read_to_string(out.join("fused.json")).unwrap();
    assert!(fused.contains("\"aligned_with\""));
    assert!(fused.contains("\"foreign_key\""));

    // fusing the written graphs again reproduces the pipeline's fused graph
    let refused = dir.path().join("refused.json");
    let r = ontokit(&[
        "fuse",
        "--structured",
        s(&out.join("structured.json")),
        "--text",
        s(&out.join("text.json")),
        "--out",
        s(&refused),
    ]);
    assert!(r.status.success());
    let a: serde_json::Value = serde_json::from_str(&fused).unwrap();
    let b: serde_json::Value = serde_json::from_str(&fs::read_to_string(&refused).unwrap()).unwrap();
    assert_eq!(a, b);

    let links = dir.path().join("links.json");
    let r = ontokit(&["predict-links", "--graph", s(&out.join("fused.json")), "--budget", "3", "--out", s(&links)]);
    assert!(r.status.success());
    let links: Vec<serde_json::Value> = serde_json::from_str(&fs::read_to_string(&links).unwrap()).unwrap();
    assert!(links.len() <= 3);
    assert!(links.iter().all(|l| l["predicted"] == true));
}

#[test]
fn one_source_skips_fusion_with_a_notice() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("onto");
    let r = ontokit(&["build-ontology", "--tables", s(&demo().join("tables")), "--out", s(&out)]);
    assert!(r.status.success());
    assert!(String::from_utf8_lossy(&r.stdout).contains("fusion skipped"));
    assert!(out.join("structured.json").exists());
    assert!(!out.join("fused.json").exists());
}

#[test]
fn fusing_colliding_graphs_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("onto");
    let r = ontokit(&["build-ontology", "--tables", s(&demo().join("tables")), "--out", s(&out)]);
    assert!(r.status.success());
    let g = out.join("structured.json");
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&g).unwrap()).unwrap();
    v["nodes"][0]["description"] = serde_json::json!("changed");
    let other = dir.path().join("other.json");
    fs::write(&other, v.to_string()).unwrap();
    let r = ontokit(&["fuse", "--structured", s(&g), "--text", s(&other), "--out", s(&dir.path().join("f.json"))]);
    assert_eq!(r.status.code(), Some(2));
}
