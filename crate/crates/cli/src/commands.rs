use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use ontokit_core::dataset::{build_all, write_split, DatasetError, DatasetManifest, Split, TaskSample, EVAL_PER_TASK};
use ontokit_core::features::{NgramHashEncoder, TextEncoder};
use ontokit_core::grader::{accuracy_matrix_csv, grade_run, ModelAnswer};
use ontokit_core::task::TaskKind;
use ontokit_ontology::fusion::{
    align, apply_tags, fuse as fuse_graphs, predict_links as predict, tag_nodes, FusionError, LinkPredictor,
    SharedNeighborPredictor,
};
use ontokit_ontology::model::{NodeKind, OntologyGraph};
use ontokit_ontology::pipeline::{build_ontology as build, PipelineError};
use ontokit_ontology::remote::{RemoteEncoder, RemoteExtractor, RemoteLinkPredictor};
use ontokit_ontology::unstructured::{Extractor, PatternExtractor};

use crate::config::RunConfig;
use crate::CliError;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("values serialize");
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

fn make_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn dataset_err(e: DatasetError) -> CliError {
    match e {
        DatasetError::Config(m) => CliError::User(m),
        DatasetError::Io(e) => CliError::Io(e.to_string()),
        other => CliError::Internal(other.to_string()),
    }
}

pub fn dataset(cfg: &RunConfig, out: &Path, eval_only: bool) -> Result<(), CliError> {
    make_dir(out)?;
    let eval_path = out.join("eval.jsonl");
    let manifest = if eval_only {
        let mut w = create(&eval_path)?;
        let count = EVAL_PER_TASK * TaskKind::ALL.len();
        let summary = write_split(Split::Eval, count, &cfg.dataset, 1.0, &mut w).map_err(dataset_err)?;
        w.flush().map_err(|e| io_err(&eval_path, e))?;
        let mut m = DatasetManifest::new(cfg.seed, cfg.dataset.with_features);
        m.splits.insert(Split::Eval, summary);
        m
    } else {
        let s1 = out.join("stage1.jsonl");
        let s2 = out.join("stage2.jsonl");
        let (mut e, mut a, mut b) = (create(&eval_path)?, create(&s1)?, create(&s2)?);
        let m = build_all(&cfg.dataset, &mut e, &mut a, &mut b).map_err(dataset_err)?;
        for (w, p) in [(&mut e, &eval_path), (&mut a, &s1), (&mut b, &s2)] {
            w.flush().map_err(|err| io_err(p, err))?;
        }
        m
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    println!("{}", serde_json::to_string_pretty(&manifest).expect("manifest serializes"));
    Ok(())
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = File::open(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let v = serde_json::from_str(&line)
            .map_err(|e| CliError::User(format!("{} line {}: {e}", path.display(), i + 1)))?;
        out.push(v);
    }
    Ok(out)
}

pub fn grade(cfg: &RunConfig, eval: &Path, answers: &Path, out: &Path, model: &str) -> Result<(), CliError> {
    let samples: Vec<TaskSample> = read_jsonl(eval)?;
    let answers: Vec<ModelAnswer> = read_jsonl(answers)?;
    let known: HashSet<&str> = samples.iter().map(|s| s.id.as_str()).collect();
    let unknown = answers.iter().filter(|a| !known.contains(a.id.as_str())).count();
    if unknown > 0 {
        log::warn!("event=unknown_answers count={unknown}");
    }
    let report = grade_run(&samples, &answers, cfg.grading).map_err(|e| CliError::User(e.to_string()))?;
    make_dir(out)?;
    write_json(&out.join("report.json"), &report)?;
    let csv = accuracy_matrix_csv(&[(model.to_string(), report.clone())]);
    fs::write(out.join("accuracy.csv"), csv).map_err(|e| io_err(&out.join("accuracy.csv"), e))?;
    for (task, t) in &report.per_task {
        log::info!("event=task_accuracy task={task} correct={} total={} accuracy={}", t.correct, t.total, t.percent());
    }
    println!("accuracy={} correct={} total={}", report.overall_percent, report.overall.correct, report.overall.total);
    Ok(())
}

fn extractor(cfg: &RunConfig) -> Box<dyn Extractor> {
    match &cfg.endpoints.extractor_url {
        Some(url) => Box::new(RemoteExtractor::new(url, cfg.endpoints.extractor_model.clone())),
        None => Box::new(PatternExtractor),
    }
}

fn encoder(cfg: &RunConfig) -> Box<dyn TextEncoder> {
    match &cfg.endpoints.embedder_url {
        Some(url) => Box::new(RemoteEncoder::new(url, cfg.endpoints.embedder_dim)),
        None => Box::new(NgramHashEncoder::default()),
    }
}

fn pipeline_err(e: PipelineError) -> CliError {
    match e {
        // a fused graph that fails validation is our bug, not the input's
        PipelineError::Fusion(FusionError::Model(_)) => CliError::Internal(e.to_string()),
        _ => CliError::User(e.to_string()),
    }
}

fn graph_summary(g: &OntologyGraph) -> serde_json::Value {
    json!({ "nodes": g.nodes().len(), "edges": g.edges().len(), "node_kinds": g.node_counts(), "edge_kinds": g.edge_counts() })
}

pub fn build_ontology(cfg: &RunConfig, tables: Option<&Path>, docs: Option<&Path>, out: &Path) -> Result<(), CliError> {
    let ex = extractor(cfg);
    let enc = encoder(cfg);
    let b = build(tables, docs, &cfg.ontology, ex.as_ref(), enc.as_ref()).map_err(pipeline_err)?;
    make_dir(out)?;
    let mut summary = BTreeMap::new();
    if let Some(s) = &b.structured {
        write_json(&out.join("structured.json"), &s.graph)?;
        write_json(&out.join("relations.json"), &s.relations)?;
        let mut v = graph_summary(&s.graph);
        v["relations"] = json!(s.relations.len());
        v["unreadable_tables"] = json!(s.scan.errors);
        v["backbone_tables"] =
            json!(s.graph.nodes().iter().filter(|n| n.kind == NodeKind::Table && n.backbone == Some(true)).count());
        summary.insert("structured", v);
    }
    if let Some(t) = &b.text {
        write_json(&out.join("text.json"), &t.graph)?;
        write_json(&out.join("entities.json"), &t.entities)?;
        let mut v = graph_summary(&t.graph);
        v["chunks"] = json!(t.chunks);
        v["triples"] = json!(t.triples.len());
        v["entities"] = json!(t.entities.len());
        v["extractor"] = json!(ex.id());
        summary.insert("text", v);
    }
    match (&b.mapping, &b.fused) {
        (Some(m), Some(f)) => {
            write_json(&out.join("mapping.json"), m)?;
            write_json(&out.join("fused.json"), f)?;
            let mut v = graph_summary(f);
            v["aligned_pairs"] = json!(m.pairs.len());
            summary.insert("fused", v);
        }
        _ => println!("notice: fusion skipped because only one source was given"),
    }
    write_json(&out.join("summary.json"), &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(())
}

fn read_graph(path: &Path) -> Result<OntologyGraph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
    OntologyGraph::from_json(&text).map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

pub fn fuse(cfg: &RunConfig, structured: &Path, text: &Path, out: &Path, mapping_out: Option<&Path>) -> Result<(), CliError> {
    let gs = read_graph(structured)?;
    let mut gu = read_graph(text)?;
    let untagged = gu
        .nodes()
        .iter()
        .any(|n| matches!(n.kind, NodeKind::Entity | NodeKind::Document) && n.tags.is_empty());
    if untagged {
        gu = apply_tags(&gu, &tag_nodes(&gu, cfg.ontology.align.tag_neighbors));
    }
    let enc = encoder(cfg);
    let mapping = align(&gu, &gs, &cfg.ontology.align, Some(enc.as_ref()));
    let fused = fuse_graphs(&gs, &gu, &mapping).map_err(|e| CliError::User(e.to_string()))?;
    write_json(out, &fused)?;
    if let Some(p) = mapping_out {
        write_json(p, &mapping)?;
    }
    let mut v = graph_summary(&fused);
    v["aligned_pairs"] = json!(mapping.pairs.len());
    println!("{}", serde_json::to_string_pretty(&v).expect("summary serializes"));
    Ok(())
}

pub fn predict_links(cfg: &RunConfig, graph: &Path, budget: usize, out: &Path) -> Result<(), CliError> {
    let g = read_graph(graph)?;
    let predictor: Box<dyn LinkPredictor> = match &cfg.endpoints.predictor_url {
        Some(url) => Box::new(RemoteLinkPredictor::new(url)),
        None => Box::new(SharedNeighborPredictor),
    };
    let links = predict(&g, predictor.as_ref(), budget).map_err(|e| CliError::Internal(e.to_string()))?;
    write_json(out, &links)?;
    println!("predicted={} budget={budget} predictor={}", links.len(), predictor.id());
    Ok(())
}
