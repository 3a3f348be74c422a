//! Seeded evaluation and training corpora.
//!
//! Each sample depends only on `(master seed, split, index)`, so samples are
//! generated in parallel batches and written in index order; the JSONL bytes
//! and their SHA-256 are identical for identical configurations.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::answer::Answer;
use crate::features::{encode_features, NgramHashEncoder, TextEncoder};
use crate::generate::{derive_seed, rng_from_seed, BENCH_EDGES, BENCH_NODES};
use crate::graph::Graph;
use crate::instance::{make_instance, solve, TaskInstance, TaskParams, TEMPLATE_VERSION};
use crate::task::{Difficulty, TaskKind};

pub const FORMAT_VERSION: &str = "1";
pub const EVAL_PER_TASK: usize = 10;
pub const DEFAULT_STAGE1: usize = 20_000;
pub const DEFAULT_STAGE2: usize = 95_000;
pub const DEFAULT_AUDIT_RATE: f64 = 0.01;
const BATCH: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphOrigin {
    Synthetic,
    Ontology,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSample {
    pub id: String,
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub instruction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cot: Option<String>,
    pub answer: Answer,
    pub answer_text: String,
    pub params: TaskParams,
    #[serde(default = "synthetic")]
    pub origin: GraphOrigin,
    pub graph: Graph,
}

fn synthetic() -> GraphOrigin {
    GraphOrigin::Synthetic
}

impl TaskSample {
    pub fn from_instance(id: String, inst: TaskInstance, origin: GraphOrigin) -> Self {
        Self {
            id,
            task: inst.task,
            difficulty: inst.task.difficulty(),
            instruction: inst.instruction,
            cot: inst.cot,
            answer_text: inst.answer.to_text(),
            answer: inst.answer,
            params: inst.params,
            origin,
            graph: inst.graph,
        }
    }

    /// Checks the stored answer against a fresh oracle run and the text
    /// rendering against the answer.
    pub fn verify(&self) -> Result<(), String> {
        let gold = solve(self.task, &self.graph, self.params).map_err(|e| e.to_string())?;
        if gold != self.answer {
            return Err(format!("stored answer {:?} differs from oracle {gold:?}", self.answer));
        }
        if self.answer_text != gold.to_text() {
            return Err(format!("answer_text {:?} does not render the answer", self.answer_text));
        }
        if self.difficulty != self.task.difficulty() {
            return Err("difficulty does not match the task tier".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Eval,
    Stage1,
    Stage2,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Eval => "eval",
            Split::Stage1 => "stage1",
            Split::Stage2 => "stage2",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Split::Eval => 0x6576_616c,
            Split::Stage1 => 0x7374_6731,
            Split::Stage2 => 0x7374_6732,
        }
    }

    /// Tasks a split draws from. Stage 1 is the answer-only warm-up over
    /// the simple and medium tiers.
    pub fn tasks(self) -> Vec<TaskKind> {
        match self {
            Split::Stage1 => TaskKind::ALL
                .into_iter()
                .filter(|t| t.difficulty() != Difficulty::Difficult)
                .collect(),
            Split::Eval | Split::Stage2 => TaskKind::ALL.to_vec(),
        }
    }

    pub fn with_cot(self) -> bool {
        !matches!(self, Split::Stage1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BuildConfig {
    pub master_seed: u64,
    pub stage1: usize,
    pub stage2: usize,
    /// Relative task weights for the training splits; round-robin when
    /// absent. Tasks missing from the map get weight 0.
    pub task_weights: Option<BTreeMap<TaskKind, f64>>,
    /// Fraction of training samples re-verified after serialization.
    pub audit_rate: f64,
    /// Embed node feature matrices in the JSONL graphs.
    pub with_features: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            stage1: DEFAULT_STAGE1,
            stage2: DEFAULT_STAGE2,
            task_weights: None,
            audit_rate: DEFAULT_AUDIT_RATE,
            with_features: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("audit failed for {id}: {reason}")]
    Audit { id: String, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub count: usize,
    pub per_task: BTreeMap<TaskKind, usize>,
    pub audited: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: String,
    pub template_version: String,
    pub master_seed: u64,
    pub feature_encoder: String,
    pub features_embedded: bool,
    pub splits: BTreeMap<Split, SplitSummary>,
}

impl DatasetManifest {
    pub fn new(master_seed: u64, with_features: bool) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            template_version: TEMPLATE_VERSION.into(),
            master_seed,
            feature_encoder: NgramHashEncoder::default().id(),
            features_embedded: with_features,
            splits: BTreeMap::new(),
        }
    }

    pub fn training_total(&self) -> usize {
        [Split::Stage1, Split::Stage2]
            .iter()
            .filter_map(|s| self.splits.get(s))
            .map(|s| s.count)
            .sum()
    }
}

impl BuildConfig {
    pub fn validate(&self) -> Result<(), DatasetError> {
        for (name, n) in [("stage1", self.stage1), ("stage2", self.stage2)] {
            if n < TaskKind::ALL.len() {
                return Err(DatasetError::Config(format!(
                    "{name} size {n} is below the minimum of {}",
                    TaskKind::ALL.len()
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.audit_rate) {
            return Err(DatasetError::Config(format!("audit_rate {} not in [0, 1]", self.audit_rate)));
        }
        if let Some(w) = &self.task_weights {
            if w.values().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(DatasetError::Config("task weights must be finite and non-negative".into()));
            }
            for split in [Split::Stage1, Split::Stage2] {
                if split.tasks().iter().all(|t| w.get(t).copied().unwrap_or(0.0) == 0.0) {
                    return Err(DatasetError::Config(format!(
                        "task weights give every {} task weight 0",
                        split.name()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Task of sample `index` in a split of `count` samples.
fn task_for(split: Split, index: usize, cfg: &BuildConfig, seed: u64) -> TaskKind {
    let pool = split.tasks();
    match (&cfg.task_weights, split) {
        (Some(weights), Split::Stage1 | Split::Stage2) => {
            let w: Vec<f64> = pool.iter().map(|t| weights.get(t).copied().unwrap_or(0.0)).collect();
            let dist = WeightedIndex::new(&w).expect("validated weights");
            pool[dist.sample(&mut rng_from_seed(derive_seed(seed, u64::MAX)))]
        }
        (_, Split::Eval) => pool[index / EVAL_PER_TASK],
        _ => pool[index % pool.len()],
    }
}

fn sample_id(split: Split, index: usize, task: TaskKind) -> String {
    match split {
        Split::Eval => format!("eval-{task}-{:02}", index % EVAL_PER_TASK),
        _ => format!("{}-{index:06}", split.name()),
    }
}

/// The sample at `index` of `split`, independent of every other index.
pub fn make_sample(split: Split, index: usize, cfg: &BuildConfig) -> TaskSample {
    let seed = derive_seed(derive_seed(cfg.master_seed, split.tag()), index as u64);
    let task = task_for(split, index, cfg, seed);
    let mut inst = make_instance(task, seed, split.with_cot());
    if cfg.with_features {
        inst.graph = encode_features(inst.graph, &NgramHashEncoder::default()).expect("fixed-dimension encoder");
    }
    TaskSample::from_instance(sample_id(split, index, task), inst, GraphOrigin::Synthetic)
}

/// In-memory samples `range` of a split.
pub fn generate_samples(split: Split, range: std::ops::Range<usize>, cfg: &BuildConfig) -> Vec<TaskSample> {
    range.into_par_iter().map(|i| make_sample(split, i, cfg)).collect()
}

/// Re-reads one serialized record and checks every per-sample invariant.
pub fn audit_line(line: &str, split: Split) -> Result<TaskSample, String> {
    let s: TaskSample = serde_json::from_str(line).map_err(|e| format!("unreadable record: {e}"))?;
    s.verify()?;
    if s.cot.is_some() != (split.with_cot() && s.task.is_traced()) {
        return Err("chain of thought present on the wrong task".into());
    }
    if !BENCH_NODES.contains(s.graph.num_nodes()) || !BENCH_EDGES.contains(s.graph.num_edges()) {
        return Err(format!(
            "graph size {} nodes / {} edges outside the benchmark bounds",
            s.graph.num_nodes(),
            s.graph.num_edges()
        ));
    }
    if !split.tasks().contains(&s.task) {
        return Err(format!("task {} not allowed in {}", s.task, split.name()));
    }
    Ok(s)
}

/// Forwards writes while hashing them.
pub struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> HashingWriter<W> {
    pub fn new(inner: W) -> Self {
        Self {
            inner,
            hasher: Sha256::new(),
        }
    }

    pub fn finish(mut self) -> io::Result<(W, String)> {
        self.inner.flush()?;
        Ok((self.inner, hex::encode(self.hasher.finalize())))
    }
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Streams `count` samples of `split` as JSONL into `out`, auditing a
/// seeded fraction of them (all of them when `audit_rate` is 1).
pub fn write_split<W: Write>(
    split: Split,
    count: usize,
    cfg: &BuildConfig,
    audit_rate: f64,
    out: W,
) -> Result<SplitSummary, DatasetError> {
    let audit_seed = derive_seed(cfg.master_seed, split.tag() ^ 0xa0d1);
    let mut out = HashingWriter::new(out);
    let mut per_task = BTreeMap::new();
    let mut audited = 0;
    for start in (0..count).step_by(BATCH) {
        let end = (start + BATCH).min(count);
        let lines: Vec<(TaskKind, String, bool)> = (start..end)
            .into_par_iter()
            .map(|i| {
                let s = make_sample(split, i, cfg);
                let line = serde_json::to_string(&s)?;
                let audit = audit_rate >= 1.0
                    || rng_from_seed(derive_seed(audit_seed, i as u64)).random_bool(audit_rate.clamp(0.0, 1.0));
                if audit {
                    audit_line(&line, split).map_err(|reason| DatasetError::Audit {
                        id: s.id.clone(),
                        reason,
                    })?;
                }
                Ok((s.task, line, audit))
            })
            .collect::<Result<_, DatasetError>>()?;
        for (task, line, audit) in lines {
            *per_task.entry(task).or_insert(0) += 1;
            audited += usize::from(audit);
            out.write_all(line.as_bytes())?;
            out.write_all(b"\n")?;
        }
    }
    let (_, sha256) = out.finish()?;
    log::info!("split={} samples={count} audited={audited} sha256={sha256}", split.name());
    Ok(SplitSummary {
        count,
        per_task,
        audited,
        sha256,
    })
}

/// 190 evaluation samples, ten per task, every one audited.
pub fn build_eval_set(master_seed: u64) -> Result<(Vec<TaskSample>, DatasetManifest), DatasetError> {
    let cfg = BuildConfig {
        master_seed,
        ..BuildConfig::default()
    };
    let count = EVAL_PER_TASK * TaskKind::ALL.len();
    let mut buf = Vec::new();
    let summary = write_split(Split::Eval, count, &cfg, 1.0, &mut buf)?;
    let samples = std::str::from_utf8(&buf)
        .expect("serde_json writes UTF-8")
        .lines()
        .map(serde_json::from_str)
        .collect::<Result<Vec<TaskSample>, _>>()?;
    let mut manifest = DatasetManifest::new(master_seed, false);
    manifest.splits.insert(Split::Eval, summary);
    Ok((samples, manifest))
}

/// Streams both training stages and returns their manifest.
pub fn build_training_set<A: Write, B: Write>(
    cfg: &BuildConfig,
    stage1: A,
    stage2: B,
) -> Result<DatasetManifest, DatasetError> {
    cfg.validate()?;
    let mut manifest = DatasetManifest::new(cfg.master_seed, cfg.with_features);
    let s1 = write_split(Split::Stage1, cfg.stage1, cfg, cfg.audit_rate, stage1)?;
    manifest.splits.insert(Split::Stage1, s1);
    let s2 = write_split(Split::Stage2, cfg.stage2, cfg, cfg.audit_rate, stage2)?;
    manifest.splits.insert(Split::Stage2, s2);
    Ok(manifest)
}

/// Eval plus both training stages in one manifest.
pub fn build_all<E: Write, A: Write, B: Write>(
    cfg: &BuildConfig,
    eval: E,
    stage1: A,
    stage2: B,
) -> Result<DatasetManifest, DatasetError> {
    cfg.validate()?;
    let count = EVAL_PER_TASK * TaskKind::ALL.len();
    let eval_summary = write_split(Split::Eval, count, cfg, 1.0, eval)?;
    let mut manifest = build_training_set(cfg, stage1, stage2)?;
    manifest.splits.insert(Split::Eval, eval_summary);
    Ok(manifest)
}
