//! Tabular wing: schema scan, column profiling, relation discovery and the
//! dual-layer (schema + instance) graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use ontokit_core::features::fnv1a;
use ontokit_core::generate::{derive_seed, rng_from_seed};

use crate::model::{EdgeKind, ModelError, NodeKind, OntoEdge, OntoNode, OntologyGraph};
use crate::text::{content_tokens, edit_similarity, identifier_tokens, singular, sorted_jaccard};

pub const SAMPLE_CAP: usize = 1000;
pub const DEFAULT_INSTANCE_CAP: usize = 100;
pub const DEFAULT_WINDOW: usize = 4;
/// Share of distinct values above which a column counts as unique.
pub const UNIQUE_THRESHOLD: f64 = 0.99;
/// Name similarity that lets a non-key pair of compatible types through pruning.
pub const NAME_PRUNE_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeclaredType {
    Integer,
    Decimal,
    Text,
    Date,
    Boolean,
}

impl DeclaredType {
    fn numeric(self) -> bool {
        matches!(self, DeclaredType::Integer | DeclaredType::Decimal)
    }
}

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("bad schema: {0}")]
    Schema(String),
    #[error("table {table}: {message}")]
    Table { table: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableData {
    pub columns: Vec<(String, DeclaredType)>,
    /// Row-major; `None` is a null cell.
    pub rows: Vec<Vec<Option<String>>>,
}

impl TableData {
    pub fn column_index(&self, column: &str) -> Option<usize> {
        self.columns.iter().position(|(c, _)| c == column)
    }
}

/// Read access to a set of relational tables.
pub trait TabularSource: Sync {
    fn table_names(&self) -> Result<Vec<String>, SourceError>;
    fn read_table(&self, table: &str) -> Result<TableData, SourceError>;
}

/// Tables held in memory, mostly for tests and fixtures.
#[derive(Debug, Clone, Default)]
pub struct MemorySource {
    pub tables: BTreeMap<String, TableData>,
}

impl MemorySource {
    pub fn with_table(mut self, name: &str, columns: &[(&str, DeclaredType)], rows: Vec<Vec<Option<String>>>) -> Self {
        let columns = columns.iter().map(|(c, t)| (c.to_string(), *t)).collect();
        self.tables.insert(name.to_string(), TableData { columns, rows });
        self
    }
}

impl TabularSource for MemorySource {
    fn table_names(&self) -> Result<Vec<String>, SourceError> {
        Ok(self.tables.keys().cloned().collect())
    }

    fn read_table(&self, table: &str) -> Result<TableData, SourceError> {
        self.tables
            .get(table)
            .cloned()
            .ok_or_else(|| SourceError::Table { table: table.into(), message: "no such table".into() })
    }
}

/// A directory of `<table>.csv` files (with header rows) plus a
/// `schema.json` sidecar mapping table -> column -> declared type.
#[derive(Debug, Clone)]
pub struct CsvDirSource {
    dir: PathBuf,
    schema: BTreeMap<String, BTreeMap<String, DeclaredType>>,
}

impl CsvDirSource {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, SourceError> {
        let dir = dir.as_ref().to_path_buf();
        let path = dir.join("schema.json");
        let text = fs::read_to_string(&path).map_err(|e| SourceError::Io { path: path.clone(), message: e.to_string() })?;
        let schema = serde_json::from_str(&text).map_err(|e| SourceError::Schema(format!("{}: {e}", path.display())))?;
        Ok(Self { dir, schema })
    }
}

impl TabularSource for CsvDirSource {
    fn table_names(&self) -> Result<Vec<String>, SourceError> {
        Ok(self.schema.keys().cloned().collect())
    }

    fn read_table(&self, table: &str) -> Result<TableData, SourceError> {
        let types = self
            .schema
            .get(table)
            .ok_or_else(|| SourceError::Table { table: table.into(), message: "not in schema.json".into() })?;
        let path = self.dir.join(format!("{table}.csv"));
        let fail = |message: String| SourceError::Table { table: table.into(), message };
        let mut reader = csv::Reader::from_path(&path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
        let header = reader.headers().map_err(|e| fail(e.to_string()))?.clone();
        let mut columns = Vec::new();
        for name in header.iter() {
            let ty = types.get(name).copied().unwrap_or_else(|| {
                log::warn!("event=untyped_column table={table} column={name} assumed=text");
                DeclaredType::Text
            });
            columns.push((name.to_string(), ty));
        }
        for name in types.keys() {
            if !header.iter().any(|h| h == name) {
                return Err(fail(format!("column {name} declared in schema.json but missing from the CSV header")));
            }
        }
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| fail(e.to_string()))?;
            rows.push(
                rec.iter()
                    .map(|cell| {
                        let cell = cell.trim();
                        (!cell.is_empty()).then(|| cell.to_string())
                    })
                    .collect(),
            );
        }
        Ok(TableData { columns, rows })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeySignal {
    /// Name carries an explicit key token such as `id`.
    Explicit,
    /// Name carries a weaker synonym such as `no` or `number`.
    Synonym,
    /// Flagged by a pluggable detector.
    Detected,
}

/// Decides whether a column looks like a key.
pub trait KeyDetector: Sync {
    fn key_signal(&self, table: &str, column: &str) -> Option<KeySignal>;
}

#[derive(Debug, Clone)]
pub struct TokenKeyDetector {
    pub explicit: Vec<String>,
    pub synonyms: Vec<String>,
}

impl Default for TokenKeyDetector {
    fn default() -> Self {
        Self {
            explicit: vec!["id".into(), "code".into()],
            synonyms: vec!["key".into(), "no".into(), "num".into(), "number".into()],
        }
    }
}

impl KeyDetector for TokenKeyDetector {
    fn key_signal(&self, _table: &str, column: &str) -> Option<KeySignal> {
        let toks = identifier_tokens(column);
        if toks.iter().any(|t| self.explicit.contains(t)) {
            Some(KeySignal::Explicit)
        } else if toks.iter().any(|t| self.synonyms.contains(t)) {
            Some(KeySignal::Synonym)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub declared_type: DeclaredType,
    pub key: Option<KeySignal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSchema {
    pub name: String,
    pub columns: Vec<ColumnSchema>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableError {
    pub table: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SchemaScan {
    pub tables: Vec<TableSchema>,
    pub errors: Vec<TableError>,
}

/// Lists tables and columns and flags likely keys. A table that cannot be
/// read is reported and skipped.
pub fn scan_schema(source: &dyn TabularSource, detector: &dyn KeyDetector) -> Result<SchemaScan, SourceError> {
    let mut scan = SchemaScan::default();
    let mut names = source.table_names()?;
    names.sort();
    for name in names {
        match source.read_table(&name) {
            Ok(data) => {
                let columns = data
                    .columns
                    .iter()
                    .map(|(c, t)| ColumnSchema { name: c.clone(), declared_type: *t, key: detector.key_signal(&name, c) })
                    .collect();
                scan.tables.push(TableSchema { name, columns });
            }
            Err(e) => {
                log::warn!("event=table_unreadable table={name} error=\"{e}\"");
                scan.errors.push(TableError { table: name, message: e.to_string() });
            }
        }
    }
    Ok(scan)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ColumnRef {
    pub table: String,
    pub column: String,
}

impl ColumnRef {
    pub fn new(table: &str, column: &str) -> Self {
        Self { table: table.into(), column: column.into() }
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.table, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnProfile {
    pub table: String,
    pub column: String,
    pub declared_type: DeclaredType,
    pub key: Option<KeySignal>,
    /// Up to [`SAMPLE_CAP`] non-null values in row order.
    pub sample: Vec<String>,
    /// Distinct values over sample size; 0 for an empty sample.
    pub distinct_ratio: f64,
    /// Null cells over all rows of the column; 1 for an all-null column.
    pub null_ratio: f64,
}

impl ColumnProfile {
    pub fn column_ref(&self) -> ColumnRef {
        ColumnRef::new(&self.table, &self.column)
    }

    fn distinct(&self) -> BTreeSet<String> {
        self.sample.iter().map(|v| canonical_value(v, self.declared_type)).collect()
    }
}

/// Numeric cells compare by value (`1` equals `1.0`).
fn canonical_value(v: &str, ty: DeclaredType) -> String {
    if ty.numeric() {
        if let Ok(x) = v.parse::<f64>() {
            return format!("{x}");
        }
    }
    v.to_string()
}

fn column_seed(seed: u64, table: &str, column: &str) -> u64 {
    derive_seed(seed, fnv1a(format!("{table}.{column}").as_bytes()))
}

fn profile_from_data(data: &TableData, table: &str, ci: usize, key: Option<KeySignal>, seed: u64) -> ColumnProfile {
    let (column, declared_type) = data.columns[ci].clone();
    let values: Vec<&String> = data.rows.iter().filter_map(|r| r.get(ci).and_then(|c| c.as_ref())).collect();
    let sample: Vec<String> = if values.len() <= SAMPLE_CAP {
        values.iter().map(|v| (*v).clone()).collect()
    } else {
        let mut rng = rng_from_seed(column_seed(seed, table, &column));
        let mut picked = index::sample(&mut rng, values.len(), SAMPLE_CAP).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| values[i].clone()).collect()
    };
    let null_ratio = if data.rows.is_empty() { 1.0 } else { 1.0 - values.len() as f64 / data.rows.len() as f64 };
    let mut p = ColumnProfile {
        table: table.into(),
        column,
        declared_type,
        key,
        sample,
        distinct_ratio: 0.0,
        null_ratio,
    };
    if !p.sample.is_empty() {
        p.distinct_ratio = p.distinct().len() as f64 / p.sample.len() as f64;
    }
    p
}

/// Profiles one column from a seeded sample of its non-null values.
pub fn profile_column(
    source: &dyn TabularSource,
    table: &str,
    column: &str,
    seed: u64,
) -> Result<ColumnProfile, SourceError> {
    let data = source.read_table(table)?;
    let ci = data
        .column_index(column)
        .ok_or_else(|| SourceError::Table { table: table.into(), message: format!("no column {column}") })?;
    Ok(profile_from_data(&data, table, ci, None, seed))
}

const KEY_TOKENS: &[&str] = &["id", "code", "key", "no", "num", "number"];

/// Name tokens after normalization: the owning table's name is stripped
/// from the front, and a bare key column is qualified by the table's
/// singular so `customers.id` reads like `orders.customer_id`.
pub fn normalized_name(table: &str, column: &str) -> Vec<String> {
    let table_toks: Vec<String> = identifier_tokens(table).iter().map(|t| singular(t)).collect();
    let mut toks = identifier_tokens(column);
    let prefix_len = table_toks.len();
    if toks.len() > prefix_len
        && toks[..prefix_len].iter().zip(&table_toks).all(|(c, t)| singular(c) == *t)
    {
        toks.drain(..prefix_len);
    }
    if toks.len() == 1 && KEY_TOKENS.contains(&toks[0].as_str()) {
        let mut q = table_toks;
        q.append(&mut toks);
        toks = q;
    }
    toks
}

/// Larger of token Jaccard and normalized edit similarity of the
/// normalized names.
pub fn name_similarity(a: &ColumnRef, b: &ColumnRef) -> f64 {
    let ta = normalized_name(&a.table, &a.column);
    let tb = normalized_name(&b.table, &b.column);
    let (mut sa, mut sb) = (ta.clone(), tb.clone());
    sa.sort();
    sa.dedup();
    sb.sort();
    sb.dedup();
    let jac = sorted_jaccard(&sa, &sb);
    let edit = edit_similarity(&ta.join(" "), &tb.join(" "));
    jac.max(edit)
}

/// 1 for equal declared types and for the integer/decimal pair.
pub fn type_compatibility(a: DeclaredType, b: DeclaredType) -> f64 {
    if a == b || (a.numeric() && b.numeric()) {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMode {
    /// `|A ∩ B| / min(|A|, |B|)`
    #[default]
    MinContainment,
    Jaccard,
}

/// Overlap of the distinct sampled values; 0 when either side is empty.
pub fn overlap_score(a: &ColumnProfile, b: &ColumnProfile, mode: OverlapMode) -> f64 {
    let (da, db) = (a.distinct(), b.distinct());
    if da.is_empty() || db.is_empty() {
        return 0.0;
    }
    let inter = da.intersection(&db).count() as f64;
    match mode {
        OverlapMode::MinContainment => inter / da.len().min(db.len()) as f64,
        OverlapMode::Jaccard => inter / ((da.len() + db.len()) as f64 - inter),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cardinality {
    OneToOne,
    OneToMany,
    ManyToMany,
}

/// Score is the larger distinct ratio; a side at or above
/// [`UNIQUE_THRESHOLD`] counts as the "one" side.
pub fn cardinality_score(distinct_a: f64, distinct_b: f64) -> (f64, Cardinality) {
    let (ua, ub) = (distinct_a >= UNIQUE_THRESHOLD, distinct_b >= UNIQUE_THRESHOLD);
    let pattern = match (ua, ub) {
        (true, true) => Cardinality::OneToOne,
        (false, false) => Cardinality::ManyToMany,
        _ => Cardinality::OneToMany,
    };
    (distinct_a.max(distinct_b), pattern)
}

#[derive(Debug, Error, PartialEq)]
pub enum WeightsError {
    #[error("weights must be non-negative and sum to 1, got {0:?}")]
    Weights([f64; 4]),
    #[error("threshold must lie strictly between 0 and 1, got {0}")]
    Threshold(f64),
}

/// Component weights (name, type, overlap, cardinality) and the acceptance
/// threshold for the relation confidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfidenceWeights {
    pub name: f64,
    pub type_compat: f64,
    pub overlap: f64,
    pub cardinality: f64,
    pub threshold: f64,
}

impl Default for ConfidenceWeights {
    fn default() -> Self {
        Self { name: 0.3, type_compat: 0.2, overlap: 0.3, cardinality: 0.2, threshold: 0.6 }
    }
}

impl ConfidenceWeights {
    pub fn validate(&self) -> Result<(), WeightsError> {
        let w = [self.name, self.type_compat, self.overlap, self.cardinality];
        if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(WeightsError::Weights(w));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(WeightsError::Threshold(self.threshold));
        }
        Ok(())
    }

    /// The weighted sum, evaluated left to right.
    pub fn combine(&self, s_name: f64, i_type: f64, s_overlap: f64, s_card: f64) -> f64 {
        self.name * s_name + self.type_compat * i_type + self.overlap * s_overlap + self.cardinality * s_card
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationCandidate {
    /// Referencing side.
    pub src: ColumnRef,
    /// Referenced side.
    pub dst: ColumnRef,
    pub s_name: f64,
    pub i_type: f64,
    pub s_overlap: f64,
    pub s_card: f64,
    pub phi: f64,
    pub cardinality: Cardinality,
}

/// Scores a column pair. The score is symmetric; orientation puts the
/// unique (or key-flagged) side at `dst`.
pub fn confidence(
    a: &ColumnProfile,
    b: &ColumnProfile,
    weights: &ConfidenceWeights,
    mode: OverlapMode,
) -> RelationCandidate {
    let s_name = name_similarity(&a.column_ref(), &b.column_ref());
    let i_type = type_compatibility(a.declared_type, b.declared_type);
    let s_overlap = overlap_score(a, b, mode);
    let (s_card, cardinality) = cardinality_score(a.distinct_ratio, b.distinct_ratio);
    let phi = weights.combine(s_name, i_type, s_overlap, s_card);
    let (ua, ub) = (a.distinct_ratio >= UNIQUE_THRESHOLD, b.distinct_ratio >= UNIQUE_THRESHOLD);
    let a_is_dst = if ua != ub {
        ua
    } else if a.key.is_some() != b.key.is_some() {
        a.key.is_some()
    } else {
        a.column_ref() > b.column_ref()
    };
    let (src, dst) = if a_is_dst { (b, a) } else { (a, b) };
    RelationCandidate {
        src: src.column_ref(),
        dst: dst.column_ref(),
        s_name,
        i_type,
        s_overlap,
        s_card,
        phi,
        cardinality,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscoveryConfig {
    pub weights: ConfidenceWeights,
    /// Tables per window block.
    pub window: usize,
    pub overlap_mode: OverlapMode,
    pub seed: u64,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self { weights: ConfidenceWeights::default(), window: DEFAULT_WINDOW, overlap_mode: OverlapMode::default(), seed: 0 }
    }
}

fn profile_table(source: &dyn TabularSource, t: &TableSchema, seed: u64) -> Vec<ColumnProfile> {
    match source.read_table(&t.name) {
        Ok(data) => t
            .columns
            .iter()
            .filter_map(|c| data.column_index(&c.name).map(|ci| profile_from_data(&data, &t.name, ci, c.key, seed)))
            .collect(),
        Err(e) => {
            log::warn!("event=table_unreadable table={} error=\"{e}\"", t.name);
            Vec::new()
        }
    }
}

fn passes_pruning(a: &ColumnProfile, b: &ColumnProfile) -> bool {
    if a.key.is_some() || b.key.is_some() {
        return true;
    }
    type_compatibility(a.declared_type, b.declared_type) == 1.0
        && name_similarity(&a.column_ref(), &b.column_ref()) >= NAME_PRUNE_THRESHOLD
}

/// Scores column pairs across tables. Tables are processed in blocks of
/// `window`; each pair of blocks is visited once, so every table pair is
/// compared exactly once whatever the width. Accepted candidates exceed the
/// threshold, keep the best per referencing column, and are sorted by
/// descending confidence.
pub fn discover_relations(
    source: &dyn TabularSource,
    tables: &[TableSchema],
    cfg: &DiscoveryConfig,
) -> Vec<RelationCandidate> {
    let window = cfg.window.max(1);
    let mut sorted: Vec<&TableSchema> = tables.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let blocks: Vec<&[&TableSchema]> = sorted.chunks(window).collect();
    let profile_block = |block: &[&TableSchema]| -> Vec<Vec<ColumnProfile>> {
        block.par_iter().map(|t| profile_table(source, t, cfg.seed)).collect()
    };

    let mut accepted = Vec::new();
    for (bi, left_block) in blocks.iter().enumerate() {
        let left = profile_block(left_block);
        for right_block in &blocks[bi..] {
            let same_block = std::ptr::eq(*left_block, *right_block);
            let right = if same_block { left.clone() } else { profile_block(right_block) };
            for (ti, lt) in left.iter().enumerate() {
                let start = if same_block { ti + 1 } else { 0 };
                for rt in &right[start.min(right.len())..] {
                    for a in lt {
                        for b in rt {
                            if !passes_pruning(a, b) {
                                continue;
                            }
                            let cand = confidence(a, b, &cfg.weights, cfg.overlap_mode);
                            if cand.phi > cfg.weights.threshold {
                                accepted.push(cand);
                            }
                        }
                    }
                }
            }
        }
    }

    let mut best: BTreeMap<ColumnRef, RelationCandidate> = BTreeMap::new();
    for c in accepted {
        match best.get(&c.src) {
            Some(cur) if cur.phi > c.phi || (cur.phi == c.phi && cur.dst <= c.dst) => {}
            _ => {
                best.insert(c.src.clone(), c);
            }
        }
    }
    let mut out: Vec<RelationCandidate> = best.into_values().collect();
    out.sort_by(|a, b| b.phi.total_cmp(&a.phi).then_with(|| a.src.cmp(&b.src)).then_with(|| a.dst.cmp(&b.dst)));
    out
}

#[derive(Debug, Error, PartialEq)]
#[error("k must be at least 1")]
pub struct KCoreError;

/// The k-core by iterative peeling: nodes of degree below `k` are removed
/// until none remain. Self-loops are ignored.
pub fn k_core<'a>(adj: &BTreeMap<&'a str, BTreeSet<&'a str>>, k: usize) -> Result<BTreeSet<&'a str>, KCoreError> {
    if k == 0 {
        return Err(KCoreError);
    }
    let mut degree: HashMap<&str, usize> =
        adj.iter().map(|(n, ns)| (*n, ns.iter().filter(|m| *m != n && adj.contains_key(*m)).count())).collect();
    let mut alive: BTreeSet<&str> = adj.keys().copied().collect();
    let mut queue: Vec<&str> = alive.iter().copied().filter(|n| degree[n] < k).collect();
    while let Some(n) = queue.pop() {
        if !alive.remove(n) {
            continue;
        }
        for m in &adj[n] {
            if *m != n && alive.contains(m) {
                let d = degree.get_mut(m).expect("neighbor is a node");
                *d -= 1;
                if *d + 1 == k {
                    queue.push(m);
                }
            }
        }
    }
    Ok(alive)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRule {
    pub name: String,
    /// Regex matched against table names.
    pub pattern: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualLayerConfig {
    pub categories: Vec<CategoryRule>,
    pub instance_cap: usize,
    /// Core order used for the backbone flag.
    pub core_k: usize,
    pub seed: u64,
}

impl Default for DualLayerConfig {
    fn default() -> Self {
        Self { categories: Vec::new(), instance_cap: DEFAULT_INSTANCE_CAP, core_k: 1, seed: 0 }
    }
}

#[derive(Debug, Error)]
pub enum StructuredError {
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("category rule {name}: {message}")]
    Rule { name: String, message: String },
    #[error(transparent)]
    KCore(#[from] KCoreError),
}

pub fn table_id(table: &str) -> String {
    format!("s:table:{table}")
}

pub fn column_id(c: &ColumnRef) -> String {
    format!("s:column:{c}")
}

pub fn instance_id(table: &str, row: usize) -> String {
    format!("s:instance:{table}#{row}")
}

/// Table-level adjacency induced by accepted relations.
pub fn table_graph<'a>(tables: &'a [TableSchema], relations: &'a [RelationCandidate]) -> BTreeMap<&'a str, BTreeSet<&'a str>> {
    let mut adj: BTreeMap<&str, BTreeSet<&str>> = tables.iter().map(|t| (t.name.as_str(), BTreeSet::new())).collect();
    for r in relations {
        if r.src.table != r.dst.table && adj.contains_key(r.src.table.as_str()) && adj.contains_key(r.dst.table.as_str()) {
            adj.get_mut(r.src.table.as_str()).unwrap().insert(r.dst.table.as_str());
            adj.get_mut(r.dst.table.as_str()).unwrap().insert(r.src.table.as_str());
        }
    }
    adj
}

/// Schema layer (categories, tables, columns, foreign keys) plus an
/// instance layer of sampled rows.
pub fn build_dual_layer(
    source: &dyn TabularSource,
    tables: &[TableSchema],
    relations: &[RelationCandidate],
    cfg: &DualLayerConfig,
) -> Result<OntologyGraph, StructuredError> {
    let mut g = OntologyGraph::new();
    let core = k_core(&table_graph(tables, relations), cfg.core_k)?;

    for rule in &cfg.categories {
        let re = Regex::new(&rule.pattern)
            .map_err(|e| StructuredError::Rule { name: rule.name.clone(), message: e.to_string() })?;
        let matched: Vec<&TableSchema> = tables.iter().filter(|t| re.is_match(&t.name)).collect();
        if matched.is_empty() {
            log::warn!("event=category_unmatched category={} pattern={}", rule.name, rule.pattern);
            continue;
        }
        let id = format!("s:category:{}", rule.name);
        let mut node = OntoNode::new(&id, NodeKind::Category, &rule.name, format!("category {}", rule.name));
        node.tags = content_tokens(&identifier_tokens(&rule.name).join(" "));
        g.add_node(node)?;
        for t in matched {
            add_table(&mut g, t, &core)?;
            g.add_edge(OntoEdge::new(&id, table_id(&t.name), EdgeKind::CategoryOf, format!("rule:{}", rule.name)))?;
        }
    }

    for t in tables {
        add_table(&mut g, t, &core)?;
        for c in &t.columns {
            let cref = ColumnRef::new(&t.name, &c.name);
            let mut node = OntoNode::new(
                column_id(&cref),
                NodeKind::Column,
                cref.to_string(),
                format!("column {} of {} ({:?})", c.name, t.name, c.declared_type).to_lowercase(),
            );
            node.tags = content_tokens(&normalized_name(&t.name, &c.name).join(" "));
            g.add_node(node)?;
            g.add_edge(OntoEdge::new(column_id(&cref), table_id(&t.name), EdgeKind::BelongsTo, "schema"))?;
        }
    }

    for r in relations {
        g.add_edge(
            OntoEdge::new(column_id(&r.src), column_id(&r.dst), EdgeKind::ForeignKey, "relation-discovery")
                .with_confidence(r.phi),
        )?;
    }

    for t in tables {
        let data = match source.read_table(&t.name) {
            Ok(d) => d,
            Err(e) => {
                log::warn!("event=instances_skipped table={} error=\"{e}\"", t.name);
                continue;
            }
        };
        let rows = sample_rows(data.rows.len(), cfg.instance_cap, derive_seed(cfg.seed, fnv1a(t.name.as_bytes())));
        let sing = identifier_tokens(&t.name).iter().map(|w| singular(w)).collect::<Vec<_>>().join(" ");
        for ri in rows {
            let row = &data.rows[ri];
            let id = instance_id(&t.name, ri);
            let mut values = Vec::new();
            let mut node = OntoNode::new(&id, NodeKind::Instance, format!("{} row {ri}", t.name), "");
            for (ci, (col, _)) in data.columns.iter().enumerate() {
                let Some(v) = row.get(ci).and_then(|v| v.as_ref()) else { continue };
                node.attributes
                    .entry(col.clone())
                    .or_default()
                    .entry(v.clone())
                    .or_default()
                    .insert(format!("{}#{ri}", t.name));
                let is_key = t.columns.iter().any(|c| c.name == *col && c.key.is_some());
                if !is_key {
                    values.push(v.as_str());
                }
            }
            node.description = format!("{sing} row: {}", values.join(", "));
            node.tags = content_tokens(&node.description);
            g.add_node(node)?;
            g.add_edge(OntoEdge::new(&id, table_id(&t.name), EdgeKind::InstanceOf, "rows"))?;
        }
    }
    Ok(g)
}

fn add_table(g: &mut OntologyGraph, t: &TableSchema, core: &BTreeSet<&str>) -> Result<(), ModelError> {
    let cols: Vec<&str> = t.columns.iter().map(|c| c.name.as_str()).collect();
    let mut node = OntoNode::new(
        table_id(&t.name),
        NodeKind::Table,
        &t.name,
        format!("table {} with columns {}", t.name, cols.join(", ")),
    );
    node.tags = content_tokens(&identifier_tokens(&t.name).iter().map(|w| singular(w)).collect::<Vec<_>>().join(" "));
    node.backbone = Some(core.contains(t.name.as_str()));
    g.add_node(node)
}

fn sample_rows(len: usize, cap: usize, seed: u64) -> Vec<usize> {
    if len <= cap {
        return (0..len).collect();
    }
    let mut picked = index::sample(&mut rng_from_seed(seed), len, cap).into_vec();
    picked.sort_unstable();
    picked
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StructuredConfig {
    pub discovery: DiscoveryConfig,
    pub layer: DualLayerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuredBuild {
    pub graph: OntologyGraph,
    pub scan: SchemaScan,
    pub relations: Vec<RelationCandidate>,
}

/// Scan, discover and build in one call.
pub fn build_structured(
    source: &dyn TabularSource,
    detector: &dyn KeyDetector,
    cfg: &StructuredConfig,
) -> Result<StructuredBuild, StructuredError> {
    let scan = scan_schema(source, detector)?;
    let relations = discover_relations(source, &scan.tables, &cfg.discovery);
    let graph = build_dual_layer(source, &scan.tables, &relations, &cfg.layer)?;
    Ok(StructuredBuild { graph, scan, relations })
}
