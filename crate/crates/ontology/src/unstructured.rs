//! Text wing: chunking, triple extraction, entity disambiguation and the
//! text graph.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use ontokit_core::features::{cosine, NgramHashEncoder, TextEncoder};

use crate::model::{Attributes, EdgeKind, ModelError, NodeKind, OntoEdge, OntoNode, OntologyGraph};
use crate::text::{edit_similarity, fold};

pub const DEFAULT_CHUNK_SIZE: usize = 2000;
pub const DEFAULT_CHUNK_OVERLAP: usize = 150;
/// Slack for threshold comparisons so values that equal a threshold in exact
/// arithmetic are not lost to rounding.
pub const THRESHOLD_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    /// Byte offsets into the source text.
    pub start: usize,
    pub end: usize,
}

pub trait Tokenizer: Sync {
    fn tokenize(&self, text: &str) -> Vec<Token>;
}

/// Alphanumeric runs are words; every other non-space character is a token
/// of its own.
#[derive(Debug, Clone, Copy, Default)]
pub struct WordTokenizer;

impl Tokenizer for WordTokenizer {
    fn tokenize(&self, text: &str) -> Vec<Token> {
        let mut out = Vec::new();
        let mut word: Option<usize> = None;
        for (i, c) in text.char_indices() {
            if c.is_alphanumeric() {
                word.get_or_insert(i);
                continue;
            }
            if let Some(s) = word.take() {
                out.push(Token { start: s, end: i });
            }
            if !c.is_whitespace() {
                out.push(Token { start: i, end: i + c.len_utf8() });
            }
        }
        if let Some(s) = word {
            out.push(Token { start: s, end: text.len() });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentChunk {
    pub doc_id: String,
    pub chunk_index: usize,
    /// Token span `[token_start, token_end)`.
    pub token_start: usize,
    pub token_end: usize,
    pub text: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum ChunkError {
    #[error("chunk size {size} must exceed overlap {overlap}")]
    Window { size: usize, overlap: usize },
}

/// Fixed-size token windows advancing by `size - overlap`; the last window
/// is the first one that reaches the end of the document.
pub fn chunk_document(
    doc_id: &str,
    text: &str,
    tokenizer: &dyn Tokenizer,
    size: usize,
    overlap: usize,
) -> Result<Vec<DocumentChunk>, ChunkError> {
    if size == 0 || overlap >= size {
        return Err(ChunkError::Window { size, overlap });
    }
    let tokens = tokenizer.tokenize(text);
    let n = tokens.len();
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let end = (start + size).min(n);
        out.push(DocumentChunk {
            doc_id: doc_id.into(),
            chunk_index: out.len(),
            token_start: start,
            token_end: end,
            text: text[tokens[start].start..tokens[end - 1].end].to_string(),
        });
        if end == n {
            break;
        }
        start += size - overlap;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    #[serde(rename = "MENTIONS")]
    Mentions,
    #[serde(rename = "RELATES_TO")]
    RelatesTo,
    #[serde(rename = "IS_A")]
    IsA,
}

impl RelationKind {
    pub fn edge_kind(self) -> EdgeKind {
        match self {
            RelationKind::Mentions => EdgeKind::Mentions,
            RelationKind::RelatesTo => EdgeKind::RelatesTo,
            RelationKind::IsA => EdgeKind::IsA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub text: String,
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationMention {
    pub head: String,
    pub kind: RelationKind,
    pub tail: String,
}

/// Extractor response: the JSON exchanged with remote extractors.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    #[serde(default)]
    pub mentions: Vec<Mention>,
    #[serde(default)]
    pub relations: Vec<RelationMention>,
}

#[derive(Debug, Error)]
#[error("extractor {extractor}: {message}")]
pub struct ExtractError {
    pub extractor: String,
    pub message: String,
}

pub trait Extractor: Sync {
    /// Recorded in triple provenance.
    fn id(&self) -> String;
    fn extract(&self, chunk: &DocumentChunk) -> Result<Extraction, ExtractError>;
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub doc_id: String,
    pub chunk_index: usize,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}#{}", self.doc_id, self.chunk_index)
    }
}

/// For `MENTIONS` the head is the document id; otherwise both ends are
/// mention texts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedTriple {
    pub head: String,
    pub relation: RelationKind,
    pub tail: String,
    #[serde(default)]
    pub attributes: BTreeMap<String, String>,
    pub provenance: Provenance,
}

/// Runs the extractor on one chunk. Failures are logged and yield nothing.
pub fn extract_triples(chunk: &DocumentChunk, extractor: &dyn Extractor) -> Vec<ExtractedTriple> {
    let ex = match extractor.extract(chunk) {
        Ok(ex) => ex,
        Err(e) => {
            log::warn!("event=extraction_failed doc={} chunk={} error=\"{e}\"", chunk.doc_id, chunk.chunk_index);
            return Vec::new();
        }
    };
    let provenance = Provenance { doc_id: chunk.doc_id.clone(), chunk_index: chunk.chunk_index };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m in ex.mentions {
        if seen.insert(m.text.clone()) {
            out.push(ExtractedTriple {
                head: chunk.doc_id.clone(),
                relation: RelationKind::Mentions,
                tail: m.text,
                attributes: m.attributes,
                provenance: provenance.clone(),
            });
        }
    }
    for r in ex.relations {
        if r.kind == RelationKind::Mentions {
            log::warn!("event=relation_dropped reason=mentions_is_implicit head=\"{}\"", r.head);
            continue;
        }
        out.push(ExtractedTriple {
            head: r.head,
            relation: r.kind,
            tail: r.tail,
            attributes: BTreeMap::new(),
            provenance: provenance.clone(),
        });
    }
    out
}

const LEGAL_WORDS: &[&str] = &["co", "corp", "corporation", "inc", "ltd", "llc", "gmbh", "limited", "plc", "ag", "sa"];
/// Legal forms usually written with a trailing period.
const LEGAL_ABBREVIATIONS: &[&str] = &["co", "corp", "inc", "ltd", "llc", "plc"];
const LEADING_FUNCTION_WORDS: &[&str] = &[
    "a", "after", "all", "also", "an", "and", "at", "before", "but", "by", "during", "each", "every", "for", "from", "he",
    "her", "his", "in", "it", "its", "most", "on", "our", "she", "since", "some", "that", "the", "their", "these",
    "they", "this", "those", "we", "when", "while", "with",
];
const NOUN_PHRASE_STOPS: &[&str] = &[
    "and", "based", "but", "by", "for", "from", "in", "of", "on", "or", "that", "to", "which", "who", "with",
];

#[derive(Debug, Clone)]
struct Word<'a> {
    text: &'a str,
    start: usize,
    end: usize,
}

fn words(sentence: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let chars: Vec<(usize, char)> = sentence.char_indices().collect();
    for (k, &(i, c)) in chars.iter().enumerate() {
        // hyphens and ampersands inside a word are kept
        let inner = (c == '-' || c == '&') && start.is_some() && chars.get(k + 1).is_some_and(|(_, n)| n.is_alphanumeric());
        if c.is_alphanumeric() || inner {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            out.push(Word { text: &sentence[s..i], start: s, end: i });
        }
    }
    if let Some(s) = start {
        out.push(Word { text: &sentence[s..], start: s, end: sentence.len() });
    }
    out
}

fn capitalized(w: &str) -> bool {
    w.chars().next().is_some_and(|c| c.is_uppercase())
}

fn is_legal(w: &str) -> bool {
    LEGAL_WORDS.contains(&w.to_lowercase().as_str())
}

fn is_legal_abbreviation(w: &str) -> bool {
    LEGAL_ABBREVIATIONS.contains(&w.to_lowercase().as_str())
}

/// Splits on `.`, `!`, `?` followed by whitespace and an upper-case letter
/// or digit, and on blank lines. A period after a legal-form abbreviation
/// does not end a sentence.
fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut begin = 0;
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    for (k, &(i, c)) in bytes.iter().enumerate() {
        let end_here = match c {
            '.' | '!' | '?' => {
                let rest = text[i + 1..].trim_start();
                let next_ok = rest.is_empty() || rest.chars().next().is_some_and(|n| n.is_uppercase() || n.is_ascii_digit());
                let spaced = bytes.get(k + 1).is_none_or(|(_, n)| n.is_whitespace());
                let prev_word = text[begin..i].rsplit(|ch: char| !ch.is_alphanumeric()).next().unwrap_or("");
                spaced && next_ok && !(c == '.' && is_legal_abbreviation(prev_word))
            }
            '\n' => text[i + 1..].starts_with('\n'),
            _ => false,
        };
        if end_here {
            let s = text[begin..=i].trim();
            if !s.is_empty() {
                out.push(s);
            }
            begin = i + c.len_utf8();
        }
    }
    let s = text[begin..].trim();
    if !s.is_empty() {
        out.push(s);
    }
    out
}

/// Deterministic rule-based extractor used when no remote model is
/// configured.
///
/// * capitalized phrases are mentions (a leading function word is dropped;
///   legal-form suffixes such as `Co., Ltd.` stay attached);
/// * `X is a Y` gives `X IS_A Y`, with `Y` the noun phrase up to the first
///   preposition or punctuation;
/// * `X's key is value` records an attribute on `X`;
/// * capitalized mentions sharing a sentence are linked by `RELATES_TO`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PatternExtractor;

struct Phrase {
    text: String,
    last: usize,
}

fn phrases(sentence: &str, ws: &[Word<'_>]) -> Vec<Phrase> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < ws.len() {
        if !capitalized(ws[i].text) || (LEADING_FUNCTION_WORDS.contains(&ws[i].text.to_lowercase().as_str())) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < ws.len() {
            let gap = &sentence[ws[j].end..ws[j + 1].start];
            let next = ws[j + 1].text;
            let joined = gap.trim().is_empty() && capitalized(next);
            let legal = is_legal(next) && matches!(gap.trim(), "" | "." | "," | ".,");
            if joined || legal {
                j += 1;
            } else {
                break;
            }
        }
        let mut end = ws[j].end;
        if is_legal_abbreviation(ws[j].text) && sentence[end..].starts_with('.') {
            end += 1;
        }
        out.push(Phrase { text: sentence[ws[i].start..end].to_string(), last: j });
        i = j + 1;
    }
    out
}

impl PatternExtractor {
    fn sentence(&self, sentence: &str, ex: &mut Extraction, index: &mut BTreeMap<String, usize>) {
        let ws = words(sentence);
        let caps = phrases(sentence, &ws);
        let mut add = |ex: &mut Extraction, text: &str| -> usize {
            *index.entry(text.to_string()).or_insert_with(|| {
                ex.mentions.push(Mention { text: text.to_string(), attributes: BTreeMap::new() });
                ex.mentions.len() - 1
            })
        };
        for p in &caps {
            add(ex, &p.text);
        }
        let mut is_a_pairs = BTreeSet::new();
        for p in &caps {
            let after = |k: usize| ws.get(p.last + k).map(|w| w.text.to_lowercase());
            // X is a|an Y
            if after(1).as_deref() == Some("is") && matches!(after(2).as_deref(), Some("a" | "an")) {
                let start = p.last + 3;
                let mut k = start;
                while k < ws.len() && !NOUN_PHRASE_STOPS.contains(&ws[k].text.to_lowercase().as_str()) && k - start < 4 {
                    if k > start && !sentence[ws[k - 1].end..ws[k].start].trim().is_empty() {
                        break;
                    }
                    k += 1;
                }
                if k > start {
                    let tail = &sentence[ws[start].start..ws[k - 1].end];
                    if fold(tail) != fold(&p.text) {
                        add(ex, tail);
                        ex.relations.push(RelationMention {
                            head: p.text.clone(),
                            kind: RelationKind::IsA,
                            tail: tail.to_string(),
                        });
                        is_a_pairs.insert((p.text.clone(), tail.to_string()));
                    }
                }
            }
            // X's key is value
            let possessive = sentence[ws[p.last].end..].starts_with("'s") || sentence[ws[p.last].end..].starts_with("\u{2019}s");
            if possessive {
                let key_start = p.last + 2;
                if let Some(is_at) = (key_start..ws.len().min(key_start + 4)).find(|&k| ws[k].text == "is") {
                    if is_at > key_start && is_at + 1 < ws.len() {
                        let key = sentence[ws[key_start].start..ws[is_at - 1].end].to_lowercase();
                        let rest = &sentence[ws[is_at + 1].start..];
                        let value = rest.split([',', ';', '.', '!', '?']).next().unwrap_or("").trim();
                        if !value.is_empty() {
                            let m = add(ex, &p.text);
                            ex.mentions[m].attributes.entry(key).or_insert_with(|| value.to_string());
                        }
                    }
                }
            }
        }
        for (a, pa) in caps.iter().enumerate() {
            for pb in &caps[a + 1..] {
                let linked = |x: &str, y: &str| is_a_pairs.contains(&(x.to_string(), y.to_string()));
                if pa.text == pb.text || linked(&pa.text, &pb.text) || linked(&pb.text, &pa.text) {
                    continue;
                }
                ex.relations.push(RelationMention {
                    head: pa.text.clone(),
                    kind: RelationKind::RelatesTo,
                    tail: pb.text.clone(),
                });
            }
        }
    }
}

impl Extractor for PatternExtractor {
    fn id(&self) -> String {
        "pattern-v1".into()
    }

    fn extract(&self, chunk: &DocumentChunk) -> Result<Extraction, ExtractError> {
        let mut ex = Extraction::default();
        let mut index = BTreeMap::new();
        for s in sentences(&chunk.text) {
            self.sentence(s, &mut ex, &mut index);
        }
        let mut seen = BTreeSet::new();
        ex.relations.retain(|r| seen.insert((r.head.clone(), r.kind, r.tail.clone())));
        Ok(ex)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizationRules {
    /// Whole-token replacements applied after case folding.
    pub abbreviations: BTreeMap<String, String>,
    /// Trailing tokens removed while at least one other token remains.
    pub legal_suffixes: Vec<String>,
}

impl Default for NormalizationRules {
    fn default() -> Self {
        let abbreviations = [("&", "and"), ("intl", "international"), ("dept", "department"), ("mfg", "manufacturing"), ("svc", "services")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        Self { abbreviations, legal_suffixes: LEGAL_WORDS.iter().map(|s| s.to_string()).collect() }
    }
}

/// Full-width ASCII variants and the ideographic space map to ASCII.
fn fold_width(c: char) -> char {
    match c {
        '\u{3000}' => ' ',
        '\u{FF01}'..='\u{FF5E}' => char::from_u32(c as u32 - 0xFEE0).unwrap_or(c),
        _ => c,
    }
}

fn normalize_once(m: &str, rules: &NormalizationRules) -> String {
    let cleaned: String = m
        .chars()
        .map(fold_width)
        .flat_map(char::to_lowercase)
        .map(|c| if c.is_alphanumeric() || c == '&' || c == '-' { c } else { ' ' })
        .collect();
    let mut toks: Vec<String> = cleaned
        .split_whitespace()
        .flat_map(|t| rules.abbreviations.get(t).cloned().unwrap_or_else(|| t.to_string()).split_whitespace().map(str::to_string).collect::<Vec<_>>())
        .collect();
    while toks.len() > 1 && rules.legal_suffixes.iter().any(|s| *s == toks[toks.len() - 1]) {
        toks.pop();
    }
    toks.join(" ")
}

/// Width folding, case folding, punctuation removal, abbreviation
/// expansion and legal-suffix stripping, repeated to a fixed point so the
/// result is idempotent.
pub fn normalize_mention(m: &str, rules: &NormalizationRules) -> String {
    let mut cur = normalize_once(m, rules);
    for _ in 0..16 {
        let next = normalize_once(&cur, rules);
        if next == cur {
            return cur;
        }
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentMode {
    /// The shorter string must occur in the longer; ratio is
    /// `len(shorter) / len(longer)`.
    #[default]
    LongerLength,
    /// Longest common substring over the shorter string's length.
    ShorterCoverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchThresholds {
    pub edit: f64,
    pub containment: f64,
    pub semantic: f64,
    pub containment_mode: ContainmentMode,
}

impl Default for MatchThresholds {
    fn default() -> Self {
        Self { edit: 0.85, containment: 0.6, semantic: 0.85, containment_mode: ContainmentMode::LongerLength }
    }
}

fn longest_common_substring(a: &[char], b: &[char]) -> usize {
    let mut best = 0;
    let mut prev = vec![0; b.len() + 1];
    for ca in a {
        let mut cur = vec![0; b.len() + 1];
        for (j, cb) in b.iter().enumerate() {
            if ca == cb {
                cur[j + 1] = prev[j] + 1;
                best = best.max(cur[j + 1]);
            }
        }
        prev = cur;
    }
    best
}

/// Containment ratio of the case- and space-folded strings, or `None` when
/// the mode's containment condition fails.
pub fn containment_ratio(a: &str, b: &str, mode: ContainmentMode) -> Option<f64> {
    let (fa, fb) = (fold(a), fold(b));
    let (ca, cb): (Vec<char>, Vec<char>) = (fa.chars().collect(), fb.chars().collect());
    let (short, long, s_str, l_str) = if ca.len() <= cb.len() { (&ca, &cb, &fa, &fb) } else { (&cb, &ca, &fb, &fa) };
    if short.is_empty() {
        return None;
    }
    match mode {
        ContainmentMode::LongerLength => l_str.contains(s_str.as_str()).then(|| short.len() as f64 / long.len() as f64),
        ContainmentMode::ShorterCoverage => Some(longest_common_substring(short, long) as f64 / short.len() as f64),
    }
}

/// Edit similarity of the folded strings.
pub fn surface_edit_similarity(a: &str, b: &str) -> f64 {
    edit_similarity(&fold(a), &fold(b))
}

pub fn surface_match(a: &str, b: &str, t: &MatchThresholds) -> bool {
    surface_score(a, b, t).is_some()
}

/// The score that cleared a surface threshold, if any.
fn surface_score(a: &str, b: &str, t: &MatchThresholds) -> Option<f64> {
    let edit = surface_edit_similarity(a, b);
    if edit >= t.edit - THRESHOLD_EPS {
        return Some(edit);
    }
    containment_ratio(a, b, t.containment_mode).filter(|r| *r >= t.containment - THRESHOLD_EPS)
}

/// Cosine of the two embeddings against `threshold`. A zero vector never
/// matches.
pub fn semantic_match(a: &str, b: &str, encoder: &dyn TextEncoder, threshold: f64) -> bool {
    let (va, vb) = (encoder.encode(a), encoder.encode(b));
    semantic_score(a, &va, b, &vb).is_some_and(|s| s >= threshold - THRESHOLD_EPS)
}

fn semantic_score(a: &str, va: &[f64], b: &str, vb: &[f64]) -> Option<f64> {
    for (t, v) in [(a, va), (b, vb)] {
        if v.iter().all(|x| *x == 0.0) {
            log::warn!("event=zero_embedding mention=\"{t}\"");
            return None;
        }
    }
    Some(cosine(va, vb))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeRule {
    Surface,
    NormalizedSurface,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    pub rule: MergeRule,
    pub a: String,
    pub b: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalEntity {
    pub canonical_name: String,
    /// Sorted distinct surface forms.
    pub aliases: Vec<String>,
    pub attributes: Attributes,
    /// Unions in the order they happened.
    pub merge_trace: Vec<MergeStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionRecord {
    pub text: String,
    pub attributes: BTreeMap<String, String>,
    pub provenance: String,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    /// True when the two sets were distinct.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisambiguationConfig {
    pub thresholds: MatchThresholds,
    pub rules: NormalizationRules,
    /// Run the embedding layer.
    pub semantic: bool,
}

impl Default for DisambiguationConfig {
    fn default() -> Self {
        Self { thresholds: MatchThresholds::default(), rules: NormalizationRules::default(), semantic: true }
    }
}

/// Groups mentions with three union-find passes: raw surface match, surface
/// match of normalized forms, and embedding similarity of normalized forms.
/// Unions are transitive across passes.
pub fn disambiguate(
    mentions: &[MentionRecord],
    cfg: &DisambiguationConfig,
    encoder: &dyn TextEncoder,
) -> Vec<CanonicalEntity> {
    let texts: Vec<&str> = mentions.iter().map(|m| m.text.as_str()).collect::<BTreeSet<_>>().into_iter().collect();
    let n = texts.len();
    let mut uf = UnionFind::new(n);
    let mut trace: Vec<(usize, MergeStep)> = Vec::new();
    let t = &cfg.thresholds;

    let mut pass = |uf: &mut UnionFind, rule: MergeRule, score: &dyn Fn(usize, usize) -> Option<f64>| {
        for i in 0..n {
            for j in i + 1..n {
                if uf.find(i) == uf.find(j) {
                    continue;
                }
                if let Some(s) = score(i, j) {
                    uf.union(i, j);
                    trace.push((i, MergeStep { rule, a: texts[i].to_string(), b: texts[j].to_string(), score: s }));
                }
            }
        }
    };

    pass(&mut uf, MergeRule::Surface, &|i, j| surface_score(texts[i], texts[j], t));
    let normalized: Vec<String> = texts.iter().map(|m| normalize_mention(m, &cfg.rules)).collect();
    pass(&mut uf, MergeRule::NormalizedSurface, &|i, j| surface_score(&normalized[i], &normalized[j], t));
    if cfg.semantic {
        let vectors: Vec<Vec<f64>> = normalized.par_iter().map(|m| encoder.encode(m)).collect();
        pass(&mut uf, MergeRule::Semantic, &|i, j| {
            semantic_score(&normalized[i], &vectors[i], &normalized[j], &vectors[j])
                .filter(|s| *s >= t.semantic - THRESHOLD_EPS)
        });
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for m in mentions {
        *counts.entry(m.text.as_str()).or_insert(0) += 1;
    }
    let mut out: Vec<CanonicalEntity> = groups
        .into_iter()
        .map(|(root, members)| {
            let aliases: Vec<String> = members.iter().map(|&i| texts[i].to_string()).collect();
            // most frequent alias, then longest, then lexicographically first
            let canonical_name = aliases
                .iter()
                .max_by(|a, b| {
                    counts[a.as_str()]
                        .cmp(&counts[b.as_str()])
                        .then(a.chars().count().cmp(&b.chars().count()))
                        .then(b.cmp(a))
                })
                .cloned()
                .expect("groups are non-empty");
            let mut attributes: Attributes = BTreeMap::new();
            for m in mentions.iter().filter(|m| aliases.binary_search(&m.text).is_ok()) {
                for (k, v) in &m.attributes {
                    attributes.entry(k.clone()).or_default().entry(v.clone()).or_default().insert(m.provenance.clone());
                }
            }
            let merge_trace = trace
                .iter()
                .filter(|(i, _)| uf.find(*i) == root)
                .map(|(_, s)| s.clone())
                .collect();
            CanonicalEntity { canonical_name, aliases, attributes, merge_trace }
        })
        .collect();
    out.sort_by(|a, b| a.canonical_name.cmp(&b.canonical_name));
    out
}

#[derive(Debug, Error)]
pub enum TextGraphError {
    #[error("triple {head} -[{relation:?}]-> {tail} at {provenance} references unknown mention \"{mention}\"")]
    UnknownMention { head: String, relation: RelationKind, tail: String, provenance: String, mention: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Chunk(#[from] ChunkError),
}

pub fn entity_id(canonical: &str) -> String {
    format!("u:entity:{canonical}")
}

pub fn document_id(doc: &str) -> String {
    format!("u:doc:{doc}")
}

/// Entity and document nodes with deduplicated `MENTIONS`, `RELATES_TO` and
/// `IS_A` edges. Every mention a triple uses must belong to an entity.
pub fn build_text_graph(
    triples: &[ExtractedTriple],
    entities: &[CanonicalEntity],
) -> Result<OntologyGraph, TextGraphError> {
    let mut alias_of: BTreeMap<&str, &CanonicalEntity> = BTreeMap::new();
    for e in entities {
        for a in &e.aliases {
            alias_of.insert(a.as_str(), e);
        }
    }
    let resolve = |t: &ExtractedTriple, m: &str| -> Result<String, TextGraphError> {
        alias_of.get(m).map(|e| entity_id(&e.canonical_name)).ok_or_else(|| TextGraphError::UnknownMention {
            head: t.head.clone(),
            relation: t.relation,
            tail: t.tail.clone(),
            provenance: t.provenance.to_string(),
            mention: m.to_string(),
        })
    };

    let mut g = OntologyGraph::new();
    let mut used: BTreeSet<&str> = BTreeSet::new();
    for t in triples {
        if t.relation != RelationKind::Mentions {
            resolve(t, &t.head)?;
        }
        resolve(t, &t.tail)?;
    }
    for t in triples {
        used.insert(alias_of[t.tail.as_str()].canonical_name.as_str());
        if t.relation != RelationKind::Mentions {
            used.insert(alias_of[t.head.as_str()].canonical_name.as_str());
        }
    }
    for e in entities.iter().filter(|e| used.contains(e.canonical_name.as_str())) {
        let mut node = OntoNode::new(
            entity_id(&e.canonical_name),
            NodeKind::Entity,
            &e.canonical_name,
            format!("entity {} (aliases: {})", e.canonical_name, e.aliases.join("; ")),
        );
        node.attributes = e.attributes.clone();
        g.add_node(node)?;
    }
    let docs: BTreeSet<&str> =
        triples.iter().filter(|t| t.relation == RelationKind::Mentions).map(|t| t.head.as_str()).collect();
    for d in docs {
        g.add_node(OntoNode::new(document_id(d), NodeKind::Document, d, format!("document {d}")))?;
    }
    for t in triples {
        let src = if t.relation == RelationKind::Mentions { document_id(&t.head) } else { resolve(t, &t.head)? };
        let dst = resolve(t, &t.tail)?;
        if src == dst {
            log::warn!("event=self_relation_dropped entity=\"{dst}\" relation={:?} at={}", t.relation, t.provenance);
            continue;
        }
        g.add_edge(OntoEdge::new(src, dst, t.relation.edge_kind(), t.provenance.to_string()))?;
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TextConfig {
    pub chunk_size: usize,
    pub chunk_overlap: usize,
    pub disambiguation: DisambiguationConfig,
}

impl Default for TextConfig {
    fn default() -> Self {
        Self {
            chunk_size: DEFAULT_CHUNK_SIZE,
            chunk_overlap: DEFAULT_CHUNK_OVERLAP,
            disambiguation: DisambiguationConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TextBuild {
    pub graph: OntologyGraph,
    pub chunks: usize,
    pub triples: Vec<ExtractedTriple>,
    pub entities: Vec<CanonicalEntity>,
}

/// Chunk, extract (in parallel, results kept in chunk order), disambiguate
/// and build the text graph.
pub fn build_unstructured(
    docs: &[Document],
    cfg: &TextConfig,
    extractor: &dyn Extractor,
    encoder: &dyn TextEncoder,
) -> Result<TextBuild, TextGraphError> {
    let mut chunks = Vec::new();
    for d in docs {
        chunks.extend(chunk_document(&d.id, &d.text, &WordTokenizer, cfg.chunk_size, cfg.chunk_overlap)?);
    }
    let triples: Vec<ExtractedTriple> =
        chunks.par_iter().map(|c| extract_triples(c, extractor)).collect::<Vec<_>>().into_iter().flatten().collect();
    let mentions: Vec<MentionRecord> = triples
        .iter()
        .flat_map(|t| {
            let prov = t.provenance.to_string();
            let tail = MentionRecord { text: t.tail.clone(), attributes: t.attributes.clone(), provenance: prov.clone() };
            let head = (t.relation != RelationKind::Mentions)
                .then(|| MentionRecord { text: t.head.clone(), attributes: BTreeMap::new(), provenance: prov });
            std::iter::once(tail).chain(head)
        })
        .collect();
    let entities = disambiguate(&mentions, &cfg.disambiguation, encoder);
    let graph = build_text_graph(&triples, &entities)?;
    Ok(TextBuild { graph, chunks: chunks.len(), triples, entities })
}

/// The default encoder used for the semantic pass.
pub fn default_encoder() -> NgramHashEncoder {
    NgramHashEncoder::default()
}
