//! Conditional knowledge graph.
//!
//! Concept nodes are keyed by a normalised surface. Fact edges carry the
//! `{concept: attribute}` qualifiers of both arguments, the conditions under
//! which the fact was stated, and pointers back to every source sentence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::Sentence;
use crate::jsonl;
use crate::schema::Statement;
use crate::statements::{MentionRecord, StatementRecord};

pub const NODES_FILE: &str = "nodes.jsonl";
pub const EDGES_FILE: &str = "edges.jsonl";
pub const SENTENCES_FILE: &str = "sentences.jsonl";

/// Trim, join whitespace runs with `_`, lowercase.
pub fn normalize_concept(surface: &str) -> Result<String> {
    let parts: Vec<&str> = surface.split_whitespace().collect();
    if parts.is_empty() {
        return Err(Error::InvalidParameter("empty concept surface".into()));
    }
    Ok(parts.join("_").to_lowercase())
}

fn has_vowel(s: &str) -> bool {
    s.chars().any(|c| "aeiouy".contains(c))
}

fn needs_final_e(stem: &str) -> bool {
    const ENDINGS: &[&str] = &[
        "c", "v", "z", "u", "bl", "pl", "dl", "tl", "gl", "iz", "ur", "ir", "ot", "rg", "dg",
    ];
    if ENDINGS.iter().any(|e| stem.ends_with(e)) {
        return true;
    }
    let chars: Vec<char> = stem.chars().collect();
    match chars.as_slice() {
        [.., a, 'a', 't'] => !matches!(a, 'e' | 'o'),
        [.., v, 's'] => "aeiou".contains(*v),
        _ => false,
    }
}

/// Restores the base form after stripping `-ed`/`-ing`.
fn restore_stem(word: &str, stem: &str) -> String {
    if stem.chars().count() < 2 || !has_vowel(stem) {
        return word.to_string();
    }
    let chars: Vec<char> = stem.chars().collect();
    let n = chars.len();
    if n >= 3 && chars[n - 1] == chars[n - 2] && !"aeiouylsz".contains(chars[n - 1]) {
        return chars[..n - 1].iter().collect();
    }
    if needs_final_e(stem) {
        return format!("{stem}e");
    }
    stem.to_string()
}

fn lemmatize_word(word: &str) -> String {
    let n = word.chars().count();
    let cut = |k: usize| -> &str {
        let idx = word.char_indices().nth(n - k).map_or(word.len(), |(i, _)| i);
        &word[..idx]
    };
    if word.ends_with("ies") && n > 4 {
        return format!("{}y", cut(3));
    }
    if word.ends_with("es") && n > 4 {
        let stem = cut(2);
        if ["ss", "x", "z", "ch", "sh"].iter().any(|e| stem.ends_with(e)) {
            return stem.to_string();
        }
    }
    if word.ends_with('s') && n > 3 && !["ss", "us", "is"].iter().any(|e| word.ends_with(e)) {
        return cut(1).to_string();
    }
    if word.ends_with("ed") && n > 4 {
        return restore_stem(word, cut(2));
    }
    if word.ends_with("ing") && n > 5 {
        return restore_stem(word, cut(3));
    }
    word.to_string()
}

/// Rule-based lemma of a (possibly multi-word) predicate surface, so that
/// "increases" and "increased" share one edge. Never returns an empty string
/// for non-empty input.
pub fn lemmatize_predicate(surface: &str) -> String {
    let lower = surface.to_lowercase();
    let words: Vec<String> = lower.split_whitespace().map(lemmatize_word).collect();
    if words.is_empty() {
        return lower.trim().to_string();
    }
    words.join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptNode {
    pub key: String,
    pub display: String,
    pub surfaces: BTreeMap<String, u64>,
    pub freq: u64,
}

impl ConceptNode {
    fn add_surface(&mut self, surface: &str, count: u64) {
        *self.surfaces.entry(surface.to_string()).or_default() += count;
        self.freq += count;
        self.display = most_frequent(&self.surfaces);
    }
}

/// Highest count wins; ties go to the lexicographically smallest surface.
fn most_frequent(counts: &BTreeMap<String, u64>) -> String {
    counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(s, _)| s.clone())
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub subj_key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subj_attr: Option<String>,
    pub pred: String,
    pub obj_key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obj_attr: Option<String>,
    pub count: u64,
}

impl ConditionRecord {
    fn identity(&self) -> (&str, Option<&str>, &str, &str, Option<&str>) {
        (
            &self.subj_key,
            self.subj_attr.as_deref(),
            &self.pred,
            &self.obj_key,
            self.obj_attr.as_deref(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub doc_id: String,
    pub sent_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactEdge {
    pub id: String,
    pub subj_key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subj_attr: Option<String>,
    pub pred_lemma: String,
    pub pred_surfaces: BTreeMap<String, u64>,
    pub obj_key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obj_attr: Option<String>,
    pub support: u64,
    pub conditions: Vec<ConditionRecord>,
    pub provenance: Vec<Provenance>,
    pub max_confidence: f64,
}

/// Stable identifier of a fact identity tuple.
pub fn edge_id(
    subj_key: &str,
    subj_attr: Option<&str>,
    pred_lemma: &str,
    obj_key: &str,
    obj_attr: Option<&str>,
) -> String {
    let mut h = Sha256::new();
    for part in [
        subj_key,
        subj_attr.unwrap_or(""),
        pred_lemma,
        obj_key,
        obj_attr.unwrap_or(""),
    ] {
        h.update(part.as_bytes());
        h.update([0x1f]);
    }
    hex::encode(&h.finalize()[..8])
}

impl FactEdge {
    fn merge_condition(&mut self, cond: ConditionRecord) {
        match self.conditions.binary_search_by(|c| c.identity().cmp(&cond.identity())) {
            Ok(i) => self.conditions[i].count += cond.count,
            Err(i) => self.conditions.insert(i, cond),
        }
    }

    fn merge_provenance(&mut self, p: Provenance) {
        let i = self.provenance.partition_point(|x| x <= &p);
        self.provenance.insert(i, p);
        self.support = self.provenance.len() as u64;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// edges whose object is the center
    In,
    /// edges whose subject is the center
    Out,
    Both,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in" => Ok(Direction::In),
            "out" => Ok(Direction::Out),
            "both" | "" => Ok(Direction::Both),
            other => Err(Error::InvalidParameter(format!(
                "direction must be in, out or both (got {other:?})"
            ))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::In => "in",
            Direction::Out => "out",
            Direction::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterNode {
    pub key: String,
    pub display: String,
    pub freq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRef {
    pub doc_id: String,
    pub sent_index: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoEdge {
    #[serde(flatten)]
    pub edge: FactEdge,
    pub sentences: Vec<SentenceRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoGraph {
    pub center: Option<CenterNode>,
    pub edges: Vec<EgoEdge>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeGraph {
    pub nodes: BTreeMap<String, ConceptNode>,
    pub edges: BTreeMap<String, FactEdge>,
    pub sentences: BTreeMap<(String, usize), String>,
}

#[derive(Serialize, Deserialize)]
struct SentenceLine {
    doc_id: String,
    sent_index: usize,
    text: String,
}

struct Argument {
    key: String,
    attr: Option<String>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn upsert_node(&mut self, surface: &str, count: u64) -> Result<String> {
        let key = normalize_concept(surface)?;
        let surface = surface.split_whitespace().collect::<Vec<_>>().join(" ");
        self.nodes
            .entry(key.clone())
            .or_insert_with(|| ConceptNode {
                key: key.clone(),
                display: String::new(),
                surfaces: BTreeMap::new(),
                freq: 0,
            })
            .add_surface(&surface, count);
        Ok(key)
    }

    fn argument(&mut self, m: &MentionRecord) -> Result<Argument> {
        let key = self.upsert_node(&m.concept, 1)?;
        let attr = match &m.attribute {
            Some(a) => Some(normalize_concept(a)?),
            None => None,
        };
        Ok(Argument { key, attr })
    }

    pub fn add_statement(&mut self, statement: &Statement, sentence: &Sentence) -> Result<()> {
        self.add_record(&StatementRecord::new(statement, sentence))
    }

    /// Folds one statement record into the graph: nodes for every concept, one
    /// identity-keyed edge per fact, conditions merged by identity.
    pub fn add_record(&mut self, record: &StatementRecord) -> Result<()> {
        self.sentences
            .insert((record.doc_id.clone(), record.sent_index), record.text.clone());
        let provenance = Provenance {
            doc_id: record.doc_id.clone(),
            sent_index: record.sent_index,
        };
        // a condition nested under several facts is one mention of its concepts
        let mut seen_conditions = BTreeSet::new();
        for fact in &record.facts {
            let subj = self.argument(&fact.subject)?;
            let obj = self.argument(&fact.object)?;
            let pred_lemma = lemmatize_predicate(&fact.predicate);
            let mut conditions = Vec::with_capacity(fact.conditions.len());
            for c in &fact.conditions {
                let first = seen_conditions.insert(c.clone());
                let count = u64::from(first);
                let subj_key = self.upsert_node(&c.subject.concept, count)?;
                let obj_key = self.upsert_node(&c.object.concept, count)?;
                conditions.push(ConditionRecord {
                    subj_key,
                    subj_attr: c.subject.attribute.as_deref().map(normalize_concept).transpose()?,
                    pred: lemmatize_predicate(&c.predicate),
                    obj_key,
                    obj_attr: c.object.attribute.as_deref().map(normalize_concept).transpose()?,
                    count: 1,
                });
            }
            let id = edge_id(
                &subj.key,
                subj.attr.as_deref(),
                &pred_lemma,
                &obj.key,
                obj.attr.as_deref(),
            );
            let edge = self.edges.entry(id.clone()).or_insert_with(|| FactEdge {
                id,
                subj_key: subj.key,
                subj_attr: subj.attr,
                pred_lemma,
                pred_surfaces: BTreeMap::new(),
                obj_key: obj.key,
                obj_attr: obj.attr,
                support: 0,
                conditions: Vec::new(),
                provenance: Vec::new(),
                max_confidence: f64::NEG_INFINITY,
            });
            *edge.pred_surfaces.entry(fact.predicate.clone()).or_default() += 1;
            edge.max_confidence = edge.max_confidence.max(fact.confidence);
            edge.merge_provenance(provenance.clone());
            for c in conditions {
                edge.merge_condition(c);
            }
        }
        Ok(())
    }

    /// Associative, commutative union of two partial graphs.
    pub fn merge(&mut self, other: &KnowledgeGraph) {
        for (key, node) in &other.nodes {
            let mine = self.nodes.entry(key.clone()).or_insert_with(|| ConceptNode {
                key: key.clone(),
                display: String::new(),
                surfaces: BTreeMap::new(),
                freq: 0,
            });
            for (surface, count) in &node.surfaces {
                mine.add_surface(surface, *count);
            }
        }
        for (id, edge) in &other.edges {
            match self.edges.get_mut(id) {
                None => {
                    self.edges.insert(id.clone(), edge.clone());
                }
                Some(mine) => {
                    for (s, c) in &edge.pred_surfaces {
                        *mine.pred_surfaces.entry(s.clone()).or_default() += c;
                    }
                    for p in &edge.provenance {
                        mine.merge_provenance(p.clone());
                    }
                    for c in &edge.conditions {
                        mine.merge_condition(c.clone());
                    }
                    mine.max_confidence = mine.max_confidence.max(edge.max_confidence);
                }
            }
        }
        for (k, v) in &other.sentences {
            self.sentences.insert(k.clone(), v.clone());
        }
    }

    /// Checks referential integrity and the support/provenance invariant.
    pub fn validate(&self) -> Result<()> {
        for (key, node) in &self.nodes {
            if key != &node.key || node.freq != node.surfaces.values().sum::<u64>() {
                return Err(Error::Integrity(format!("node {key:?} is inconsistent")));
            }
        }
        for (id, e) in &self.edges {
            let expected = edge_id(
                &e.subj_key,
                e.subj_attr.as_deref(),
                &e.pred_lemma,
                &e.obj_key,
                e.obj_attr.as_deref(),
            );
            if id != &e.id || e.id != expected {
                return Err(Error::Integrity(format!("edge {id:?} does not match its identity")));
            }
            let endpoints = [&e.subj_key, &e.obj_key]
                .into_iter()
                .chain(e.conditions.iter().flat_map(|c| [&c.subj_key, &c.obj_key]));
            for key in endpoints {
                if !self.nodes.contains_key(key) {
                    return Err(Error::Integrity(format!(
                        "edge {id} references unknown concept {key:?}"
                    )));
                }
            }
            if e.support != e.provenance.len() as u64 {
                return Err(Error::Integrity(format!(
                    "edge {id} has support {} but {} provenance entries",
                    e.support,
                    e.provenance.len()
                )));
            }
            for p in &e.provenance {
                if !self.sentences.contains_key(&(p.doc_id.clone(), p.sent_index)) {
                    return Err(Error::Integrity(format!(
                        "edge {id} cites unknown sentence {}#{}",
                        p.doc_id, p.sent_index
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn sentence(&self, doc_id: &str, sent_index: usize) -> Option<&str> {
        self.sentences
            .get(&(doc_id.to_string(), sent_index))
            .map(String::as_str)
    }

    /// Edges incident to `concept`, filtered by predicate lemma and direction,
    /// ordered by support (descending) then id.
    pub fn query_ego(
        &self,
        concept: &str,
        predicates: &BTreeSet<String>,
        direction: Direction,
        limit: usize,
    ) -> EgoGraph {
        let Some(node) = normalize_concept(concept).ok().and_then(|k| self.nodes.get(&k)) else {
            return EgoGraph {
                center: None,
                edges: Vec::new(),
            };
        };
        let wanted: BTreeSet<String> = predicates.iter().map(|p| lemmatize_predicate(p)).collect();
        let mut hits: Vec<&FactEdge> = self
            .edges
            .values()
            .filter(|e| {
                let incident = match direction {
                    Direction::In => e.obj_key == node.key,
                    Direction::Out => e.subj_key == node.key,
                    Direction::Both => e.obj_key == node.key || e.subj_key == node.key,
                };
                incident && (wanted.is_empty() || wanted.contains(&e.pred_lemma))
            })
            .collect();
        hits.sort_by(|a, b| b.support.cmp(&a.support).then_with(|| a.id.cmp(&b.id)));
        hits.truncate(limit);
        EgoGraph {
            center: Some(CenterNode {
                key: node.key.clone(),
                display: node.display.clone(),
                freq: node.freq,
            }),
            edges: hits
                .into_iter()
                .map(|e| EgoEdge {
                    edge: e.clone(),
                    sentences: e
                        .provenance
                        .iter()
                        .map(|p| SentenceRef {
                            doc_id: p.doc_id.clone(),
                            sent_index: p.sent_index,
                            text: self.sentence(&p.doc_id, p.sent_index).unwrap_or_default().to_string(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Concepts whose key starts with the normalised prefix, most frequent first.
    pub fn concepts(&self, prefix: &str, limit: usize) -> Vec<CenterNode> {
        let prefix = normalize_concept(prefix).unwrap_or_default();
        let mut out: Vec<&ConceptNode> = self
            .nodes
            .range(prefix.clone()..)
            .take_while(|(k, _)| k.starts_with(&prefix))
            .map(|(_, n)| n)
            .collect();
        out.sort_by(|a, b| b.freq.cmp(&a.freq).then_with(|| a.key.cmp(&b.key)));
        out.into_iter()
            .take(limit)
            .map(|n| CenterNode {
                key: n.key.clone(),
                display: n.display.clone(),
                freq: n.freq,
            })
            .collect()
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        jsonl::write(&dir.join(NODES_FILE), self.nodes.values())?;
        jsonl::write(&dir.join(EDGES_FILE), self.edges.values())?;
        let sentences: Vec<SentenceLine> = self
            .sentences
            .iter()
            .map(|((doc_id, sent_index), text)| SentenceLine {
                doc_id: doc_id.clone(),
                sent_index: *sent_index,
                text: text.clone(),
            })
            .collect();
        jsonl::write(&dir.join(SENTENCES_FILE), &sentences)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let mut kg = KnowledgeGraph::new();
        let path = dir.join(NODES_FILE);
        for (i, node) in jsonl::read::<ConceptNode>(&path)?.into_iter().enumerate() {
            if let Some(prev) = kg.nodes.insert(node.key.clone(), node) {
                return Err(Error::parse(&path, i + 1, format!("duplicate node {:?}", prev.key)));
            }
        }
        let path = dir.join(EDGES_FILE);
        for (i, edge) in jsonl::read::<FactEdge>(&path)?.into_iter().enumerate() {
            if let Some(prev) = kg.edges.insert(edge.id.clone(), edge) {
                return Err(Error::parse(&path, i + 1, format!("duplicate edge {:?}", prev.id)));
            }
        }
        let path = dir.join(SENTENCES_FILE);
        for (i, s) in jsonl::read::<SentenceLine>(&path)?.into_iter().enumerate() {
            if kg.sentences.insert((s.doc_id.clone(), s.sent_index), s.text).is_some() {
                return Err(Error::parse(
                    &path,
                    i + 1,
                    format!("duplicate sentence {}#{}", s.doc_id, s.sent_index),
                ));
            }
        }
        kg.validate()?;
        Ok(kg)
    }

    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a StatementRecord>) -> Result<Self> {
        let mut kg = KnowledgeGraph::new();
        for r in records {
            kg.add_record(r)?;
        }
        Ok(kg)
    }
}
