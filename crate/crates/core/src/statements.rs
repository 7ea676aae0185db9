//! Statement records: the JSONL interchange between extraction and graph
//! building. Arguments are carried as surface strings, conditions nested
//! under the facts they qualify.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ingest::Sentence;
use crate::jsonl;
use crate::schema::{EntityMention, Statement};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MentionRecord {
    pub concept: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute: Option<String>,
}

impl From<&EntityMention> for MentionRecord {
    fn from(m: &EntityMention) -> Self {
        MentionRecord {
            concept: m.concept.text.clone(),
            attribute: m.attribute.as_ref().map(|a| a.text.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConditionRecordOut {
    pub subject: MentionRecord,
    pub predicate: String,
    pub object: MentionRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactRecord {
    pub subject: MentionRecord,
    pub predicate: String,
    pub object: MentionRecord,
    pub confidence: f64,
    #[serde(default)]
    pub conditions: Vec<ConditionRecordOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementRecord {
    pub doc_id: String,
    pub sent_index: usize,
    /// Source sentence text, stored as provenance in the graph.
    #[serde(default)]
    pub text: String,
    pub facts: Vec<FactRecord>,
}

impl StatementRecord {
    pub fn new(statement: &Statement, sentence: &Sentence) -> Self {
        let facts = statement
            .facts
            .iter()
            .enumerate()
            .map(|(fi, f)| FactRecord {
                subject: (&f.subject).into(),
                predicate: f.predicate.text.clone(),
                object: (&f.object).into(),
                confidence: f.confidence,
                conditions: statement
                    .conditions_of(fi)
                    .map(|c| ConditionRecordOut {
                        subject: (&c.subject).into(),
                        predicate: c.predicate.text.clone(),
                        object: (&c.object).into(),
                    })
                    .collect(),
            })
            .collect();
        StatementRecord {
            doc_id: statement.doc_id.clone(),
            sent_index: statement.sent_index,
            text: sentence.text.clone(),
            facts,
        }
    }
}

pub fn read_statements(path: &Path) -> Result<Vec<StatementRecord>> {
    jsonl::read(path)
}

pub fn write_statements(path: &Path, records: &[StatementRecord]) -> Result<()> {
    jsonl::write(path, records)
}
