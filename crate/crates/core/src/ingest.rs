//! Corpus ingestion: rule-based sentence splitting and a deterministic tokenizer.
//!
//! All offsets are counted in Unicode scalar values, never bytes.

use std::collections::HashSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jsonl;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    #[serde(rename = "start")]
    pub char_start: usize,
    #[serde(rename = "end")]
    pub char_end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub doc_id: String,
    pub sent_index: usize,
    pub text: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Builds a sentence by tokenizing `text`.
    pub fn new(doc_id: impl Into<String>, sent_index: usize, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Sentence {
            doc_id: doc_id.into(),
            sent_index,
            text,
            tokens,
        }
    }

    /// Builds a sentence from pre-split tokens joined by single spaces.
    pub fn from_tokens<S: AsRef<str>>(doc_id: impl Into<String>, sent_index: usize, words: &[S]) -> Self {
        let mut text = String::new();
        let mut tokens = Vec::with_capacity(words.len());
        let mut offset = 0;
        for (i, word) in words.iter().enumerate() {
            if i > 0 {
                text.push(' ');
                offset += 1;
            }
            let word = word.as_ref();
            let len = word.chars().count();
            text.push_str(word);
            tokens.push(Token {
                text: word.to_string(),
                char_start: offset,
                char_end: offset + len,
            });
            offset += len;
        }
        Sentence {
            doc_id: doc_id.into(),
            sent_index,
            text,
            tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Surface text covering tokens `[start, end)`, with the original spacing.
    pub fn surface(&self, start: usize, end: usize) -> String {
        debug_assert!(start < end && end <= self.tokens.len());
        char_slice(&self.text, self.tokens[start].char_start, self.tokens[end - 1].char_end)
    }
}

pub fn char_slice(text: &str, start: usize, end: usize) -> String {
    text.chars().skip(start).take(end.saturating_sub(start)).collect()
}

const GUARDED_ABBREVIATIONS: &[&str] = &["fig.", "figs.", "e.g.", "i.e.", "vs.", "cf."];
const CLOSERS: &[char] = &[')', ']', '"', '\'', '\u{201d}', '\u{2019}'];

fn is_guarded(chars: &[char], period: usize) -> bool {
    let mut word_start = period;
    while word_start > 0 && !chars[word_start - 1].is_whitespace() {
        word_start -= 1;
    }
    let word: String = chars[word_start..=period]
        .iter()
        .skip_while(|c| matches!(c, '(' | '[' | '"' | '\''))
        .collect();
    let lower = word.to_lowercase();
    if GUARDED_ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // single capital initial, e.g. "T. cells" or "J. Smith"
    let mut it = word.chars();
    if let (Some(c), Some('.'), None) = (it.next(), it.next(), it.next()) {
        if c.is_uppercase() {
            return true;
        }
    }
    if lower == "al." {
        let mut prev_end = word_start;
        while prev_end > 0 && chars[prev_end - 1].is_whitespace() {
            prev_end -= 1;
        }
        let mut prev_start = prev_end;
        while prev_start > 0 && !chars[prev_start - 1].is_whitespace() {
            prev_start -= 1;
        }
        let prev: String = chars[prev_start..prev_end].iter().collect();
        return prev.eq_ignore_ascii_case("et");
    }
    false
}

fn trimmed(chars: &[char]) -> String {
    let s: String = chars.iter().collect();
    s.trim().to_string()
}

/// Splits a document at `[.?!]` followed by whitespace and an uppercase letter or digit,
/// unless the period closes a guarded abbreviation.
pub fn split_sentences(doc: &Document) -> Vec<Sentence> {
    let chars: Vec<char> = doc.text.chars().collect();
    let n = chars.len();
    let mut texts = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if matches!(c, '.' | '?' | '!') {
            let mut end = i + 1;
            while end < n && CLOSERS.contains(&chars[end]) {
                end += 1;
            }
            if end < n && chars[end].is_whitespace() {
                let mut next = end;
                while next < n && chars[next].is_whitespace() {
                    next += 1;
                }
                let starts_sentence = next < n && (chars[next].is_uppercase() || chars[next].is_ascii_digit());
                if starts_sentence && !(c == '.' && is_guarded(&chars, i)) {
                    let text = trimmed(&chars[start..end]);
                    if !text.is_empty() {
                        texts.push(text);
                    }
                    start = next;
                    i = next;
                    continue;
                }
            }
        }
        i += 1;
    }
    let tail = trimmed(&chars[start.min(n)..]);
    if !tail.is_empty() {
        texts.push(tail);
    }
    texts
        .into_iter()
        .enumerate()
        .map(|(idx, text)| Sentence::new(doc.doc_id.clone(), idx, text))
        .collect()
}

/// Whitespace segmentation with leading and trailing punctuation split into
/// single-character tokens. Everything between the first and last
/// alphanumeric character of a chunk stays one token, so compounds such as
/// `TRPV5/V6` or `RNAi-mediated` survive intact.
pub fn tokenize(sentence_text: &str) -> Vec<Token> {
    let chars: Vec<char> = sentence_text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let chunk_start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        split_chunk(&chars, chunk_start, i, &mut tokens);
    }
    tokens
}

fn split_chunk(chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
    let single = |pos: usize| Token {
        text: chars[pos].to_string(),
        char_start: pos,
        char_end: pos + 1,
    };
    let first = (start..end).find(|&p| chars[p].is_alphanumeric());
    let Some(first) = first else {
        out.extend((start..end).map(single));
        return;
    };
    let last = (start..end).rev().find(|&p| chars[p].is_alphanumeric()).unwrap();
    out.extend((start..first).map(single));
    out.push(Token {
        text: chars[first..=last].iter().collect(),
        char_start: first,
        char_end: last + 1,
    });
    out.extend((last + 1..end).map(single));
}

/// Reads a JSONL corpus of documents, rejecting duplicate or blank entries.
pub fn read_documents(path: &Path) -> Result<Vec<Document>> {
    let docs: Vec<Document> = jsonl::read(path)?;
    let mut seen = HashSet::new();
    for doc in &docs {
        if doc.doc_id.is_empty() {
            return Err(Error::InvalidDocument {
                doc_id: doc.doc_id.clone(),
                reason: "empty doc_id".into(),
            });
        }
        if doc.text.trim().is_empty() {
            return Err(Error::InvalidDocument {
                doc_id: doc.doc_id.clone(),
                reason: "text is empty".into(),
            });
        }
        if !seen.insert(doc.doc_id.as_str()) {
            return Err(Error::DuplicateDocument(doc.doc_id.clone()));
        }
    }
    Ok(docs)
}

/// Splits all documents, keeping (document, sentence) order regardless of
/// how the work is scheduled.
pub fn split_corpus(docs: &[Document]) -> Vec<Sentence> {
    docs.par_iter()
        .map(split_sentences)
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn ingest(corpus_path: &Path, out_path: &Path) -> Result<usize> {
    let docs = read_documents(corpus_path)?;
    let sentences = split_corpus(&docs);
    jsonl::write(out_path, &sentences)?;
    Ok(sentences.len())
}

pub fn read_sentences(path: &Path) -> Result<Vec<Sentence>> {
    jsonl::read(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(doc: &str) -> Vec<String> {
        split_sentences(&Document {
            doc_id: "d".into(),
            text: doc.into(),
        })
        .into_iter()
        .map(|s| s.text)
        .collect()
    }

    fn words(s: &str) -> Vec<String> {
        tokenize(s).into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn splits_two_sentences() {
        assert_eq!(texts("A rises. B falls."), vec!["A rises.", "B falls."]);
    }

    #[test]
    fn abbreviation_guard() {
        assert_eq!(texts("See Fig. 2 for details."), vec!["See Fig. 2 for details."]);
        assert_eq!(
            texts("As shown by Smith et al. Cells died. Then e.g. Ca2+ rose."),
            vec!["As shown by Smith et al. Cells died.", "Then e.g. Ca2+ rose."]
        );
        assert_eq!(texts("Jurkat T. Cells grew."), vec!["Jurkat T. Cells grew."]);
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(
            texts("pH 7.4 was used. then it fell"),
            vec!["pH 7.4 was used. then it fell"]
        );
    }

    #[test]
    fn question_and_closing_paren() {
        assert_eq!(
            texts("Does it rise? Yes (it does.) 5 cells died!"),
            vec!["Does it rise?", "Yes (it does.)", "5 cells died!"]
        );
    }

    #[test]
    fn empty_text() {
        assert!(texts("").is_empty());
        assert!(texts("   \n ").is_empty());
    }

    #[test]
    fn sentence_indices_in_order() {
        let sents = split_sentences(&Document {
            doc_id: "x".into(),
            text: "One. Two. Three.".into(),
        });
        let idx: Vec<usize> = sents.iter().map(|s| s.sent_index).collect();
        assert_eq!(idx, vec![0, 1, 2]);
    }

    #[test]
    fn tokenizes_worked_example() {
        let toks = words("alkaline pH increases the activity of TRPV5/V6 channels in Jurkat T cells");
        assert_eq!(toks.len(), 12);
        assert_eq!(toks[6], "TRPV5/V6");
    }

    #[test]
    fn splits_trailing_punctuation() {
        assert_eq!(words("cells)."), vec!["cells", ")", "."]);
        assert_eq!(words("pH"), vec!["pH"]);
        assert_eq!(words("(OGD) RNAi-mediated"), vec!["(", "OGD", ")", "RNAi-mediated"]);
        assert_eq!(words("..."), vec![".", ".", "."]);
    }

    #[test]
    fn offsets_are_char_based() {
        let text = "β-catenin raised Ca²⁺ levels.";
        for tok in tokenize(text) {
            assert_eq!(char_slice(text, tok.char_start, tok.char_end), tok.text);
        }
        let toks = tokenize("β-catenin x");
        assert_eq!(toks[1].char_start, 10);
    }
}
