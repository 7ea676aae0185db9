//! Labeled data in tab-separated form:
//!
//! ```text
//! # doc_id=d1 sent_index=0
//! alkaline	B-SC	O
//! pH	I-SC	O
//! ...
//! ```
//!
//! An optional fourth column carries part-of-speech tags. Sentences are
//! separated by blank lines; their text is rebuilt by joining tokens with
//! single spaces.
#![allow(clippy::tabs_in_doc_comments)]

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::Sentence;
use crate::schema::{LabeledSentence, TagLabel};

pub fn read_labeled(path: &Path) -> Result<Vec<LabeledSentence>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labeled(&content, path)
}

#[derive(Default)]
struct Pending {
    header: Option<(String, usize)>,
    words: Vec<String>,
    fact: Vec<TagLabel>,
    cond: Vec<TagLabel>,
    pos: Vec<String>,
    columns: Option<usize>,
}

fn parse_header(line: &str) -> Option<(String, usize)> {
    let mut doc_id = None;
    let mut sent_index = None;
    for field in line.trim_start_matches('#').split_whitespace() {
        if let Some(v) = field.strip_prefix("doc_id=") {
            doc_id = Some(v.to_string());
        } else if let Some(v) = field.strip_prefix("sent_index=") {
            sent_index = v.parse().ok();
        }
    }
    Some((doc_id?, sent_index?))
}

/// `source` is only used to name the file in error messages.
pub fn parse_labeled(content: &str, source: &Path) -> Result<Vec<LabeledSentence>> {
    let mut out = Vec::new();
    let mut cur = Pending::default();
    let flush = |cur: &mut Pending, out: &mut Vec<LabeledSentence>| {
        let done = std::mem::take(cur);
        if done.words.is_empty() {
            return;
        }
        let (doc_id, sent_index) = done.header.unwrap_or_else(|| {
            let stem = source
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "tsv".into());
            (stem, out.len())
        });
        let pos = (done.columns == Some(4)).then_some(done.pos);
        out.push(LabeledSentence {
            sentence: Sentence::from_tokens(doc_id, sent_index, &done.words),
            fact_tags: done.fact,
            cond_tags: done.cond,
            pos,
        });
    };

    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut cur, &mut out);
            continue;
        }
        if line.starts_with('#') && !line.contains('\t') {
            if let Some(h) = parse_header(line) {
                if !cur.words.is_empty() {
                    flush(&mut cur, &mut out);
                }
                cur.header = Some(h);
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&cols.len()) {
            return Err(Error::parse(
                source,
                line_no,
                format!("expected 3 or 4 tab-separated columns, found {}", cols.len()),
            ));
        }
        match cur.columns {
            Some(n) if n != cols.len() => {
                return Err(Error::parse(
                    source,
                    line_no,
                    "inconsistent column count within a sentence",
                ))
            }
            _ => cur.columns = Some(cols.len()),
        }
        if cols[0].is_empty() || cols[0].chars().any(char::is_whitespace) {
            return Err(Error::parse(
                source,
                line_no,
                "token must be non-empty without whitespace",
            ));
        }
        let tag = |s: &str| s.parse::<TagLabel>().map_err(|e| Error::parse(source, line_no, e));
        cur.words.push(cols[0].to_string());
        cur.fact.push(tag(cols[1])?);
        cur.cond.push(tag(cols[2])?);
        if let Some(p) = cols.get(3) {
            cur.pos.push(p.to_string());
        }
    }
    flush(&mut cur, &mut out);
    Ok(out)
}

pub fn format_labeled(sentences: &[LabeledSentence]) -> String {
    let mut out = String::new();
    for (i, ls) in sentences.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let s = &ls.sentence;
        writeln!(out, "# doc_id={} sent_index={}", s.doc_id, s.sent_index).unwrap();
        for (t, tok) in s.tokens.iter().enumerate() {
            write!(out, "{}\t{}\t{}", tok.text, ls.fact_tags[t], ls.cond_tags[t]).unwrap();
            if let Some(pos) = &ls.pos {
                write!(out, "\t{}", pos[t]).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

pub fn write_labeled(path: &Path, sentences: &[LabeledSentence]) -> Result<()> {
    fs::write(path, format_labeled(sentences)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# doc_id=d1 sent_index=3\n\
        alkaline\tB-SC\tO\n\
        pH\tI-SC\tO\n\
        increases\tB-P\tO\n\
        \n\
        cells\tO\tB-OC\tNNS\n\
        die\tB-P\tO\tVBP\n";

    #[test]
    fn parses_headers_and_pos() {
        let got = parse_labeled(SAMPLE, Path::new("train.tsv")).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].sentence.doc_id, "d1");
        assert_eq!(got[0].sentence.sent_index, 3);
        assert_eq!(got[0].sentence.text, "alkaline pH increases");
        assert!(got[0].pos.is_none());
        assert_eq!(got[1].sentence.doc_id, "train");
        assert_eq!(got[1].sentence.sent_index, 1);
        assert_eq!(got[1].pos.as_deref(), Some(&["NNS".to_string(), "VBP".to_string()][..]));
    }

    #[test]
    fn format_then_parse_is_stable() {
        let got = parse_labeled(SAMPLE, Path::new("x.tsv")).unwrap();
        let text = format_labeled(&got);
        assert_eq!(parse_labeled(&text, Path::new("x.tsv")).unwrap(), got);
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse_labeled("a\tB-SC\tO\nb\tB-XX\tO\n", Path::new("bad.tsv")).unwrap_err();
        assert!(err.to_string().starts_with("bad.tsv:2:"), "{err}");
        let err = parse_labeled("a\tO\n", Path::new("bad.tsv")).unwrap_err();
        assert!(err.to_string().starts_with("bad.tsv:1:"), "{err}");
    }
}
