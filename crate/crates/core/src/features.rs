//! Sparse per-token feature templates.
//!
//! Template families run in a fixed order: word identity, shape, affixes,
//! orthographic flags, context window, lexicon membership, part of speech.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::{tokenize, Sentence};

/// Identifies the template set below; echoed into model files.
pub const TEMPLATE_SET: &str = "word-shape-affix-window-lex/1";

const BOS: &str = "<BOS>";
const EOS: &str = "<EOS>";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureVector(Vec<String>);

impl FeatureVector {
    pub fn new(features: impl IntoIterator<Item = String>) -> Self {
        let mut seen = HashSet::new();
        FeatureVector(features.into_iter().filter(|f| seen.insert(f.clone())).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, feature: &str) -> bool {
        self.0.iter().any(|f| f == feature)
    }
}

/// Case-insensitive set of concept surfaces, matched over token sequences.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeSet<String>,
    max_tokens: usize,
}

impl Lexicon {
    pub fn from_surfaces<I, S>(surfaces: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::default();
        for s in surfaces {
            lex.insert(s.as_ref());
        }
        lex
    }

    pub fn insert(&mut self, surface: &str) {
        let toks: Vec<String> = tokenize(surface).into_iter().map(|t| t.text.to_lowercase()).collect();
        if toks.is_empty() {
            return;
        }
        self.max_tokens = self.max_tokens.max(toks.len());
        self.entries.insert(toks.join(" "));
    }

    /// One surface per line; blank lines and `#` comments are skipped.
    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Lexicon::from_surfaces(
            content
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        ))
    }

    pub fn contains(&self, surface: &str) -> bool {
        let toks: Vec<String> = tokenize(surface).into_iter().map(|t| t.text.to_lowercase()).collect();
        self.entries.contains(&toks.join(" "))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Flags tokens covered by at least one lexicon match.
    pub fn mark(&self, sentence: &Sentence) -> Vec<bool> {
        let words: Vec<String> = sentence.tokens.iter().map(|t| t.text.to_lowercase()).collect();
        let mut marks = vec![false; words.len()];
        for start in 0..words.len() {
            for len in 1..=self.max_tokens.min(words.len() - start) {
                if self.entries.contains(&words[start..start + len].join(" ")) {
                    marks[start..start + len].iter_mut().for_each(|m| *m = true);
                }
            }
        }
        marks
    }
}

fn char_class(c: char) -> char {
    if c.is_uppercase() {
        'A'
    } else if c.is_lowercase() {
        'a'
    } else if c.is_numeric() {
        '0'
    } else {
        c
    }
}

/// Word shape with runs of one class capped at two characters:
/// `pH` -> `aA`, `TRPV5/V6` -> `AA0/A0`.
pub fn shape(word: &str) -> String {
    let mut out: Vec<char> = Vec::new();
    for c in word.chars().map(char_class) {
        let n = out.len();
        if n >= 2 && out[n - 1] == c && out[n - 2] == c {
            continue;
        }
        out.push(c);
    }
    out.into_iter().collect()
}

fn affixes(lower: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = lower.chars().collect();
    for n in 1..=3 {
        if chars.len() >= n {
            out.push(format!("pre{n}={}", chars[..n].iter().collect::<String>()));
        }
    }
    for n in 1..=3 {
        if chars.len() >= n {
            out.push(format!(
                "suf{n}={}",
                chars[chars.len() - n..].iter().collect::<String>()
            ));
        }
    }
}

pub fn extract(sentence: &Sentence, lexicon: Option<&Lexicon>) -> Vec<FeatureVector> {
    extract_with_pos(sentence, lexicon, None)
}

pub fn extract_with_pos(sentence: &Sentence, lexicon: Option<&Lexicon>, pos: Option<&[String]>) -> Vec<FeatureVector> {
    let lower: Vec<String> = sentence.tokens.iter().map(|t| t.text.to_lowercase()).collect();
    let lex_marks = lexicon.map(|l| l.mark(sentence));
    let n = lower.len();
    let window = |t: usize, offset: isize| -> &str {
        let i = t as isize + offset;
        if i < 0 {
            BOS
        } else if i as usize >= n {
            EOS
        } else {
            &lower[i as usize]
        }
    };

    (0..n)
        .map(|t| {
            let raw = &sentence.tokens[t].text;
            let w = &lower[t];
            let mut f = Vec::with_capacity(24);
            f.push("bias".to_string());
            f.push(format!("w0={w}"));
            f.push(format!("word={raw}"));
            f.push(format!("shape={}", shape(raw)));
            affixes(w, &mut f);
            let first = raw.chars().next();
            if first.is_some_and(char::is_uppercase) {
                f.push("init-cap=1".into());
            }
            if raw.chars().any(char::is_alphabetic) && !raw.chars().any(char::is_lowercase) {
                f.push("all-caps=1".into());
            }
            if raw.chars().any(|c| c.is_ascii_digit()) {
                f.push("has-digit=1".into());
            }
            if raw.contains('/') {
                f.push("has-slash=1".into());
            }
            if raw.contains('-') {
                f.push("has-hyphen=1".into());
            }
            for offset in [-2isize, -1, 1, 2] {
                let sign = if offset < 0 { "" } else { "+" };
                f.push(format!("w{sign}{offset}={}", window(t, offset)));
            }
            f.push(format!("w-1|w0={}|{w}", window(t, -1)));
            f.push(format!("w0|w+1={w}|{}", window(t, 1)));
            if lex_marks.as_ref().is_some_and(|m| m[t]) {
                f.push("lex=1".into());
            }
            if let Some(p) = pos.and_then(|p| p.get(t)) {
                f.push(format!("pos={p}"));
            }
            FeatureVector::new(f)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn worked() -> Sentence {
        Sentence::new(
            "ex",
            0,
            "alkaline pH increases the activity of TRPV5/V6 channels in Jurkat T cells",
        )
    }

    #[test]
    fn ph_features() {
        let fv = extract(&worked(), None);
        for f in [
            "w0=ph",
            "shape=aA",
            "suf2=ph",
            "word=pH",
            "w-1=alkaline",
            "w+1=increases",
        ] {
            assert!(fv[1].contains(f), "missing {f}: {:?}", fv[1]);
        }
        assert!(!fv[1].contains("suf3=ph"));
    }

    #[test]
    fn boundary_markers() {
        let fv = extract(&worked(), None);
        assert!(fv[0].contains("w-1=<BOS>"));
        assert!(fv[0].contains("w-2=<BOS>"));
        assert!(fv[11].contains("w+1=<EOS>"));
    }

    #[test]
    fn compound_token_shape() {
        let fv = extract(&worked(), None);
        assert!(fv[6].contains("has-slash=1"));
        assert!(fv[6].contains("shape=AA0/A0"));
        assert!(fv[6].contains("all-caps=1"));
        assert_eq!(shape("TRPV5/V6"), "AA0/A0");
        assert_eq!(shape("RNAi-mediated"), "AAa-aa");
    }

    #[test]
    fn lexicon_marks_multiword_surfaces() {
        let lex = Lexicon::from_surfaces(["jurkat T cells", "TRPV5/V6"]);
        let fv = extract(&worked(), Some(&lex));
        let marked: Vec<usize> = (0..12).filter(|&t| fv[t].contains("lex=1")).collect();
        assert_eq!(marked, vec![6, 9, 10, 11]);
        assert!(lex.contains("Jurkat t CELLS"));
    }

    #[test]
    fn pos_column_becomes_features() {
        let s = Sentence::new("ex", 0, "cells die");
        let pos = vec!["NNS".to_string(), "VBP".to_string()];
        let fv = extract_with_pos(&s, None, Some(&pos));
        assert!(fv[1].contains("pos=VBP"));
    }

    #[test]
    fn lexicon_file_skips_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lex.txt");
        fs::write(&path, "# concepts\napoptosis\n\n  Jurkat T cells \n").unwrap();
        let lex = Lexicon::load(&path).unwrap();
        assert_eq!(lex.len(), 2);
        assert!(lex.contains("jurkat t cells"));
    }

    proptest! {
        #[test]
        fn shape_depends_only_on_classes(word in "[A-Za-z0-9/-]{1,12}") {
            let swapped: String = word
                .chars()
                .map(|c| match c {
                    'A'..='Y' => ((c as u8) + 1) as char,
                    'a'..='y' => ((c as u8) + 1) as char,
                    '0'..='8' => ((c as u8) + 1) as char,
                    other => other,
                })
                .collect();
            prop_assert_eq!(shape(&word), shape(&swapped));
        }

        #[test]
        fn every_token_has_enough_unique_features(text in "[A-Za-z0-9/() .,-]{1,60}") {
            let s = Sentence::new("p", 0, text);
            let a = extract(&s, None);
            prop_assert_eq!(&a, &extract(&s, None));
            for fv in &a {
                prop_assert!(fv.len() >= 8);
                let uniq: HashSet<&str> = fv.iter().collect();
                prop_assert_eq!(uniq.len(), fv.len());
            }
        }
    }
}
