//! Sentence -> statement extraction with a pair of layer models.

use rayon::prelude::*;

use crate::error::Result;
use crate::features::{self, Lexicon};
use crate::ingest::Sentence;
use crate::schema::{decode, LabeledSentence, Statement};
use crate::tagger::TaggerBackend;

pub struct Extractor<'a, B: TaggerBackend> {
    pub fact: &'a B,
    pub cond: &'a B,
    pub lexicon: Option<&'a Lexicon>,
}

impl<B: TaggerBackend> Extractor<'_, B> {
    /// Predicts both layers, repairs BIO, decodes tuples. Fact confidence is
    /// the fact layer's sentence confidence.
    pub fn extract(&self, sentence: &Sentence) -> Result<Statement> {
        if sentence.is_empty() {
            return decode(&LabeledSentence {
                sentence: sentence.clone(),
                fact_tags: Vec::new(),
                cond_tags: Vec::new(),
                pos: None,
            });
        }
        let fv = features::extract(sentence, self.lexicon);
        let fact = self.fact.decode(&fv)?;
        let cond = self.cond.decode(&fv)?;
        let mut statement = decode(&LabeledSentence {
            sentence: sentence.clone(),
            fact_tags: fact.tags,
            cond_tags: cond.tags,
            pos: None,
        })?;
        for f in &mut statement.facts {
            f.confidence = fact.confidence;
        }
        Ok(statement)
    }

    /// One statement per input sentence, in input order.
    pub fn extract_all(&self, sentences: &[Sentence]) -> Result<Vec<Statement>> {
        sentences.par_iter().map(|s| self.extract(s)).collect()
    }
}
