//! Iterative self-training: train both layer models, label the unlabeled
//! pool, and promote the most confident sentences into the training set.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{self, Lexicon};
use crate::ingest::Sentence;
use crate::schema::{repair_bio, LabeledSentence, Layer};
use crate::tagger::{train_with_lexicon, viterbi_2best, Model};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelfTrainParams {
    /// promotion threshold on sentence confidence
    pub tau: f64,
    /// max promotions per iteration
    pub cap: usize,
    pub max_iters: usize,
    /// stop once an iteration promotes fewer than this
    pub min_new: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SelfTrainParams {
    fn default() -> Self {
        SelfTrainParams {
            tau: 0.6,
            cap: 500,
            max_iters: 5,
            min_new: 10,
            epochs: 20,
            seed: 42,
        }
    }
}

impl SelfTrainParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must lie in (0, 1), got {}",
                self.tau
            )));
        }
        for (name, v) in [
            ("cap", self.cap),
            ("max_iters", self.max_iters),
            ("min_new", self.min_new),
            ("epochs", self.epochs),
        ] {
            if v == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Promotion {
    pub doc_id: String,
    pub sent_index: usize,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// training-set size the iteration's models were trained on
    pub training_size: usize,
    pub promoted_count: usize,
    pub pool_remaining: usize,
    /// mean sentence confidence over the pool scored this iteration
    pub mean_confidence: f64,
    pub promoted: Vec<Promotion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTrainReport {
    pub tau: f64,
    pub cap: usize,
    pub max_iters: usize,
    pub iterations: Vec<IterationRecord>,
    pub final_training_size: usize,
}

impl SelfTrainReport {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

pub struct SelfTrainOutcome {
    pub fact_model: Model,
    pub cond_model: Model,
    pub training_set: Vec<LabeledSentence>,
    pub report: SelfTrainReport,
}

struct Scored {
    index: usize,
    confidence: f64,
    labeled: LabeledSentence,
}

fn train_pair(set: &[LabeledSentence], params: &SelfTrainParams, lexicon: Option<&Lexicon>) -> Result<(Model, Model)> {
    let (fact, cond) = rayon::join(
        || train_with_lexicon(set, Layer::Fact, params.epochs, params.seed, lexicon),
        || train_with_lexicon(set, Layer::Condition, params.epochs, params.seed, lexicon),
    );
    Ok((fact?, cond?))
}

/// Sentence confidence is the minimum of the two layer confidences.
fn score_pool(pool: &[Sentence], fact: &Model, cond: &Model, lexicon: Option<&Lexicon>) -> Result<Vec<Scored>> {
    pool.par_iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(index, s)| {
            let fv = features::extract(s, lexicon);
            let pf = viterbi_2best(fact, &fv)?;
            let pc = viterbi_2best(cond, &fv)?;
            Ok(Scored {
                index,
                confidence: pf.confidence.min(pc.confidence),
                labeled: LabeledSentence {
                    sentence: s.clone(),
                    fact_tags: repair_bio(&pf.tags),
                    cond_tags: repair_bio(&pc.tags),
                    pos: None,
                },
            })
        })
        .collect()
}

pub fn run(
    seed_labeled: &[LabeledSentence],
    pool: &[Sentence],
    params: &SelfTrainParams,
    lexicon: Option<&Lexicon>,
) -> Result<SelfTrainOutcome> {
    if seed_labeled.is_empty() {
        return Err(Error::Empty("self-training needs a non-empty seed set"));
    }
    params.validate()?;

    let mut training_set = seed_labeled.to_vec();
    let mut pool: Vec<Sentence> = pool.to_vec();
    let mut iterations = Vec::new();
    let mut models = None;
    let mut stale = true;

    for iteration in 1..=params.max_iters {
        let (fact, cond) = train_pair(&training_set, params, lexicon)?;
        let training_size = training_set.len();
        let mut scored = score_pool(&pool, &fact, &cond, lexicon)?;
        let mean_confidence = if scored.is_empty() {
            0.0
        } else {
            scored.iter().map(|s| s.confidence).sum::<f64>() / scored.len() as f64
        };

        scored.retain(|s| s.confidence >= params.tau);
        scored.sort_by(|a, b| {
            b.confidence
                .total_cmp(&a.confidence)
                .then_with(|| a.labeled.sentence.doc_id.cmp(&b.labeled.sentence.doc_id))
                .then_with(|| a.labeled.sentence.sent_index.cmp(&b.labeled.sentence.sent_index))
                .then_with(|| a.index.cmp(&b.index))
        });
        scored.truncate(params.cap);

        let promoted: Vec<Promotion> = scored
            .iter()
            .map(|s| Promotion {
                doc_id: s.labeled.sentence.doc_id.clone(),
                sent_index: s.labeled.sentence.sent_index,
                confidence: s.confidence,
            })
            .collect();
        let mut taken = vec![false; pool.len()];
        for s in &scored {
            taken[s.index] = true;
        }
        let promoted_count = scored.len();
        training_set.extend(scored.into_iter().map(|s| s.labeled));
        let mut keep = taken.iter().map(|t| !t);
        pool.retain(|_| keep.next().unwrap());

        iterations.push(IterationRecord {
            iteration,
            training_size,
            promoted_count,
            pool_remaining: pool.len(),
            mean_confidence,
            promoted,
        });
        stale = promoted_count > 0;
        models = Some((fact, cond));
        if promoted_count < params.min_new {
            break;
        }
    }

    let (fact_model, cond_model) = match models {
        Some(m) if !stale => m,
        _ => train_pair(&training_set, params, lexicon)?,
    };
    Ok(SelfTrainOutcome {
        fact_model,
        cond_model,
        report: SelfTrainReport {
            tau: params.tau,
            cap: params.cap,
            max_iters: params.max_iters,
            iterations,
            final_training_size: training_set.len(),
        },
        training_set,
    })
}
