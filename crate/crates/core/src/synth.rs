//! Templated synthetic corpora.
//!
//! Sentences are assembled from clause groups whose layout the decoder's
//! grouping rules recover exactly, so generated statements double as gold
//! data for round-trip checks and as a training corpus.
//!
//! Group shapes (`[..]` optional):
//!
//! ```text
//! single          [SA of] SC P [the OA of] OC [in [the CA of] CC]
//! shared object   SC P and [SA of] SC P [the OA of] OC [in [the CA of] CC]
//! shared subject  [SA of] SC P OC [in CC] and P [the OA of] OC
//! ```
//!
//! An optional trailing free condition (`; while CS CP CO`) shares no concept
//! with any fact and therefore qualifies all of them.

use std::collections::{BTreeMap, HashSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::Sentence;
use crate::schema::{
    encode, repair_bio, ConditionTuple, EntityMention, FactTuple, LabeledSentence, Phrase, Span, Statement, TagLabel,
};

pub struct Vocabulary {
    pub concepts: &'static [&'static str],
    pub attributes: &'static [&'static str],
    pub predicates: &'static [&'static str],
    pub condition_predicates: &'static [&'static str],
    pub condition_concepts: &'static [&'static str],
    pub preambles: &'static [&'static str],
}

pub const BIOMEDICAL: Vocabulary = Vocabulary {
    concepts: &[
        "alkaline pH",
        "extracellular acidic pH",
        "TRPV5/V6 channels",
        "OGD exposure",
        "INHBB",
        "calcium influx",
        "pre-ischemic exercise",
        "caspase-3",
        "p53",
        "NF-kB signaling",
        "reactive oxygen species",
        "insulin",
        "glucose uptake",
        "mitochondrial membrane potential",
        "Bcl-2",
        "TNF-alpha",
        "IL-6",
        "autophagy",
        "apoptosis",
        "cell proliferation",
        "ERK1/2",
        "AMPK",
        "mTOR",
        "oxidative stress",
        "hypoxia",
        "metformin",
        "cisplatin",
        "estrogen receptor",
        "STAT3",
        "nitric oxide",
        "lipid peroxidation",
        "beta-catenin",
        "VEGF",
        "HIF-1alpha",
        "cyclin D1",
        "SIRT1",
    ],
    attributes: &[
        "activity",
        "expression",
        "level",
        "phosphorylation",
        "secretion",
        "stability",
        "production",
        "release",
        "translocation",
        "knockdown",
    ],
    predicates: &[
        "increases",
        "increased",
        "reduces",
        "reduced",
        "activates",
        "inhibits",
        "promotes",
        "suppresses",
        "enhances",
        "decreased",
        "induces",
        "blocked",
        "attenuates",
        "stimulates",
    ],
    condition_predicates: &["in", "under", "after", "during"],
    condition_concepts: &[
        "Jurkat T cells",
        "HeLa cells",
        "HEK293 cells",
        "cultured neurons",
        "rat brain",
        "diabetic mice",
        "hypoxic conditions",
        "high glucose medium",
        "primary hepatocytes",
        "cardiomyocytes",
        "ischemia",
        "serum starvation",
        "zebrafish embryos",
        "tumor xenografts",
        "MCF-7 cells",
        "human plasma",
    ],
    preambles: &[
        "We observed that",
        "These results show that",
        "Our data indicate that",
        "In this study ,",
        "Furthermore ,",
    ],
};

/// Meaningless but tokenizer-safe words, used where lexical cues must not help.
pub const NONCE: Vocabulary = Vocabulary {
    concepts: &[
        "zarb", "qel-7", "morv", "tix/2", "plon", "vesk", "dral", "kuvo", "sna3", "brel", "fy-9", "gorm",
    ],
    attributes: &["lut", "wep", "kaz", "obi", "rund"],
    predicates: &["blicks", "frons", "gaz", "tumps", "mekes"],
    condition_predicates: &["in", "at", "on"],
    condition_concepts: &["harn", "jisp", "wold", "yurk", "trev"],
    preambles: &["so", "thus ,"],
};

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub max_groups: usize,
    pub min_groups: usize,
    /// probability of each optional slot
    pub p_optional: f64,
    pub p_free_condition: f64,
    pub p_preamble: f64,
    /// concept phrases glued from up to this many vocabulary entries
    pub max_concept_parts: usize,
}

impl GeneratorConfig {
    /// Dense random structures for exercising the schema.
    pub fn structural() -> Self {
        GeneratorConfig {
            max_groups: 3,
            min_groups: 0,
            p_optional: 0.5,
            p_free_condition: 0.3,
            p_preamble: 0.3,
            max_concept_parts: 3,
        }
    }

    /// Abstract-like sentences for training and evaluation.
    pub fn templated() -> Self {
        GeneratorConfig {
            max_groups: 2,
            min_groups: 1,
            p_optional: 0.4,
            p_free_condition: 0.15,
            p_preamble: 0.4,
            max_concept_parts: 1,
        }
    }
}

pub struct Generator<'v> {
    vocab: &'v Vocabulary,
    config: GeneratorConfig,
    rng: ChaCha8Rng,
}

struct Builder<'v> {
    words: Vec<String>,
    used: HashSet<String>,
    vocab: &'v Vocabulary,
    max_parts: usize,
}

impl Builder<'_> {
    fn push(&mut self, phrase: &str) -> Span {
        let start = self.words.len();
        self.words.extend(phrase.split_whitespace().map(str::to_string));
        Span::new(start, self.words.len())
    }

    /// Picks a phrase whose lowercased surface is unused in this sentence.
    fn fresh(&mut self, rng: &mut ChaCha8Rng, pool: &[&str], max_parts: usize) -> String {
        for _ in 0..64 {
            let parts = rng.random_range(1..=max_parts.max(1));
            let phrase: Vec<&str> = (0..parts).map(|_| *pool.choose(rng).unwrap()).collect();
            let phrase = phrase.join(" ");
            if self.used.insert(phrase.to_lowercase()) {
                return phrase;
            }
        }
        // pool exhausted: disambiguate with a counter token
        let phrase = format!("{} x{}", pool.choose(rng).unwrap(), self.used.len());
        self.used.insert(phrase.to_lowercase());
        phrase
    }

    fn concept(&mut self, rng: &mut ChaCha8Rng) -> Span {
        let pool = self.vocab.concepts;
        let phrase = self.fresh(rng, pool, self.max_parts);
        self.push(&phrase)
    }

    fn condition_concept(&mut self, rng: &mut ChaCha8Rng) -> Span {
        let pool = self.vocab.condition_concepts;
        let phrase = self.fresh(rng, pool, 1);
        self.push(&phrase)
    }

    fn pick(&mut self, rng: &mut ChaCha8Rng, pool: &[&str]) -> Span {
        let w = *pool.choose(rng).unwrap();
        self.push(w)
    }
}

struct RawFact {
    subject: (Span, Option<Span>),
    predicate: Span,
    object: (Span, Option<Span>),
}

struct RawCondition {
    subject: (Span, Option<Span>),
    predicate: Span,
    object: (Span, Option<Span>),
    /// facts this condition qualifies; `None` means every fact
    targets: Option<Vec<usize>>,
}

impl<'v> Generator<'v> {
    pub fn new(vocab: &'v Vocabulary, config: GeneratorConfig, seed: u64) -> Self {
        Generator {
            vocab,
            config,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    /// Generates a sentence with its gold statement.
    pub fn statement(&mut self, doc_id: &str, sent_index: usize) -> (Sentence, Statement) {
        let mut b = Builder {
            words: Vec::new(),
            used: HashSet::new(),
            vocab: self.vocab,
            max_parts: self.config.max_concept_parts,
        };
        let mut facts: Vec<RawFact> = Vec::new();
        let mut conds: Vec<RawCondition> = Vec::new();
        let p = self.config.p_optional;

        if self.chance(self.config.p_preamble) {
            let pre = *self.vocab.preambles.choose(&mut self.rng).unwrap();
            b.push(pre);
        }
        let groups = self.rng.random_range(self.config.min_groups..=self.config.max_groups);
        for g in 0..groups {
            if g > 0 {
                b.push(if self.chance(0.5) { "; and" } else { ", while" });
            }
            match self.rng.random_range(0..3) {
                0 => {
                    let subject = self.mention_subject(&mut b, p);
                    let predicate = b.pick(&mut self.rng, self.vocab.predicates);
                    let object = self.mention_object(&mut b, p);
                    facts.push(RawFact {
                        subject,
                        predicate,
                        object,
                    });
                    if self.chance(p) {
                        conds.push(self.condition_on(&mut b, object.0, vec![facts.len() - 1], p));
                    }
                }
                1 => {
                    let subject1 = (b.concept(&mut self.rng), None);
                    let pred1 = b.pick(&mut self.rng, self.vocab.predicates);
                    b.push("and");
                    let subject2 = self.mention_subject(&mut b, p);
                    let pred2 = b.pick(&mut self.rng, self.vocab.predicates);
                    let object = self.mention_object(&mut b, p);
                    facts.push(RawFact {
                        subject: subject1,
                        predicate: pred1,
                        object,
                    });
                    facts.push(RawFact {
                        subject: subject2,
                        predicate: pred2,
                        object,
                    });
                    if self.chance(p) {
                        let n = facts.len();
                        conds.push(self.condition_on(&mut b, object.0, vec![n - 2, n - 1], p));
                    }
                }
                _ => {
                    let subject = self.mention_subject(&mut b, p);
                    let pred1 = b.pick(&mut self.rng, self.vocab.predicates);
                    let object1 = (b.concept(&mut self.rng), None);
                    facts.push(RawFact {
                        subject,
                        predicate: pred1,
                        object: object1,
                    });
                    if self.chance(p) {
                        conds.push(self.condition_on(&mut b, object1.0, vec![facts.len() - 1], 0.0));
                    }
                    b.push("and");
                    let pred2 = b.pick(&mut self.rng, self.vocab.predicates);
                    let object2 = self.mention_object(&mut b, p);
                    facts.push(RawFact {
                        subject,
                        predicate: pred2,
                        object: object2,
                    });
                }
            }
        }
        if self.chance(self.config.p_free_condition) {
            b.push(if groups > 0 { "; while" } else { "while" });
            let subject = (b.concept(&mut self.rng), None);
            let predicate = b.pick(&mut self.rng, self.vocab.condition_predicates);
            let object = (b.condition_concept(&mut self.rng), None);
            conds.push(RawCondition {
                subject,
                predicate,
                object,
                targets: None,
            });
        }
        b.push(".");

        let sentence = Sentence::from_tokens(doc_id, sent_index, &b.words);
        let mention = |(c, a): (Span, Option<Span>)| EntityMention::new(&sentence, c, a);
        let facts_out: Vec<FactTuple> = facts
            .iter()
            .map(|f| FactTuple {
                subject: mention(f.subject),
                predicate: Phrase::new(&sentence, f.predicate),
                object: mention(f.object),
                confidence: 1.0,
            })
            .collect();
        let conds_out: Vec<ConditionTuple> = conds
            .iter()
            .map(|c| ConditionTuple {
                subject: mention(c.subject),
                predicate: Phrase::new(&sentence, c.predicate),
                object: mention(c.object),
            })
            .collect();
        let mut attachment: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        if !facts.is_empty() {
            for (ci, c) in conds.iter().enumerate() {
                let targets = c.targets.clone().unwrap_or_else(|| (0..facts.len()).collect());
                for fi in targets {
                    attachment.entry(fi).or_default().push(ci);
                }
            }
        }
        let statement = Statement {
            doc_id: doc_id.to_string(),
            sent_index,
            facts: facts_out,
            conditions: conds_out,
            attachment,
            warnings: Vec::new(),
        };
        (sentence, statement)
    }

    fn mention_subject(&mut self, b: &mut Builder, p: f64) -> (Span, Option<Span>) {
        if self.chance(p) {
            let attr = b.pick(&mut self.rng, self.vocab.attributes);
            b.push("of");
            (b.concept(&mut self.rng), Some(attr))
        } else {
            (b.concept(&mut self.rng), None)
        }
    }

    fn mention_object(&mut self, b: &mut Builder, p: f64) -> (Span, Option<Span>) {
        if self.chance(p) {
            b.push("the");
            let attr = b.pick(&mut self.rng, self.vocab.attributes);
            b.push("of");
            (b.concept(&mut self.rng), Some(attr))
        } else {
            (b.concept(&mut self.rng), None)
        }
    }

    /// Condition whose subject is the fact object span just emitted.
    fn condition_on(&mut self, b: &mut Builder, anchor: Span, targets: Vec<usize>, p: f64) -> RawCondition {
        let predicate = b.pick(&mut self.rng, self.vocab.condition_predicates);
        let attr = if self.chance(p) {
            b.push("the");
            let a = b.pick(&mut self.rng, self.vocab.attributes);
            b.push("of");
            Some(a)
        } else {
            None
        };
        let object = (b.condition_concept(&mut self.rng), attr);
        RawCondition {
            subject: (anchor, None),
            predicate,
            object,
            targets: Some(targets),
        }
    }

    pub fn labeled(&mut self, doc_id: &str, sent_index: usize) -> LabeledSentence {
        let (sentence, statement) = self.statement(doc_id, sent_index);
        let (fact_tags, cond_tags) =
            encode(&sentence, &statement.facts, &statement.conditions).expect("generated spans never conflict");
        LabeledSentence {
            sentence,
            fact_tags,
            cond_tags,
            pos: None,
        }
    }
}

/// `n` templated abstract-like sentences, five per synthetic document.
pub fn templated_corpus(n: usize, seed: u64) -> Vec<LabeledSentence> {
    let mut g = Generator::new(&BIOMEDICAL, GeneratorConfig::templated(), seed);
    (0..n).map(|i| g.labeled(&format!("syn{:04}", i / 5), i % 5)).collect()
}

/// Sentences where every label is announced by a word unique to it, so the
/// data is linearly separable on the `w0` feature alone.
pub fn separable_set(n: usize, seed: u64) -> Vec<LabeledSentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = TagLabel::all();
    (0..n)
        .map(|i| {
            let len = rng.random_range(2..=8);
            let raw: Vec<TagLabel> = (0..len).map(|_| *labels.choose(&mut rng).unwrap()).collect();
            let fact = repair_bio(&raw);
            let raw: Vec<TagLabel> = (0..len).map(|_| *labels.choose(&mut rng).unwrap()).collect();
            let cond = repair_bio(&raw);
            let words: Vec<String> = fact
                .iter()
                .zip(&cond)
                .map(|(f, c)| format!("f{}c{}", f.index(), c.index()))
                .collect();
            LabeledSentence {
                sentence: Sentence::from_tokens("sep", i, &words),
                fact_tags: fact,
                cond_tags: cond,
                pos: None,
            }
        })
        .collect()
}
