//! Linear-chain sequence labeling: scoring, exact 2-best Viterbi decoding and
//! averaged structured-perceptron training. One model is trained per layer.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{self, FeatureVector, Lexicon, TEMPLATE_SET};
use crate::ingest::Sentence;
use crate::schema::{LabeledSentence, Layer, TagLabel};

const N: usize = TagLabel::COUNT;
const KEY_SEP: char = '\u{1}';
pub const MODEL_VERSION: &str = "biocs-perceptron/1";

type Row = [f64; N];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub epochs: usize,
    pub seed: u64,
    pub template_set: String,
    pub training_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    layer: Layer,
    emissions: HashMap<String, Row>,
    transitions: [Row; N],
    start: Row,
    stop: Row,
    version: String,
    config: ModelConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// Raw argmax sequence; not BIO-repaired.
    pub tags: Vec<TagLabel>,
    pub score_best: f64,
    pub score_second: f64,
    pub confidence: f64,
}

/// Maps a 2-best margin to `[0, 1)`: `m / (1 + m)` with `m` the
/// length-normalised margin clipped at zero.
pub fn margin_confidence(score_best: f64, score_second: f64, len: usize) -> f64 {
    if len == 0 || !score_second.is_finite() {
        return if score_second.is_finite() {
            0.0
        } else {
            1.0 - f64::EPSILON
        };
    }
    let m = ((score_best - score_second) / len as f64).max(0.0);
    m / (1.0 + m)
}

/// Something that can label a feature sequence for one layer. The perceptron
/// [`Model`] is the only implementation today.
pub trait TaggerBackend: Send + Sync {
    fn layer(&self) -> Layer;
    fn decode(&self, features: &[FeatureVector]) -> Result<Prediction>;
}

impl Model {
    /// A model with every weight at zero.
    pub fn zero(layer: Layer) -> Self {
        Model {
            layer,
            emissions: HashMap::new(),
            transitions: [[0.0; N]; N],
            start: [0.0; N],
            stop: [0.0; N],
            version: MODEL_VERSION.to_string(),
            config: ModelConfig {
                epochs: 0,
                seed: 0,
                template_set: TEMPLATE_SET.to_string(),
                training_size: 0,
            },
        }
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn labels(&self) -> [TagLabel; N] {
        TagLabel::all()
    }

    pub fn emission(&self, feature: &str, label: TagLabel) -> f64 {
        self.emissions.get(feature).map_or(0.0, |row| row[label.index()])
    }

    pub fn transition(&self, from: TagLabel, to: TagLabel) -> f64 {
        self.transitions[from.index()][to.index()]
    }

    pub fn start_weight(&self, label: TagLabel) -> f64 {
        self.start[label.index()]
    }

    pub fn stop_weight(&self, label: TagLabel) -> f64 {
        self.stop[label.index()]
    }

    pub fn set_emission(&mut self, feature: &str, label: TagLabel, weight: f64) {
        self.emissions.entry(feature.to_string()).or_insert([0.0; N])[label.index()] = weight;
    }

    pub fn set_transition(&mut self, from: TagLabel, to: TagLabel, weight: f64) {
        self.transitions[from.index()][to.index()] = weight;
    }

    pub fn set_start(&mut self, label: TagLabel, weight: f64) {
        self.start[label.index()] = weight;
    }

    pub fn set_stop(&mut self, label: TagLabel, weight: f64) {
        self.stop[label.index()] = weight;
    }

    fn emission_rows(&self, features: &[FeatureVector]) -> Vec<Row> {
        features
            .iter()
            .map(|fv| {
                let mut row = [0.0; N];
                for f in fv.iter() {
                    if let Some(w) = self.emissions.get(f) {
                        for (acc, w) in row.iter_mut().zip(w) {
                            *acc += w;
                        }
                    }
                }
                row
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let key = |label: TagLabel| label.to_string();
        let sparse = |row: &Row| -> BTreeMap<String, f64> {
            TagLabel::all()
                .into_iter()
                .filter(|l| row[l.index()] != 0.0)
                .map(|l| (key(l), row[l.index()]))
                .collect()
        };
        let mut emissions = BTreeMap::new();
        for (feat, row) in &self.emissions {
            for label in TagLabel::all() {
                let w = row[label.index()];
                if w != 0.0 {
                    emissions.insert(format!("{feat}{KEY_SEP}{label}"), w);
                }
            }
        }
        let mut transitions = BTreeMap::new();
        for from in TagLabel::all() {
            for to in TagLabel::all() {
                let w = self.transitions[from.index()][to.index()];
                if w != 0.0 {
                    transitions.insert(format!("{from}{KEY_SEP}{to}"), w);
                }
            }
        }
        let file = ModelFile {
            config: self.config.clone(),
            emissions,
            labels: TagLabel::all().iter().map(|l| l.to_string()).collect(),
            layer: self.layer,
            start: sparse(&self.start),
            stop: sparse(&self.stop),
            transitions,
            version: self.version.clone(),
        };
        let value = serde_json::to_value(&file).expect("model serializes");
        let mut out = serde_json::to_string(&value).expect("model serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))?;
        let expected: Vec<String> = TagLabel::all().iter().map(|l| l.to_string()).collect();
        if file.labels != expected {
            return Err(Error::InvalidModel(format!("unexpected label list {:?}", file.labels)));
        }
        let label = |s: &str| s.parse::<TagLabel>().map_err(|e| Error::InvalidModel(e.to_string()));
        let split = |k: &str| -> Result<(String, TagLabel)> {
            let (a, b) = k
                .rsplit_once(KEY_SEP)
                .ok_or_else(|| Error::InvalidModel(format!("malformed weight key {k:?}")))?;
            Ok((a.to_string(), label(b)?))
        };
        let mut model = Model::zero(file.layer);
        model.version = file.version;
        model.config = file.config;
        for (k, w) in &file.emissions {
            let (feat, l) = split(k)?;
            model.set_emission(&feat, l, *w);
        }
        for (k, w) in &file.transitions {
            let (from, to) = split(k)?;
            model.set_transition(label(&from)?, to, *w);
        }
        for (k, w) in &file.start {
            model.set_start(label(k)?, *w);
        }
        for (k, w) in &file.stop {
            model.set_stop(label(k)?, *w);
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Model::from_json(&text).map_err(|e| Error::parse(path, 1, e))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    config: ModelConfig,
    emissions: BTreeMap<String, f64>,
    labels: Vec<String>,
    layer: Layer,
    start: BTreeMap<String, f64>,
    stop: BTreeMap<String, f64>,
    transitions: BTreeMap<String, f64>,
    version: String,
}

impl TaggerBackend for Model {
    fn layer(&self) -> Layer {
        self.layer
    }

    fn decode(&self, features: &[FeatureVector]) -> Result<Prediction> {
        viterbi_2best(self, features)
    }
}

/// Chain score of `tags`: emissions, transitions and start/stop terms.
pub fn score_sequence(model: &Model, features: &[FeatureVector], tags: &[TagLabel]) -> Result<f64> {
    if features.len() != tags.len() {
        return Err(Error::LengthMismatch(format!(
            "{} feature vectors for {} tags",
            features.len(),
            tags.len()
        )));
    }
    let Some((first, last)) = tags.first().zip(tags.last()) else {
        return Ok(0.0);
    };
    let mut score = model.start_weight(*first) + model.stop_weight(*last);
    for (t, (fv, tag)) in features.iter().zip(tags).enumerate() {
        score += fv.iter().map(|f| model.emission(f, *tag)).sum::<f64>();
        if t > 0 {
            score += model.transition(tags[t - 1], *tag);
        }
    }
    Ok(score)
}

struct Decoded {
    path: Vec<usize>,
    best: f64,
    second: f64,
}

fn push_top2(top: &mut (f64, f64), value: f64) {
    if value > top.0 {
        top.1 = top.0;
        top.0 = value;
    } else if value > top.1 {
        top.1 = value;
    }
}

/// Exact 2-best over all label sequences. Suffix scores are computed right to
/// left so the forward read-out can pick the lowest label index among ties,
/// which yields the lexicographically smallest optimal sequence.
fn decode_chain(emit: &[Row], trans: &[Row; N], start: &Row, stop: &Row) -> Decoded {
    let len = emit.len();
    debug_assert!(len > 0);
    let mut best = vec![[f64::NEG_INFINITY; N]; len];
    let mut second = vec![[f64::NEG_INFINITY; N]; len];
    for y in 0..N {
        best[len - 1][y] = emit[len - 1][y] + stop[y];
    }
    for t in (0..len - 1).rev() {
        for y in 0..N {
            let mut top = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for next in 0..N {
                push_top2(&mut top, trans[y][next] + best[t + 1][next]);
                push_top2(&mut top, trans[y][next] + second[t + 1][next]);
            }
            best[t][y] = emit[t][y] + top.0;
            second[t][y] = emit[t][y] + top.1;
        }
    }
    let mut top = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for y in 0..N {
        push_top2(&mut top, start[y] + best[0][y]);
        push_top2(&mut top, start[y] + second[0][y]);
    }

    let argmax = |scores: &mut dyn Iterator<Item = f64>| -> usize {
        let mut arg = 0;
        let mut max = f64::NEG_INFINITY;
        for (i, s) in scores.enumerate() {
            if s > max {
                max = s;
                arg = i;
            }
        }
        arg
    };
    let mut path = Vec::with_capacity(len);
    path.push(argmax(&mut (0..N).map(|y| start[y] + best[0][y])));
    for t in 1..len {
        let prev = path[t - 1];
        path.push(argmax(&mut (0..N).map(|y| trans[prev][y] + best[t][y])));
    }
    Decoded {
        path,
        best: top.0,
        second: top.1,
    }
}

/// Best label sequence plus the score of the runner-up sequence.
pub fn viterbi_2best(model: &Model, features: &[FeatureVector]) -> Result<Prediction> {
    if features.is_empty() {
        return Err(Error::Empty("cannot decode an empty sequence"));
    }
    let emit = model.emission_rows(features);
    let d = decode_chain(&emit, &model.transitions, &model.start, &model.stop);
    Ok(Prediction {
        tags: d.path.iter().map(|&i| TagLabel::from_index(i).unwrap()).collect(),
        score_best: d.best,
        score_second: d.second,
        confidence: margin_confidence(d.best, d.second, features.len()),
    })
}

pub fn predict(model: &Model, sentence: &Sentence, lexicon: Option<&Lexicon>) -> Result<Prediction> {
    viterbi_2best(model, &features::extract(sentence, lexicon))
}

/// Averaged perceptron state over interned feature ids.
struct Perceptron {
    weights: Vec<Row>,
    totals: Vec<Row>,
    trans: [Row; N],
    trans_totals: [Row; N],
    start: Row,
    start_totals: Row,
    stop: Row,
    stop_totals: Row,
    /// example counter for the lazy averaging trick
    clock: f64,
}

fn bump(w: &mut f64, total: &mut f64, delta: f64, clock: f64) {
    *w += delta;
    *total += clock * delta;
}

impl Perceptron {
    fn new(num_features: usize) -> Self {
        Perceptron {
            weights: vec![[0.0; N]; num_features],
            totals: vec![[0.0; N]; num_features],
            trans: [[0.0; N]; N],
            trans_totals: [[0.0; N]; N],
            start: [0.0; N],
            start_totals: [0.0; N],
            stop: [0.0; N],
            stop_totals: [0.0; N],
            clock: 1.0,
        }
    }

    fn decode(&self, feats: &[Vec<usize>]) -> Vec<usize> {
        let emit: Vec<Row> = feats
            .iter()
            .map(|ids| {
                let mut row = [0.0; N];
                for &id in ids {
                    for (acc, w) in row.iter_mut().zip(&self.weights[id]) {
                        *acc += w;
                    }
                }
                row
            })
            .collect();
        decode_chain(&emit, &self.trans, &self.start, &self.stop).path
    }

    fn update(&mut self, feats: &[Vec<usize>], gold: &[usize], guess: &[usize]) {
        let c = self.clock;
        for t in 0..gold.len() {
            let (g, p) = (gold[t], guess[t]);
            if g != p {
                for &id in &feats[t] {
                    bump(&mut self.weights[id][g], &mut self.totals[id][g], 1.0, c);
                    bump(&mut self.weights[id][p], &mut self.totals[id][p], -1.0, c);
                }
            }
            if t > 0 {
                let (g0, p0) = (gold[t - 1], guess[t - 1]);
                if (g0, g) != (p0, p) {
                    bump(&mut self.trans[g0][g], &mut self.trans_totals[g0][g], 1.0, c);
                    bump(&mut self.trans[p0][p], &mut self.trans_totals[p0][p], -1.0, c);
                }
            }
        }
        let last = gold.len() - 1;
        if gold[0] != guess[0] {
            bump(&mut self.start[gold[0]], &mut self.start_totals[gold[0]], 1.0, c);
            bump(&mut self.start[guess[0]], &mut self.start_totals[guess[0]], -1.0, c);
        }
        if gold[last] != guess[last] {
            bump(&mut self.stop[gold[last]], &mut self.stop_totals[gold[last]], 1.0, c);
            bump(&mut self.stop[guess[last]], &mut self.stop_totals[guess[last]], -1.0, c);
        }
    }

    fn averaged(w: &Row, total: &Row, clock: f64) -> Row {
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = w[i] - total[i] / clock;
        }
        out
    }
}

pub fn train(labeled: &[LabeledSentence], layer: Layer, epochs: usize, seed: u64) -> Result<Model> {
    train_with_lexicon(labeled, layer, epochs, seed, None)
}

/// Averaged structured perceptron. Example order is reshuffled every epoch by
/// a generator seeded with `seed`, so training is a pure function of its inputs.
pub fn train_with_lexicon(
    labeled: &[LabeledSentence],
    layer: Layer,
    epochs: usize,
    seed: u64,
    lexicon: Option<&Lexicon>,
) -> Result<Model> {
    if labeled.is_empty() {
        return Err(Error::Empty("training set has no sentences"));
    }
    for ls in labeled {
        ls.validate()?;
    }

    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut data: Vec<(Vec<Vec<usize>>, Vec<usize>)> = Vec::new();
    for ls in labeled.iter().filter(|ls| !ls.sentence.is_empty()) {
        let fvs = features::extract_with_pos(&ls.sentence, lexicon, ls.pos.as_deref());
        let feats = fvs
            .iter()
            .map(|fv| {
                fv.iter()
                    .map(|f| {
                        *ids.entry(f.to_string()).or_insert_with(|| {
                            names.push(f.to_string());
                            names.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        let gold = ls.tags(layer).iter().map(|t| t.index()).collect();
        data.push((feats, gold));
    }

    let mut p = Perceptron::new(names.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (feats, gold) = &data[i];
            let guess = p.decode(feats);
            if &guess != gold {
                p.update(feats, gold, &guess);
            }
            p.clock += 1.0;
        }
    }

    let mut model = Model::zero(layer);
    model.config = ModelConfig {
        epochs,
        seed,
        template_set: TEMPLATE_SET.to_string(),
        training_size: labeled.len(),
    };
    for (id, name) in names.into_iter().enumerate() {
        let row = Perceptron::averaged(&p.weights[id], &p.totals[id], p.clock);
        if row.iter().any(|w| *w != 0.0) {
            model.emissions.insert(name, row);
        }
    }
    for y in 0..N {
        model.transitions[y] = Perceptron::averaged(&p.trans[y], &p.trans_totals[y], p.clock);
    }
    model.start = Perceptron::averaged(&p.start, &p.start_totals, p.clock);
    model.stop = Perceptron::averaged(&p.stop, &p.stop_totals, p.clock);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::Role;
    use rand::Rng;

    fn fv(items: &[&str]) -> FeatureVector {
        FeatureVector::new(items.iter().map(|s| s.to_string()))
    }

    /// Independent scorer: walks each position and looks every weight up again.
    fn oracle_score(model: &Model, feats: &[FeatureVector], tags: &[usize]) -> f64 {
        let labels = TagLabel::all();
        let mut total = 0.0;
        for t in 0..tags.len() {
            let label = labels[tags[t]];
            if t == 0 {
                total += model.start_weight(label);
            } else {
                total += model.transition(labels[tags[t - 1]], label);
            }
            for f in feats[t].iter() {
                total += model.emission(f, label);
            }
            if t + 1 == tags.len() {
                total += model.stop_weight(label);
            }
        }
        total
    }

    /// Enumerates all 11^T sequences in lexicographic order and keeps the
    /// first strict maximum, plus the runner-up score.
    fn brute_force(model: &Model, feats: &[FeatureVector]) -> (Vec<usize>, f64, f64) {
        let len = feats.len();
        let mut tags = vec![0usize; len];
        let mut best = (Vec::new(), f64::NEG_INFINITY);
        let mut second = f64::NEG_INFINITY;
        loop {
            let s = oracle_score(model, feats, &tags);
            if s > best.1 {
                second = best.1;
                best = (tags.clone(), s);
            } else if s > second {
                second = s;
            }
            let mut pos = len;
            loop {
                if pos == 0 {
                    return (best.0, best.1, second);
                }
                pos -= 1;
                tags[pos] += 1;
                if tags[pos] < N {
                    break;
                }
                tags[pos] = 0;
            }
        }
    }

    fn random_model(rng: &mut ChaCha8Rng, vocab: &[&str], integer: bool) -> Model {
        let draw = |rng: &mut ChaCha8Rng| {
            if integer {
                rng.random_range(-2..=2) as f64
            } else {
                rng.random_range(-1.0..1.0)
            }
        };
        let mut m = Model::zero(Layer::Fact);
        for f in vocab {
            for l in TagLabel::all() {
                if rng.random_bool(0.5) {
                    let w = draw(rng);
                    m.set_emission(f, l, w);
                }
            }
        }
        for a in TagLabel::all() {
            m.set_start(a, draw(rng));
            m.set_stop(a, draw(rng));
            for b in TagLabel::all() {
                m.set_transition(a, b, draw(rng));
            }
        }
        m
    }

    #[test]
    fn zero_model_scores_zero() {
        let m = Model::zero(Layer::Fact);
        let feats = vec![fv(&["a"]), fv(&["b"])];
        let tags = [TagLabel::B(Role::Predicate), TagLabel::O];
        assert_eq!(score_sequence(&m, &feats, &tags).unwrap(), 0.0);
        assert_eq!(score_sequence(&m, &[], &[]).unwrap(), 0.0);
    }

    #[test]
    fn single_emission_weight() {
        let mut m = Model::zero(Layer::Fact);
        let tag = TagLabel::B(Role::SubjectConcept);
        m.set_emission("w0=ph", tag, 2.5);
        assert_eq!(score_sequence(&m, &[fv(&["w0=ph", "bias"])], &[tag]).unwrap(), 2.5);
    }

    #[test]
    fn score_length_mismatch() {
        let m = Model::zero(Layer::Fact);
        assert!(matches!(
            score_sequence(&m, &[fv(&["a"])], &[]),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn score_matches_oracle_on_random_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vocab = ["a", "b", "c", "d"];
        for _ in 0..200 {
            let m = random_model(&mut rng, &vocab, false);
            let feats: Vec<FeatureVector> = (0..4)
                .map(|_| fv(&[vocab[rng.random_range(0..4)], vocab[rng.random_range(0..4)]]))
                .collect();
            let tags: Vec<usize> = (0..4).map(|_| rng.random_range(0..N)).collect();
            let labels: Vec<TagLabel> = tags.iter().map(|&i| TagLabel::from_index(i).unwrap()).collect();
            let got = score_sequence(&m, &feats, &labels).unwrap();
            assert!((got - oracle_score(&m, &feats, &tags)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_model_ties_to_first_label() {
        let m = Model::zero(Layer::Condition);
        let p = viterbi_2best(&m, &[fv(&["x"]), fv(&["y"]), fv(&["z"])]).unwrap();
        assert_eq!(p.tags, vec![TagLabel::O; 3]);
        assert_eq!(p.score_best, 0.0);
        assert_eq!(p.score_second, 0.0);
        assert_eq!(p.confidence, 0.0);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(viterbi_2best(&Model::zero(Layer::Fact), &[]).is_err());
    }

    #[test]
    fn viterbi_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vocab = ["a", "b", "c"];
        for trial in 0..60 {
            let integer = trial % 2 == 0;
            let m = random_model(&mut rng, &vocab, integer);
            let len = 1 + trial % 4;
            let feats: Vec<FeatureVector> = (0..len).map(|_| fv(&[vocab[rng.random_range(0..3)]])).collect();
            let (tags, best, second) = brute_force(&m, &feats);
            let p = viterbi_2best(&m, &feats).unwrap();
            let got: Vec<usize> = p.tags.iter().map(|t| t.index()).collect();
            assert_eq!(got, tags, "trial {trial}");
            assert!((p.score_best - best).abs() < 1e-9);
            assert!((p.score_second - second).abs() < 1e-9);
        }
    }

    #[test]
    fn confidence_is_monotone_and_bounded() {
        let mut last = -1.0;
        for i in 0..100 {
            let c = margin_confidence(i as f64 * 0.5, 0.0, 3);
            assert!((0.0..1.0).contains(&c));
            assert!(c > last);
            last = c;
        }
        assert_eq!(margin_confidence(1.0, 2.0, 2), 0.0);
    }

    #[test]
    fn model_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_model(&mut rng, &["w0=ph", "shape=aA"], false);
        let text = m.to_json();
        let back = Model::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert!(text.starts_with("{\"config\":"));
        assert!(text.contains("\"w0=ph\\u0001B-SC\"") || text.contains("w0=ph\u{1}"));
    }

    #[test]
    fn model_rejects_bad_labels() {
        let text = Model::zero(Layer::Fact).to_json().replace("\"B-SC\",", "");
        assert!(Model::from_json(&text).is_err());
    }

    #[test]
    fn train_rejects_empty_and_mismatched() {
        assert!(matches!(train(&[], Layer::Fact, 5, 1), Err(Error::Empty(_))));
        let s = Sentence::new("d", 4, "a b");
        let bad = LabeledSentence {
            sentence: s,
            fact_tags: vec![TagLabel::O],
            cond_tags: vec![TagLabel::O; 2],
            pos: None,
        };
        let err = train(&[bad], Layer::Fact, 5, 1).unwrap_err();
        assert!(err.to_string().contains("d#4"), "{err}");
    }
}
