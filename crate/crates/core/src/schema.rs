//! Two-layer BIO tag schema.
//!
//! Every sentence carries two parallel tag sequences, one for fact tuples and
//! one for condition tuples, so a token can serve both a fact and the
//! condition qualifying it. Each layer uses the same five argument roles.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ingest::Sentence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    SubjectConcept,
    SubjectAttribute,
    Predicate,
    ObjectConcept,
    ObjectAttribute,
}

impl Role {
    pub const ALL: [Role; 5] = [
        Role::SubjectConcept,
        Role::SubjectAttribute,
        Role::Predicate,
        Role::ObjectConcept,
        Role::ObjectAttribute,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Role::SubjectConcept => "SC",
            Role::SubjectAttribute => "SA",
            Role::Predicate => "P",
            Role::ObjectConcept => "OC",
            Role::ObjectAttribute => "OA",
        }
    }

    fn position(self) -> usize {
        Role::ALL.iter().position(|&r| r == self).unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Fact,
    Condition,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layer::Fact => "fact",
            Layer::Condition => "condition",
        })
    }
}

impl FromStr for Layer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fact" => Ok(Layer::Fact),
            "condition" | "cond" => Ok(Layer::Condition),
            other => Err(Error::InvalidParameter(format!("unknown layer {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TagLabel {
    O,
    B(Role),
    I(Role),
}

impl TagLabel {
    /// Labels per layer: `O` plus `B`/`I` for each role.
    pub const COUNT: usize = 11;

    /// Canonical label order. Index 0 is `O`; decoding breaks ties towards lower indices.
    pub fn all() -> [TagLabel; TagLabel::COUNT] {
        let mut out = [TagLabel::O; TagLabel::COUNT];
        for (i, role) in Role::ALL.iter().enumerate() {
            out[1 + 2 * i] = TagLabel::B(*role);
            out[2 + 2 * i] = TagLabel::I(*role);
        }
        out
    }

    pub fn index(self) -> usize {
        match self {
            TagLabel::O => 0,
            TagLabel::B(r) => 1 + 2 * r.position(),
            TagLabel::I(r) => 2 + 2 * r.position(),
        }
    }

    pub fn from_index(index: usize) -> Option<TagLabel> {
        TagLabel::all().get(index).copied()
    }

    pub fn role(self) -> Option<Role> {
        match self {
            TagLabel::O => None,
            TagLabel::B(r) | TagLabel::I(r) => Some(r),
        }
    }
}

impl fmt::Display for TagLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TagLabel::O => f.write_str("O"),
            TagLabel::B(r) => write!(f, "B-{}", r.code()),
            TagLabel::I(r) => write!(f, "I-{}", r.code()),
        }
    }
}

impl FromStr for TagLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TagLabel::all()
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| Error::InvalidTags(format!("unknown tag {s:?}")))
    }
}

impl Serialize for TagLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TagLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn is_bio_valid(tags: &[TagLabel]) -> bool {
    tags.iter().enumerate().all(|(t, tag)| match tag {
        TagLabel::I(r) => t > 0 && tags[t - 1].role() == Some(*r),
        _ => true,
    })
}

/// Rewrites every `I-r` not preceded by `B-r`/`I-r` into `B-r`.
pub fn repair_bio(tags: &[TagLabel]) -> Vec<TagLabel> {
    let mut out: Vec<TagLabel> = Vec::with_capacity(tags.len());
    for &tag in tags {
        let fixed = match tag {
            TagLabel::I(r) if out.last().and_then(|p| p.role()) != Some(r) => TagLabel::B(r),
            other => other,
        };
        out.push(fixed);
    }
    out
}

/// Half-open token interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Token gap between two spans; 0 when they touch or overlap.
    pub fn distance(&self, other: &Span) -> usize {
        other
            .start
            .saturating_sub(self.end)
            .max(self.start.saturating_sub(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phrase {
    pub span: Span,
    pub text: String,
}

impl Phrase {
    pub fn new(sentence: &Sentence, span: Span) -> Self {
        Phrase {
            span,
            text: sentence.surface(span.start, span.end),
        }
    }
}

/// `{concept: attribute}` argument; the attribute is optional.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntityMention {
    pub concept: Phrase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute: Option<Phrase>,
}

impl EntityMention {
    pub fn new(sentence: &Sentence, concept: Span, attribute: Option<Span>) -> Self {
        EntityMention {
            concept: Phrase::new(sentence, concept),
            attribute: attribute.map(|a| Phrase::new(sentence, a)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactTuple {
    pub subject: EntityMention,
    pub predicate: Phrase,
    pub object: EntityMention,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConditionTuple {
    pub subject: EntityMention,
    pub predicate: Phrase,
    pub object: EntityMention,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeWarning {
    pub layer: Layer,
    pub span: Span,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statement {
    pub doc_id: String,
    pub sent_index: usize,
    pub facts: Vec<FactTuple>,
    pub conditions: Vec<ConditionTuple>,
    /// fact index -> indices of the conditions qualifying it
    pub attachment: BTreeMap<usize, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<DecodeWarning>,
}

impl Statement {
    pub fn conditions_of(&self, fact: usize) -> impl Iterator<Item = &ConditionTuple> {
        self.attachment
            .get(&fact)
            .into_iter()
            .flatten()
            .map(move |&c| &self.conditions[c])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub sentence: Sentence,
    pub fact_tags: Vec<TagLabel>,
    pub cond_tags: Vec<TagLabel>,
    /// Optional part-of-speech column, one entry per token.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Vec<String>>,
}

impl LabeledSentence {
    pub fn tags(&self, layer: Layer) -> &[TagLabel] {
        match layer {
            Layer::Fact => &self.fact_tags,
            Layer::Condition => &self.cond_tags,
        }
    }

    /// Checks tag lengths and BIO validity of both layers.
    pub fn validate(&self) -> Result<()> {
        let n = self.sentence.len();
        let name = format!("{}#{}", self.sentence.doc_id, self.sentence.sent_index);
        for layer in [Layer::Fact, Layer::Condition] {
            let tags = self.tags(layer);
            if tags.len() != n {
                return Err(Error::LengthMismatch(format!(
                    "sentence {name}: {} {layer} tags for {n} tokens",
                    tags.len()
                )));
            }
            if !is_bio_valid(tags) {
                return Err(Error::InvalidTags(format!(
                    "sentence {name}: {layer} layer is not BIO-valid"
                )));
            }
        }
        if let Some(pos) = &self.pos {
            if pos.len() != n {
                return Err(Error::LengthMismatch(format!(
                    "sentence {name}: {} POS tags for {n} tokens",
                    pos.len()
                )));
            }
        }
        Ok(())
    }
}

fn mention_spans(m: &EntityMention, concept: Role, attribute: Role) -> Vec<(Role, Span)> {
    let mut out = vec![(concept, m.concept.span)];
    if let Some(a) = &m.attribute {
        out.push((attribute, a.span));
    }
    out
}

fn tuple_spans(subject: &EntityMention, predicate: &Phrase, object: &EntityMention) -> Vec<(Role, Span)> {
    let mut out = mention_spans(subject, Role::SubjectConcept, Role::SubjectAttribute);
    out.push((Role::Predicate, predicate.span));
    out.extend(mention_spans(object, Role::ObjectConcept, Role::ObjectAttribute));
    out
}

fn encode_layer(n: usize, layer: Layer, spans: &[(Role, Span)]) -> Result<Vec<TagLabel>> {
    let mut slots: Vec<Option<(Role, Span)>> = vec![None; n];
    for &(role, span) in spans {
        if span.is_empty() || span.end > n {
            return Err(Error::InvalidSpan(format!(
                "{layer} {} span {span} outside 0..{n}",
                role.code()
            )));
        }
        for slot in &mut slots[span.start..span.end] {
            match slot {
                None => *slot = Some((role, span)),
                Some(existing) if *existing == (role, span) => {}
                Some((other_role, other_span)) => {
                    return Err(Error::SpanConflict {
                        layer: layer.to_string(),
                        message: format!("{} {} overlaps {} {}", role.code(), span, other_role.code(), other_span),
                    })
                }
            }
        }
    }
    Ok(slots
        .iter()
        .enumerate()
        .map(|(pos, slot)| match slot {
            None => TagLabel::O,
            Some((role, span)) if span.start == pos => TagLabel::B(*role),
            Some((role, _)) => TagLabel::I(*role),
        })
        .collect())
}

/// Encodes gold tuples into the fact and condition tag layers.
pub fn encode(
    sentence: &Sentence,
    facts: &[FactTuple],
    conditions: &[ConditionTuple],
) -> Result<(Vec<TagLabel>, Vec<TagLabel>)> {
    let fact_spans: Vec<_> = facts
        .iter()
        .flat_map(|f| tuple_spans(&f.subject, &f.predicate, &f.object))
        .collect();
    let cond_spans: Vec<_> = conditions
        .iter()
        .flat_map(|c| tuple_spans(&c.subject, &c.predicate, &c.object))
        .collect();
    Ok((
        encode_layer(sentence.len(), Layer::Fact, &fact_spans)?,
        encode_layer(sentence.len(), Layer::Condition, &cond_spans)?,
    ))
}

/// Maximal runs of one role in a BIO-valid sequence.
pub fn collect_spans(tags: &[TagLabel]) -> Vec<(Role, Span)> {
    let mut spans: Vec<(Role, Span)> = Vec::new();
    for (pos, tag) in tags.iter().enumerate() {
        match *tag {
            TagLabel::O => {}
            TagLabel::B(r) => spans.push((r, Span::new(pos, pos + 1))),
            TagLabel::I(r) => match spans.last_mut() {
                Some((last, span)) if *last == r && span.end == pos => span.end = pos + 1,
                _ => spans.push((r, Span::new(pos, pos + 1))),
            },
        }
    }
    spans
}

struct RawTuple {
    subject: (Span, Option<Span>),
    predicate: Span,
    object: (Span, Option<Span>),
}

fn nearest(candidates: &[Span], target: &Span) -> Option<Span> {
    candidates.iter().min_by_key(|c| (c.distance(target), c.start)).copied()
}

/// Pairs every attribute span with its nearest concept span. Ties go to the
/// concept that follows the attribute ("the activity of X"). When several
/// attributes compete for one concept the closest wins.
fn attach_attributes(
    attributes: &[Span],
    concepts: &[Span],
    layer: Layer,
    warnings: &mut Vec<DecodeWarning>,
) -> BTreeMap<Span, Span> {
    let mut best: BTreeMap<Span, (usize, Span)> = BTreeMap::new();
    for attr in attributes {
        let chosen = concepts
            .iter()
            .min_by_key(|c| (c.distance(attr), c.start < attr.start, c.start))
            .copied();
        let Some(concept) = chosen else {
            warnings.push(DecodeWarning {
                layer,
                span: *attr,
                reason: "attribute without a concept".into(),
            });
            continue;
        };
        let d = concept.distance(attr);
        match best.get(&concept) {
            Some(&(prev, _)) if prev <= d => warnings.push(DecodeWarning {
                layer,
                span: *attr,
                reason: format!("concept {concept} already has a closer attribute"),
            }),
            Some(&(_, loser)) => {
                warnings.push(DecodeWarning {
                    layer,
                    span: loser,
                    reason: format!("concept {concept} already has a closer attribute"),
                });
                best.insert(concept, (d, *attr));
            }
            None => {
                best.insert(concept, (d, *attr));
            }
        }
    }
    best.into_iter().map(|(c, (_, a))| (c, a)).collect()
}

fn group_layer(tags: &[TagLabel], layer: Layer, warnings: &mut Vec<DecodeWarning>) -> Vec<RawTuple> {
    let spans = collect_spans(tags);
    let of_role = |role: Role| -> Vec<Span> { spans.iter().filter(|(r, _)| *r == role).map(|(_, s)| *s).collect() };
    let subj_concepts = of_role(Role::SubjectConcept);
    let obj_concepts = of_role(Role::ObjectConcept);
    let subj_attrs = attach_attributes(&of_role(Role::SubjectAttribute), &subj_concepts, layer, warnings);
    let obj_attrs = attach_attributes(&of_role(Role::ObjectAttribute), &obj_concepts, layer, warnings);

    let mut tuples = Vec::new();
    for pred in of_role(Role::Predicate) {
        let subject = subj_concepts
            .iter()
            .filter(|c| c.end <= pred.start)
            .max_by_key(|c| c.end)
            .copied()
            .or_else(|| nearest(&subj_concepts, &pred));
        let object = obj_concepts
            .iter()
            .filter(|c| c.start >= pred.end)
            .min_by_key(|c| c.start)
            .copied()
            .or_else(|| nearest(&obj_concepts, &pred));
        match (subject, object) {
            (Some(s), Some(o)) => tuples.push(RawTuple {
                subject: (s, subj_attrs.get(&s).copied()),
                predicate: pred,
                object: (o, obj_attrs.get(&o).copied()),
            }),
            (s, _) => warnings.push(DecodeWarning {
                layer,
                span: pred,
                reason: if s.is_none() {
                    "predicate without a subject concept".into()
                } else {
                    "predicate without an object concept".into()
                },
            }),
        }
    }
    tuples
}

/// Decodes both tag layers into tuples and links conditions to facts.
/// Tag sequences are BIO-repaired first.
pub fn decode(labeled: &LabeledSentence) -> Result<Statement> {
    let sentence = &labeled.sentence;
    let n = sentence.len();
    for layer in [Layer::Fact, Layer::Condition] {
        let len = labeled.tags(layer).len();
        if len != n {
            return Err(Error::LengthMismatch(format!(
                "{len} {layer} tags for {n} tokens in {}#{}",
                sentence.doc_id, sentence.sent_index
            )));
        }
    }
    let mut warnings = Vec::new();
    let mention = |(c, a): (Span, Option<Span>)| EntityMention::new(sentence, c, a);

    let facts: Vec<FactTuple> = group_layer(&repair_bio(&labeled.fact_tags), Layer::Fact, &mut warnings)
        .into_iter()
        .map(|t| FactTuple {
            subject: mention(t.subject),
            predicate: Phrase::new(sentence, t.predicate),
            object: mention(t.object),
            confidence: 1.0,
        })
        .collect();
    let conditions: Vec<ConditionTuple> = group_layer(&repair_bio(&labeled.cond_tags), Layer::Condition, &mut warnings)
        .into_iter()
        .map(|t| ConditionTuple {
            subject: mention(t.subject),
            predicate: Phrase::new(sentence, t.predicate),
            object: mention(t.object),
        })
        .collect();
    let attachment = attach_conditions(&facts, &conditions);
    Ok(Statement {
        doc_id: sentence.doc_id.clone(),
        sent_index: sentence.sent_index,
        facts,
        conditions,
        attachment,
        warnings,
    })
}

/// Links each condition to every fact sharing a concept surface with it
/// (case-insensitive), falling back to all facts of the sentence.
pub fn attach_conditions(facts: &[FactTuple], conditions: &[ConditionTuple]) -> BTreeMap<usize, Vec<usize>> {
    let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    if facts.is_empty() {
        return map;
    }
    let fact_concepts: Vec<[String; 2]> = facts
        .iter()
        .map(|f| {
            [
                f.subject.concept.text.to_lowercase(),
                f.object.concept.text.to_lowercase(),
            ]
        })
        .collect();
    for (ci, cond) in conditions.iter().enumerate() {
        let keys = [
            cond.subject.concept.text.to_lowercase(),
            cond.object.concept.text.to_lowercase(),
        ];
        let matching: Vec<usize> = fact_concepts
            .iter()
            .enumerate()
            .filter(|(_, fc)| fc.iter().any(|c| keys.contains(c)))
            .map(|(fi, _)| fi)
            .collect();
        let targets = if matching.is_empty() {
            (0..facts.len()).collect()
        } else {
            matching
        };
        for fi in targets {
            map.entry(fi).or_default().push(ci);
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use Role::*;
    use TagLabel::{B, I, O};

    fn worked_sentence() -> Sentence {
        Sentence::new(
            "ex",
            0,
            "alkaline pH increases the activity of TRPV5/V6 channels in Jurkat T cells",
        )
    }

    fn worked_tuples(s: &Sentence) -> (FactTuple, ConditionTuple) {
        let fact = FactTuple {
            subject: EntityMention::new(s, Span::new(0, 2), None),
            predicate: Phrase::new(s, Span::new(2, 3)),
            object: EntityMention::new(s, Span::new(6, 8), Some(Span::new(4, 5))),
            confidence: 1.0,
        };
        let cond = ConditionTuple {
            subject: EntityMention::new(s, Span::new(6, 8), None),
            predicate: Phrase::new(s, Span::new(8, 9)),
            object: EntityMention::new(s, Span::new(9, 12), None),
        };
        (fact, cond)
    }

    fn parse(tags: &str) -> Vec<TagLabel> {
        tags.split_whitespace().map(|t| t.parse().unwrap()).collect()
    }

    #[test]
    fn tag_set_has_eleven_labels_in_order() {
        let all = TagLabel::all();
        assert_eq!(all.len(), 11);
        let names: Vec<String> = all.iter().map(|t| t.to_string()).collect();
        assert_eq!(
            names,
            ["O", "B-SC", "I-SC", "B-SA", "I-SA", "B-P", "I-P", "B-OC", "I-OC", "B-OA", "I-OA"]
        );
        for (i, t) in all.iter().enumerate() {
            assert_eq!(t.index(), i);
            assert_eq!(TagLabel::from_index(i), Some(*t));
        }
        assert_eq!(TagLabel::from_index(11), None);
        assert!("B-XX".parse::<TagLabel>().is_err());
    }

    #[test]
    fn encodes_worked_example() {
        let s = worked_sentence();
        let (fact, cond) = worked_tuples(&s);
        let (f, c) = encode(&s, &[fact], &[cond]).unwrap();
        assert_eq!(f, parse("B-SC I-SC B-P O B-OA O B-OC I-OC O O O O"));
        assert_eq!(c, parse("O O O O O O B-SC I-SC B-P B-OC I-OC I-OC"));
    }

    #[test]
    fn encode_without_tuples_is_all_o() {
        let s = worked_sentence();
        let (f, c) = encode(&s, &[], &[]).unwrap();
        assert!(f.iter().chain(&c).all(|t| *t == O));
    }

    #[test]
    fn encode_rejects_overlapping_roles() {
        let s = worked_sentence();
        let fact = FactTuple {
            subject: EntityMention::new(&s, Span::new(0, 3), None),
            predicate: Phrase::new(&s, Span::new(2, 3)),
            object: EntityMention::new(&s, Span::new(6, 8), None),
            confidence: 1.0,
        };
        let err = encode(&s, &[fact], &[]).unwrap_err();
        assert!(matches!(err, Error::SpanConflict { .. }), "{err}");
        assert!(err.to_string().contains("P 2..3"));
    }

    #[test]
    fn encode_rejects_out_of_range() {
        let s = worked_sentence();
        let (mut fact, _) = worked_tuples(&s);
        fact.object.concept.span = Span::new(10, 13);
        assert!(matches!(encode(&s, &[fact], &[]), Err(Error::InvalidSpan(_))));
    }

    #[test]
    fn decodes_worked_example() {
        let s = worked_sentence();
        let (fact, cond) = worked_tuples(&s);
        let labeled = LabeledSentence {
            sentence: s.clone(),
            fact_tags: parse("B-SC I-SC B-P O B-OA O B-OC I-OC O O O O"),
            cond_tags: parse("O O O O O O B-SC I-SC B-P B-OC I-OC I-OC"),
            pos: None,
        };
        let st = decode(&labeled).unwrap();
        assert_eq!(st.facts, vec![fact]);
        assert_eq!(st.conditions, vec![cond]);
        assert_eq!(st.facts[0].object.attribute.as_ref().unwrap().text, "activity");
        assert_eq!(st.conditions[0].object.concept.text, "Jurkat T cells");
        assert_eq!(st.attachment, BTreeMap::from([(0, vec![0])]));
        assert!(st.warnings.is_empty());
    }

    #[test]
    fn decodes_all_o() {
        let s = worked_sentence();
        let labeled = LabeledSentence {
            fact_tags: vec![O; s.len()],
            cond_tags: vec![O; s.len()],
            sentence: s,
            pos: None,
        };
        let st = decode(&labeled).unwrap();
        assert!(st.facts.is_empty() && st.conditions.is_empty() && st.attachment.is_empty());
    }

    #[test]
    fn two_predicates_share_one_object() {
        // alkaline pH increases but acidic pH reduces the activity of TRPV5/V6 channels
        let s = Sentence::new(
            "ex",
            1,
            "alkaline pH increases but acidic pH reduces the activity of TRPV5/V6 channels",
        );
        let labeled = LabeledSentence {
            fact_tags: parse("B-SC I-SC B-P O B-SC I-SC B-P O B-OA O B-OC I-OC"),
            cond_tags: vec![O; 12],
            sentence: s,
            pos: None,
        };
        let st = decode(&labeled).unwrap();
        assert_eq!(st.facts.len(), 2);
        let summary: Vec<(String, String, String, Option<String>)> = st
            .facts
            .iter()
            .map(|f| {
                (
                    f.subject.concept.text.clone(),
                    f.predicate.text.clone(),
                    f.object.concept.text.clone(),
                    f.object.attribute.as_ref().map(|a| a.text.clone()),
                )
            })
            .collect();
        let activity = Some("activity".to_string());
        assert_eq!(
            summary,
            vec![
                (
                    "alkaline pH".into(),
                    "increases".into(),
                    "TRPV5/V6 channels".into(),
                    activity.clone()
                ),
                (
                    "acidic pH".into(),
                    "reduces".into(),
                    "TRPV5/V6 channels".into(),
                    activity
                ),
            ]
        );
    }

    #[test]
    fn predicate_without_concepts_is_dropped_with_warning() {
        let s = Sentence::new("ex", 0, "A increases B");
        let labeled = LabeledSentence {
            fact_tags: parse("B-SC B-P O"),
            cond_tags: parse("O B-P O"),
            sentence: s,
            pos: None,
        };
        let st = decode(&labeled).unwrap();
        assert!(st.facts.is_empty() && st.conditions.is_empty());
        assert_eq!(st.warnings.len(), 2);
        assert_eq!(st.warnings[0].reason, "predicate without an object concept");
        assert_eq!(st.warnings[1].reason, "predicate without a subject concept");
    }

    #[test]
    fn fallback_subject_right_of_predicate() {
        // passive-style order: object first, predicate, then the subject
        let s = Sentence::new("ex", 0, "apoptosis was increased by OGD");
        let labeled = LabeledSentence {
            fact_tags: parse("B-OC O B-P O B-SC"),
            cond_tags: vec![O; 5],
            sentence: s,
            pos: None,
        };
        let st = decode(&labeled).unwrap();
        assert_eq!(st.facts[0].subject.concept.text, "OGD");
        assert_eq!(st.facts[0].object.concept.text, "apoptosis");
    }

    #[test]
    fn decode_rejects_length_mismatch() {
        let s = worked_sentence();
        let labeled = LabeledSentence {
            fact_tags: vec![O; 3],
            cond_tags: vec![O; s.len()],
            sentence: s,
            pos: None,
        };
        assert!(matches!(decode(&labeled), Err(Error::LengthMismatch(_))));
    }

    #[test]
    fn repair_examples() {
        assert_eq!(
            repair_bio(&[I(SubjectConcept), I(SubjectConcept)]),
            vec![B(SubjectConcept), I(SubjectConcept)]
        );
        assert_eq!(
            repair_bio(&[O, I(Predicate), I(ObjectConcept)]),
            vec![O, B(Predicate), B(ObjectConcept)]
        );
        let valid = parse("B-SC I-SC B-P O B-OA O B-OC I-OC");
        assert_eq!(repair_bio(&valid), valid);
    }

    #[test]
    fn attach_fallback_to_all_facts() {
        let s = Sentence::new("ex", 0, "A raises B and C lowers D in E");
        let f = |a, p, b| FactTuple {
            subject: EntityMention::new(&s, Span::new(a, a + 1), None),
            predicate: Phrase::new(&s, Span::new(p, p + 1)),
            object: EntityMention::new(&s, Span::new(b, b + 1), None),
            confidence: 1.0,
        };
        let facts = vec![f(0, 1, 2), f(4, 5, 6)];
        let cond = ConditionTuple {
            subject: EntityMention::new(&s, Span::new(3, 4), None),
            predicate: Phrase::new(&s, Span::new(7, 8)),
            object: EntityMention::new(&s, Span::new(8, 9), None),
        };
        // "and" shares no concept with either fact
        let map = attach_conditions(&facts, std::slice::from_ref(&cond));
        assert_eq!(map, BTreeMap::from([(0, vec![0]), (1, vec![0])]));
        assert!(attach_conditions(&[], &[cond]).is_empty());
    }

    #[test]
    fn attach_is_case_insensitive() {
        let s = Sentence::new("ex", 0, "X raises Apoptosis ; apoptosis in Y");
        let fact = FactTuple {
            subject: EntityMention::new(&s, Span::new(0, 1), None),
            predicate: Phrase::new(&s, Span::new(1, 2)),
            object: EntityMention::new(&s, Span::new(2, 3), None),
            confidence: 1.0,
        };
        let other = FactTuple {
            subject: EntityMention::new(&s, Span::new(6, 7), None),
            predicate: Phrase::new(&s, Span::new(3, 4)),
            object: EntityMention::new(&s, Span::new(0, 1), None),
            confidence: 1.0,
        };
        let cond = ConditionTuple {
            subject: EntityMention::new(&s, Span::new(4, 5), None),
            predicate: Phrase::new(&s, Span::new(5, 6)),
            object: EntityMention::new(&s, Span::new(6, 7), None),
        };
        // matches fact 0 via "apoptosis" and fact 1 via "Y"
        let map = attach_conditions(&[fact.clone(), other], std::slice::from_ref(&cond));
        assert_eq!(map, BTreeMap::from([(0, vec![0]), (1, vec![0])]));
        let map = attach_conditions(&[fact], &[cond]);
        assert_eq!(map, BTreeMap::from([(0, vec![0])]));
    }
}
