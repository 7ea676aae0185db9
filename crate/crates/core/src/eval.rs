//! Tag- and tuple-level evaluation.

use std::collections::BTreeSet;

use crate::schema::{Layer, Span, Statement, TagLabel};

pub fn token_accuracy(gold: &[Vec<TagLabel>], predicted: &[Vec<TagLabel>]) -> f64 {
    let mut total = 0usize;
    let mut correct = 0usize;
    for (g, p) in gold.iter().zip(predicted) {
        total += g.len();
        correct += g.iter().zip(p).filter(|(a, b)| a == b).count();
    }
    if total == 0 {
        1.0
    } else {
        correct as f64 / total as f64
    }
}

type TupleKey = (Layer, Span, Option<Span>, Span, Span, Option<Span>);

/// Every tuple of a statement as an exact span signature.
pub fn tuple_keys(statement: &Statement) -> BTreeSet<TupleKey> {
    let facts = statement.facts.iter().map(|f| {
        (
            Layer::Fact,
            f.subject.concept.span,
            f.subject.attribute.as_ref().map(|a| a.span),
            f.predicate.span,
            f.object.concept.span,
            f.object.attribute.as_ref().map(|a| a.span),
        )
    });
    let conds = statement.conditions.iter().map(|c| {
        (
            Layer::Condition,
            c.subject.concept.span,
            c.subject.attribute.as_ref().map(|a| a.span),
            c.predicate.span,
            c.object.concept.span,
            c.object.attribute.as_ref().map(|a| a.span),
        )
    });
    facts.chain(conds).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Micro-averaged exact-match precision, recall and F1 over tuples.
pub fn tuple_prf(gold: &[Statement], predicted: &[Statement]) -> Prf {
    let (mut tp, mut n_gold, mut n_pred) = (0usize, 0usize, 0usize);
    for (g, p) in gold.iter().zip(predicted) {
        let g = tuple_keys(g);
        let p = tuple_keys(p);
        tp += g.intersection(&p).count();
        n_gold += g.len();
        n_pred += p.len();
    }
    let ratio = |a: usize, b: usize| if b == 0 { 1.0 } else { a as f64 / b as f64 };
    let precision = ratio(tp, n_pred);
    let recall = ratio(tp, n_gold);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Prf { precision, recall, f1 }
}
