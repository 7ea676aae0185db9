use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use biocs::ingest::{char_slice, read_documents, split_corpus};
use biocs::kg::KnowledgeGraph;
use biocs::schema::decode;
use biocs::statements::StatementRecord;
use biocs::tsv::read_labeled;
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/apoptosis")
        .join(name)
}

#[test]
fn fixture_splits_into_two_sentences_per_abstract() {
    let docs = read_documents(&fixture("corpus.jsonl")).unwrap();
    assert_eq!(docs.len(), 6);
    let sentences = split_corpus(&docs);
    assert_eq!(sentences.len(), 12);
    for doc in &docs {
        let idx: Vec<usize> = sentences
            .iter()
            .filter(|s| s.doc_id == doc.doc_id)
            .map(|s| s.sent_index)
            .collect();
        assert_eq!(idx, vec![0, 1], "{}", doc.doc_id);
    }
    assert_eq!(split_corpus(&docs), sentences);
}

#[test]
fn token_offsets_point_back_into_sentence_text() {
    let sentences = split_corpus(&read_documents(&fixture("corpus.jsonl")).unwrap());
    for s in &sentences {
        for t in &s.tokens {
            assert_eq!(char_slice(&s.text, t.char_start, t.char_end), t.text);
        }
        let rejoined: String = s.tokens.iter().map(|t| t.text.as_str()).collect();
        let squeezed: String = s.text.split_whitespace().collect();
        assert_eq!(rejoined, squeezed, "{}#{}", s.doc_id, s.sent_index);
    }
}

#[test]
fn gold_tags_align_with_ingested_tokens() {
    let sentences = split_corpus(&read_documents(&fixture("corpus.jsonl")).unwrap());
    let gold = read_labeled(&fixture("gold.tsv")).unwrap();
    assert_eq!(gold.len(), sentences.len());
    for (g, s) in gold.iter().zip(&sentences) {
        assert_eq!((&g.sentence.doc_id, g.sentence.sent_index), (&s.doc_id, s.sent_index));
        let a: Vec<&str> = g.sentence.tokens.iter().map(|t| t.text.as_str()).collect();
        let b: Vec<&str> = s.tokens.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(a, b);
        let st = decode(g).unwrap();
        assert!(st.warnings.is_empty(), "{:?}", st.warnings);
    }
}

fn fixture_records() -> Vec<StatementRecord> {
    read_labeled(&fixture("gold.tsv"))
        .unwrap()
        .iter()
        .map(|g| StatementRecord::new(&decode(g).unwrap(), &g.sentence))
        .collect()
}

#[test]
fn fixture_graph_answers_the_apoptosis_question() {
    let kg = KnowledgeGraph::from_records(&fixture_records()).unwrap();
    let preds = BTreeSet::from(["increased".to_string(), "reduces".to_string()]);
    let ego = kg.query_ego("Apoptosis", &preds, biocs::kg::Direction::Both, 50);
    let mut subjects: Vec<&str> = ego.edges.iter().map(|e| e.edge.subj_key.as_str()).collect();
    subjects.sort();
    assert_eq!(
        subjects,
        [
            "inhibition",
            "ogd_exposure",
            "pre-ischemic_exercise",
            "rnai-mediated_knockdown"
        ]
    );
    // the distractor out-edge and the mediating edge stay out of the answer
    let all = kg.query_ego("apoptosis", &BTreeSet::new(), biocs::kg::Direction::Both, 50);
    assert_eq!(all.edges.len(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn insertion_order_and_partition_do_not_matter(
        order in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle(),
        cut in 0usize..=12,
    ) {
        let records = fixture_records();
        let reference = KnowledgeGraph::from_records(&records).unwrap();
        let shuffled: Vec<&StatementRecord> = order.iter().map(|&i| &records[i]).collect();
        prop_assert_eq!(&KnowledgeGraph::from_records(shuffled.iter().copied()).unwrap(), &reference);

        let mut left = KnowledgeGraph::from_records(shuffled[..cut].iter().copied()).unwrap();
        let right = KnowledgeGraph::from_records(shuffled[cut..].iter().copied()).unwrap();
        left.merge(&right);
        prop_assert_eq!(&left, &reference);
        left.validate().unwrap();
    }
}
