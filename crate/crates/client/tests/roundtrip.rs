use std::path::Path;

use biocs::kg::{Direction, KnowledgeGraph};
use biocs::schema::decode;
use biocs::tsv::read_labeled;
use biocs_client::{Client, ClientError, EgoQuery};
use tokio::net::TcpListener;

async fn spawn_server() -> String {
    let gold = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/apoptosis/gold.tsv");
    let mut kg = KnowledgeGraph::new();
    for ls in read_labeled(&gold).unwrap() {
        kg.add_statement(&decode(&ls).unwrap(), &ls.sentence).unwrap();
    }
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(biocs_service::serve_on(listener, kg, None));
    format!("http://{addr}/")
}

#[tokio::test]
async fn client_talks_to_service() {
    let client = Client::new(spawn_server().await);
    assert_eq!(client.health().await.unwrap().status, "ok");

    let mut q = EgoQuery::new("Apoptosis");
    q.predicates = vec!["increase".into(), "reduce".into()];
    q.direction = Direction::In;
    let ego = client.ego(&q).await.unwrap();
    assert_eq!(ego.center.unwrap().key, "apoptosis");
    assert_eq!(ego.edges.len(), 4);

    let first = &ego.edges[0].edge.provenance[0];
    let s = client.sentence(&first.doc_id, first.sent_index).await.unwrap();
    assert_eq!(s.text, ego.edges[0].sentences[0].text);

    let concepts = client.concepts("apo", Some(5)).await.unwrap();
    assert_eq!(concepts[0].key, "apoptosis");

    let empty = client.ego(&EgoQuery::new("nonexistent")).await.unwrap();
    assert!(empty.center.is_none() && empty.edges.is_empty());

    match client.sentence("missing", 0).await {
        Err(ClientError::Api { status, message }) => {
            assert_eq!(status, 404);
            assert!(message.contains("missing#0"));
        }
        other => panic!("expected 404, got {other:?}"),
    }
}
