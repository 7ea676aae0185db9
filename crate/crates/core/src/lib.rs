//! Structuring conditional statements from biological text into fact and
//! condition tuples, and aggregating them into a conditional knowledge graph.

pub mod api;
pub mod error;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod jsonl;
pub mod kg;
pub mod pipeline;
pub mod schema;
pub mod selftrain;
pub mod statements;
pub mod synth;
pub mod tagger;
pub mod tsv;

pub use error::{Error, Result};
