//! Wire types of the read-only HTTP API that are not graph types themselves.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

pub const DEFAULT_CONCEPT_LIMIT: usize = 20;
pub const DEFAULT_EGO_LIMIT: usize = 50;
