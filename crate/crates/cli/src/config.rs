use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::Context;
use biocs::selftrain::SelfTrainParams;
use serde::Deserialize;

/// Optional JSON config file. Every field has a default and every command
/// line flag wins over the file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub paths: Paths,
    pub tagger: TaggerParams,
    pub selftrain: SelfTrainParams,
    pub serve: ServeParams,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub fact_model: PathBuf,
    pub cond_model: PathBuf,
    pub kg: PathBuf,
    pub lexicon: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            fact_model: PathBuf::from("models/fact.json"),
            cond_model: PathBuf::from("models/condition.json"),
            kg: PathBuf::from("kg"),
            lexicon: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaggerParams {
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TaggerParams {
    fn default() -> Self {
        TaggerParams { epochs: 20, seed: 42 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeParams {
    pub addr: SocketAddr,
    pub static_dir: Option<PathBuf>,
}

impl Default for ServeParams {
    fn default() -> Self {
        ServeParams {
            addr: SocketAddr::from(([127, 0, 0, 1], 8080)),
            static_dir: None,
        }
    }
}

impl AppConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg: AppConfig = serde_json::from_str(r#"{"tagger":{"epochs":3},"selftrain":{"tau":0.9}}"#).unwrap();
        assert_eq!(cfg.tagger.epochs, 3);
        assert_eq!(cfg.tagger.seed, 42);
        assert_eq!(cfg.selftrain.tau, 0.9);
        assert_eq!(cfg.selftrain.cap, 500);
        assert_eq!(cfg.serve.addr.port(), 8080);
        assert_eq!(cfg.paths.kg, PathBuf::from("kg"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<AppConfig>(r#"{"tager":{}}"#).is_err());
        assert!(serde_json::from_str::<AppConfig>(r#"{"serve":{"port":1}}"#).is_err());
    }
}
