//! `biocs` command line. Batch stages run in-process; `serve` hosts the read
//! API and `query --server` talks to a running one.

pub mod config;
mod render;

use std::collections::{BTreeSet, HashMap};
use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use biocs::api::DEFAULT_EGO_LIMIT;
use biocs::features::Lexicon;
use biocs::ingest::{self, Sentence};
use biocs::kg::{Direction, EgoGraph, KnowledgeGraph};
use biocs::pipeline::Extractor;
use biocs::schema::{decode, LabeledSentence, Layer, Statement};
use biocs::selftrain;
use biocs::statements::{read_statements, write_statements, StatementRecord};
use biocs::tagger::{train_with_lexicon, Model};
use biocs::tsv;
use clap::{Args, Parser, Subcommand};

use config::AppConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "biocs",
    version,
    about = "Fact/condition tuple extraction and conditional knowledge graphs"
)]
pub struct Cli {
    /// JSON config file; flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a JSONL corpus of {doc_id, text} into tokenized sentences
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one tag layer from a labeled TSV file
    Train(TrainArgs),
    /// Grow the training set with confident predictions over an unlabeled pool
    Selftrain(SelftrainArgs),
    /// Tag sentences and write statement records
    Extract(ExtractArgs),
    /// Fold statement records into a knowledge graph directory
    BuildKg {
        #[arg(long)]
        statements: PathBuf,
        #[arg(long)]
        kg: Option<PathBuf>,
    },
    /// Show the edges around a concept
    Query(QueryArgs),
    /// Serve the read API over a built knowledge graph
    Serve {
        #[arg(long)]
        kg: Option<PathBuf>,
        #[arg(long, value_name = "HOST:PORT")]
        addr: Option<SocketAddr>,
        /// directory of static files served at /
        #[arg(long = "static", value_name = "DIR")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    labeled: PathBuf,
    /// output path; defaults to the configured model for the layer
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value = "fact")]
    layer: Layer,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelftrainArgs {
    /// seed training set (TSV)
    #[arg(long)]
    labeled: PathBuf,
    /// unlabeled sentences (JSONL from `ingest`)
    #[arg(long)]
    pool: PathBuf,
    #[arg(long)]
    fact_model: Option<PathBuf>,
    #[arg(long)]
    cond_model: Option<PathBuf>,
    /// where to write the iteration report (JSON)
    #[arg(long)]
    report: Option<PathBuf>,
    /// where to write the final training set (TSV)
    #[arg(long)]
    augmented: Option<PathBuf>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    min_new: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// sentences JSONL from `ingest`
    #[arg(long)]
    sentences: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, conflicts_with = "gold")]
    fact_model: Option<PathBuf>,
    #[arg(long, conflicts_with = "gold")]
    cond_model: Option<PathBuf>,
    /// take tags from a labeled TSV instead of the models
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[arg(long, conflicts_with = "server")]
    kg: Option<PathBuf>,
    /// base URL of a running `biocs serve`
    #[arg(long)]
    server: Option<String>,
    #[arg(long)]
    concept: String,
    /// comma-separated predicate filter, matched on lemmas
    #[arg(long, value_delimiter = ',')]
    predicates: Vec<String>,
    #[arg(long, default_value = "both")]
    direction: Direction,
    #[arg(long, default_value_t = DEFAULT_EGO_LIMIT)]
    limit: usize,
    #[arg(long)]
    json: bool,
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let config = match &cli.config {
        Some(path) => match AppConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e:#}");
                return EXIT_DATA;
            }
        },
        None => AppConfig::default(),
    };
    match dispatch(cli.command, &config) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_DATA
        }
    }
}

fn dispatch(command: Command, config: &AppConfig) -> anyhow::Result<()> {
    match command {
        Command::Ingest { corpus, out } => {
            let n = ingest::ingest(&corpus, &out)?;
            eprintln!("wrote {n} sentences to {}", out.display());
            Ok(())
        }
        Command::Train(args) => train(args, config),
        Command::Selftrain(args) => self_train(args, config),
        Command::Extract(args) => extract(args, config),
        Command::BuildKg { statements, kg } => {
            let dir = kg.unwrap_or_else(|| config.paths.kg.clone());
            let records = read_statements(&statements)?;
            let graph = KnowledgeGraph::from_records(&records)?;
            graph.save(&dir)?;
            eprintln!(
                "{} statements -> {} concepts, {} edges in {}",
                records.len(),
                graph.nodes.len(),
                graph.edges.len(),
                dir.display()
            );
            Ok(())
        }
        Command::Query(args) => query(args, config),
        Command::Serve { kg, addr, static_dir } => {
            let dir = kg.unwrap_or_else(|| config.paths.kg.clone());
            let addr = addr.unwrap_or(config.serve.addr);
            let static_dir = static_dir.or_else(|| config.serve.static_dir.clone());
            let graph = KnowledgeGraph::load(&dir)?;
            let _ = tracing_subscriber::fmt().with_writer(std::io::stderr).try_init();
            runtime()?.block_on(biocs_service::serve(graph, addr, static_dir))?;
            Ok(())
        }
    }
}

fn runtime() -> anyhow::Result<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("starting async runtime")
}

fn lexicon(flag: Option<PathBuf>, config: &AppConfig) -> anyhow::Result<Option<Lexicon>> {
    match flag.or_else(|| config.paths.lexicon.clone()) {
        Some(path) => Ok(Some(Lexicon::load(&path)?)),
        None => Ok(None),
    }
}

fn train(args: TrainArgs, config: &AppConfig) -> anyhow::Result<()> {
    let model_path = args.model.unwrap_or_else(|| match args.layer {
        Layer::Fact => config.paths.fact_model.clone(),
        Layer::Condition => config.paths.cond_model.clone(),
    });
    let epochs = args.epochs.unwrap_or(config.tagger.epochs);
    let seed = args.seed.unwrap_or(config.tagger.seed);
    if epochs == 0 {
        bail!("--epochs must be positive");
    }
    let lexicon = lexicon(args.lexicon, config)?;
    let labeled = tsv::read_labeled(&args.labeled)?;
    let model = train_with_lexicon(&labeled, args.layer, epochs, seed, lexicon.as_ref())?;
    ensure_parent(&model_path)?;
    model.save(&model_path)?;
    eprintln!(
        "trained {} layer on {} sentences -> {}",
        args.layer,
        labeled.len(),
        model_path.display()
    );
    Ok(())
}

fn self_train(args: SelftrainArgs, config: &AppConfig) -> anyhow::Result<()> {
    let mut params = config.selftrain.clone();
    if let Some(v) = args.tau {
        params.tau = v;
    }
    if let Some(v) = args.cap {
        params.cap = v;
    }
    if let Some(v) = args.max_iters {
        params.max_iters = v;
    }
    if let Some(v) = args.min_new {
        params.min_new = v;
    }
    if let Some(v) = args.epochs {
        params.epochs = v;
    }
    if let Some(v) = args.seed {
        params.seed = v;
    }
    let fact_path = args.fact_model.unwrap_or_else(|| config.paths.fact_model.clone());
    let cond_path = args.cond_model.unwrap_or_else(|| config.paths.cond_model.clone());
    let lexicon = lexicon(args.lexicon, config)?;

    let seed_set = tsv::read_labeled(&args.labeled)?;
    let pool = ingest::read_sentences(&args.pool)?;
    let outcome = selftrain::run(&seed_set, &pool, &params, lexicon.as_ref())?;

    for path in [&fact_path, &cond_path] {
        ensure_parent(path)?;
    }
    outcome.fact_model.save(&fact_path)?;
    outcome.cond_model.save(&cond_path)?;
    if let Some(path) = &args.report {
        ensure_parent(path)?;
        outcome.report.save(path)?;
    }
    if let Some(path) = &args.augmented {
        ensure_parent(path)?;
        tsv::write_labeled(path, &outcome.training_set)?;
    }
    eprintln!(
        "{} iterations, training set {} -> {}",
        outcome.report.iterations.len(),
        seed_set.len(),
        outcome.report.final_training_size
    );
    Ok(())
}

fn extract(args: ExtractArgs, config: &AppConfig) -> anyhow::Result<()> {
    let sentences = ingest::read_sentences(&args.sentences)?;
    let statements = match &args.gold {
        Some(gold) => gold_statements(&sentences, gold)?,
        None => {
            let fact_path = args.fact_model.unwrap_or_else(|| config.paths.fact_model.clone());
            let cond_path = args.cond_model.unwrap_or_else(|| config.paths.cond_model.clone());
            let fact = load_model(&fact_path, Layer::Fact)?;
            let cond = load_model(&cond_path, Layer::Condition)?;
            let lexicon = lexicon(args.lexicon, config)?;
            Extractor {
                fact: &fact,
                cond: &cond,
                lexicon: lexicon.as_ref(),
            }
            .extract_all(&sentences)?
        }
    };
    let mut warnings = 0;
    let records: Vec<StatementRecord> = statements
        .iter()
        .zip(&sentences)
        .map(|(st, s)| {
            for w in &st.warnings {
                warnings += 1;
                eprintln!(
                    "warning: {}#{} {} {}: {}",
                    s.doc_id, s.sent_index, w.layer, w.span, w.reason
                );
            }
            StatementRecord::new(st, s)
        })
        .collect();
    ensure_parent(&args.out)?;
    write_statements(&args.out, &records)?;
    let facts: usize = records.iter().map(|r| r.facts.len()).sum();
    eprintln!(
        "{} sentences -> {facts} facts ({warnings} warnings) in {}",
        records.len(),
        args.out.display()
    );
    Ok(())
}

fn load_model(path: &Path, layer: Layer) -> anyhow::Result<Model> {
    let model = Model::load(path)?;
    if model.layer() != layer {
        bail!("{} holds a {} model, expected {layer}", path.display(), model.layer());
    }
    Ok(model)
}

/// Decodes gold tags aligned to the ingested sentences by (doc_id, sent_index).
/// Every sentence must have a labeled counterpart with identical tokens.
fn gold_statements(sentences: &[Sentence], gold: &Path) -> anyhow::Result<Vec<Statement>> {
    let labeled = tsv::read_labeled(gold)?;
    let mut by_key: HashMap<(&str, usize), &LabeledSentence> = HashMap::new();
    for ls in &labeled {
        let key = (ls.sentence.doc_id.as_str(), ls.sentence.sent_index);
        if by_key.insert(key, ls).is_some() {
            bail!("{}: duplicate sentence {}#{}", gold.display(), key.0, key.1);
        }
    }
    sentences
        .iter()
        .map(|s| {
            let Some(ls) = by_key.get(&(s.doc_id.as_str(), s.sent_index)) else {
                bail!("{}: no gold tags for {}#{}", gold.display(), s.doc_id, s.sent_index);
            };
            let ours = s.tokens.iter().map(|t| t.text.as_str());
            let theirs = ls.sentence.tokens.iter().map(|t| t.text.as_str());
            if !ours.eq(theirs) {
                bail!(
                    "{}: tokens of {}#{} differ from the ingested sentence",
                    gold.display(),
                    s.doc_id,
                    s.sent_index
                );
            }
            let statement = decode(&LabeledSentence {
                sentence: s.clone(),
                fact_tags: ls.fact_tags.clone(),
                cond_tags: ls.cond_tags.clone(),
                pos: None,
            })?;
            Ok(statement)
        })
        .collect()
}

fn query(args: QueryArgs, config: &AppConfig) -> anyhow::Result<()> {
    let predicates: BTreeSet<String> = args
        .predicates
        .iter()
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect();
    let ego: EgoGraph = match &args.server {
        Some(url) => {
            let client = biocs_client::Client::new(url.as_str());
            let mut q = biocs_client::EgoQuery::new(args.concept.as_str());
            q.predicates = predicates.into_iter().collect();
            q.direction = args.direction;
            q.limit = Some(args.limit);
            runtime()?.block_on(client.ego(&q))?
        }
        None => {
            let dir = args.kg.unwrap_or_else(|| config.paths.kg.clone());
            KnowledgeGraph::load(&dir)?.query_ego(&args.concept, &predicates, args.direction, args.limit)
        }
    };
    let text = if args.json {
        serde_json::to_string_pretty(&ego)? + "\n"
    } else {
        render::table(&ego)
    };
    emit(&text)
}

/// Writes to stdout; a reader that hangs up early (`| head`) is not an error.
fn emit(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e).context("writing to stdout"),
        _ => Ok(()),
    }
}

fn ensure_parent(path: &Path) -> anyhow::Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
        }
        _ => Ok(()),
    }
}
