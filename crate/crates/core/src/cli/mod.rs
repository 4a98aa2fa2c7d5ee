//! Batch runner behind the `polyhallo` binary.
//!
//! Subcommands: `stats`, `score`, `eval-corr`, `eval-auc`, `rates` and
//! `validate`. Exit codes: 0 success, 2 usage or input validation error,
//! 1 runtime failure. Every run writes a manifest next to its outputs and
//! every table starts with `# manifest: <hash>`.

mod config;
mod evaluate;
mod manifest;
mod score;
mod stats;

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::backend::{connect, BackendClient, BackendError, CacheMode, ModelIds, ScoreCache, BACKEND_ENV};
use crate::corpus::{normalize_lang, CorpusError};
use crate::eval::EvalError;
use crate::nli::NliError;

pub use config::{ConfigFile, Resolver};
pub use manifest::Manifest;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Parse { .. } | CorpusError::DuplicateKey { .. } | CorpusError::Template { .. } => {
                CliError::Usage(e.to_string())
            }
            CorpusError::Io { .. } | CorpusError::Backend { .. } => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Parse { .. } | EvalError::Validation(_) | EvalError::Invalid(_) | EvalError::Degenerate(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<BackendError> for CliError {
    fn from(e: BackendError) -> Self {
        match e {
            BackendError::NotConfigured(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<NliError> for CliError {
    fn from(e: NliError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "polyhallo", version, about = "Multilingual hallucination metrics and evaluation")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generation-quality statistics per prompt language.
    Stats(stats::StatsArgs),
    /// Lexical and NLI scores for every generation.
    Score(score::ScoreArgs),
    /// Correlations between metrics and between settings.
    EvalCorr(evaluate::EvalCorrArgs),
    /// Agreement of metrics with human annotations.
    EvalAuc(evaluate::EvalAucArgs),
    /// Annotation statistics.
    Rates(evaluate::RatesArgs),
    /// Check a config and its inputs without computing anything.
    Validate(evaluate::ValidateArgs),
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub(crate) struct Common {
    /// Flat `key = value` run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Model server address (`host:port`, `unix:/path` or `stub`).
    #[arg(long, global = true)]
    backend: Option<String>,
    /// Score cache directory.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// live, cache or cache-then-live.
    #[arg(long, global = true)]
    cache_mode: Option<String>,
    #[arg(long, global = true)]
    nli_model: Option<String>,
    #[arg(long, global = true)]
    ner_model: Option<String>,
    #[arg(long, global = true)]
    langid_model: Option<String>,
    /// Worker threads (default: logical CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized diagnostics.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated language filter.
    #[arg(long, global = true, value_delimiter = ',')]
    languages: Vec<String>,
    /// Validate inputs and exit without computing.
    #[arg(long, global = true)]
    dry_run: bool,
}

/// Resolved shared settings.
pub(crate) struct Ctx {
    pub resolver: Resolver,
    pub common: Common,
    pub languages: Vec<String>,
    pub seed: u64,
    pub jobs: usize,
    pub dry_run: bool,
}

pub(crate) const DEFAULT_SEED: u64 = 20240101;

impl Ctx {
    fn new(common: Common) -> Result<Self, CliError> {
        let resolver = Resolver::new(common.config.as_deref())?;
        let mut languages: Vec<String> = resolver.list(&common.languages, "languages").iter().map(|l| normalize_lang(l)).collect();
        languages.sort();
        languages.dedup();
        let jobs = resolver
            .value(common.jobs, "jobs")?
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        Ok(Self {
            seed: resolver.value(common.seed, "seed")?.unwrap_or(DEFAULT_SEED),
            dry_run: common.dry_run,
            jobs,
            languages,
            resolver,
            common,
        })
    }

    pub fn keep_language(&self, lang: &str) -> bool {
        self.languages.is_empty() || self.languages.iter().any(|l| l == lang)
    }

    pub fn languages_setting(&self) -> String {
        if self.languages.is_empty() {
            "all".into()
        } else {
            self.languages.join(",")
        }
    }

    pub fn models(&self) -> ModelIds {
        let d = ModelIds::default();
        let r = &self.resolver;
        ModelIds {
            nli: r.string(self.common.nli_model.as_ref(), "nli_model").unwrap_or(d.nli),
            ner: r.string(self.common.ner_model.as_ref(), "ner_model").unwrap_or(d.ner),
            langid: r.string(self.common.langid_model.as_ref(), "langid_model").unwrap_or(d.langid),
        }
    }

    /// True when some backend or cache is configured.
    pub fn has_backend(&self) -> bool {
        self.backend_address().is_some() || self.resolver.path(self.common.cache.as_ref(), "cache").is_some()
    }

    fn backend_address(&self) -> Option<String> {
        self.resolver
            .string(self.common.backend.as_ref(), "backend")
            .or_else(|| std::env::var(BACKEND_ENV).ok().filter(|v| !v.trim().is_empty()))
    }

    /// Client from flags, config and environment. Does not contact the
    /// server.
    pub fn backend(&self) -> Result<BackendClient, CliError> {
        let address = self.backend_address();
        let cache_dir = self.resolver.path(self.common.cache.as_ref(), "cache");
        let mode = match self.resolver.string(self.common.cache_mode.as_ref(), "cache_mode") {
            Some(m) => CacheMode::parse(&m)
                .ok_or_else(|| CliError::Usage(format!("unknown cache mode {m:?}; use live, cache or cache-then-live")))?,
            None => match (&address, &cache_dir) {
                (Some(_), Some(_)) => CacheMode::CacheThenLive,
                (None, Some(_)) => CacheMode::Cache,
                (Some(_), None) => CacheMode::Live,
                (None, None) => {
                    return Err(CliError::Usage(format!(
                        "no scoring backend: pass --backend ADDR (or set {BACKEND_ENV}) or --cache DIR"
                    )))
                }
            },
        };
        let transport = address.as_deref().map(|a| connect(a, self.jobs)).transpose()?;
        let cache = match &cache_dir {
            Some(dir) if mode != CacheMode::Live => {
                if mode == CacheMode::Cache && !dir.is_dir() {
                    return Err(CliError::Usage(format!("cache directory {} does not exist", dir.display())));
                }
                Some(Arc::new(ScoreCache::open(dir).map_err(|e| CliError::Runtime(e.to_string()))?))
            }
            _ => None,
        };
        Ok(BackendClient::new(self.models(), transport, cache, mode)?)
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.common, cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(common: Common, command: Command) -> Result<(), CliError> {
    let ctx = Ctx::new(common)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.jobs)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &command {
        Command::Stats(a) => stats::run(&ctx, a),
        Command::Score(a) => score::run(&ctx, a),
        Command::EvalCorr(a) => evaluate::eval_corr(&ctx, a),
        Command::EvalAuc(a) => evaluate::eval_auc(&ctx, a),
        Command::Rates(a) => evaluate::rates(&ctx, a),
        Command::Validate(a) => evaluate::validate(&ctx, a),
    })
}
