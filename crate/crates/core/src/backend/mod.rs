//! Scoring backends: NLI, NER and language identification.
//!
//! The engine talks to model servers over a line-delimited JSON protocol.
//! A request envelope is one line:
//!
//! ```text
//! {"id":7,"items":[{"hypothesis":"...","premise":"..."}],"model_id":"xnli-large","task":"nli"}
//! ```
//!
//! and the server answers with `{"id":7,"items":[...]}` (same length, same
//! order) or `{"id":7,"error":{"code":"...","message":"..."}}`.
//!
//! Every response item can be stored in a [`ScoreCache`], keyed by the hash
//! of the canonical `(task, model_id, item)` triple, so a warm cache replaces
//! the server entirely.

mod cache;
mod canonical;
mod client;
mod protocol;
mod stub;
mod transport;

use thiserror::Error;

pub use cache::{CacheError, CacheKey, ScoreCache};
pub(crate) use cache::sha256_hex;
pub use canonical::{canonical_json, canonicalize_str};
pub use client::{BackendClient, CacheMode, ModelIds};
pub use protocol::{
    EntitySpan, LangGuess, LangIdItem, NerItem, NerResult, NliPair, NliProbs, RequestEnvelope,
    ResponseBody, ResponseEnvelope, ServerError, Task,
};
pub use stub::StubBackend;
pub use transport::{connect, Address, SocketTransport, Transport};

/// Environment variable holding the live server address.
pub const BACKEND_ENV: &str = "POLYHALLO_BACKEND";

/// Maximum number of items per request envelope.
pub const NLI_BATCH_CAP: usize = 64;

/// Transport failures are retried this many times; protocol errors never are.
pub const MAX_RETRIES: usize = 2;

/// Tolerance on the entail + neutral + contradict = 1 simplex constraint.
pub const SIMPLEX_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("server error {code}: {message}")]
    Server { code: String, message: String },
    #[error("{} cache miss(es) for task {task}: {}", .keys.len(), preview(.keys))]
    CacheMiss { task: Task, keys: Vec<String> },
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("backend not configured: {0}")]
    NotConfigured(String),
}

fn preview(keys: &[String]) -> String {
    let mut s = keys.iter().take(5).cloned().collect::<Vec<_>>().join(", ");
    if keys.len() > 5 {
        s.push_str(", ...");
    }
    s
}

impl BackendError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, BackendError::Transport(_))
    }
}

/// Entailment/contradiction probabilities for (premise, hypothesis) pairs.
pub trait NliBackend: Send + Sync {
    fn nli(&self, pairs: &[NliPair]) -> Result<Vec<NliProbs>, BackendError>;
}

/// Named entities per text; languages the recognizer does not cover yield
/// [`NerResult::Unsupported`].
pub trait NerBackend: Send + Sync {
    fn ner(&self, items: &[NerItem]) -> Result<Vec<NerResult>, BackendError>;
}

/// Language of each text, `None` when undetectable.
pub trait LangIdBackend: Send + Sync {
    fn identify(&self, texts: &[String]) -> Result<Vec<Option<LangGuess>>, BackendError>;
}
