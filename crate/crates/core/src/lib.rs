//! Multilingual hallucination-detection metrics and evaluation harness.
//!
//! The crate scores generated biographies against reference articles
//! (reference-based setting) and against sibling samples of the same prompt
//! (pairwise setting) with lexical metrics (ROUGE-1, ROUGE-L, named entity
//! overlap) and NLI-derived metrics (ENT, CON, DIFF, UNV). It also contains
//! the statistics used to compare those metrics with each other and with
//! human fact-level annotations: Pearson correlation with Student-t
//! p-values, precision-recall AUC, support/unverified rates.
//!
//! Model inference (NLI, NER, language identification) lives behind a
//! line-delimited JSON protocol; see [`backend`]. Every response can be
//! served from a content-addressed on-disk cache, so the whole pipeline
//! runs offline once a cache has been exported.
//!
//! Module map:
//!
//! - [`corpus`]: ingestion, sentence segmentation, tokenization, generation
//!   quality statistics and language-validity filtering.
//! - [`lexical`]: ROUGE-1 (stopword-filtered), ROUGE-L, entity overlap.
//! - [`nli`]: entailment/contradiction matrices and the four NLI metrics.
//! - [`backend`]: protocol types, score cache, client and transports.
//! - [`eval`]: annotations, rates, labels, correlation, AUC-PR.
//! - [`cli`]: the batch runner behind the `polyhallo` binary.

pub mod backend;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod lexical;
pub mod nli;
pub mod tsv;

pub use corpus::{segment, tokenize, SampleGroup, SegmentedText};
pub use lexical::Prf;
pub use nli::{DocScores, NliMatrix, SentenceScores};
