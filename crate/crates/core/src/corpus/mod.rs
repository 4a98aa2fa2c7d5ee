//! Generation corpora, reference documents and generation-quality statistics.

mod filter;
mod ingest;
mod lang;
mod segment;
mod stats;
mod templates;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::backend::BackendError;

pub use filter::{filter_valid, DropReason, DropReport, FilterOutcome};
pub use ingest::{
    ingest_generations, ingest_references, parse_generations, parse_references, Ingested,
    RaggedGroup, ReferenceSet,
};
pub use lang::normalize_lang;
pub use segment::{segment, tokenize, SegmentedText};
pub use stats::{detect_languages, quality_stats, QualityStats, QUALITY_STATS_HEADER};
pub use templates::{builtin_templates, load_templates, PromptTemplate, TemplateRegistry};

/// Default number of samples generated per prompt.
pub const DEFAULT_SAMPLES_PER_PROMPT: usize = 5;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate key ({entity_id}, {language}{})", .sample_index.map(|i| format!(", {i}")).unwrap_or_default())]
    DuplicateKey {
        line: usize,
        entity_id: String,
        language: String,
        sample_index: Option<usize>,
    },
    #[error("invalid prompt template for {language:?}: {message}")]
    Template { language: String, message: String },
    #[error("language identification failed on a batch of {} texts: {source}", .batch.len())]
    Backend {
        batch: Vec<String>,
        #[source]
        source: BackendError,
    },
}

/// A person whose biography is generated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BioEntity {
    pub entity_id: String,
    pub name: String,
    /// Languages for which a reference article is available.
    pub reference_languages: BTreeSet<String>,
}

/// One generated response.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSample {
    pub entity_id: String,
    pub name: String,
    pub language: String,
    pub sample_index: usize,
    pub prompt: String,
    pub text: String,
    /// Set by language identification; `Some` iff `detector_valid`.
    pub detected_language: Option<String>,
    pub detector_valid: bool,
}

impl GenerationSample {
    pub fn key(&self) -> SampleKey {
        SampleKey {
            entity_id: self.entity_id.clone(),
            language: self.language.clone(),
            sample_index: self.sample_index,
        }
    }

    pub fn set_detection(&mut self, detected: Option<String>) {
        self.detector_valid = detected.is_some();
        self.detected_language = detected;
    }
}

/// Identifies one sample across every output table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SampleKey {
    pub entity_id: String,
    pub language: String,
    pub sample_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationConfig {
    pub decoding: String,
    pub top_p: f64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            decoding: "nucleus".to_string(),
            top_p: 0.9,
        }
    }
}

/// All samples generated for one (entity, language) prompt, ordered by index.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGroup {
    pub entity_id: String,
    pub language: String,
    pub samples: Vec<GenerationSample>,
    pub generation_config: GenerationConfig,
}

impl SampleGroup {
    pub fn sample(&self, sample_index: usize) -> Option<&GenerationSample> {
        self.samples.iter().find(|s| s.sample_index == sample_index)
    }
}

/// A reference article for one entity in one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceDoc {
    pub entity_id: String,
    pub language: String,
    pub title: String,
    pub text: String,
}
