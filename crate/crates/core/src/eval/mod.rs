//! Agreement between metrics and human fact-level annotations.
//!
//! Annotation records carry fact counts (total, supported, contradicted,
//! unverifiable). From them come per-example rates, binary labels
//! (factual: every fact supported; unverified: at least one unverifiable
//! fact), and the statistics used to compare metrics with those labels:
//! Pearson r with a Student-t p-value and step-wise average precision.

mod agreement;
mod annotations;
mod auc;
mod compute;
mod correlate;
mod metric;
mod rates;
mod special;

use std::path::PathBuf;

use thiserror::Error;

pub use agreement::{agreement_row, random_row, AgreementRow, Task};
pub use annotations::{
    load_annotations, parse_annotations, AnnotationRecord, AnnotationSet, Level, LoadMode, Quarantined,
    ANNOTATION_HEADER,
};
pub use auc::{auc_pr, average_precision, random_baseline, AucResult, PositiveClass, PrPoint};
pub use compute::{annotation_metrics, MetricInputs, SettingMetrics, ANNOTATION_METRICS};
pub use correlate::{
    correlation_matrix, cross_setting_correlation, CorrelationCell, CorrelationMatrix, Keyed, LanguageCorrelation,
    SIGNIFICANCE,
};
pub use metric::{
    discretize, load_external_scores, orientation_for, parse_external_scores, MetricKind, MetricVector, Orientation,
    Source,
};
pub use rates::{example_rates, labels_factual, labels_unverified, rates, Averaging, LabelKind, Labels, RateKind, RateSummary};
pub use special::{ln_gamma, pearson, regularized_incomplete_beta, student_t_two_tailed, Correlation};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{} invalid annotation row(s); first at line {}: {}", .0.len(), .0[0].line, .0[0].message)]
    Validation(Vec<Quarantined>),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("insufficient data: need at least {needed} values, have {have}")]
    InsufficientData { needed: usize, have: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Nli(#[from] crate::nli::NliError),
    #[error(transparent)]
    Backend(#[from] crate::backend::BackendError),
}
