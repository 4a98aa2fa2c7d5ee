//! Zero-shot NLI hallucination metrics.
//!
//! A generated text with sentences S_1..S_N is compared with a reference of
//! sentences D_1..D_M. The backend gives entailment e(n, m) and contradiction
//! c(n, m) for premise D_m and hypothesis S_n. Per generated sentence:
//!
//! ```text
//! ENT  = max_m e(n, m)
//! CON  = max_m c(n, m)
//! DIFF = ENT - CON
//! UNV  = 1 - max(ENT, CON)
//! ```
//!
//! Document scores average the sentence scores.

mod matrix;
mod record;
mod score;

use thiserror::Error;

use crate::backend::BackendError;

pub use matrix::{build_matrix, NliMatrix};
pub use record::{
    parse_score_records, parse_sentence_records, ScoreRecord, SentenceRecord, Setting,
    SCORE_HEADER, SENTENCE_HEADER,
};
pub use score::{pairwise_score, reference_score, Outcome, Scored, SkipReason};

#[derive(Debug, Error)]
pub enum NliError {
    #[error("empty {0}: nothing to score")]
    EmptyInput(&'static str),
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("{matrix} cell ({row}, {col}) = {value} outside [0, 1]")]
    OutOfRange {
        matrix: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },
    #[error("entail + contradict = {sum} exceeds 1 at ({row}, {col})")]
    Simplex { row: usize, col: usize, sum: f64 },
    #[error("sentence index {index} out of range for {len} sentences")]
    Index { index: usize, len: usize },
    #[error(transparent)]
    Backend(#[from] BackendError),
}

/// The four metrics for one generated sentence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentenceScores {
    pub ent: f64,
    pub con: f64,
    pub diff: f64,
    pub unv: f64,
}

impl SentenceScores {
    pub fn from_maxima(ent: f64, con: f64) -> Self {
        Self {
            ent,
            con,
            diff: ent - con,
            unv: 1.0 - ent.max(con),
        }
    }
}

/// Document aggregate.
///
/// `ent`, `con` and `unv` are means of the sentence values; `diff` is
/// `ent - con` of those means, which is the mean of sentence diffs up to
/// rounding and keeps the identity exact at document level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DocScores {
    pub ent: f64,
    pub con: f64,
    pub diff: f64,
    pub unv: f64,
    pub n_sentences: usize,
}

impl DocScores {
    /// Mean of per-sentence scores; `None` for an empty slice.
    pub fn mean(sentences: &[SentenceScores]) -> Option<Self> {
        if sentences.is_empty() {
            return None;
        }
        let ent = order_free_mean(sentences.iter().map(|s| s.ent));
        let con = order_free_mean(sentences.iter().map(|s| s.con));
        let unv = order_free_mean(sentences.iter().map(|s| s.unv));
        Some(Self {
            ent,
            con,
            diff: ent - con,
            unv,
            n_sentences: sentences.len(),
        })
    }

    /// Average of several documents' scores (pairwise siblings). The
    /// sentence count is carried over from the first document.
    pub fn average(docs: &[DocScores]) -> Option<Self> {
        let first = docs.first()?;
        let ent = order_free_mean(docs.iter().map(|d| d.ent));
        let con = order_free_mean(docs.iter().map(|d| d.con));
        let unv = order_free_mean(docs.iter().map(|d| d.unv));
        Some(Self {
            ent,
            con,
            diff: ent - con,
            unv,
            n_sentences: first.n_sentences,
        })
    }
}

/// Arithmetic mean that does not depend on iteration order: values are
/// sorted before summing so permuted inputs give bit-identical results.
pub(crate) fn order_free_mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentence_formulas() {
        let s = SentenceScores::from_maxima(0.9, 0.05);
        assert_eq!((s.ent, s.con), (0.9, 0.05));
        assert!((s.diff - 0.85).abs() < 1e-15);
        assert!((s.unv - 0.1).abs() < 1e-15);
        assert_eq!(SentenceScores::from_maxima(0.0, 0.0).unv, 1.0);
        let tie = SentenceScores::from_maxima(0.5, 0.5);
        assert_eq!((tie.diff, tie.unv), (0.0, 0.5));
    }

    #[test]
    fn doc_mean() {
        let d = DocScores::mean(&[SentenceScores::from_maxima(0.2, 0.1), SentenceScores::from_maxima(0.8, 0.1)]).unwrap();
        assert!((d.ent - 0.5).abs() < 1e-15);
        assert_eq!(d.diff, d.ent - d.con);
        assert_eq!(d.n_sentences, 2);
        assert!(DocScores::mean(&[]).is_none());
    }

    #[test]
    fn mean_is_order_free() {
        let a = [0.1, 0.7, 1e-17, 0.3333];
        let b = [0.3333, 1e-17, 0.7, 0.1];
        assert_eq!(order_free_mean(a.into_iter()).to_bits(), order_free_mean(b.into_iter()).to_bits());
    }
}
