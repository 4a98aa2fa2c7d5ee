//! Lexical overlap metrics: ROUGE-1, ROUGE-L and named entity overlap.

mod entities;
mod record;
mod rouge;
mod stopwords;

pub use entities::{entity_overlap, normalize_entity, EntitySet};
pub use record::{entity_set, parse_lexical_records, LexicalRecord, LexicalScores, LEXICAL_HEADER};
pub use rouge::{lcs_len, rouge1, rouge_l};
pub use stopwords::{StopwordBank, StopwordSet};

/// Precision, recall and their harmonic mean.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub const ZERO: Prf = Prf {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };

    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            precision,
            recall,
            f1,
        }
    }

    /// From a match count and the sizes of the candidate and reference sides.
    /// An empty side yields a zero for the ratio that would divide by it.
    pub fn from_counts(matched: usize, candidate: usize, reference: usize) -> Self {
        let ratio = |den: usize| if den == 0 { 0.0 } else { matched as f64 / den as f64 };
        Self::new(ratio(candidate), ratio(reference))
    }
}

/// A metric value that may be unavailable for a language (for instance
/// when the NER backend does not cover it). Never conflated with zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coverage<T> {
    Available(T),
    Unavailable,
}

impl<T> Coverage<T> {
    pub fn available(self) -> Option<T> {
        match self {
            Coverage::Available(v) => Some(v),
            Coverage::Unavailable => None,
        }
    }

    pub fn is_available(&self) -> bool {
        matches!(self, Coverage::Available(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f1_zero_when_both_zero() {
        assert_eq!(Prf::new(0.0, 0.0).f1, 0.0);
        assert_eq!(Prf::from_counts(0, 0, 0), Prf::ZERO);
    }

    #[test]
    fn f1_harmonic() {
        let p = Prf::new(0.5, 1.0 / 3.0);
        assert!((p.f1 - 0.4).abs() < 1e-12);
    }
}
