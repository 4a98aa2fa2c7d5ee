use super::{AnnotationRecord, EvalError};
use crate::corpus::tokenize;
use crate::tsv::fmt_fixed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    /// Mean of per-example ratios.
    Macro,
    /// Pooled fact counts.
    Micro,
}

impl Averaging {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "macro" => Some(Averaging::Macro),
            "micro" => Some(Averaging::Micro),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Averaging::Macro => "macro",
            Averaging::Micro => "micro",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateSummary {
    pub n_examples: usize,
    pub mean_words: f64,
    pub mean_evidence: f64,
    pub mean_total_facts: f64,
    pub support_rate: f64,
    pub contradictory_rate: f64,
    pub unverified_rate: f64,
    pub instruction_conflict_rate: f64,
    pub context_conflict_rate: f64,
    /// Examples left out of the fact rates because they have no facts.
    pub excluded: Vec<String>,
    pub averaging: Averaging,
}

impl RateSummary {
    /// `(statistic, value)` pairs in the order of the annotation-statistics
    /// table.
    pub fn rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("# Examples", self.n_examples.to_string()),
            ("# Words", fmt_fixed(self.mean_words, 2)),
            ("# Evidence", fmt_fixed(self.mean_evidence, 2)),
            ("# Total Facts", fmt_fixed(self.mean_total_facts, 2)),
            ("Support Rate", fmt_fixed(self.support_rate, 4)),
            ("Contradictory Rate", fmt_fixed(self.contradictory_rate, 4)),
            ("Unverified Rate", fmt_fixed(self.unverified_rate, 4)),
            ("Instruction-conflict Rate", fmt_fixed(self.instruction_conflict_rate, 4)),
            ("Context-conflict Rate", fmt_fixed(self.context_conflict_rate, 4)),
        ]
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn rates(records: &[AnnotationRecord], averaging: Averaging) -> Result<RateSummary, EvalError> {
    if records.is_empty() {
        return Err(EvalError::Degenerate("no annotation records".into()));
    }
    let (with_facts, without): (Vec<&AnnotationRecord>, Vec<&AnnotationRecord>) =
        records.iter().partition(|r| r.total > 0);
    if with_facts.is_empty() {
        return Err(EvalError::Degenerate("every record has zero facts".into()));
    }
    let (support_rate, contradictory_rate, unverified_rate) = match averaging {
        Averaging::Macro => (
            mean(with_facts.iter().map(|r| r.supported as f64 / r.total as f64)),
            mean(with_facts.iter().map(|r| r.contradicted as f64 / r.total as f64)),
            mean(with_facts.iter().map(|r| r.unverifiable as f64 / r.total as f64)),
        ),
        Averaging::Micro => {
            let total: f64 = with_facts.iter().map(|r| r.total as f64).sum();
            let sum = |f: fn(&AnnotationRecord) -> u32| with_facts.iter().map(|r| f(r) as f64).sum::<f64>() / total;
            (sum(|r| r.supported), sum(|r| r.contradicted), sum(|r| r.unverifiable))
        }
    };
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    Ok(RateSummary {
        n_examples: records.len(),
        mean_words: mean(records.iter().map(|r| tokenize(&r.text).len() as f64)),
        mean_evidence: mean(records.iter().map(|r| r.evidence.len() as f64)),
        mean_total_facts: mean(records.iter().map(|r| r.total as f64)),
        support_rate,
        contradictory_rate,
        unverified_rate,
        instruction_conflict_rate: mean(records.iter().map(|r| flag(r.conflict_instruction))),
        context_conflict_rate: mean(records.iter().map(|r| flag(r.conflict_context))),
        excluded: without.iter().map(|r| r.example_id.clone()).collect(),
        averaging,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    /// true = every fact supported.
    Factual,
    /// true = at least one unverifiable fact.
    Unverified,
}

/// Binary labels aligned with example ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Labels {
    pub kind: LabelKind,
    pub ids: Vec<String>,
    pub values: Vec<bool>,
    /// Examples with zero facts, left out.
    pub excluded: Vec<String>,
}

impl Labels {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn prevalence(&self) -> f64 {
        self.values.iter().filter(|&&v| v).count() as f64 / self.values.len().max(1) as f64
    }
}

fn labels(records: &[AnnotationRecord], kind: LabelKind, rule: fn(&AnnotationRecord) -> bool) -> Labels {
    let mut out = Labels {
        kind,
        ids: Vec::new(),
        values: Vec::new(),
        excluded: Vec::new(),
    };
    for r in records {
        if r.total == 0 {
            out.excluded.push(r.example_id.clone());
        } else {
            out.ids.push(r.example_id.clone());
            out.values.push(rule(r));
        }
    }
    out
}

pub fn labels_factual(records: &[AnnotationRecord]) -> Labels {
    labels(records, LabelKind::Factual, |r| r.supported == r.total)
}

pub fn labels_unverified(records: &[AnnotationRecord]) -> Labels {
    labels(records, LabelKind::Unverified, |r| r.unverifiable >= 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateKind {
    Support,
    Contradictory,
    Unverified,
}

/// Per-example ratio, skipping zero-fact examples. These are the targets
/// Pearson correlation is computed against.
pub fn example_rates(records: &[AnnotationRecord], kind: RateKind) -> Vec<(String, f64)> {
    records
        .iter()
        .filter(|r| r.total > 0)
        .map(|r| {
            let part = match kind {
                RateKind::Support => r.supported,
                RateKind::Contradictory => r.contradicted,
                RateKind::Unverified => r.unverifiable,
            };
            (r.example_id.clone(), part as f64 / r.total as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::annotations::tests::DEL_PIERO;
    use crate::eval::{parse_annotations, Level, LoadMode, ANNOTATION_HEADER};
    use proptest::prelude::*;

    fn record(id: &str, t: u32, s: u32, c: u32, u: u32) -> AnnotationRecord {
        AnnotationRecord {
            example_id: id.into(),
            entity_id: "Q".into(),
            language: "en".into(),
            level: Level::Sentence,
            text: "one two three".into(),
            evidence: vec!["e".into()],
            total: t,
            supported: s,
            contradicted: c,
            unverifiable: u,
            conflict_context: false,
            conflict_instruction: false,
        }
    }

    #[test]
    fn del_piero_rates_and_labels() {
        let set = parse_annotations(&format!("{ANNOTATION_HEADER}\n{DEL_PIERO}\n"), LoadMode::Strict).unwrap();
        let s = rates(&set.records, Averaging::Macro).unwrap();
        assert_eq!((s.support_rate, s.contradictory_rate, s.unverified_rate), (0.5, 0.25, 0.25));
        assert_eq!(labels_factual(&set.records).values, vec![false]);
        assert_eq!(labels_unverified(&set.records).values, vec![true]);
    }

    #[test]
    fn all_supported() {
        let recs = [record("a", 3, 3, 0, 0), record("b", 1, 1, 0, 0)];
        let s = rates(&recs, Averaging::Macro).unwrap();
        assert_eq!((s.support_rate, s.contradictory_rate, s.unverified_rate), (1.0, 0.0, 0.0));
        assert_eq!(labels_factual(&recs).values, vec![true, true]);
    }

    #[test]
    fn label_rules() {
        let recs = [record("a", 1, 0, 0, 1), record("b", 2, 0, 2, 0), record("c", 2, 0, 0, 2), record("z", 0, 0, 0, 0)];
        let f = labels_factual(&recs);
        assert_eq!(f.values, vec![false, false, false]);
        assert_eq!(f.excluded, vec!["z".to_string()]);
        assert_eq!(labels_unverified(&recs).values, vec![true, false, true]);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(rates(&[], Averaging::Macro), Err(EvalError::Degenerate(_))));
        assert!(matches!(rates(&[record("z", 0, 0, 0, 0)], Averaging::Macro), Err(EvalError::Degenerate(_))));
    }

    #[test]
    fn micro_pools_counts() {
        let recs = [record("a", 1, 1, 0, 0), record("b", 3, 0, 0, 3)];
        let micro = rates(&recs, Averaging::Micro).unwrap();
        assert_eq!(micro.support_rate, 0.25);
        let macro_ = rates(&recs, Averaging::Macro).unwrap();
        assert_eq!(macro_.support_rate, 0.5);
    }

    fn arb_record() -> impl Strategy<Value = AnnotationRecord> {
        (0u32..6, 0u32..6, 0u32..6).prop_map(|(s, c, u)| record("x", s + c + u, s, c, u))
    }

    proptest! {
        #[test]
        fn fact_rates_sum_to_one(mut recs in prop::collection::vec(arb_record(), 1..40)) {
            recs.retain(|r| r.total > 0);
            prop_assume!(!recs.is_empty());
            for mode in [Averaging::Macro, Averaging::Micro] {
                let s = rates(&recs, mode).unwrap();
                prop_assert!((s.support_rate + s.contradictory_rate + s.unverified_rate - 1.0).abs() <= 1e-9);
            }
        }

        #[test]
        fn factual_excludes_unverified(recs in prop::collection::vec(arb_record(), 1..40)) {
            let f = labels_factual(&recs);
            let u = labels_unverified(&recs);
            for (a, b) in f.values.iter().zip(&u.values) {
                prop_assert!(!(*a && *b));
            }
        }
    }
}
