use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{EvalError, LabelKind, Labels, MetricVector, Orientation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositiveClass {
    Factual,
    NonFactual,
    Verifiable,
    Unverifiable,
}

impl PositiveClass {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "factual" => Some(PositiveClass::Factual),
            "nonfactual" | "non-factual" => Some(PositiveClass::NonFactual),
            "verifiable" => Some(PositiveClass::Verifiable),
            "unverifiable" | "unverified" => Some(PositiveClass::Unverifiable),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PositiveClass::Factual => "factual",
            PositiveClass::NonFactual => "nonfactual",
            PositiveClass::Verifiable => "verifiable",
            PositiveClass::Unverifiable => "unverifiable",
        }
    }

    /// The label family this class is defined on.
    pub fn label_kind(self) -> LabelKind {
        match self {
            PositiveClass::Factual | PositiveClass::NonFactual => LabelKind::Factual,
            PositiveClass::Verifiable | PositiveClass::Unverifiable => LabelKind::Unverified,
        }
    }

    /// Factual and verifiable are the "good" side metrics are oriented to.
    fn is_good(self) -> bool {
        matches!(self, PositiveClass::Factual | PositiveClass::Verifiable)
    }

    fn is_positive(self, label: bool) -> bool {
        match self {
            PositiveClass::Factual | PositiveClass::Unverifiable => label,
            PositiveClass::NonFactual | PositiveClass::Verifiable => !label,
        }
    }
}

impl fmt::Display for PositiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub recall: f64,
    pub precision: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AucResult {
    pub auc: f64,
    pub curve: Vec<PrPoint>,
    pub n_pos: usize,
    pub n_neg: usize,
    pub positive: Option<PositiveClass>,
    /// Labelled examples without a score, left out.
    pub missing: Vec<String>,
}

/// Step-wise average precision, higher score = more likely positive.
///
/// Scores are swept in descending order; equal scores form one threshold
/// step. AP = sum over steps of (recall gain) x (precision at the step).
pub fn average_precision(scores: &[f64], positive: &[bool]) -> Result<AucResult, EvalError> {
    if scores.len() != positive.len() {
        return Err(EvalError::Invalid(format!(
            "{} scores for {} labels",
            scores.len(),
            positive.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(EvalError::Invalid("non-finite score".into()));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::Degenerate(format!(
            "need both classes, have {n_pos} positive and {n_neg} negative"
        )));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut prev_recall = 0.0;
    let mut curve = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if positive[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let recall = tp as f64 / n_pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        auc += (recall - prev_recall) * precision;
        prev_recall = recall;
        curve.push(PrPoint {
            threshold,
            recall,
            precision,
        });
    }
    Ok(AucResult {
        auc,
        curve,
        n_pos,
        n_neg,
        positive: None,
        missing: Vec::new(),
    })
}

/// AUC-PR of `scores` against `labels` with `positive` as the positive
/// class. Scores are matched to labels by example id and oriented using the
/// metric's orientation.
pub fn auc_pr(scores: &MetricVector, labels: &Labels, positive: PositiveClass) -> Result<AucResult, EvalError> {
    if positive.label_kind() != labels.kind {
        return Err(EvalError::Invalid(format!(
            "positive class {positive} is not defined on {:?} labels",
            labels.kind
        )));
    }
    let map = scores.to_map();
    let toward_good = match scores.orientation {
        Orientation::HigherIsFactual => 1.0,
        Orientation::LowerIsFactual => -1.0,
    };
    let sign = if positive.is_good() { toward_good } else { -toward_good };
    let mut s = Vec::with_capacity(labels.len());
    let mut p = Vec::with_capacity(labels.len());
    let mut missing = Vec::new();
    for (id, &label) in labels.ids.iter().zip(&labels.values) {
        match map.get(id.as_str()) {
            Some(v) => {
                s.push(sign * v);
                p.push(positive.is_positive(label));
            }
            None => missing.push(id.clone()),
        }
    }
    let mut result = average_precision(&s, &p)?;
    result.positive = Some(positive);
    result.missing = missing;
    Ok(result)
}

/// Mean AP of i.i.d. uniform scores over `trials` draws. Each trial uses
/// its own ChaCha stream so the result does not depend on thread count.
pub fn random_baseline(positive: &[bool], trials: usize, seed: u64) -> Result<f64, EvalError> {
    if trials == 0 {
        return Err(EvalError::Invalid("zero trials".into()));
    }
    let aps: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let scores: Vec<f64> = positive.iter().map(|_| rng.gen::<f64>()).collect();
            average_precision(&scores, positive).map(|r| r.auc)
        })
        .collect::<Result<_, _>>()?;
    Ok(aps.iter().sum::<f64>() / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Source;
    use proptest::prelude::*;

    /// Enumerates every distinct threshold and computes P and R directly.
    fn oracle(scores: &[f64], positive: &[bool]) -> f64 {
        let mut thresholds: Vec<f64> = scores.to_vec();
        thresholds.sort_by(|a, b| b.total_cmp(a));
        thresholds.dedup();
        let n_pos = positive.iter().filter(|&&p| p).count() as f64;
        let mut prev = 0.0;
        let mut ap = 0.0;
        for t in thresholds {
            let predicted: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] >= t).collect();
            let tp = predicted.iter().filter(|&&i| positive[i]).count() as f64;
            let recall = tp / n_pos;
            ap += (recall - prev) * (tp / predicted.len() as f64);
            prev = recall;
        }
        ap
    }

    #[test]
    fn hand_example() {
        let r = average_precision(&[0.9, 0.7, 0.6, 0.2], &[true, false, true, false]).unwrap();
        assert!((r.auc - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(r.curve.len(), 4);
        assert_eq!((r.n_pos, r.n_neg), (2, 2));
    }

    #[test]
    fn perfect_separation() {
        let r = average_precision(&[0.9, 0.8, 0.1], &[true, true, false]).unwrap();
        assert_eq!(r.auc, 1.0);
    }

    #[test]
    fn ties_form_one_step() {
        // All tied: one step at recall 1 with precision = prevalence.
        let r = average_precision(&[0.5; 4], &[true, false, false, false]).unwrap();
        assert_eq!(r.curve.len(), 1);
        assert_eq!(r.auc, 0.25);
    }

    #[test]
    fn single_class_rejected() {
        assert!(matches!(average_precision(&[0.1, 0.2], &[true, true]), Err(EvalError::Degenerate(_))));
    }

    #[test]
    fn orientation_and_class() {
        let labels = Labels {
            kind: LabelKind::Factual,
            ids: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            values: vec![true, true, false, false],
            excluded: vec![],
        };
        let con = MetricVector::new(
            "con",
            vec![("a".into(), 0.1), ("b".into(), 0.2), ("c".into(), 0.8), ("d".into(), 0.9)],
            Source::Computed,
            Orientation::LowerIsFactual,
        )
        .unwrap();
        assert_eq!(auc_pr(&con, &labels, PositiveClass::Factual).unwrap().auc, 1.0);
        assert_eq!(auc_pr(&con, &labels, PositiveClass::NonFactual).unwrap().auc, 1.0);
        assert!(auc_pr(&con, &labels, PositiveClass::Unverifiable).is_err());
        let partial = MetricVector::new("ent", vec![("a".into(), 0.9), ("c".into(), 0.1)], Source::Computed, Orientation::HigherIsFactual).unwrap();
        let r = auc_pr(&partial, &labels, PositiveClass::Factual).unwrap();
        assert_eq!(r.missing, vec!["b".to_string(), "d".to_string()]);
    }

    #[test]
    fn random_baseline_is_deterministic() {
        let labels: Vec<bool> = (0..50).map(|i| i % 5 == 0).collect();
        let a = random_baseline(&labels, 64, 7).unwrap();
        let b = random_baseline(&labels, 64, 7).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    proptest! {
        #[test]
        fn matches_oracle(v in prop::collection::vec((0u8..8, any::<bool>()), 2..50)) {
            let scores: Vec<f64> = v.iter().map(|(s, _)| *s as f64 / 8.0).collect();
            let labels: Vec<bool> = v.iter().map(|(_, l)| *l).collect();
            prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
            let r = average_precision(&scores, &labels).unwrap();
            prop_assert!((r.auc - oracle(&scores, &labels)).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&r.auc));
            prop_assert!(r.curve.windows(2).all(|w| w[0].recall <= w[1].recall));
        }

        #[test]
        fn monotone_transform_invariant(v in prop::collection::vec((-5.0f64..5.0, any::<bool>()), 2..40)) {
            let scores: Vec<f64> = v.iter().map(|(s, _)| *s).collect();
            let labels: Vec<bool> = v.iter().map(|(_, l)| *l).collect();
            prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
            let moved: Vec<f64> = scores.iter().map(|s| s.exp() * 3.0 + 1.0).collect();
            let a = average_precision(&scores, &labels).unwrap().auc;
            let b = average_precision(&moved, &labels).unwrap().auc;
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
