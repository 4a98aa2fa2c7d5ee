//! Metric-versus-human agreement rows: Pearson against the per-example rate
//! plus AUC-PR with each class as positive.

use std::collections::HashMap;

use super::{
    auc_pr, example_rates, labels_factual, labels_unverified, pearson, random_baseline, AnnotationRecord,
    CorrelationCell, EvalError, Labels, MetricVector, PositiveClass, RateKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Support rate; factual vs non-factual.
    Verifiable,
    /// Unverified rate; verifiable vs unverifiable.
    Unverifiable,
}

impl Task {
    pub fn from_positive(p: PositiveClass) -> Self {
        match p {
            PositiveClass::Factual | PositiveClass::NonFactual => Task::Verifiable,
            PositiveClass::Verifiable | PositiveClass::Unverifiable => Task::Unverifiable,
        }
    }

    /// (good, bad) classes in column order.
    pub fn classes(self) -> (PositiveClass, PositiveClass) {
        match self {
            Task::Verifiable => (PositiveClass::Factual, PositiveClass::NonFactual),
            Task::Unverifiable => (PositiveClass::Verifiable, PositiveClass::Unverifiable),
        }
    }

    pub fn labels(self, records: &[AnnotationRecord]) -> Labels {
        match self {
            Task::Verifiable => labels_factual(records),
            Task::Unverifiable => labels_unverified(records),
        }
    }

    pub fn rate_kind(self) -> RateKind {
        match self {
            Task::Verifiable => RateKind::Support,
            Task::Unverifiable => RateKind::Unverified,
        }
    }

    /// Column names after `metric\tsetting`.
    pub fn columns(self) -> [&'static str; 4] {
        match self {
            Task::Verifiable => ["pearson", "p", "auc_f", "auc_nf"],
            Task::Unverifiable => ["pearson", "p", "auc_v", "auc_unv"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgreementRow {
    pub metric: String,
    pub setting: String,
    /// `None` for the random row.
    pub pearson: Option<CorrelationCell>,
    pub auc_good: Result<f64, String>,
    pub auc_bad: Result<f64, String>,
    /// Example ids the row was computed on.
    pub population: Vec<String>,
}

/// `raw` feeds the correlation; `classifier` (raw or discretized) feeds
/// AUC-PR.
pub fn agreement_row(
    setting: &str,
    raw: &MetricVector,
    classifier: &MetricVector,
    records: &[AnnotationRecord],
    task: Task,
) -> AgreementRow {
    let targets: HashMap<String, f64> = example_rates(records, task.rate_kind()).into_iter().collect();
    let (mut x, mut y, mut population) = (Vec::new(), Vec::new(), Vec::new());
    for (id, v) in &raw.values {
        if let Some(t) = targets.get(id) {
            x.push(*v);
            y.push(*t);
            population.push(id.clone());
        }
    }
    let pearson = match pearson(&x, &y) {
        Ok(c) => CorrelationCell::Available(c),
        Err(e) => CorrelationCell::Unavailable {
            n: x.len(),
            reason: e.to_string(),
        },
    };
    let labels = task.labels(records);
    let (good, bad) = task.classes();
    let auc = |p| auc_pr(classifier, &labels, p).map(|r| r.auc).map_err(|e| e.to_string());
    AgreementRow {
        metric: raw.name.clone(),
        setting: setting.to_string(),
        pearson: Some(pearson),
        auc_good: auc(good),
        auc_bad: auc(bad),
        population,
    }
}

/// Expected AUC-PR of uniform random scores for both classes.
pub fn random_row(records: &[AnnotationRecord], task: Task, trials: usize, seed: u64) -> Result<AgreementRow, EvalError> {
    let labels = task.labels(records);
    let (good, bad) = task.classes();
    let flags = |p: PositiveClass| -> Vec<bool> {
        labels
            .values
            .iter()
            .map(|&l| match p {
                PositiveClass::Factual | PositiveClass::Unverifiable => l,
                PositiveClass::NonFactual | PositiveClass::Verifiable => !l,
            })
            .collect()
    };
    let run = |p| random_baseline(&flags(p), trials, seed).map_err(|e| e.to_string());
    Ok(AgreementRow {
        metric: "random".into(),
        setting: "-".into(),
        pearson: None,
        auc_good: run(good),
        auc_bad: run(bad),
        population: labels.ids.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{Level, Orientation, Source};

    fn record(id: &str, t: u32, s: u32, u: u32) -> AnnotationRecord {
        AnnotationRecord {
            example_id: id.into(),
            entity_id: "Q".into(),
            language: "en".into(),
            level: Level::Sentence,
            text: "x".into(),
            evidence: vec![],
            total: t,
            supported: s,
            contradicted: t - s - u,
            unverifiable: u,
            conflict_context: false,
            conflict_instruction: false,
        }
    }

    #[test]
    fn perfect_metric() {
        let recs = [record("a", 2, 2, 0), record("b", 2, 1, 1), record("c", 4, 0, 4), record("d", 1, 1, 0)];
        let rates: Vec<(String, f64)> = example_rates(&recs, RateKind::Support);
        let v = MetricVector::new("ent", rates, Source::Computed, Orientation::HigherIsFactual).unwrap();
        let row = agreement_row("reference", &v, &v, &recs, Task::Verifiable);
        let c = row.pearson.unwrap();
        assert!((c.correlation().unwrap().r - 1.0).abs() < 1e-12);
        assert_eq!(row.auc_good, Ok(1.0));
        assert_eq!(row.auc_bad, Ok(1.0));
        assert_eq!(row.population.len(), 4);
    }

    #[test]
    fn random_row_tracks_prevalence() {
        let recs: Vec<AnnotationRecord> = (0..200)
            .map(|i| if i % 4 == 0 { record(&format!("e{i}"), 1, 1, 0) } else { record(&format!("e{i}"), 1, 0, 1) })
            .collect();
        let row = random_row(&recs, Task::Verifiable, 2000, 7).unwrap();
        assert!((row.auc_good.unwrap() - 0.25).abs() < 0.03);
        assert!((row.auc_bad.unwrap() - 0.75).abs() < 0.03);
        assert!(row.pearson.is_none());
    }

    #[test]
    fn single_class_is_reported() {
        let recs = [record("a", 1, 1, 0), record("b", 1, 1, 0), record("c", 1, 1, 0)];
        let v = MetricVector::new("ent", vec![("a".into(), 0.1), ("b".into(), 0.2), ("c".into(), 0.3)], Source::Computed, Orientation::HigherIsFactual).unwrap();
        let row = agreement_row("reference", &v, &v, &recs, Task::Verifiable);
        assert!(row.auc_good.is_err());
        assert!(matches!(row.pearson, Some(CorrelationCell::Unavailable { .. })));
    }
}
