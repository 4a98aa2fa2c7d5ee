use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use super::EvalError;
use crate::tsv::data_lines;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Computed,
    External,
}

/// Direction in which a metric indicates factual (or verifiable) content.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    HigherIsFactual,
    LowerIsFactual,
}

/// CON and UNV grow with hallucination; everything else shrinks.
pub fn orientation_for(name: &str) -> Orientation {
    let lower = name.to_ascii_lowercase();
    let base = lower.split(['-', '_', '.', ' ']).next().unwrap_or("");
    if matches!(base, "con" | "unv") {
        Orientation::LowerIsFactual
    } else {
        Orientation::HigherIsFactual
    }
}

/// Named per-example metric values.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricVector {
    pub name: String,
    pub values: Vec<(String, f64)>,
    pub source: Source,
    pub orientation: Orientation,
}

impl MetricVector {
    /// Rejects duplicate ids and non-finite values.
    pub fn new(
        name: impl Into<String>,
        values: Vec<(String, f64)>,
        source: Source,
        orientation: Orientation,
    ) -> Result<Self, EvalError> {
        let name = name.into();
        let mut seen = HashSet::new();
        for (id, v) in &values {
            if !v.is_finite() {
                return Err(EvalError::Invalid(format!("{name}: non-finite value for {id}")));
            }
            if !seen.insert(id.as_str()) {
                return Err(EvalError::Invalid(format!("{name}: duplicate example id {id}")));
            }
        }
        Ok(Self {
            name,
            values,
            source,
            orientation,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_map(&self) -> HashMap<&str, f64> {
        self.values.iter().map(|(id, v)| (id.as_str(), *v)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Ent,
    Con,
    Diff,
}

impl MetricKind {
    pub fn parse(s: &str) -> Result<Self, EvalError> {
        match s.to_ascii_lowercase().as_str() {
            "ent" => Ok(MetricKind::Ent),
            "con" => Ok(MetricKind::Con),
            "diff" => Ok(MetricKind::Diff),
            _ => Err(EvalError::Invalid(format!("unknown metric kind {s:?}"))),
        }
    }

    pub fn default_threshold(self) -> f64 {
        match self {
            MetricKind::Ent | MetricKind::Con => 0.5,
            MetricKind::Diff => 0.0,
        }
    }

    fn range(self) -> (f64, f64) {
        match self {
            MetricKind::Ent | MetricKind::Con => (0.0, 1.0),
            MetricKind::Diff => (-1.0, 1.0),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Ent => "ent",
            MetricKind::Con => "con",
            MetricKind::Diff => "diff",
        })
    }
}

/// Thresholds scores into predictions: 1.0 means predicted factual.
///
/// ENT and DIFF predict factual at `score >= threshold`; CON predicts
/// non-factual at `score >= threshold`.
pub fn discretize(scores: &MetricVector, kind: MetricKind, threshold: Option<f64>) -> Result<MetricVector, EvalError> {
    let threshold = threshold.unwrap_or(kind.default_threshold());
    let (lo, hi) = kind.range();
    if !(lo..=hi).contains(&threshold) {
        return Err(EvalError::Invalid(format!("{kind} threshold {threshold} outside [{lo}, {hi}]")));
    }
    let values = scores
        .values
        .iter()
        .map(|(id, s)| {
            let hit = *s >= threshold;
            let factual = match kind {
                MetricKind::Ent | MetricKind::Diff => hit,
                MetricKind::Con => !hit,
            };
            (id.clone(), if factual { 1.0 } else { 0.0 })
        })
        .collect();
    Ok(MetricVector {
        name: scores.name.clone(),
        values,
        source: scores.source,
        orientation: Orientation::HigherIsFactual,
    })
}

/// Parses `example_id<TAB>score` rows. A leading `example_id\tscore` header
/// is optional. Ids missing from `known` are dropped and returned as
/// warnings.
pub fn parse_external_scores(
    text: &str,
    name: &str,
    known: Option<&HashSet<String>>,
) -> Result<(MetricVector, Vec<String>), EvalError> {
    let mut values = Vec::new();
    let mut warnings = Vec::new();
    for (i, (line, row)) in data_lines(text).enumerate() {
        if i == 0 && row == "example_id\tscore" {
            continue;
        }
        let Some((id, score)) = row.split_once('\t') else {
            return Err(EvalError::Parse {
                line,
                message: "expected example_id<TAB>score".into(),
            });
        };
        let value: f64 = score.trim().parse().map_err(|_| EvalError::Parse {
            line,
            message: format!("score {score:?} is not a number"),
        })?;
        if !value.is_finite() {
            return Err(EvalError::Parse {
                line,
                message: format!("score {score:?} is not finite"),
            });
        }
        if known.is_some_and(|k| !k.contains(id)) {
            warnings.push(format!("line {line}: unknown example_id {id:?} ignored"));
            continue;
        }
        values.push((id.to_string(), value));
    }
    let vector = MetricVector::new(name, values, Source::External, orientation_for(name))?;
    Ok((vector, warnings))
}

pub fn load_external_scores(
    path: impl AsRef<Path>,
    name: &str,
    known: Option<&HashSet<String>>,
) -> Result<(MetricVector, Vec<String>), EvalError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_external_scores(&text, name, known)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(values: &[f64]) -> MetricVector {
        MetricVector::new(
            "m",
            values.iter().enumerate().map(|(i, v)| (i.to_string(), *v)).collect(),
            Source::Computed,
            Orientation::HigherIsFactual,
        )
        .unwrap()
    }

    #[test]
    fn thresholds() {
        let diff = discretize(&vector(&[-0.2, 0.0]), MetricKind::Diff, None).unwrap();
        assert_eq!(diff.values[0].1, 0.0);
        assert_eq!(diff.values[1].1, 1.0);
        let ent = discretize(&vector(&[0.5, 0.49]), MetricKind::Ent, None).unwrap();
        assert_eq!((ent.values[0].1, ent.values[1].1), (1.0, 0.0));
        let con = discretize(&vector(&[0.6, 0.1]), MetricKind::Con, None).unwrap();
        assert_eq!((con.values[0].1, con.values[1].1), (0.0, 1.0));
        assert!(discretize(&vector(&[0.1]), MetricKind::Ent, Some(1.5)).is_err());
        assert!(MetricKind::parse("unv").is_err());
    }

    #[test]
    fn orientation_names() {
        assert_eq!(orientation_for("CON"), Orientation::LowerIsFactual);
        assert_eq!(orientation_for("unv-pairwise"), Orientation::LowerIsFactual);
        assert_eq!(orientation_for("ent"), Orientation::HigherIsFactual);
        assert_eq!(orientation_for("seahorse"), Orientation::HigherIsFactual);
        assert_eq!(orientation_for("context"), Orientation::HigherIsFactual);
    }

    #[test]
    fn external_file() {
        let text = "example_id\tscore\na\t0.5\nb\t0.25\nghost\t0.1\n";
        let known: HashSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let (v, warnings) = parse_external_scores(text, "mfact", Some(&known)).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.source, Source::External);
        assert_eq!(warnings.len(), 1);
        let (all, none) = parse_external_scores(text, "mfact", None).unwrap();
        assert_eq!((all.len(), none.len()), (3, 0));
        assert!(matches!(
            parse_external_scores("a\tx\n", "m", None),
            Err(EvalError::Parse { line: 1, .. })
        ));
        assert!(parse_external_scores("a\t1\na\t2\n", "m", None).is_err());
    }
}
