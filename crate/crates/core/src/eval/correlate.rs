use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{pearson, Correlation, EvalError, MetricVector};

/// p-values above this are flagged as not significant.
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum CorrelationCell {
    Available(Correlation),
    /// Too few shared examples or zero variance.
    Unavailable { n: usize, reason: String },
}

impl CorrelationCell {
    pub fn correlation(&self) -> Option<&Correlation> {
        match self {
            CorrelationCell::Available(c) => Some(c),
            CorrelationCell::Unavailable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub cells: Vec<Vec<CorrelationCell>>,
}

fn paired(a: &MetricVector, b: &MetricVector) -> (Vec<f64>, Vec<f64>) {
    let bm = b.to_map();
    a.values
        .iter()
        .filter_map(|(id, x)| bm.get(id.as_str()).map(|y| (*x, *y)))
        .unzip()
}

fn cell(x: &[f64], y: &[f64]) -> CorrelationCell {
    match pearson(x, y) {
        Ok(c) => CorrelationCell::Available(c),
        Err(e) => CorrelationCell::Unavailable {
            n: x.len(),
            reason: match e {
                EvalError::InsufficientData { .. } => "fewer than 3 shared examples".into(),
                other => other.to_string(),
            },
        },
    }
}

/// Pearson r for every pair of vectors on their shared example ids.
/// Symmetric by construction; the diagonal is r = 1, p = 0.
pub fn correlation_matrix(vectors: &[MetricVector]) -> CorrelationMatrix {
    let k = vectors.len();
    let mut cells: Vec<Vec<Option<CorrelationCell>>> = vec![vec![None; k]; k];
    for i in 0..k {
        cells[i][i] = Some(CorrelationCell::Available(Correlation {
            r: 1.0,
            p: 0.0,
            n: vectors[i].len(),
        }));
        for j in i + 1..k {
            let (x, y) = paired(&vectors[i], &vectors[j]);
            let c = cell(&x, &y);
            cells[j][i] = Some(c.clone());
            cells[i][j] = Some(c);
        }
    }
    CorrelationMatrix {
        names: vectors.iter().map(|v| v.name.clone()).collect(),
        cells: cells
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.expect("filled")).collect())
            .collect(),
    }
}

/// A value keyed by an opaque example key within a language.
#[derive(Debug, Clone, PartialEq)]
pub struct Keyed {
    pub lang: String,
    pub key: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageCorrelation {
    pub lang: String,
    pub cell: CorrelationCell,
}

impl LanguageCorrelation {
    /// True when a correlation exists but p exceeds [`SIGNIFICANCE`].
    pub fn insignificant(&self) -> bool {
        self.cell.correlation().is_some_and(|c| c.p > SIGNIFICANCE)
    }
}

/// Per-language Pearson correlation between two score sets on their
/// shared keys. Languages appear in code order.
pub fn cross_setting_correlation(reference: &[Keyed], pairwise: &[Keyed]) -> Vec<LanguageCorrelation> {
    let index: HashMap<(&str, &str), f64> = pairwise
        .iter()
        .map(|k| ((k.lang.as_str(), k.key.as_str()), k.value))
        .collect();
    let langs: BTreeSet<&str> = reference.iter().chain(pairwise).map(|k| k.lang.as_str()).collect();
    let mut per_lang: BTreeMap<&str, (Vec<f64>, Vec<f64>)> = langs.iter().map(|l| (*l, Default::default())).collect();
    for k in reference {
        if let Some(y) = index.get(&(k.lang.as_str(), k.key.as_str())) {
            let e = per_lang.get_mut(k.lang.as_str()).expect("known language");
            e.0.push(k.value);
            e.1.push(*y);
        }
    }
    per_lang
        .into_iter()
        .map(|(lang, (x, y))| LanguageCorrelation {
            lang: lang.to_string(),
            cell: cell(&x, &y),
        })
        .collect()
}
