use std::collections::BTreeMap;
use std::fmt;

use super::{GenerationSample, SampleGroup, SampleKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DropReason {
    Empty,
    Undetectable,
    WrongLanguage,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::Empty => "empty",
            DropReason::Undetectable => "undetectable",
            DropReason::WrongLanguage => "wrong-language",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DropReport {
    pub entries: Vec<(SampleKey, DropReason)>,
}

impl DropReport {
    pub fn count(&self, reason: DropReason) -> usize {
        self.entries.iter().filter(|(_, r)| *r == reason).count()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterOutcome {
    pub kept: Vec<GenerationSample>,
    pub dropped: DropReport,
}

impl FilterOutcome {
    /// Regroups the kept samples by (entity_id, language).
    pub fn kept_groups(&self, original: &[SampleGroup]) -> Vec<SampleGroup> {
        let mut by_key: BTreeMap<(&str, &str), Vec<GenerationSample>> = BTreeMap::new();
        for s in &self.kept {
            by_key
                .entry((s.entity_id.as_str(), s.language.as_str()))
                .or_default()
                .push(s.clone());
        }
        original
            .iter()
            .filter_map(|g| {
                by_key
                    .remove(&(g.entity_id.as_str(), g.language.as_str()))
                    .map(|samples| SampleGroup {
                        entity_id: g.entity_id.clone(),
                        language: g.language.clone(),
                        samples,
                        generation_config: g.generation_config.clone(),
                    })
            })
            .collect()
    }
}

fn classify(sample: &GenerationSample) -> Option<DropReason> {
    if sample.text.trim().is_empty() {
        return Some(DropReason::Empty);
    }
    match (&sample.detected_language, sample.detector_valid) {
        (Some(detected), true) if *detected == sample.language => None,
        (Some(_), true) => Some(DropReason::WrongLanguage),
        _ => Some(DropReason::Undetectable),
    }
}

/// Keeps samples that are non-empty and detected in their prompt language.
pub fn filter_valid(groups: &[SampleGroup]) -> FilterOutcome {
    let mut out = FilterOutcome::default();
    for sample in groups.iter().flat_map(|g| &g.samples) {
        match classify(sample) {
            None => out.kept.push(sample.clone()),
            Some(reason) => out.dropped.entries.push((sample.key(), reason)),
        }
    }
    out
}
