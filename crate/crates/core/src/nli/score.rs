use std::fmt;

use super::{build_matrix, DocScores, NliError, SentenceScores};
use crate::backend::NliBackend;
use crate::corpus::{segment, GenerationSample, ReferenceDoc, SampleGroup, SegmentedText};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SkipReason {
    EmptyGeneration,
    EmptyReference,
    MissingReference,
    MissingTarget,
    NoUsableSibling,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::EmptyGeneration => "empty-generation",
            SkipReason::EmptyReference => "empty-reference",
            SkipReason::MissingReference => "missing-reference",
            SkipReason::MissingTarget => "missing-target",
            SkipReason::NoUsableSibling => "no-usable-sibling",
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub doc: DocScores,
    /// One entry per generated sentence. In the pairwise setting each entry
    /// is the average over siblings.
    pub sentences: Vec<SentenceScores>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Scored(Scored),
    Skipped(SkipReason),
}

impl Outcome {
    pub fn scored(&self) -> Option<&Scored> {
        match self {
            Outcome::Scored(s) => Some(s),
            Outcome::Skipped(_) => None,
        }
    }
}

fn score_segmented(gen: &SegmentedText, reference: &SegmentedText, nli: &dyn NliBackend) -> Result<Scored, NliError> {
    let matrix = build_matrix(gen, reference, nli)?;
    Ok(Scored {
        doc: matrix.doc_scores(),
        sentences: matrix.all_sentence_scores(),
    })
}

/// Scores `sample` against its reference article.
pub fn reference_score(
    sample: &GenerationSample,
    reference: &ReferenceDoc,
    nli: &dyn NliBackend,
) -> Result<Outcome, NliError> {
    let gen = segment(&sample.text, &sample.language);
    if gen.sentences.is_empty() {
        return Ok(Outcome::Skipped(SkipReason::EmptyGeneration));
    }
    let r = segment(&reference.text, &reference.language);
    if r.sentences.is_empty() {
        return Ok(Outcome::Skipped(SkipReason::EmptyReference));
    }
    score_segmented(&gen, &r, nli).map(Outcome::Scored)
}

/// Scores sample `target_index` against every other non-empty sample of its
/// group and averages. Duplicated sibling texts count as separate siblings.
pub fn pairwise_score(group: &SampleGroup, target_index: usize, nli: &dyn NliBackend) -> Result<Outcome, NliError> {
    let Some(target) = group.sample(target_index) else {
        return Ok(Outcome::Skipped(SkipReason::MissingTarget));
    };
    let gen = segment(&target.text, &target.language);
    if gen.sentences.is_empty() {
        return Ok(Outcome::Skipped(SkipReason::EmptyGeneration));
    }
    let mut per_sibling = Vec::new();
    for sibling in &group.samples {
        if sibling.sample_index == target_index {
            continue;
        }
        let r = segment(&sibling.text, &sibling.language);
        if r.sentences.is_empty() {
            continue;
        }
        per_sibling.push(score_segmented(&gen, &r, nli)?);
    }
    Ok(average_siblings(&per_sibling).map_or(Outcome::Skipped(SkipReason::NoUsableSibling), Outcome::Scored))
}

pub(crate) fn average_siblings(per_sibling: &[Scored]) -> Option<Scored> {
    let docs: Vec<DocScores> = per_sibling.iter().map(|s| s.doc).collect();
    let doc = DocScores::average(&docs)?;
    let n = per_sibling[0].sentences.len();
    let sentences = (0..n)
        .map(|i| {
            let avg = DocScores::average(
                &per_sibling
                    .iter()
                    .map(|s| {
                        let x = s.sentences[i];
                        DocScores {
                            ent: x.ent,
                            con: x.con,
                            diff: x.diff,
                            unv: x.unv,
                            n_sentences: 1,
                        }
                    })
                    .collect::<Vec<_>>(),
            )
            .expect("non-empty");
            SentenceScores {
                ent: avg.ent,
                con: avg.con,
                diff: avg.diff,
                unv: avg.unv,
            }
        })
        .collect();
    Some(Scored { doc, sentences })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{BackendError, NliPair, NliProbs};
    use crate::corpus::GenerationConfig;

    /// Entailment read from the premise: "e=0.2 ..." style markers.
    struct Marked;

    impl NliBackend for Marked {
        fn nli(&self, pairs: &[NliPair]) -> Result<Vec<NliProbs>, BackendError> {
            Ok(pairs
                .iter()
                .map(|p| {
                    let e: f64 = p
                        .premise
                        .split_whitespace()
                        .find_map(|w| w.strip_prefix("e").and_then(|x| x.trim_end_matches('.').parse().ok()))
                        .unwrap_or(0.0);
                    NliProbs {
                        entail: e,
                        neutral: 1.0 - e - 0.1,
                        contradict: 0.1,
                    }
                })
                .collect())
        }
    }

    fn sample(i: usize, text: &str) -> GenerationSample {
        GenerationSample {
            entity_id: "Q1".into(),
            name: "X".into(),
            language: "en".into(),
            sample_index: i,
            prompt: "p".into(),
            text: text.into(),
            detected_language: Some("en".into()),
            detector_valid: true,
        }
    }

    fn group(texts: &[&str]) -> SampleGroup {
        SampleGroup {
            entity_id: "Q1".into(),
            language: "en".into(),
            samples: texts.iter().enumerate().map(|(i, t)| sample(i, t)).collect(),
            generation_config: GenerationConfig::default(),
        }
    }

    #[test]
    fn pairwise_means_over_siblings() {
        let g = group(&["target.", "e0.2", "e0.4", "e0.6", "e0.8"]);
        let out = pairwise_score(&g, 0, &Marked).unwrap();
        let s = out.scored().unwrap();
        assert!((s.doc.ent - 0.5).abs() < 1e-12);
        assert_eq!(s.doc.diff, s.doc.ent - s.doc.con);
        assert_eq!(s.sentences.len(), 1);
    }

    #[test]
    fn pairwise_sibling_order_irrelevant() {
        let a = group(&["target.", "e0.2", "e0.4", "e0.6", "e0.8"]);
        let b = group(&["target.", "e0.8", "e0.2", "e0.6", "e0.4"]);
        assert_eq!(pairwise_score(&a, 0, &Marked).unwrap(), pairwise_score(&b, 0, &Marked).unwrap());
    }

    #[test]
    fn one_sibling_equals_reference_score() {
        let g = group(&["target.", "e0.3"]);
        let reference = ReferenceDoc {
            entity_id: "Q1".into(),
            language: "en".into(),
            title: "X".into(),
            text: "e0.3".into(),
        };
        assert_eq!(
            pairwise_score(&g, 0, &Marked).unwrap(),
            reference_score(&g.samples[0], &reference, &Marked).unwrap()
        );
    }

    #[test]
    fn skips() {
        let g = group(&["target.", "", "  "]);
        assert_eq!(pairwise_score(&g, 0, &Marked).unwrap(), Outcome::Skipped(SkipReason::NoUsableSibling));
        assert_eq!(pairwise_score(&g, 1, &Marked).unwrap(), Outcome::Skipped(SkipReason::EmptyGeneration));
        assert_eq!(pairwise_score(&g, 9, &Marked).unwrap(), Outcome::Skipped(SkipReason::MissingTarget));
        let empty_ref = ReferenceDoc {
            entity_id: "Q1".into(),
            language: "en".into(),
            title: "X".into(),
            text: String::new(),
        };
        assert_eq!(
            reference_score(&g.samples[0], &empty_ref, &Marked).unwrap(),
            Outcome::Skipped(SkipReason::EmptyReference)
        );
    }
}
