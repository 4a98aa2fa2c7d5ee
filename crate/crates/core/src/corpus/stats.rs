use std::collections::BTreeMap;

use super::{normalize_lang, segment, CorpusError, SampleGroup};
use crate::backend::{LangIdBackend, NLI_BATCH_CAP};

/// Generation-quality statistics for one prompt language.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityStats {
    pub language: String,
    pub n_examples: usize,
    pub mean_tokens: f64,
    pub mean_sentences: f64,
    /// Percentage of samples the language detector could classify.
    pub valid_pct: f64,
    /// Most frequent detected language among valid samples.
    pub flang: Option<String>,
    /// Percentage of valid samples detected as the prompt language.
    pub acc_pct: f64,
    /// No valid samples; `acc_pct` is reported as 0.
    pub zero_valid: bool,
}

pub const QUALITY_STATS_HEADER: &str = "lang\tn\tmean_tokens\tmean_sents\tvalid_pct\tflang\tacc_pct";

impl QualityStats {
    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{:.2}\t{:.2}\t{:.2}\t{}\t{:.2}",
            self.language,
            self.n_examples,
            self.mean_tokens,
            self.mean_sentences,
            self.valid_pct,
            self.flang.as_deref().unwrap_or("-"),
            self.acc_pct
        )
    }
}

/// Runs language identification over every sample and stores the result on
/// the sample. Blank texts are marked undetectable without a backend call.
pub fn detect_languages(
    groups: &mut [SampleGroup],
    langid: &dyn LangIdBackend,
) -> Result<(), CorpusError> {
    let mut slots: Vec<(usize, usize)> = Vec::new();
    let mut texts: Vec<String> = Vec::new();
    for (gi, group) in groups.iter_mut().enumerate() {
        for (si, sample) in group.samples.iter_mut().enumerate() {
            if sample.text.trim().is_empty() {
                sample.set_detection(None);
            } else {
                slots.push((gi, si));
                texts.push(sample.text.clone());
            }
        }
    }
    for (chunk_slots, chunk_texts) in slots.chunks(NLI_BATCH_CAP).zip(texts.chunks(NLI_BATCH_CAP)) {
        let guesses = langid
            .identify(chunk_texts)
            .map_err(|source| CorpusError::Backend {
                batch: chunk_texts.to_vec(),
                source,
            })?;
        for (&(gi, si), guess) in chunk_slots.iter().zip(guesses) {
            groups[gi].samples[si].set_detection(guess.map(|g| normalize_lang(&g.lang)));
        }
    }
    Ok(())
}

#[derive(Default)]
struct Accum {
    n: usize,
    tokens: usize,
    sentences: usize,
    valid: usize,
    correct: usize,
    detected: BTreeMap<String, usize>,
}

/// Per-language generation statistics over samples whose language has
/// already been detected. Output is sorted by language code.
pub fn quality_stats(groups: &[SampleGroup]) -> Vec<QualityStats> {
    let mut by_lang: BTreeMap<&str, Accum> = BTreeMap::new();
    for group in groups {
        for sample in &group.samples {
            let acc = by_lang.entry(sample.language.as_str()).or_default();
            let seg = segment(&sample.text, &sample.language);
            acc.n += 1;
            acc.tokens += seg.tokens.len();
            acc.sentences += seg.sentences.len();
            if let (true, Some(detected)) = (sample.detector_valid, &sample.detected_language) {
                acc.valid += 1;
                if *detected == sample.language {
                    acc.correct += 1;
                }
                *acc.detected.entry(detected.clone()).or_default() += 1;
            }
        }
    }
    by_lang
        .into_iter()
        .map(|(language, acc)| {
            let n = acc.n as f64;
            // Ties resolve to the lexicographically smallest code: BTreeMap
            // iterates in order and only a strictly larger count replaces.
            let flang = acc
                .detected
                .iter()
                .fold(None::<(&String, usize)>, |best, (code, &count)| match best {
                    Some((_, c)) if c >= count => best,
                    _ => Some((code, count)),
                })
                .map(|(code, _)| code.clone());
            QualityStats {
                language: language.to_string(),
                n_examples: acc.n,
                mean_tokens: acc.tokens as f64 / n,
                mean_sentences: acc.sentences as f64 / n,
                valid_pct: 100.0 * acc.valid as f64 / n,
                flang,
                acc_pct: if acc.valid == 0 {
                    0.0
                } else {
                    100.0 * acc.correct as f64 / acc.valid as f64
                },
                zero_valid: acc.valid == 0,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{BackendError, LangGuess};
    use crate::corpus::{GenerationConfig, GenerationSample};
    use proptest::prelude::*;

    /// Detects the language from a `[xx]` prefix; no prefix means undetectable.
    struct TaggedLangId;

    impl LangIdBackend for TaggedLangId {
        fn identify(&self, texts: &[String]) -> Result<Vec<Option<LangGuess>>, BackendError> {
            Ok(texts
                .iter()
                .map(|t| {
                    t.strip_prefix('[').and_then(|rest| rest.get(..2)).map(|code| LangGuess {
                        lang: code.to_string(),
                        confidence: 1.0,
                    })
                })
                .collect())
        }
    }

    fn group(lang: &str, texts: &[&str]) -> SampleGroup {
        SampleGroup {
            entity_id: "Q1".into(),
            language: lang.into(),
            generation_config: GenerationConfig::default(),
            samples: texts
                .iter()
                .enumerate()
                .map(|(i, t)| GenerationSample {
                    entity_id: "Q1".into(),
                    name: "N".into(),
                    language: lang.into(),
                    sample_index: i,
                    prompt: String::new(),
                    text: t.to_string(),
                    detected_language: None,
                    detector_valid: false,
                })
                .collect(),
        }
    }

    #[test]
    fn accuracy_over_valid_subset_only() {
        let mut groups = vec![group(
            "de",
            &["[en] He was born.", "[de] Er wurde geboren.", "[en] Yes.", "no tag", ""],
        )];
        detect_languages(&mut groups, &TaggedLangId).unwrap();
        let stats = quality_stats(&groups);
        assert_eq!(stats.len(), 1);
        let s = &stats[0];
        assert_eq!(s.n_examples, 5);
        assert!((s.valid_pct - 60.0).abs() < 1e-12);
        assert_eq!(s.flang.as_deref(), Some("en"));
        assert!((s.acc_pct - 100.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn all_empty_is_degenerate() {
        let mut groups = vec![group("hu", &["", "", " "])];
        detect_languages(&mut groups, &TaggedLangId).unwrap();
        let s = &quality_stats(&groups)[0];
        assert_eq!(s.mean_tokens, 0.0);
        assert_eq!(s.mean_sentences, 0.0);
        assert_eq!(s.valid_pct, 0.0);
        assert_eq!(s.acc_pct, 0.0);
        assert!(s.zero_valid);
        assert_eq!(s.flang, None);
        assert_eq!(s.tsv_row(), "hu\t3\t0.00\t0.00\t0.00\t-\t0.00");
    }

    #[test]
    fn modal_tie_breaks_to_smallest_code() {
        let mut groups = vec![group("it", &["[fr] a", "[en] b", "[fr] c", "[en] d"])];
        detect_languages(&mut groups, &TaggedLangId).unwrap();
        assert_eq!(quality_stats(&groups)[0].flang.as_deref(), Some("en"));
    }

    #[test]
    fn backend_failure_carries_batch() {
        struct Down;
        impl LangIdBackend for Down {
            fn identify(&self, _: &[String]) -> Result<Vec<Option<LangGuess>>, BackendError> {
                Err(BackendError::Transport("connection refused".into()))
            }
        }
        let mut groups = vec![group("en", &["one", "", "two"])];
        match detect_languages(&mut groups, &Down).unwrap_err() {
            CorpusError::Backend { batch, .. } => assert_eq!(batch, vec!["one", "two"]),
            other => panic!("unexpected {other}"),
        }
    }

    proptest! {
        #[test]
        fn bounds_and_permutation_invariance(
            tags in proptest::collection::vec(prop_oneof![Just("[en] x y."), Just("[fr] z."), Just("none"), Just("")], 1..30),
            seed in any::<u64>(),
        ) {
            let mut groups = vec![group("en", &tags)];
            detect_languages(&mut groups, &TaggedLangId).unwrap();
            let a = quality_stats(&groups);
            let mut shuffled = groups.clone();
            let n = shuffled[0].samples.len();
            // Deterministic rotation+reverse permutation from the seed.
            shuffled[0].samples.rotate_left((seed as usize) % n);
            if seed % 2 == 0 { shuffled[0].samples.reverse(); }
            let b = quality_stats(&shuffled);
            prop_assert_eq!(&a, &b);
            for s in &a {
                prop_assert!((0.0..=100.0).contains(&s.valid_pct));
                prop_assert!((0.0..=100.0).contains(&s.acc_pct));
            }
        }
    }
}
