//! A deterministic in-process stand-in for the model server.
//!
//! It is not a model. NLI probabilities come from token overlap and number
//! agreement, entities are runs of capitalized words, and language is
//! guessed from script and stopwords. It speaks the same envelope protocol
//! as a real server, which makes it useful for demos, fixtures and tests
//! that must run without a network.

use std::collections::HashSet;

use serde_json::value::RawValue;

use super::{
    BackendError, EntitySpan, LangGuess, LangIdBackend, LangIdItem, NerBackend, NerItem, NerResult,
    NliBackend, NliPair, NliProbs, RequestEnvelope, ResponseBody, ResponseEnvelope, Task, Transport, NLI_BATCH_CAP,
};
use crate::corpus::tokenize;
use crate::lexical::StopwordSet;

/// Languages the stub recognizer covers; everything else is "unsupported".
const NER_LANGUAGES: &[&str] = &["de", "en", "es", "fr", "it", "ro", "sv"];

#[derive(Debug, Clone, Default)]
pub struct StubBackend;

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn lowered_tokens(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.to_lowercase()).collect()
}

fn is_number(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_ascii_digit())
}

impl StubBackend {
    pub fn score_pair(&self, pair: &NliPair) -> NliProbs {
        let premise: HashSet<String> = lowered_tokens(&pair.premise).into_iter().collect();
        let hypothesis: HashSet<String> = lowered_tokens(&pair.hypothesis).into_iter().collect();
        if hypothesis.is_empty() {
            return NliProbs {
                entail: 0.0,
                neutral: 1.0,
                contradict: 0.0,
            };
        }
        let overlap = hypothesis.intersection(&premise).count() as f64 / hypothesis.len() as f64;
        let premise_has_numbers = premise.iter().any(|t| is_number(t));
        let number_conflict = premise_has_numbers
            && overlap >= 0.3
            && hypothesis.iter().any(|t| is_number(t) && !premise.contains(t));
        let (entail, contradict) = if number_conflict {
            (round6(0.1 * overlap), round6(0.55 + 0.35 * overlap))
        } else {
            (round6(0.95 * overlap * overlap), round6(0.08 * (1.0 - overlap)))
        };
        NliProbs {
            entail,
            neutral: round6(1.0 - entail - contradict),
            contradict,
        }
    }

    pub fn recognize(&self, item: &NerItem) -> NerResult {
        use unicode_segmentation::UnicodeSegmentation;
        if !NER_LANGUAGES.contains(&item.lang.as_str()) {
            return NerResult::Unsupported;
        }
        let text = &item.text;
        // Runs of capitalized words. A run that opens a sentence and holds a
        // single word is dropped ("The", "He").
        let mut spans = Vec::new();
        // (start, end, words, sentence_initial)
        let mut run: Option<(usize, usize, usize, bool)> = None;
        let mut sentence_start = true;
        let flush = |run: &mut Option<(usize, usize, usize, bool)>, spans: &mut Vec<(usize, usize)>| {
            if let Some((s, e, words, initial)) = run.take() {
                if !(initial && words == 1) {
                    spans.push((s, e));
                }
            }
        };
        for (start, word) in text.split_word_bound_indices() {
            let end = start + word.len();
            let capitalized = word.chars().next().is_some_and(char::is_uppercase);
            if capitalized {
                run = Some(match run {
                    Some((s, _, n, initial)) => (s, end, n + 1, initial),
                    None => (start, end, 1, sentence_start),
                });
            } else if word == " " && run.is_some() {
                // A single space may join two capitalized words.
            } else {
                flush(&mut run, &mut spans);
            }
            if word.chars().any(char::is_alphanumeric) {
                sentence_start = false;
            } else if matches!(word, "." | "!" | "?") {
                sentence_start = true;
            }
        }
        flush(&mut run, &mut spans);
        NerResult::Entities(
            spans
                .into_iter()
                .map(|(s, e)| EntitySpan {
                    surface: text[s..e].to_string(),
                    label: "ENT".into(),
                    start: s,
                    end: e,
                })
                .collect(),
        )
    }

    pub fn guess_language(&self, item: &LangIdItem) -> Option<LangGuess> {
        let letters: Vec<char> = item.text.chars().filter(|c| c.is_alphabetic()).collect();
        if letters.is_empty() {
            return None;
        }
        let count = |f: fn(char) -> bool| letters.iter().filter(|&&c| f(c)).count();
        let kana = count(|c| ('\u{3040}'..='\u{30FF}').contains(&c));
        let han = count(|c| ('\u{4E00}'..='\u{9FFF}').contains(&c) || ('\u{3400}'..='\u{4DBF}').contains(&c));
        let hangul = count(|c| ('\u{AC00}'..='\u{D7AF}').contains(&c));
        let thai = count(|c| ('\u{0E00}'..='\u{0E7F}').contains(&c));
        let arabic = count(|c| ('\u{0600}'..='\u{06FF}').contains(&c));
        let cyrillic = count(|c| ('\u{0400}'..='\u{04FF}').contains(&c));
        let latin = count(|c| c.is_ascii_alphabetic() || ('\u{00C0}'..='\u{024F}').contains(&c));
        let total = letters.len() as f64;

        let scripts = [
            (kana + han, if kana > 0 { "ja" } else { "zh" }),
            (hangul, "ko"),
            (thai, "th"),
            (arabic, "fa"),
            (cyrillic, if item.text.contains(['і', 'ї', 'є', 'ґ']) { "uk" } else { "ru" }),
        ];
        let (best_count, best_lang) = scripts.iter().copied().max_by_key(|(n, _)| *n).unwrap();
        if best_count > latin {
            return Some(LangGuess {
                lang: best_lang.to_string(),
                confidence: round6(best_count as f64 / total),
            });
        }
        let tokens = lowered_tokens(&item.text);
        let mut best: Option<(usize, &str)> = None;
        for lang in ["de", "en", "es", "fr", "it"] {
            let stop = StopwordSet::bundled(lang);
            let hits = tokens.iter().filter(|t| stop.contains(t)).count();
            if hits > 0 && best.map_or(true, |(b, _)| hits > b) {
                best = Some((hits, lang));
            }
        }
        best.map(|(hits, lang)| LangGuess {
            lang: lang.to_string(),
            confidence: round6((hits as f64 / tokens.len().max(1) as f64).min(1.0) * (latin as f64 / total)),
        })
    }

    fn respond(&self, request: &RequestEnvelope) -> ResponseEnvelope {
        if request.items.len() > NLI_BATCH_CAP {
            return ResponseEnvelope::error(
                request.id,
                "oversize",
                format!("{} items exceed the cap of {NLI_BATCH_CAP}", request.items.len()),
            );
        }
        let mut out = Vec::with_capacity(request.items.len());
        for item in &request.items {
            let payload = match request.task {
                Task::Nli => serde_json::from_value::<NliPair>(item.clone())
                    .map(|p| serde_json::to_string(&self.score_pair(&p)).expect("serializes")),
                Task::Ner => serde_json::from_value::<NerItem>(item.clone()).map(|n| self.recognize(&n).to_json()),
                Task::Langid => serde_json::from_value::<LangIdItem>(item.clone())
                    .map(|l| serde_json::to_string(&self.guess_language(&l)).expect("serializes")),
            };
            match payload {
                Ok(p) => out.push(RawValue::from_string(p).expect("valid JSON")),
                Err(e) => return ResponseEnvelope::error(request.id, "bad-item", e.to_string()),
            }
        }
        ResponseEnvelope {
            id: request.id,
            body: ResponseBody::Items(out),
        }
    }
}

impl NliBackend for StubBackend {
    fn nli(&self, pairs: &[NliPair]) -> Result<Vec<NliProbs>, BackendError> {
        Ok(pairs.iter().map(|p| self.score_pair(p)).collect())
    }
}

impl NerBackend for StubBackend {
    fn ner(&self, items: &[NerItem]) -> Result<Vec<NerResult>, BackendError> {
        Ok(items.iter().map(|i| self.recognize(i)).collect())
    }
}

impl LangIdBackend for StubBackend {
    fn identify(&self, texts: &[String]) -> Result<Vec<Option<LangGuess>>, BackendError> {
        Ok(texts.iter().map(|t| self.guess_language(&LangIdItem { text: t.clone() })).collect())
    }
}

impl Transport for StubBackend {
    fn exchange(&self, request: &RequestEnvelope) -> Result<ResponseEnvelope, BackendError> {
        // Round-trip through the wire encoding so the stub exercises the
        // same parsing as a socket server.
        let request = RequestEnvelope::parse(&request.to_line())?;
        ResponseEnvelope::parse(&self.respond(&request).to_line())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_pair_entails() {
        let p = StubBackend.score_pair(&NliPair::new("Del Piero played for Juventus.", "Del Piero played for Juventus."));
        assert!(p.entail > p.contradict);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn wrong_date_contradicts() {
        let p = StubBackend.score_pair(&NliPair::new(
            "Alessandro Del Piero was born on 9 November 1974 in Conegliano.",
            "Alessandro Del Piero was born on 28 September 1976.",
        ));
        assert!(p.contradict > p.entail, "{p:?}");
        assert!(p.validate().is_ok());
    }

    #[test]
    fn ner_spans_are_valid() {
        let item = NerItem {
            text: "Del Piero played for Juventus in Turin.".into(),
            lang: "en".into(),
        };
        let result = StubBackend.recognize(&item);
        result.validate(&item.text).unwrap();
        match result {
            NerResult::Entities(spans) => {
                let surfaces: Vec<&str> = spans.iter().map(|s| s.surface.as_str()).collect();
                assert!(surfaces.contains(&"Del Piero"), "{surfaces:?}");
                assert!(surfaces.contains(&"Juventus"), "{surfaces:?}");
                for s in &spans {
                    assert_eq!(&item.text[s.start..s.end], s.surface);
                }
            }
            NerResult::Unsupported => panic!(),
        }
        assert_eq!(
            StubBackend.recognize(&NerItem { text: "x".into(), lang: "zh".into() }),
            NerResult::Unsupported
        );
        assert_eq!(
            StubBackend.recognize(&NerItem { text: String::new(), lang: "en".into() }),
            NerResult::Entities(vec![])
        );
    }

    #[test]
    fn langid_scripts_and_stopwords() {
        let id = |t: &str| StubBackend.guess_language(&LangIdItem { text: t.into() }).map(|g| g.lang);
        assert_eq!(id("他是一名意大利足球运动员。").as_deref(), Some("zh"));
        assert_eq!(id("He is an Italian football player.").as_deref(), Some("en"));
        assert_eq!(id("Il est un joueur de football.").as_deref(), Some("fr"));
        assert_eq!(id("").as_deref(), None);
        assert_eq!(id("1974").as_deref(), None);
    }

    #[test]
    fn oversize_batch_rejected() {
        let req = RequestEnvelope {
            id: 4,
            task: Task::Langid,
            model_id: "m".into(),
            items: vec![serde_json::json!({"text": "a"}); NLI_BATCH_CAP + 1],
        };
        let resp = StubBackend.exchange(&req).unwrap();
        assert!(matches!(resp.body, ResponseBody::Error(ref e) if e.code == "oversize"));
    }
}
