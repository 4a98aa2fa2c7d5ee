use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;

use super::{
    BackendError, CacheKey, LangGuess, LangIdBackend, LangIdItem, NerBackend, NerItem, NerResult,
    NliBackend, NliPair, NliProbs, RequestEnvelope, ResponseBody, ScoreCache, Task, Transport,
    MAX_RETRIES, NLI_BATCH_CAP,
};

/// Where responses come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheMode {
    /// Always ask the server; the cache is ignored.
    Live,
    /// Only the cache; a miss is an error.
    Cache,
    /// Cache first, server for misses, and misses are written back.
    CacheThenLive,
}

impl CacheMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "live" => Some(CacheMode::Live),
            "cache" => Some(CacheMode::Cache),
            "cache-then-live" => Some(CacheMode::CacheThenLive),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CacheMode::Live => "live",
            CacheMode::Cache => "cache",
            CacheMode::CacheThenLive => "cache-then-live",
        }
    }
}

/// Model identifiers sent with every envelope and folded into cache keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelIds {
    pub nli: String,
    pub ner: String,
    pub langid: String,
}

impl Default for ModelIds {
    fn default() -> Self {
        Self {
            nli: "xlm-roberta-large-xnli".into(),
            ner: "spacy-ner".into(),
            langid: "langdetect".into(),
        }
    }
}

impl ModelIds {
    pub fn get(&self, task: Task) -> &str {
        match task {
            Task::Nli => &self.nli,
            Task::Ner => &self.ner,
            Task::Langid => &self.langid,
        }
    }
}

/// Batching, caching, validating client over a [`Transport`].
pub struct BackendClient {
    transport: Option<Arc<dyn Transport>>,
    cache: Option<Arc<ScoreCache>>,
    mode: CacheMode,
    models: ModelIds,
    batch_cap: usize,
    next_id: AtomicU64,
}

type Validator<'a> = &'a dyn Fn(usize, &str) -> Result<(), String>;

impl BackendClient {
    pub fn new(
        models: ModelIds,
        transport: Option<Arc<dyn Transport>>,
        cache: Option<Arc<ScoreCache>>,
        mode: CacheMode,
    ) -> Result<Self, BackendError> {
        match mode {
            CacheMode::Live if transport.is_none() => {
                return Err(BackendError::NotConfigured("live mode needs a backend address".into()))
            }
            CacheMode::Cache if cache.is_none() => {
                return Err(BackendError::NotConfigured("cache mode needs a cache directory".into()))
            }
            CacheMode::CacheThenLive if transport.is_none() || cache.is_none() => {
                return Err(BackendError::NotConfigured(
                    "cache-then-live mode needs both a backend address and a cache directory".into(),
                ))
            }
            _ => {}
        }
        Ok(Self {
            transport,
            cache,
            mode,
            models,
            batch_cap: NLI_BATCH_CAP,
            next_id: AtomicU64::new(1),
        })
    }

    pub fn with_batch_cap(mut self, cap: usize) -> Self {
        self.batch_cap = cap.clamp(1, NLI_BATCH_CAP);
        self
    }

    pub fn models(&self) -> &ModelIds {
        &self.models
    }

    pub fn mode(&self) -> CacheMode {
        self.mode
    }

    fn exchange_with_retry(&self, request: &RequestEnvelope) -> Result<Vec<String>, BackendError> {
        let transport = self
            .transport
            .as_ref()
            .ok_or_else(|| BackendError::NotConfigured("no backend transport".into()))?;
        let mut attempt = 0;
        let response = loop {
            match transport.exchange(request) {
                Ok(r) => break r,
                Err(e) if e.is_retryable() && attempt < MAX_RETRIES => attempt += 1,
                Err(e) => return Err(e),
            }
        };
        match response.body {
            ResponseBody::Error(err) => Err(BackendError::Server {
                code: err.code,
                message: err.message,
            }),
            ResponseBody::Items(items) if items.len() != request.items.len() => {
                Err(BackendError::Protocol(format!(
                    "request {} sent {} items but received {}",
                    request.id,
                    request.items.len(),
                    items.len()
                )))
            }
            ResponseBody::Items(items) => Ok(items.into_iter().map(|r| r.get().to_string()).collect()),
        }
    }

    /// Resolves raw payloads for `items`, in order. Identical items share one
    /// lookup. Every payload passes `validate` before it is cached or returned.
    fn fetch(&self, task: Task, items: &[Value], validate: Validator<'_>) -> Result<Vec<String>, BackendError> {
        let model_id = self.models.get(task);
        let keys: Vec<CacheKey> = items.iter().map(|it| CacheKey::new(task, model_id, it)).collect();
        let mut first_pos: HashMap<&CacheKey, usize> = HashMap::new();
        let mut unique: Vec<usize> = Vec::new();
        for (i, k) in keys.iter().enumerate() {
            first_pos.entry(k).or_insert_with(|| {
                unique.push(i);
                i
            });
        }

        let mut resolved: HashMap<&CacheKey, String> = HashMap::new();
        if let (Some(cache), CacheMode::Cache | CacheMode::CacheThenLive) = (&self.cache, self.mode) {
            for &i in &unique {
                if let Some(bytes) = cache.get(task, model_id, &keys[i])? {
                    let text = String::from_utf8(bytes)
                        .map_err(|_| BackendError::Protocol(format!("cache entry {} is not UTF-8", keys[i])))?;
                    validate(i, &text).map_err(BackendError::Protocol)?;
                    resolved.insert(&keys[i], text);
                }
            }
        }

        let missing: Vec<usize> = unique
            .iter()
            .copied()
            .filter(|i| !resolved.contains_key(&keys[*i]))
            .collect();
        if !missing.is_empty() && self.mode == CacheMode::Cache {
            return Err(BackendError::CacheMiss {
                task,
                keys: missing.iter().map(|&i| keys[i].to_string()).collect(),
            });
        }

        for chunk in missing.chunks(self.batch_cap) {
            let request = RequestEnvelope {
                id: self.next_id.fetch_add(1, Ordering::Relaxed),
                task,
                model_id: model_id.to_string(),
                items: chunk.iter().map(|&i| items[i].clone()).collect(),
            };
            let payloads = self.exchange_with_retry(&request)?;
            for (&i, payload) in chunk.iter().zip(payloads) {
                validate(i, &payload).map_err(BackendError::Protocol)?;
                if let (Some(cache), CacheMode::CacheThenLive) = (&self.cache, self.mode) {
                    cache.put(task, model_id, &keys[i], payload.as_bytes())?;
                }
                resolved.insert(&keys[i], payload);
            }
        }

        Ok(keys.iter().map(|k| resolved[k].clone()).collect())
    }

    fn to_values<T: Serialize>(items: &[T]) -> Vec<Value> {
        items
            .iter()
            .map(|it| serde_json::to_value(it).expect("request item serializes"))
            .collect()
    }

    pub fn nli_batch(&self, pairs: &[NliPair]) -> Result<Vec<NliProbs>, BackendError> {
        let parse = |text: &str| -> Result<NliProbs, String> {
            let probs: NliProbs = serde_json::from_str(text).map_err(|e| e.to_string())?;
            probs.validate()?;
            Ok(probs)
        };
        let raw = self.fetch(Task::Nli, &Self::to_values(pairs), &|i, text| {
            parse(text).map(|_| ()).map_err(|e| format!("nli item {i}: {e}"))
        })?;
        raw.iter()
            .map(|t| parse(t).map_err(BackendError::Protocol))
            .collect()
    }

    pub fn ner_batch(&self, items: &[NerItem]) -> Result<Vec<NerResult>, BackendError> {
        let raw = self.fetch(Task::Ner, &Self::to_values(items), &|i, text| {
            NerResult::from_json(text)
                .and_then(|r| r.validate(&items[i].text))
                .map_err(|e| format!("ner item {i}: {e}"))
        })?;
        raw.iter()
            .map(|t| NerResult::from_json(t).map_err(BackendError::Protocol))
            .collect()
    }

    pub fn langid_batch(&self, texts: &[String]) -> Result<Vec<Option<LangGuess>>, BackendError> {
        let items: Vec<LangIdItem> = texts.iter().map(|t| LangIdItem { text: t.clone() }).collect();
        let parse = |text: &str| -> Result<Option<LangGuess>, String> {
            let guess: Option<LangGuess> = serde_json::from_str(text).map_err(|e| e.to_string())?;
            if let Some(g) = &guess {
                g.validate()?;
            }
            Ok(guess)
        };
        let raw = self.fetch(Task::Langid, &Self::to_values(&items), &|i, text| {
            parse(text).map(|_| ()).map_err(|e| format!("langid item {i}: {e}"))
        })?;
        raw.iter()
            .map(|t| parse(t).map_err(BackendError::Protocol))
            .collect()
    }
}

impl NliBackend for BackendClient {
    fn nli(&self, pairs: &[NliPair]) -> Result<Vec<NliProbs>, BackendError> {
        self.nli_batch(pairs)
    }
}

impl NerBackend for BackendClient {
    fn ner(&self, items: &[NerItem]) -> Result<Vec<NerResult>, BackendError> {
        self.ner_batch(items)
    }
}

impl LangIdBackend for BackendClient {
    fn identify(&self, texts: &[String]) -> Result<Vec<Option<LangGuess>>, BackendError> {
        self.langid_batch(texts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::ResponseEnvelope;
    use serde_json::value::RawValue;
    use std::sync::Mutex;

    type Reply = Box<dyn Fn(&RequestEnvelope) -> Result<ResponseEnvelope, BackendError> + Send + Sync>;

    /// Replies with canned item payloads and records every request.
    struct Scripted {
        reply: Reply,
        seen: Mutex<Vec<RequestEnvelope>>,
    }

    impl Transport for Scripted {
        fn exchange(&self, request: &RequestEnvelope) -> Result<ResponseEnvelope, BackendError> {
            self.seen.lock().unwrap().push(request.clone());
            (self.reply)(request)
        }
    }

    fn items(id: u64, payloads: Vec<String>) -> ResponseEnvelope {
        ResponseEnvelope {
            id,
            body: ResponseBody::Items(payloads.into_iter().map(|p| RawValue::from_string(p).unwrap()).collect()),
        }
    }

    fn fixed_nli(payload: &'static str) -> Arc<Scripted> {
        Arc::new(Scripted {
            reply: Box::new(move |req| Ok(items(req.id, vec![payload.to_string(); req.items.len()]))),
            seen: Mutex::new(vec![]),
        })
    }

    fn live(t: Arc<Scripted>) -> BackendClient {
        BackendClient::new(ModelIds::default(), Some(t), None, CacheMode::Live).unwrap()
    }

    #[test]
    fn empty_request_empty_response() {
        let t = fixed_nli(r#"{"entail":0.7,"neutral":0.2,"contradict":0.1}"#);
        assert!(live(t.clone()).nli_batch(&[]).unwrap().is_empty());
        assert!(t.seen.lock().unwrap().is_empty());
    }

    #[test]
    fn simplex_violation_is_protocol_error_and_not_retried() {
        let t = fixed_nli(r#"{"entail":0.5,"neutral":0.4,"contradict":0.2}"#);
        let err = live(t.clone()).nli_batch(&[NliPair::new("a", "b")]).unwrap_err();
        assert!(matches!(err, BackendError::Protocol(_)), "{err}");
        assert_eq!(t.seen.lock().unwrap().len(), 1);
    }

    #[test]
    fn duplicate_pairs_share_a_result() {
        let t = fixed_nli(r#"{"entail":0.7,"neutral":0.2,"contradict":0.1}"#);
        let p = NliPair::new("a", "b");
        let got = live(t.clone()).nli_batch(&[p.clone(), NliPair::new("c", "d"), p]).unwrap();
        assert_eq!(got[0], got[2]);
        assert_eq!(t.seen.lock().unwrap()[0].items.len(), 2);
    }

    #[test]
    fn large_batches_split_at_cap() {
        let t = fixed_nli(r#"{"entail":0.7,"neutral":0.2,"contradict":0.1}"#);
        let pairs: Vec<NliPair> = (0..150).map(|i| NliPair::new("p", format!("h{i}"))).collect();
        assert_eq!(live(t.clone()).nli_batch(&pairs).unwrap().len(), 150);
        let sizes: Vec<usize> = t.seen.lock().unwrap().iter().map(|r| r.items.len()).collect();
        assert_eq!(sizes, vec![64, 64, 22]);
    }

    #[test]
    fn transport_failures_retried_twice() {
        let calls = Arc::new(Mutex::new(0));
        let c = calls.clone();
        let t = Arc::new(Scripted {
            reply: Box::new(move |req| {
                let mut n = c.lock().unwrap();
                *n += 1;
                if *n <= 2 {
                    Err(BackendError::Transport("reset".into()))
                } else {
                    Ok(items(req.id, vec!["null".into(); req.items.len()]))
                }
            }),
            seen: Mutex::new(vec![]),
        });
        let got = live(t).langid_batch(&["x".into()]).unwrap();
        assert_eq!(got, vec![None]);
        assert_eq!(*calls.lock().unwrap(), 3);
    }

    #[test]
    fn third_transport_failure_surfaces() {
        let t = Arc::new(Scripted {
            reply: Box::new(|_| Err(BackendError::Transport("down".into()))),
            seen: Mutex::new(vec![]),
        });
        assert!(matches!(
            live(t.clone()).langid_batch(&["x".into()]),
            Err(BackendError::Transport(_))
        ));
        assert_eq!(t.seen.lock().unwrap().len(), 1 + MAX_RETRIES);
    }

    #[test]
    fn cache_then_live_populates_and_cache_mode_replays() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Arc::new(ScoreCache::open(dir.path()).unwrap());
        let t = fixed_nli(r#"{"entail": 0.7, "neutral": 0.2, "contradict": 0.1}"#);
        let warm = BackendClient::new(ModelIds::default(), Some(t), Some(cache.clone()), CacheMode::CacheThenLive).unwrap();
        let pairs = vec![NliPair::new("a", "b")];
        let first = warm.nli_batch(&pairs).unwrap();

        let offline = BackendClient::new(ModelIds::default(), None, Some(cache.clone()), CacheMode::Cache).unwrap();
        assert_eq!(offline.nli_batch(&pairs).unwrap(), first);
        let key = CacheKey::new(Task::Nli, &ModelIds::default().nli, &serde_json::to_value(&pairs[0]).unwrap());
        assert_eq!(
            cache.get(Task::Nli, &ModelIds::default().nli, &key).unwrap().unwrap(),
            br#"{"entail": 0.7, "neutral": 0.2, "contradict": 0.1}"#
        );

        match offline.nli_batch(&[NliPair::new("x", "y")]).unwrap_err() {
            BackendError::CacheMiss { keys, .. } => assert_eq!(keys.len(), 1),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn mode_requirements() {
        assert!(BackendClient::new(ModelIds::default(), None, None, CacheMode::Live).is_err());
        assert!(BackendClient::new(ModelIds::default(), None, None, CacheMode::Cache).is_err());
        assert!(BackendClient::new(ModelIds::default(), None, None, CacheMode::CacheThenLive).is_err());
    }

    #[test]
    fn unsupported_ner_marker_passes_through() {
        let t = Arc::new(Scripted {
            reply: Box::new(|req| Ok(items(req.id, vec![r#"{"unsupported":true}"#.into(); req.items.len()]))),
            seen: Mutex::new(vec![]),
        });
        let got = live(t)
            .ner_batch(&[NerItem { text: "Text".into(), lang: "fa".into() }])
            .unwrap();
        assert_eq!(got, vec![NerResult::Unsupported]);
    }

    #[test]
    fn item_count_mismatch_rejected() {
        let t = Arc::new(Scripted {
            reply: Box::new(|req| Ok(items(req.id, vec![]))),
            seen: Mutex::new(vec![]),
        });
        assert!(matches!(
            live(t).langid_batch(&["a".into()]),
            Err(BackendError::Protocol(_))
        ));
    }
}
