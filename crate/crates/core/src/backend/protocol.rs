use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::Value;

use super::{canonical_json, BackendError, SIMPLEX_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Nli,
    Ner,
    Langid,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Nli => "nli",
            Task::Ner => "ner",
            Task::Langid => "langid",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestEnvelope {
    pub id: u64,
    pub task: Task,
    pub model_id: String,
    pub items: Vec<Value>,
}

impl RequestEnvelope {
    /// Canonical single-line encoding (no trailing newline).
    pub fn to_line(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("envelope serializes"))
    }

    pub fn parse(line: &str) -> Result<Self, BackendError> {
        serde_json::from_str(line).map_err(|e| BackendError::Protocol(format!("bad request: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServerError {
    pub code: String,
    pub message: String,
}

#[derive(Debug)]
pub enum ResponseBody {
    /// Raw item payloads, exactly as the server wrote them.
    Items(Vec<Box<RawValue>>),
    Error(ServerError),
}

#[derive(Debug)]
pub struct ResponseEnvelope {
    pub id: u64,
    pub body: ResponseBody,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireResponse {
    id: u64,
    #[serde(default)]
    items: Option<Vec<Box<RawValue>>>,
    #[serde(default)]
    error: Option<ServerError>,
}

impl ResponseEnvelope {
    pub fn parse(line: &str) -> Result<Self, BackendError> {
        let wire: WireResponse = serde_json::from_str(line)
            .map_err(|e| BackendError::Protocol(format!("bad response envelope: {e}")))?;
        let body = match (wire.items, wire.error) {
            (Some(items), None) => ResponseBody::Items(items),
            (None, Some(err)) => ResponseBody::Error(err),
            _ => {
                return Err(BackendError::Protocol(
                    "response must carry exactly one of `items` or `error`".into(),
                ))
            }
        };
        Ok(Self { id: wire.id, body })
    }

    /// Single-line encoding. Items are written verbatim.
    pub fn to_line(&self) -> String {
        match &self.body {
            ResponseBody::Items(items) => {
                let joined: Vec<&str> = items.iter().map(|r| r.get()).collect();
                format!("{{\"id\":{},\"items\":[{}]}}", self.id, joined.join(","))
            }
            ResponseBody::Error(err) => canonical_json(&serde_json::json!({
                "id": self.id,
                "error": {"code": err.code, "message": err.message},
            })),
        }
    }

    pub fn error(id: u64, code: &str, message: impl Into<String>) -> Self {
        Self {
            id,
            body: ResponseBody::Error(ServerError {
                code: code.to_string(),
                message: message.into(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NliPair {
    pub premise: String,
    pub hypothesis: String,
}

impl NliPair {
    pub fn new(premise: impl Into<String>, hypothesis: impl Into<String>) -> Self {
        Self {
            premise: premise.into(),
            hypothesis: hypothesis.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NliProbs {
    pub entail: f64,
    pub neutral: f64,
    pub contradict: f64,
}

impl NliProbs {
    /// Each component finite and in [0, 1], summing to 1 within tolerance.
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("entail", self.entail),
            ("neutral", self.neutral),
            ("contradict", self.contradict),
        ] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(format!("{name} = {v} outside [0, 1]"));
            }
        }
        let sum = self.entail + self.neutral + self.contradict;
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(format!("probabilities sum to {sum}, expected 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NerItem {
    pub text: String,
    pub lang: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntitySpan {
    pub surface: String,
    pub label: String,
    /// Byte offsets into the request text.
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NerResult {
    Entities(Vec<EntitySpan>),
    Unsupported,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NerWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entities: Option<Vec<EntitySpan>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    unsupported: bool,
}

impl NerResult {
    pub fn to_json(&self) -> String {
        let wire = match self {
            NerResult::Entities(e) => NerWire {
                entities: Some(e.clone()),
                unsupported: false,
            },
            NerResult::Unsupported => NerWire {
                entities: None,
                unsupported: true,
            },
        };
        serde_json::to_string(&wire).expect("ner result serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let wire: NerWire = serde_json::from_str(text).map_err(|e| e.to_string())?;
        match (wire.entities, wire.unsupported) {
            (Some(e), false) => Ok(NerResult::Entities(e)),
            (None, true) => Ok(NerResult::Unsupported),
            _ => Err("expected exactly one of `entities` or `unsupported: true`".into()),
        }
    }

    /// Offsets must lie on char boundaries inside `text` with start < end.
    pub fn validate(&self, text: &str) -> Result<(), String> {
        if let NerResult::Entities(spans) = self {
            for s in spans {
                if s.start >= s.end
                    || s.end > text.len()
                    || !text.is_char_boundary(s.start)
                    || !text.is_char_boundary(s.end)
                {
                    return Err(format!(
                        "entity {:?} has invalid span {}..{} for text of {} bytes",
                        s.surface,
                        s.start,
                        s.end,
                        text.len()
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LangIdItem {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LangGuess {
    pub lang: String,
    pub confidence: f64,
}

impl LangGuess {
    pub fn validate(&self) -> Result<(), String> {
        if self.lang.trim().is_empty() {
            return Err("empty language code".into());
        }
        if !self.confidence.is_finite() || !(0.0..=1.0).contains(&self.confidence) {
            return Err(format!("confidence {} outside [0, 1]", self.confidence));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_violation_detected() {
        let bad = NliProbs {
            entail: 0.5,
            neutral: 0.4,
            contradict: 0.2,
        };
        assert!(bad.validate().is_err());
        let ok = NliProbs {
            entail: 0.7,
            neutral: 0.2,
            contradict: 0.1,
        };
        assert!(ok.validate().is_ok());
        let negative = NliProbs {
            entail: 1.1,
            neutral: -0.1,
            contradict: 0.0,
        };
        assert!(negative.validate().is_err());
    }

    #[test]
    fn response_items_kept_verbatim() {
        let line = r#"{"id":3,"items":[{"entail": 0.7,"neutral":0.2,"contradict":0.1},null]}"#;
        let resp = ResponseEnvelope::parse(line).unwrap();
        match &resp.body {
            ResponseBody::Items(items) => {
                assert_eq!(items[0].get(), r#"{"entail": 0.7,"neutral":0.2,"contradict":0.1}"#);
                assert_eq!(items[1].get(), "null");
            }
            _ => panic!(),
        }
        assert_eq!(ResponseEnvelope::parse(&resp.to_line()).unwrap().id, 3);
    }

    #[test]
    fn error_envelope() {
        let resp = ResponseEnvelope::parse(r#"{"id":1,"error":{"code":"oversize","message":"too many"}}"#).unwrap();
        assert!(matches!(resp.body, ResponseBody::Error(ref e) if e.code == "oversize"));
        assert!(ResponseEnvelope::parse(r#"{"id":1}"#).is_err());
        assert!(ResponseEnvelope::parse(r#"{"id":1,"items":[],"error":{"code":"x","message":"y"}}"#).is_err());
    }

    #[test]
    fn ner_wire_forms() {
        let unsupported = NerResult::from_json(r#"{"unsupported":true}"#).unwrap();
        assert_eq!(unsupported, NerResult::Unsupported);
        let empty = NerResult::from_json(r#"{"entities":[]}"#).unwrap();
        assert_eq!(empty, NerResult::Entities(vec![]));
        assert_ne!(unsupported, empty);
        assert_eq!(NerResult::from_json(&unsupported.to_json()).unwrap(), unsupported);
        assert!(NerResult::from_json("{}").is_err());
    }

    #[test]
    fn ner_offsets_validated() {
        let text = "Del Piero played for Juventus.";
        let good = NerResult::Entities(vec![EntitySpan {
            surface: "Del Piero".into(),
            label: "PERSON".into(),
            start: 0,
            end: 9,
        }]);
        assert!(good.validate(text).is_ok());
        let bad = NerResult::Entities(vec![EntitySpan {
            surface: "x".into(),
            label: "X".into(),
            start: 5,
            end: 500,
        }]);
        assert!(bad.validate(text).is_err());
    }

    #[test]
    fn request_line_is_canonical() {
        let req = RequestEnvelope {
            id: 9,
            task: Task::Nli,
            model_id: "m".into(),
            items: vec![serde_json::to_value(NliPair::new("p", "h")).unwrap()],
        };
        assert_eq!(
            req.to_line(),
            r#"{"id":9,"items":[{"hypothesis":"h","premise":"p"}],"model_id":"m","task":"nli"}"#
        );
        assert_eq!(RequestEnvelope::parse(&req.to_line()).unwrap(), req);
    }
}
