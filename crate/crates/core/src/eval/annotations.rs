use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;

use super::EvalError;
use crate::corpus::normalize_lang;
use crate::tsv::{clean_field, expect_header, split_row};

pub const ANNOTATION_HEADER: &str = "example_id\tentity_id\tlang\tlevel\ttext\tevidence\ttotal\tsupported\tcontradicted\tunverifiable\tconflict_context\tconflict_instruction";

const EVIDENCE_SEP: &str = "|||";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Sentence,
    Atomic,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Sentence => "sentence",
            Level::Atomic => "atomic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sentence" => Some(Level::Sentence),
            "atomic" => Some(Level::Atomic),
            _ => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One annotated generation unit with its fact counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub example_id: String,
    pub entity_id: String,
    pub language: String,
    pub level: Level,
    pub text: String,
    pub evidence: Vec<String>,
    pub total: u32,
    pub supported: u32,
    pub contradicted: u32,
    pub unverifiable: u32,
    pub conflict_context: bool,
    pub conflict_instruction: bool,
}

impl AnnotationRecord {
    /// Parts sum to the total; atomic units hold exactly one fact.
    pub fn validate(&self) -> Result<(), String> {
        let parts = self.supported as u64 + self.contradicted as u64 + self.unverifiable as u64;
        if parts != self.total as u64 {
            return Err(format!(
                "{}: supported + contradicted + unverifiable = {parts} but total = {}",
                self.example_id, self.total
            ));
        }
        if self.level == Level::Atomic && self.total != 1 {
            return Err(format!("{}: atomic example with {} facts", self.example_id, self.total));
        }
        Ok(())
    }

    pub fn to_row(&self) -> String {
        let evidence: Vec<String> = self.evidence.iter().map(|e| clean_field(e)).collect();
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.example_id,
            self.entity_id,
            self.language,
            self.level,
            clean_field(&self.text),
            evidence.join(EVIDENCE_SEP),
            self.total,
            self.supported,
            self.contradicted,
            self.unverifiable,
            self.conflict_context,
            self.conflict_instruction
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    /// Any count violation fails the load.
    Strict,
    /// Violating rows are set aside and reported.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quarantined {
    pub line: usize,
    pub example_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct AnnotationSet {
    pub records: Vec<AnnotationRecord>,
    pub quarantined: Vec<Quarantined>,
}

fn parse_bool(line: usize, name: &str, s: &str) -> Result<bool, EvalError> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(EvalError::Parse {
            line,
            message: format!("{name} must be true or false, found {s:?}"),
        }),
    }
}

fn parse_count(line: usize, name: &str, s: &str) -> Result<u32, EvalError> {
    s.parse().map_err(|_| EvalError::Parse {
        line,
        message: format!("{name} must be a non-negative integer, found {s:?}"),
    })
}

pub fn parse_annotations(text: &str, mode: LoadMode) -> Result<AnnotationSet, EvalError> {
    let rows = expect_header(text, ANNOTATION_HEADER).map_err(|message| EvalError::Parse { line: 1, message })?;
    let mut set = AnnotationSet::default();
    let mut seen = HashSet::new();
    for (line, row) in rows {
        let c = split_row(row, 12).map_err(|message| EvalError::Parse { line, message })?;
        let level = Level::parse(c[3]).ok_or_else(|| EvalError::Parse {
            line,
            message: format!("level must be sentence or atomic, found {:?}", c[3]),
        })?;
        if c[0].is_empty() {
            return Err(EvalError::Parse {
                line,
                message: "empty example_id".into(),
            });
        }
        if !seen.insert(c[0].to_string()) {
            return Err(EvalError::Parse {
                line,
                message: format!("duplicate example_id {:?}", c[0]),
            });
        }
        let record = AnnotationRecord {
            example_id: c[0].to_string(),
            entity_id: c[1].to_string(),
            language: normalize_lang(c[2]),
            level,
            text: c[4].to_string(),
            evidence: c[5]
                .split(EVIDENCE_SEP)
                .map(str::trim)
                .filter(|e| !e.is_empty())
                .map(String::from)
                .collect(),
            total: parse_count(line, "total", c[6])?,
            supported: parse_count(line, "supported", c[7])?,
            contradicted: parse_count(line, "contradicted", c[8])?,
            unverifiable: parse_count(line, "unverifiable", c[9])?,
            conflict_context: parse_bool(line, "conflict_context", c[10])?,
            conflict_instruction: parse_bool(line, "conflict_instruction", c[11])?,
        };
        match record.validate() {
            Ok(()) => set.records.push(record),
            Err(message) => set.quarantined.push(Quarantined {
                line,
                example_id: record.example_id,
                message,
            }),
        }
    }
    if mode == LoadMode::Strict && !set.quarantined.is_empty() {
        return Err(EvalError::Validation(set.quarantined));
    }
    Ok(set)
}

pub fn load_annotations(path: impl AsRef<Path>, mode: LoadMode) -> Result<AnnotationSet, EvalError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_annotations(&text, mode)
}
