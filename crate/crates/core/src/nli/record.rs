use std::fmt;
use std::str::FromStr;

use super::{DocScores, SentenceScores};
use crate::tsv::{expect_header, fmt_fixed, split_row};

pub const SCORE_HEADER: &str = "entity_id\tlang\tsample_index\tsetting\tent\tcon\tdiff\tunv\tn_sent";
pub const SENTENCE_HEADER: &str = "entity_id\tlang\tsample_index\tsetting\tsentence\tent\tcon\tdiff\tunv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Setting {
    Reference,
    Pairwise,
}

impl Setting {
    pub fn as_str(self) -> &'static str {
        match self {
            Setting::Reference => "reference",
            Setting::Pairwise => "pairwise",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Setting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "reference" => Ok(Setting::Reference),
            "pairwise" => Ok(Setting::Pairwise),
            _ => Err(format!("unknown setting {s:?} (expected reference or pairwise)")),
        }
    }
}

/// One document-level score row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub entity_id: String,
    pub lang: String,
    pub sample_index: usize,
    pub setting: Setting,
    pub scores: DocScores,
}

impl ScoreRecord {
    pub fn to_row(&self) -> String {
        let s = &self.scores;
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.entity_id,
            self.lang,
            self.sample_index,
            self.setting,
            fmt_fixed(s.ent, 4),
            fmt_fixed(s.con, 4),
            fmt_fixed(s.diff, 4),
            fmt_fixed(s.unv, 4),
            s.n_sentences
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceRecord {
    pub entity_id: String,
    pub lang: String,
    pub sample_index: usize,
    pub setting: Setting,
    pub sentence_index: usize,
    pub scores: SentenceScores,
}

impl SentenceRecord {
    pub fn to_row(&self) -> String {
        let s = &self.scores;
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.entity_id,
            self.lang,
            self.sample_index,
            self.setting,
            self.sentence_index,
            fmt_fixed(s.ent, 4),
            fmt_fixed(s.con, 4),
            fmt_fixed(s.diff, 4),
            fmt_fixed(s.unv, 4),
        )
    }
}

fn num<T: FromStr>(line: usize, name: &str, s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("line {line}: bad {name} {s:?}"))
}

pub fn parse_score_records(text: &str) -> Result<Vec<ScoreRecord>, String> {
    expect_header(text, SCORE_HEADER)?
        .into_iter()
        .map(|(n, line)| {
            let c = split_row(line, 9).map_err(|e| format!("line {n}: {e}"))?;
            Ok(ScoreRecord {
                entity_id: c[0].to_string(),
                lang: c[1].to_string(),
                sample_index: num(n, "sample_index", c[2])?,
                setting: c[3].parse().map_err(|e| format!("line {n}: {e}"))?,
                scores: DocScores {
                    ent: num(n, "ent", c[4])?,
                    con: num(n, "con", c[5])?,
                    diff: num(n, "diff", c[6])?,
                    unv: num(n, "unv", c[7])?,
                    n_sentences: num(n, "n_sent", c[8])?,
                },
            })
        })
        .collect()
}

pub fn parse_sentence_records(text: &str) -> Result<Vec<SentenceRecord>, String> {
    expect_header(text, SENTENCE_HEADER)?
        .into_iter()
        .map(|(n, line)| {
            let c = split_row(line, 9).map_err(|e| format!("line {n}: {e}"))?;
            Ok(SentenceRecord {
                entity_id: c[0].to_string(),
                lang: c[1].to_string(),
                sample_index: num(n, "sample_index", c[2])?,
                setting: c[3].parse().map_err(|e| format!("line {n}: {e}"))?,
                sentence_index: num(n, "sentence", c[4])?,
                scores: SentenceScores {
                    ent: num(n, "ent", c[5])?,
                    con: num(n, "con", c[6])?,
                    diff: num(n, "diff", c[7])?,
                    unv: num(n, "unv", c[8])?,
                },
            })
        })
        .collect()
}
