use super::{entity_overlap, rouge1, rouge_l, Coverage, EntitySet, Prf, StopwordSet};
use crate::backend::NerResult;
use crate::corpus::SegmentedText;
use crate::nli::Setting;
use crate::tsv::{expect_header, fmt_fixed, split_row};

pub const LEXICAL_HEADER: &str =
    "entity_id\tlang\tsample_index\tsetting\tr1_p\tr1_r\tr1_f1\trl_p\trl_r\trl_f1\tneo_p\tneo_r\tneo_f1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LexicalScores {
    pub r1: Prf,
    pub rl: Prf,
    pub neo: Coverage<Prf>,
}

impl LexicalScores {
    pub fn compute(
        candidate: &SegmentedText,
        reference: &SegmentedText,
        stopwords: &StopwordSet,
        cand_entities: Coverage<&EntitySet>,
        ref_entities: Coverage<&EntitySet>,
    ) -> Self {
        let neo = match (cand_entities, ref_entities) {
            (Coverage::Available(c), Coverage::Available(r)) => Coverage::Available(entity_overlap(c, r)),
            _ => Coverage::Unavailable,
        };
        Self {
            r1: rouge1(candidate, reference, stopwords),
            rl: rouge_l(candidate, reference),
            neo,
        }
    }

    /// Field-wise mean (F1 is averaged, not recomputed). NEO is available
    /// only if every input has it.
    pub fn average(scores: &[LexicalScores]) -> Option<Self> {
        if scores.is_empty() {
            return None;
        }
        let n = scores.len() as f64;
        let mean = |prfs: Vec<Prf>| Prf {
            precision: prfs.iter().map(|p| p.precision).sum::<f64>() / n,
            recall: prfs.iter().map(|p| p.recall).sum::<f64>() / n,
            f1: prfs.iter().map(|p| p.f1).sum::<f64>() / n,
        };
        let neo: Option<Vec<Prf>> = scores.iter().map(|s| s.neo.available()).collect();
        Some(Self {
            r1: mean(scores.iter().map(|s| s.r1).collect()),
            rl: mean(scores.iter().map(|s| s.rl).collect()),
            neo: neo.map_or(Coverage::Unavailable, |v| Coverage::Available(mean(v))),
        })
    }
}

/// Entities of a NER result, or `Unavailable` for an unsupported language.
pub fn entity_set(result: &NerResult) -> Coverage<EntitySet> {
    match result {
        NerResult::Entities(spans) => Coverage::Available(EntitySet::from_surfaces(spans.iter().map(|s| &s.surface))),
        NerResult::Unsupported => Coverage::Unavailable,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexicalRecord {
    pub entity_id: String,
    pub lang: String,
    pub sample_index: usize,
    pub setting: Setting,
    pub scores: LexicalScores,
}

fn prf_cells(p: &Prf) -> [String; 3] {
    [fmt_fixed(p.precision, 4), fmt_fixed(p.recall, 4), fmt_fixed(p.f1, 4)]
}

impl LexicalRecord {
    pub fn to_row(&self) -> String {
        let s = &self.scores;
        let neo = match s.neo {
            Coverage::Available(p) => prf_cells(&p),
            Coverage::Unavailable => ["-".into(), "-".into(), "-".into()],
        };
        let mut cells = vec![
            self.entity_id.clone(),
            self.lang.clone(),
            self.sample_index.to_string(),
            self.setting.to_string(),
        ];
        cells.extend(prf_cells(&s.r1));
        cells.extend(prf_cells(&s.rl));
        cells.extend(neo);
        cells.join("\t")
    }
}

pub fn parse_lexical_records(text: &str) -> Result<Vec<LexicalRecord>, String> {
    let num = |n: usize, s: &str| s.parse::<f64>().map_err(|_| format!("line {n}: bad number {s:?}"));
    expect_header(text, LEXICAL_HEADER)?
        .into_iter()
        .map(|(n, line)| {
            let c = split_row(line, 13).map_err(|e| format!("line {n}: {e}"))?;
            let prf = |i: usize| -> Result<Prf, String> {
                Ok(Prf {
                    precision: num(n, c[i])?,
                    recall: num(n, c[i + 1])?,
                    f1: num(n, c[i + 2])?,
                })
            };
            let neo = if c[10] == "-" {
                Coverage::Unavailable
            } else {
                Coverage::Available(prf(10)?)
            };
            Ok(LexicalRecord {
                entity_id: c[0].to_string(),
                lang: c[1].to_string(),
                sample_index: c[2].parse().map_err(|_| format!("line {n}: bad sample_index"))?,
                setting: c[3].parse().map_err(|e| format!("line {n}: {e}"))?,
                scores: LexicalScores {
                    r1: prf(4)?,
                    rl: prf(7)?,
                    neo,
                },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::segment;

    #[test]
    fn round_trip_with_unavailable_neo() {
        let rec = LexicalRecord {
            entity_id: "Q1".into(),
            lang: "zh".into(),
            sample_index: 0,
            setting: Setting::Reference,
            scores: LexicalScores::compute(
                &segment("a b c", "en"),
                &segment("a c d", "en"),
                &StopwordSet::default(),
                Coverage::Unavailable,
                Coverage::Unavailable,
            ),
        };
        let row = rec.to_row();
        assert!(row.ends_with("\t-\t-\t-"), "{row}");
        let parsed = parse_lexical_records(&format!("{LEXICAL_HEADER}\n{row}\n")).unwrap();
        assert_eq!(parsed[0].scores.neo, Coverage::Unavailable);
        assert!((parsed[0].scores.rl.f1 - 2.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn averaging() {
        let a = LexicalScores {
            r1: Prf::new(1.0, 0.5),
            rl: Prf::new(0.0, 0.0),
            neo: Coverage::Available(Prf::new(1.0, 1.0)),
        };
        let b = LexicalScores {
            r1: Prf::new(0.0, 0.5),
            rl: Prf::new(1.0, 1.0),
            neo: Coverage::Unavailable,
        };
        let avg = LexicalScores::average(&[a, b]).unwrap();
        assert_eq!(avg.r1.precision, 0.5);
        assert_eq!(avg.rl.f1, 0.5);
        assert_eq!(avg.neo, Coverage::Unavailable);
        assert_eq!(LexicalScores::average(&[a]).unwrap(), a);
        assert!(LexicalScores::average(&[]).is_none());
    }
}
