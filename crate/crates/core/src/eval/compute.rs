//! Metric values for annotated examples, in both settings.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::{orientation_for, AnnotationRecord, EvalError, Level, MetricVector, Source};
use crate::backend::{NerBackend, NerItem, NliBackend};
use crate::corpus::{segment, ReferenceSet, SampleGroup, SegmentedText};
use crate::lexical::{entity_set, Coverage, EntitySet, LexicalScores, StopwordBank};
use crate::nli::{build_matrix, DocScores, Setting, SkipReason};

/// Metric names in report order.
pub const ANNOTATION_METRICS: [&str; 7] = ["r1_p", "rl_p", "neo_p", "diff", "ent", "con", "unv"];

pub struct MetricInputs<'a> {
    pub references: &'a ReferenceSet,
    /// Generation groups; needed for the pairwise setting only.
    pub groups: &'a [SampleGroup],
    pub stopwords: &'a StopwordBank,
    pub nli: &'a dyn NliBackend,
    pub ner: &'a dyn NerBackend,
}

#[derive(Debug, Clone)]
pub struct SettingMetrics {
    pub setting: Setting,
    /// One vector per name in [`ANNOTATION_METRICS`]. NEO omits examples in
    /// languages the recognizer does not cover.
    pub vectors: Vec<MetricVector>,
    pub skipped: Vec<(String, SkipReason)>,
}

struct Row {
    lexical: LexicalScores,
    nli: DocScores,
}

type EntityMemo = HashMap<(String, String), Coverage<EntitySet>>;

fn entity_memo(texts: BTreeSet<(String, String)>, ner: &dyn NerBackend) -> Result<EntityMemo, EvalError> {
    let items: Vec<NerItem> = texts
        .iter()
        .map(|(text, lang)| NerItem {
            text: text.clone(),
            lang: lang.clone(),
        })
        .collect();
    let results = if items.is_empty() { Vec::new() } else { ner.ner(&items)? };
    if results.len() != items.len() {
        return Err(EvalError::Invalid(format!(
            "recognizer returned {} results for {} texts",
            results.len(),
            items.len()
        )));
    }
    Ok(texts.into_iter().zip(results.iter().map(entity_set)).collect())
}

/// Sibling texts a sentence-level annotation is compared against. The
/// sample the sentence came from is left out.
fn siblings<'g>(record: &AnnotationRecord, group: &'g SampleGroup) -> Vec<&'g str> {
    let needle = record.text.trim();
    group
        .samples
        .iter()
        .map(|s| s.text.as_str())
        .filter(|t| record.level == Level::Atomic || !t.contains(needle))
        .collect()
}

/// Comparison texts for one record, or why it cannot be scored.
fn targets<'a>(
    record: &AnnotationRecord,
    setting: Setting,
    inputs: &MetricInputs<'a>,
) -> Result<Vec<&'a str>, SkipReason> {
    match setting {
        Setting::Reference => inputs
            .references
            .get(&record.entity_id, &record.language)
            .map(|d| vec![d.text.as_str()])
            .ok_or(SkipReason::MissingReference),
        Setting::Pairwise => {
            let group = inputs
                .groups
                .iter()
                .find(|g| g.entity_id == record.entity_id && g.language == record.language)
                .ok_or(SkipReason::NoUsableSibling)?;
            Ok(siblings(record, group))
        }
    }
}

fn score_record(
    record: &AnnotationRecord,
    texts: &[&str],
    inputs: &MetricInputs<'_>,
    memo: &EntityMemo,
) -> Result<Result<Row, SkipReason>, EvalError> {
    let lang = record.language.as_str();
    let cand = segment(&record.text, lang);
    if cand.sentences.is_empty() {
        return Ok(Err(SkipReason::EmptyGeneration));
    }
    let entities = |text: &str| match memo.get(&(text.to_string(), lang.to_string())) {
        Some(Coverage::Available(e)) => Coverage::Available(e),
        _ => Coverage::Unavailable,
    };
    let mut lexical = Vec::new();
    let mut nli = Vec::new();
    for text in texts {
        let reference: SegmentedText = segment(text, lang);
        if reference.sentences.is_empty() {
            continue;
        }
        let matrix = build_matrix(&cand, &reference, inputs.nli)?;
        nli.push(matrix.doc_scores());
        lexical.push(LexicalScores::compute(
            &cand,
            &reference,
            inputs.stopwords.get(lang),
            entities(&record.text),
            entities(text),
        ));
    }
    match (LexicalScores::average(&lexical), DocScores::average(&nli)) {
        (Some(lexical), Some(nli)) => Ok(Ok(Row { lexical, nli })),
        _ => Ok(Err(SkipReason::NoUsableSibling)),
    }
}

/// Scores every record in one setting.
pub fn annotation_metrics(
    records: &[AnnotationRecord],
    setting: Setting,
    inputs: &MetricInputs<'_>,
) -> Result<SettingMetrics, EvalError> {
    let plans: Vec<Result<Vec<&str>, SkipReason>> = records.iter().map(|r| targets(r, setting, inputs)).collect();
    let mut texts = BTreeSet::new();
    for (r, plan) in records.iter().zip(&plans) {
        if let Ok(ts) = plan {
            texts.insert((r.text.clone(), r.language.clone()));
            texts.extend(ts.iter().map(|t| (t.to_string(), r.language.clone())));
        }
    }
    let memo = entity_memo(texts, inputs.ner)?;
    let scored: Vec<Result<Row, SkipReason>> = records
        .par_iter()
        .zip(plans.par_iter())
        .map(|(r, plan)| match plan {
            Ok(ts) => score_record(r, ts, inputs, &memo).map(|row| match row {
                Err(SkipReason::NoUsableSibling) if setting == Setting::Reference => Err(SkipReason::EmptyReference),
                other => other,
            }),
            Err(reason) => Ok(Err(*reason)),
        })
        .collect::<Result<_, _>>()?;

    let mut columns: Vec<Vec<(String, f64)>> = vec![Vec::new(); ANNOTATION_METRICS.len()];
    let mut skipped = Vec::new();
    for (r, row) in records.iter().zip(scored) {
        let row = match row {
            Ok(row) => row,
            Err(reason) => {
                skipped.push((r.example_id.clone(), reason));
                continue;
            }
        };
        let id = &r.example_id;
        let mut push = |i: usize, v: f64| columns[i].push((id.clone(), v));
        push(0, row.lexical.r1.precision);
        push(1, row.lexical.rl.precision);
        if let Coverage::Available(neo) = row.lexical.neo {
            push(2, neo.precision);
        }
        push(3, row.nli.diff);
        push(4, row.nli.ent);
        push(5, row.nli.con);
        push(6, row.nli.unv);
    }
    let vectors = ANNOTATION_METRICS
        .iter()
        .zip(columns)
        .map(|(name, values)| MetricVector::new(*name, values, Source::Computed, orientation_for(name)))
        .collect::<Result<_, _>>()?;
    Ok(SettingMetrics {
        setting,
        vectors,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::StubBackend;
    use crate::corpus::{parse_generations, parse_references};
    use crate::eval::{parse_annotations, LoadMode, ANNOTATION_HEADER};

    const REFS: &str = r#"{"entity_id":"Q1","language":"en","title":"Ada","text":"Ada Lovelace was born in London in 1815. She worked with Charles Babbage."}"#;

    fn gens() -> Vec<SampleGroup> {
        let lines: Vec<String> = [
            "Ada Lovelace was born in London in 1815. She wrote notes.",
            "Ada Lovelace was born in Paris in 1820.",
            "Ada Lovelace worked with Charles Babbage.",
        ]
        .iter()
        .enumerate()
        .map(|(i, t)| {
            serde_json::json!({"entity_id":"Q1","name":"Ada","language":"en","sample_index":i,"prompt":"p","text":t}).to_string()
        })
        .collect();
        parse_generations(lines.join("\n").as_bytes(), 3).unwrap().groups
    }

    fn records() -> Vec<AnnotationRecord> {
        let rows = [
            "a\tQ1\ten\tsentence\tAda Lovelace was born in London in 1815.\t\t2\t2\t0\t0\tfalse\tfalse",
            "b\tQ1\ten\tsentence\tAda Lovelace was born in Paris in 1820.\t\t2\t0\t2\t0\tfalse\tfalse",
            "c\tQ9\ten\tsentence\tSomeone else.\t\t1\t0\t0\t1\tfalse\tfalse",
        ];
        parse_annotations(&format!("{ANNOTATION_HEADER}\n{}\n", rows.join("\n")), LoadMode::Strict)
            .unwrap()
            .records
    }

    #[test]
    fn reference_and_pairwise() {
        let refs = parse_references(REFS.as_bytes()).unwrap();
        let groups = gens();
        let bank = StopwordBank::load(None, ["en"]).unwrap();
        let inputs = MetricInputs {
            references: &refs,
            groups: &groups,
            stopwords: &bank,
            nli: &StubBackend,
            ner: &StubBackend,
        };
        let recs = records();
        let reference = annotation_metrics(&recs, Setting::Reference, &inputs).unwrap();
        assert_eq!(reference.skipped, vec![("c".to_string(), SkipReason::MissingReference)]);
        let ent = reference.vectors[4].to_map();
        assert!(ent["a"] > ent["b"], "{ent:?}");
        let con = reference.vectors[5].to_map();
        assert!(con["b"] > con["a"], "{con:?}");
        assert_eq!(reference.vectors.len(), ANNOTATION_METRICS.len());

        let pairwise = annotation_metrics(&recs, Setting::Pairwise, &inputs).unwrap();
        assert_eq!(pairwise.vectors[0].len(), 2);
        assert_eq!(pairwise.skipped[0].1, SkipReason::NoUsableSibling);
    }

    #[test]
    fn source_sample_left_out() {
        let groups = gens();
        let recs = records();
        let texts = siblings(&recs[0], &groups[0]);
        assert_eq!(texts.len(), 2);
        assert!(texts.iter().all(|t| !t.contains("London")));
    }
}
