//! Metric/annotation agreement rows for both settings, computed from the
//! bundled score cache with no model server.
//!
//!     cargo run --example agreement_table

use std::path::Path;
use std::sync::Arc;

use polyhallo::backend::{BackendClient, CacheMode, ModelIds, ScoreCache};
use polyhallo::corpus::{ingest_generations, ingest_references};
use polyhallo::eval::{
    agreement_row, annotation_metrics, discretize, load_annotations, random_row, AgreementRow, Level, LoadMode,
    MetricInputs, MetricKind, Task,
};
use polyhallo::lexical::StopwordBank;
use polyhallo::nli::Setting;

fn cell(r: &Result<f64, String>) -> String {
    r.as_ref().map_or("-".into(), |v| format!("{:.2}", 100.0 * v))
}

fn print(row: &AgreementRow) {
    let r = row.pearson.as_ref().and_then(|c| c.correlation()).map_or("-".into(), |c| format!("{:.3}", c.r));
    println!("{:<8} {:<10} {:>7} {:>7} {:>7}", row.metric, row.setting, r, cell(&row.auc_good), cell(&row.auc_bad));
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini");
    let records: Vec<_> = load_annotations(dir.join("annotations.tsv"), LoadMode::Strict)?
        .records
        .into_iter()
        .filter(|r| r.level == Level::Sentence)
        .collect();
    let refs = ingest_references(dir.join("references.jsonl"))?;
    let groups = ingest_generations(dir.join("generations.jsonl"), 5)?.groups;
    let cache = Arc::new(ScoreCache::open(dir.join("cache"))?);
    let client = BackendClient::new(ModelIds::default(), None, Some(cache), CacheMode::Cache)?;
    let stopwords = StopwordBank::load(None, ["en", "zh"])?;
    let inputs = MetricInputs {
        references: &refs,
        groups: &groups,
        stopwords: &stopwords,
        nli: &client,
        ner: &client,
    };

    let task = Task::Verifiable;
    println!("{:<8} {:<10} {:>7} {:>7} {:>7}", "metric", "setting", "r", "AUC_F", "AUC_NF");
    print(&random_row(&records, task, 10_000, 1)?);
    for setting in [Setting::Pairwise, Setting::Reference] {
        let computed = annotation_metrics(&records, setting, &inputs)?;
        for name in ["r1_p", "rl_p", "neo_p", "diff", "ent", "con"] {
            let raw = computed.vectors.iter().find(|v| v.name == name).unwrap();
            // ENT/CON/DIFF are thresholded before ranking; lexical scores are not.
            let classifier = match MetricKind::parse(name) {
                Ok(kind) => discretize(raw, kind, None)?,
                Err(_) => raw.clone(),
            };
            print(&agreement_row(setting.as_str(), raw, &classifier, &records, task));
        }
        for (id, why) in &computed.skipped {
            println!("  ({setting}: {id} skipped, {why})");
        }
    }
    Ok(())
}
