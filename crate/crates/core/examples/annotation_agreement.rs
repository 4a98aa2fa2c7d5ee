//! Human annotations: rates, binary labels, and how well a metric ranks
//! factual sentences (AUC-PR against a random baseline).
//!
//!     cargo run --example annotation_agreement

use std::path::Path;

use polyhallo::eval::{
    auc_pr, labels_factual, load_annotations, load_external_scores, random_baseline, rates, Averaging, Level,
    LoadMode, PositiveClass,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini");
    let set = load_annotations(dir.join("annotations.tsv"), LoadMode::Strict)?;
    let sentences: Vec<_> = set.records.into_iter().filter(|r| r.level == Level::Sentence).collect();

    for averaging in [Averaging::Macro, Averaging::Micro] {
        println!("{} averaging", averaging.as_str());
        for (label, value) in rates(&sentences, averaging)?.rows() {
            println!("  {label:<26}{value}");
        }
    }

    let labels = labels_factual(&sentences);
    println!("\nfactual prevalence {:.4}", labels.prevalence());
    let (seahorse, _) = load_external_scores(dir.join("seahorse.tsv"), "seahorse", None)?;
    let (mfact, _) = load_external_scores(dir.join("mfact.tsv"), "mfact", None)?;
    for v in [&seahorse, &mfact] {
        let f = auc_pr(v, &labels, PositiveClass::Factual)?;
        let nf = auc_pr(v, &labels, PositiveClass::NonFactual)?;
        println!("{:<9} AUC_F {:.2}  AUC_NF {:.2}", v.name, 100.0 * f.auc, 100.0 * nf.auc);
    }
    let flipped: Vec<bool> = labels.values.iter().map(|v| !v).collect();
    println!(
        "{:<9} AUC_F {:.2}  AUC_NF {:.2}",
        "random",
        100.0 * random_baseline(&labels.values, 10_000, 1)?,
        100.0 * random_baseline(&flipped, 10_000, 1)?
    );
    Ok(())
}
