//! Pairwise (reference-free) scoring: each sample is checked against its
//! siblings from the same prompt and the results averaged.
//!
//!     cargo run --example pairwise_consistency

use std::path::Path;

use polyhallo::backend::StubBackend;
use polyhallo::corpus::ingest_generations;
use polyhallo::nli::{pairwise_score, Outcome};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini");
    let corpus = ingest_generations(dir.join("generations.jsonl"), 5)?;
    let group = corpus
        .groups
        .iter()
        .find(|g| g.entity_id == "Q2" && g.language == "en")
        .expect("fixture has Q2/en");

    for sample in &group.samples {
        match pairwise_score(group, sample.sample_index, &StubBackend)? {
            Outcome::Scored(s) => println!(
                "#{}  ENT {:.3}  CON {:.3}  DIFF {:+.3}  UNV {:.3}  {}",
                sample.sample_index, s.doc.ent, s.doc.con, s.doc.diff, s.doc.unv, sample.text
            ),
            Outcome::Skipped(why) => println!("#{} skipped: {why}", sample.sample_index),
        }
    }
    Ok(())
}
