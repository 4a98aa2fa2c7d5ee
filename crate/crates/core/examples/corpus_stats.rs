//! Ingest the mini corpus, detect output languages and print the
//! generation-quality table.
//!
//!     cargo run --example corpus_stats

use std::path::Path;

use polyhallo::backend::StubBackend;
use polyhallo::corpus::{detect_languages, filter_valid, ingest_generations, quality_stats, segment, QUALITY_STATS_HEADER};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini");
    let mut corpus = ingest_generations(dir.join("generations.jsonl"), 5)?;
    println!("{} groups, {} samples", corpus.groups.len(), corpus.sample_count());

    let first = &corpus.groups[0].samples[0];
    let seg = segment(&first.text, &first.language);
    println!("\n{:?}", first.text);
    for (i, s) in seg.sentences.iter().enumerate() {
        println!("  sentence {i}: {s}");
    }
    println!("  {} tokens", seg.tokens.len());

    let zh = corpus.groups.iter().find(|g| g.language == "zh").unwrap();
    let seg = segment(&zh.samples[0].text, "zh");
    println!("\n{:?}\n  sentences {:?}", zh.samples[0].text, seg.sentences);

    detect_languages(&mut corpus.groups, &StubBackend)?;
    println!("\n{QUALITY_STATS_HEADER}");
    for row in quality_stats(&corpus.groups) {
        println!("{}", row.tsv_row());
    }

    let outcome = filter_valid(&corpus.groups);
    println!("\ndropped before scoring:");
    for (key, reason) in &outcome.dropped.entries {
        println!("  {key:?}: {reason}");
    }
    Ok(())
}
