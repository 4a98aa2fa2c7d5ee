//! Populate a score cache once, then score with no backend at all.
//!
//!     cargo run --example offline_cache

use std::sync::Arc;

use polyhallo::backend::{connect, BackendClient, BackendError, CacheMode, ModelIds, NliPair, ScoreCache};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile_dir();
    let cache = Arc::new(ScoreCache::open(&dir)?);
    let pairs = vec![
        NliPair::new("Marie Curie was born in 1867 in Warsaw.", "Marie Curie was born in Warsaw."),
        NliPair::new("Marie Curie was born in 1867 in Warsaw.", "Marie Curie was born in 1869."),
    ];

    // "stub" stands in for a model server address such as 127.0.0.1:7001.
    let warm = BackendClient::new(ModelIds::default(), Some(connect("stub", 1)?), Some(cache.clone()), CacheMode::CacheThenLive)?;
    let live = warm.nli_batch(&pairs)?;
    println!("cached {} NLI entries under {}", cache.count(polyhallo::backend::Task::Nli, &ModelIds::default().nli), dir.display());

    let offline = BackendClient::new(ModelIds::default(), None, Some(cache), CacheMode::Cache)?;
    let again = offline.nli_batch(&pairs)?;
    assert_eq!(live, again);
    for (p, s) in pairs.iter().zip(&again) {
        println!("{:.3} {:.3} {:.3}  {}", s.entail, s.neutral, s.contradict, p.hypothesis);
    }

    match offline.nli_batch(&[NliPair::new("a", "b")]) {
        Err(BackendError::CacheMiss { keys, .. }) => println!("uncached pair: miss {}", keys[0]),
        other => println!("unexpected: {other:?}"),
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn tempfile_dir() -> std::path::PathBuf {
    std::env::temp_dir().join(format!("polyhallo-cache-{}", std::process::id()))
}
