use std::path::PathBuf;

use clap::Args;

use super::manifest::{manifest_beside, Manifest};
use super::{CliError, Ctx};
use crate::corpus::{
    detect_languages, ingest_generations, quality_stats, Ingested, RaggedGroup, SampleGroup, DEFAULT_SAMPLES_PER_PROMPT,
    QUALITY_STATS_HEADER,
};
use crate::tsv::render;

#[derive(Debug, Args)]
pub(crate) struct StatsArgs {
    /// Generation corpus (JSONL).
    #[arg(long)]
    gen: Option<PathBuf>,
    /// Samples per prompt.
    #[arg(long)]
    k: Option<usize>,
    /// Output TSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Reads the corpus, applies the language filter and reports ragged groups.
pub(crate) fn load_corpus(
    ctx: &Ctx,
    gen: Option<&PathBuf>,
    k: Option<usize>,
) -> Result<(PathBuf, usize, Vec<SampleGroup>, Vec<RaggedGroup>), CliError> {
    let path = ctx.resolver.require_path(gen, "gen")?;
    let k = ctx.resolver.value(k, "k")?.unwrap_or(DEFAULT_SAMPLES_PER_PROMPT);
    if k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let Ingested { mut groups, mut ragged, .. } = ingest_generations(&path, k)?;
    groups.retain(|g| ctx.keep_language(&g.language));
    ragged.retain(|r| ctx.keep_language(&r.language));
    for r in &ragged {
        eprintln!(
            "notice: {} {} has {} of {k} samples",
            r.entity_id, r.language, r.present
        );
    }
    Ok((path, k, groups, ragged))
}

pub(crate) fn run(ctx: &Ctx, args: &StatsArgs) -> Result<(), CliError> {
    let (gen, k, mut groups, _) = load_corpus(ctx, args.gen.as_ref(), args.k)?;
    let out = ctx
        .resolver
        .path(args.out.as_ref(), "out")
        .ok_or_else(|| CliError::Usage("missing --out".into()))?;
    let client = ctx.backend()?;
    if ctx.dry_run {
        println!("dry run: {} groups, {} samples", groups.len(), groups.iter().map(|g| g.samples.len()).sum::<usize>());
        return Ok(());
    }
    detect_languages(&mut groups, &client)?;
    let stats = quality_stats(&groups);

    let mut manifest = Manifest::new("stats");
    manifest
        .setting("k", k)
        .setting("languages", ctx.languages_setting())
        .setting("langid_model", &client.models().langid)
        .input("gen", &gen)?;
    let rows: Vec<String> = stats.iter().map(|s| s.tsv_row()).collect();
    manifest.write_output(&out, &render(Some(&manifest.hash()), QUALITY_STATS_HEADER, &rows))?;
    manifest.write(&manifest_beside(&out))?;
    for s in stats.iter().filter(|s| s.zero_valid) {
        eprintln!("notice: {} has no valid samples; acc_pct reported as 0", s.language);
    }
    Ok(())
}
