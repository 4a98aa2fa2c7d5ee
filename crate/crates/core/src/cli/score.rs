use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rayon::prelude::*;

use super::manifest::{manifest_in, Manifest};
use super::stats::load_corpus;
use super::{CliError, Ctx};
use crate::backend::{BackendClient, NerBackend, NerItem};
use crate::corpus::{
    detect_languages, filter_valid, ingest_references, segment, GenerationSample, ReferenceSet, SampleGroup,
};
use crate::lexical::{entity_set, Coverage, EntitySet, LexicalRecord, LexicalScores, StopwordBank, LEXICAL_HEADER};
use crate::nli::{
    pairwise_score, reference_score, Outcome, ScoreRecord, Scored, SentenceRecord, Setting, SkipReason, SCORE_HEADER,
    SENTENCE_HEADER,
};
use crate::tsv::{fmt_fixed, render};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum SettingChoice {
    Reference,
    Pairwise,
    Both,
}

impl SettingChoice {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        <Self as ValueEnum>::from_str(s, false).map_err(|_| CliError::Usage(format!("unknown setting {s:?}")))
    }

    pub fn settings(self) -> Vec<Setting> {
        match self {
            SettingChoice::Reference => vec![Setting::Reference],
            SettingChoice::Pairwise => vec![Setting::Pairwise],
            SettingChoice::Both => vec![Setting::Reference, Setting::Pairwise],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SettingChoice::Reference => "reference",
            SettingChoice::Pairwise => "pairwise",
            SettingChoice::Both => "both",
        }
    }
}

#[derive(Debug, Args)]
pub(crate) struct ScoreArgs {
    /// Generation corpus (JSONL).
    #[arg(long)]
    gen: Option<PathBuf>,
    /// Reference corpus (JSONL); needed for the reference setting.
    #[arg(long)]
    refs: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    setting: Option<SettingChoice>,
    /// Directory of `<lang>.stop` files overriding the bundled lists.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub(crate) const SUMMARY_HEADER: &str =
    "lang\tsetting\tn\tr1_f1\tr1_p\tr1_r\trl_f1\trl_p\trl_r\tneo_f1\tneo_p\tneo_r\tent\tcon\tdiff\tunv";

pub(crate) fn setting_choice(ctx: &Ctx, flag: Option<SettingChoice>) -> Result<SettingChoice, CliError> {
    match flag {
        Some(s) => Ok(s),
        None => ctx.resolver.string(None, "setting").map_or(Ok(SettingChoice::Both), |s| SettingChoice::parse(&s)),
    }
}

pub(crate) fn load_stopwords(ctx: &Ctx, flag: Option<&PathBuf>, languages: &BTreeSet<String>, manifest: Option<&mut Manifest>) -> Result<StopwordBank, CliError> {
    let dir = ctx.resolver.path(flag, "stopwords");
    if let Some(d) = &dir {
        if !d.is_dir() {
            return Err(CliError::Usage(format!("--stopwords: {} is not a directory", d.display())));
        }
        if let Some(m) = manifest {
            for lang in languages {
                let f = d.join(format!("{lang}.stop"));
                if f.exists() {
                    m.input(&format!("stopwords:{lang}"), &f)?;
                }
            }
        }
    }
    StopwordBank::load(dir.as_deref(), languages.iter().map(String::as_str))
        .map_err(|e| CliError::Runtime(format!("cannot read stopwords: {e}")))
}

type EntityMemo = HashMap<(String, String), Coverage<EntitySet>>;

fn entity_memo(texts: BTreeSet<(String, String)>, ner: &dyn NerBackend) -> Result<EntityMemo, CliError> {
    let items: Vec<NerItem> = texts.iter().map(|(t, l)| NerItem { text: t.clone(), lang: l.clone() }).collect();
    let results = if items.is_empty() { Vec::new() } else { ner.ner(&items)? };
    Ok(texts.into_iter().zip(results.iter().map(entity_set)).collect())
}

struct Job<'a> {
    group: &'a SampleGroup,
    sample: &'a GenerationSample,
    setting: Setting,
}

struct Done {
    entity_id: String,
    lang: String,
    sample_index: usize,
    setting: Setting,
    result: Result<(Scored, LexicalScores), SkipReason>,
}

fn lexical_against(sample: &GenerationSample, texts: &[&str], bank: &StopwordBank, memo: &EntityMemo) -> Option<LexicalScores> {
    let lang = sample.language.as_str();
    let cand = segment(&sample.text, lang);
    let ents = |t: &str| match memo.get(&(t.to_string(), lang.to_string())) {
        Some(Coverage::Available(e)) => Coverage::Available(e),
        _ => Coverage::Unavailable,
    };
    let per: Vec<LexicalScores> = texts
        .iter()
        .map(|t| (t, segment(t, lang)))
        .filter(|(_, r)| !r.sentences.is_empty())
        .map(|(t, r)| LexicalScores::compute(&cand, &r, bank.get(lang), ents(&sample.text), ents(t)))
        .collect();
    LexicalScores::average(&per)
}

fn score_job(job: &Job<'_>, refs: &ReferenceSet, client: &BackendClient, bank: &StopwordBank, memo: &EntityMemo) -> Result<Done, CliError> {
    let s = job.sample;
    let result = match job.setting {
        Setting::Reference => match refs.get(&s.entity_id, &s.language) {
            None => Err(SkipReason::MissingReference),
            Some(doc) => match reference_score(s, doc, client)? {
                Outcome::Skipped(r) => Err(r),
                Outcome::Scored(sc) => lexical_against(s, &[doc.text.as_str()], bank, memo)
                    .map(|lex| (sc, lex))
                    .ok_or(SkipReason::EmptyReference),
            },
        },
        Setting::Pairwise => match pairwise_score(job.group, s.sample_index, client)? {
            Outcome::Skipped(r) => Err(r),
            Outcome::Scored(sc) => {
                let siblings: Vec<&str> = job
                    .group
                    .samples
                    .iter()
                    .filter(|o| o.sample_index != s.sample_index)
                    .map(|o| o.text.as_str())
                    .collect();
                lexical_against(s, &siblings, bank, memo)
                    .map(|lex| (sc, lex))
                    .ok_or(SkipReason::NoUsableSibling)
            }
        },
    };
    Ok(Done {
        entity_id: s.entity_id.clone(),
        lang: s.language.clone(),
        sample_index: s.sample_index,
        setting: job.setting,
        result,
    })
}

fn pct(x: f64) -> String {
    fmt_fixed(100.0 * x, 2)
}

fn summary_rows(done: &[Done]) -> Vec<String> {
    let mut by: BTreeMap<(&str, Setting), Vec<&(Scored, LexicalScores)>> = BTreeMap::new();
    for d in done {
        if let Ok(r) = &d.result {
            by.entry((d.lang.as_str(), d.setting)).or_default().push(r);
        }
    }
    by.into_iter()
        .map(|((lang, setting), rows)| {
            let n = rows.len() as f64;
            let mean = |f: &dyn Fn(&(Scored, LexicalScores)) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            let lex: Vec<LexicalScores> = rows.iter().map(|r| r.1).collect();
            let avg = LexicalScores::average(&lex).expect("non-empty");
            let neo = match avg.neo {
                Coverage::Available(p) => [pct(p.f1), pct(p.precision), pct(p.recall)],
                Coverage::Unavailable => ["-".into(), "-".into(), "-".into()],
            };
            let cells = [
                lang.to_string(),
                setting.to_string(),
                rows.len().to_string(),
                pct(avg.r1.f1),
                pct(avg.r1.precision),
                pct(avg.r1.recall),
                pct(avg.rl.f1),
                pct(avg.rl.precision),
                pct(avg.rl.recall),
                neo[0].clone(),
                neo[1].clone(),
                neo[2].clone(),
                fmt_fixed(mean(&|r| r.0.doc.ent), 4),
                fmt_fixed(mean(&|r| r.0.doc.con), 4),
                fmt_fixed(mean(&|r| r.0.doc.diff), 4),
                fmt_fixed(mean(&|r| r.0.doc.unv), 4),
            ];
            cells.join("\t")
        })
        .collect()
}

fn write_table(manifest: &mut Manifest, dir: &Path, name: &str, header: &str, rows: &[String]) -> Result<(), CliError> {
    let hash = manifest.hash();
    manifest.write_output(&dir.join(name), &render(Some(&hash), header, rows))
}

pub(crate) fn run(ctx: &Ctx, args: &ScoreArgs) -> Result<(), CliError> {
    let choice = setting_choice(ctx, args.setting)?;
    let (gen, k, mut groups, ragged) = load_corpus(ctx, args.gen.as_ref(), args.k)?;
    let refs_path = match choice {
        SettingChoice::Pairwise => ctx.resolver.path(args.refs.as_ref(), "refs"),
        _ => Some(ctx.resolver.require_path(args.refs.as_ref(), "refs")?),
    };
    let refs = match &refs_path {
        Some(p) => ingest_references(p)?,
        None => ReferenceSet::default(),
    };
    let out = ctx
        .resolver
        .path(args.out.as_ref(), "out")
        .ok_or_else(|| CliError::Usage("missing --out".into()))?;
    let client = ctx.backend()?;
    let languages: BTreeSet<String> = groups.iter().map(|g| g.language.clone()).collect();

    let mut manifest = Manifest::new("score");
    manifest
        .setting("k", k)
        .setting("languages", ctx.languages_setting())
        .setting("setting", choice.as_str())
        .setting("nli_model", &client.models().nli)
        .setting("ner_model", &client.models().ner)
        .setting("langid_model", &client.models().langid)
        .input("gen", &gen)?;
    if let Some(p) = &refs_path {
        manifest.input("refs", p)?;
    }
    let bank = load_stopwords(ctx, args.stopwords.as_ref(), &languages, Some(&mut manifest))?;
    if ctx.dry_run {
        println!("dry run: {} groups, {} references", groups.len(), refs.len());
        return Ok(());
    }

    detect_languages(&mut groups, &client)?;
    let filtered = filter_valid(&groups);
    let kept = filtered.kept_groups(&groups);
    let settings = choice.settings();

    let mut texts = BTreeSet::new();
    for g in &kept {
        for s in &g.samples {
            texts.insert((s.text.clone(), s.language.clone()));
        }
        if settings.contains(&Setting::Reference) {
            if let Some(doc) = refs.get(&g.entity_id, &g.language) {
                texts.insert((doc.text.clone(), g.language.clone()));
            }
        }
    }
    let memo = entity_memo(texts, &client)?;

    let jobs: Vec<Job> = kept
        .iter()
        .flat_map(|g| g.samples.iter().map(move |s| (g, s)))
        .flat_map(|(group, sample)| settings.iter().map(move |&setting| Job { group, sample, setting }))
        .collect();
    let mut done: Vec<Done> = jobs
        .par_iter()
        .map(|j| score_job(j, &refs, &client, &bank, &memo))
        .collect::<Result<_, _>>()?;
    done.sort_by(|a, b| {
        (&a.entity_id, &a.lang, a.sample_index, a.setting).cmp(&(&b.entity_id, &b.lang, b.sample_index, b.setting))
    });

    let (mut scores, mut sentences, mut lexical, mut skips) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for d in &done {
        match &d.result {
            Ok((sc, lex)) => {
                scores.push(
                    ScoreRecord {
                        entity_id: d.entity_id.clone(),
                        lang: d.lang.clone(),
                        sample_index: d.sample_index,
                        setting: d.setting,
                        scores: sc.doc,
                    }
                    .to_row(),
                );
                for (i, s) in sc.sentences.iter().enumerate() {
                    sentences.push(
                        SentenceRecord {
                            entity_id: d.entity_id.clone(),
                            lang: d.lang.clone(),
                            sample_index: d.sample_index,
                            setting: d.setting,
                            sentence_index: i,
                            scores: *s,
                        }
                        .to_row(),
                    );
                }
                lexical.push(
                    LexicalRecord {
                        entity_id: d.entity_id.clone(),
                        lang: d.lang.clone(),
                        sample_index: d.sample_index,
                        setting: d.setting,
                        scores: *lex,
                    }
                    .to_row(),
                );
            }
            Err(reason) => skips.push(format!("{}\t{}\t{}\t{}\t{}", d.entity_id, d.lang, d.sample_index, d.setting, reason)),
        }
    }
    let mut dropped: Vec<String> = filtered
        .dropped
        .entries
        .iter()
        .map(|(k, r)| format!("{}\t{}\t{}\t{}", k.entity_id, k.language, k.sample_index, r))
        .collect();
    dropped.sort();

    write_table(&mut manifest, &out, "scores.tsv", SCORE_HEADER, &scores)?;
    write_table(&mut manifest, &out, "sentence_scores.tsv", SENTENCE_HEADER, &sentences)?;
    write_table(&mut manifest, &out, "lexical.tsv", LEXICAL_HEADER, &lexical)?;
    write_table(&mut manifest, &out, "summary.tsv", SUMMARY_HEADER, &summary_rows(&done))?;
    write_table(&mut manifest, &out, "skips.tsv", "entity_id\tlang\tsample_index\tsetting\treason", &skips)?;
    write_table(&mut manifest, &out, "filter.tsv", "entity_id\tlang\tsample_index\treason", &dropped)?;
    let ragged: Vec<String> = ragged
        .iter()
        .map(|r| {
            let missing: Vec<String> = r.missing_indices.iter().map(|i| i.to_string()).collect();
            format!("{}\t{}\t{}\t{}", r.entity_id, r.language, r.present, missing.join(","))
        })
        .collect();
    write_table(&mut manifest, &out, "ragged.tsv", "entity_id\tlang\tpresent\tmissing", &ragged)?;
    manifest.write(&manifest_in(&out))?;
    if !skips.is_empty() {
        eprintln!("notice: {} sample/setting pairs skipped; see skips.tsv", skips.len());
    }
    Ok(())
}
