use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use super::manifest::{manifest_beside, manifest_in, sibling, Manifest};
use super::score::{load_stopwords, setting_choice, SettingChoice};
use super::stats::load_corpus;
use super::{CliError, Ctx};
use crate::corpus::{ingest_references, load_templates, ReferenceSet};
use crate::eval::{
    agreement_row, annotation_metrics, correlation_matrix, cross_setting_correlation, discretize, load_annotations,
    load_external_scores, orientation_for, random_row, rates as rate_summary, AgreementRow, AnnotationRecord,
    Averaging, CorrelationCell, Keyed, Level, LoadMode, MetricInputs, MetricKind, MetricVector, PositiveClass, Source,
    Task, SIGNIFICANCE,
};
use crate::lexical::{parse_lexical_records, Coverage, Prf};
use crate::nli::{parse_score_records, parse_sentence_records, Setting};
use crate::tsv::{fmt_fixed, render};

/// Default number of random-score trials for the baseline row.
pub(crate) const RANDOM_TRIALS: usize = 10_000;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn out_path(ctx: &Ctx, flag: Option<&PathBuf>) -> Result<PathBuf, CliError> {
    ctx.resolver
        .path(flag, "out")
        .ok_or_else(|| CliError::Usage("missing --out".into()))
}

fn cell_values(cell: &CorrelationCell) -> (String, String, String, String) {
    match cell {
        CorrelationCell::Available(c) => (
            c.n.to_string(),
            fmt_fixed(c.r, 4),
            fmt_fixed(c.p, 6),
            if c.p > SIGNIFICANCE { "insignificant" } else { "ok" }.to_string(),
        ),
        CorrelationCell::Unavailable { n, .. } => (n.to_string(), "-".into(), "-".into(), "unavailable".into()),
    }
}

// ---- eval-corr ------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Granularity {
    Document,
    Sentence,
}

#[derive(Debug, Args)]
pub(crate) struct EvalCorrArgs {
    /// Document scores written by `score` (`doc_scores` in a config file).
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Lexical scores written by `score`.
    #[arg(long)]
    lexical: Option<PathBuf>,
    /// Sentence scores written by `score`; needed for sentence granularity.
    #[arg(long)]
    sentences: Option<PathBuf>,
    #[arg(long, value_enum)]
    granularity: Option<Granularity>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

const NLI_NAMES: [&str; 4] = ["ent", "con", "diff", "unv"];

struct Keyed4 {
    lang: String,
    key: String,
    setting: Setting,
    values: Vec<(&'static str, f64)>,
}

fn prf_values(prefix: &'static [&'static str; 3], p: &Prf) -> Vec<(&'static str, f64)> {
    vec![(prefix[0], p.precision), (prefix[1], p.recall), (prefix[2], p.f1)]
}

pub(crate) fn eval_corr(ctx: &Ctx, args: &EvalCorrArgs) -> Result<(), CliError> {
    let granularity = match args.granularity {
        Some(g) => g,
        None => match ctx.resolver.string(None, "granularity").as_deref() {
            None | Some("document") => Granularity::Document,
            Some("sentence") => Granularity::Sentence,
            Some(other) => return Err(CliError::Usage(format!("unknown granularity {other:?}"))),
        },
    };
    let out = out_path(ctx, args.out.as_ref())?;
    let mut manifest = Manifest::new("eval-corr");
    manifest
        .setting("granularity", format!("{granularity:?}").to_lowercase())
        .setting("languages", ctx.languages_setting());
    let mut rows: Vec<Keyed4> = Vec::new();
    match granularity {
        Granularity::Document => {
            let path = ctx.resolver.require_path(args.scores.as_ref(), "doc_scores")?;
            manifest.input("scores", &path)?;
            let records = parse_score_records(&read(&path)?).map_err(CliError::Usage)?;
            let lexical = match ctx.resolver.path(args.lexical.as_ref(), "lexical") {
                Some(p) => {
                    manifest.input("lexical", &p)?;
                    parse_lexical_records(&read(&p)?).map_err(CliError::Usage)?
                }
                None => Vec::new(),
            };
            if ctx.dry_run {
                println!("dry run: {} score rows, {} lexical rows", records.len(), lexical.len());
                return Ok(());
            }
            for r in lexical {
                let mut values = prf_values(&["r1_p", "r1_r", "r1_f1"], &r.scores.r1);
                values.extend(prf_values(&["rl_p", "rl_r", "rl_f1"], &r.scores.rl));
                if let Coverage::Available(neo) = r.scores.neo {
                    values.extend(prf_values(&["neo_p", "neo_r", "neo_f1"], &neo));
                }
                rows.push(Keyed4 {
                    key: format!("{}|{}|{}", r.entity_id, r.lang, r.sample_index),
                    lang: r.lang,
                    setting: r.setting,
                    values,
                });
            }
            for r in records {
                let s = r.scores;
                rows.push(Keyed4 {
                    key: format!("{}|{}|{}", r.entity_id, r.lang, r.sample_index),
                    lang: r.lang,
                    setting: r.setting,
                    values: vec![("ent", s.ent), ("con", s.con), ("diff", s.diff), ("unv", s.unv)],
                });
            }
        }
        Granularity::Sentence => {
            let path = ctx.resolver.require_path(args.sentences.as_ref(), "sentences")?;
            manifest.input("sentences", &path)?;
            let records = parse_sentence_records(&read(&path)?).map_err(CliError::Usage)?;
            if ctx.dry_run {
                println!("dry run: {} sentence rows", records.len());
                return Ok(());
            }
            for r in records {
                let s = r.scores;
                rows.push(Keyed4 {
                    key: format!("{}|{}|{}|{}", r.entity_id, r.lang, r.sample_index, r.sentence_index),
                    lang: r.lang,
                    setting: r.setting,
                    values: vec![("ent", s.ent), ("con", s.con), ("diff", s.diff), ("unv", s.unv)],
                });
            }
        }
    }
    rows.retain(|r| ctx.keep_language(&r.lang));

    let hash = manifest.hash();
    let mut pairs = Vec::new();
    for setting in [Setting::Reference, Setting::Pairwise] {
        let here: Vec<&Keyed4> = rows.iter().filter(|r| r.setting == setting).collect();
        if here.is_empty() {
            continue;
        }
        let mut names: Vec<&'static str> = Vec::new();
        for r in &here {
            for (n, _) in &r.values {
                if !names.contains(n) {
                    names.push(n);
                }
            }
        }
        let vectors: Vec<MetricVector> = names
            .iter()
            .map(|name| {
                let values = here
                    .iter()
                    .flat_map(|r| r.values.iter().filter(|(n, _)| n == name).map(|(_, v)| (r.key.clone(), *v)))
                    .collect();
                MetricVector::new(*name, values, Source::Computed, orientation_for(name))
            })
            .collect::<Result<_, _>>()?;
        let m = correlation_matrix(&vectors);
        let header = format!("metric\t{}", m.names.join("\t"));
        let table: Vec<String> = m
            .names
            .iter()
            .zip(&m.cells)
            .map(|(name, row)| {
                let cells: Vec<String> = row
                    .iter()
                    .map(|c| c.correlation().map_or("-".to_string(), |c| fmt_fixed(c.r, 4)))
                    .collect();
                format!("{name}\t{}", cells.join("\t"))
            })
            .collect();
        manifest.write_output(&out.join(format!("corr_matrix_{setting}.tsv")), &render(Some(&hash), &header, &table))?;
        for i in 0..m.names.len() {
            for j in i + 1..m.names.len() {
                let (n, r, p, flag) = cell_values(&m.cells[i][j]);
                pairs.push(format!("{setting}\t{}\t{}\t{n}\t{r}\t{p}\t{flag}", m.names[i], m.names[j]));
            }
        }
    }
    manifest.write_output(
        &out.join("corr_pairs.tsv"),
        &render(Some(&hash), "setting\tmetric_a\tmetric_b\tn\tr\tp\tflag", &pairs),
    )?;

    let keyed = |setting: Setting, name: &str| -> Vec<Keyed> {
        rows.iter()
            .filter(|r| r.setting == setting)
            .flat_map(|r| {
                r.values.iter().filter(|(n, _)| *n == name).map(|(_, v)| Keyed {
                    lang: r.lang.clone(),
                    key: r.key.clone(),
                    value: *v,
                })
            })
            .collect()
    };
    let mut cross = Vec::new();
    for name in NLI_NAMES {
        for lc in cross_setting_correlation(&keyed(Setting::Reference, name), &keyed(Setting::Pairwise, name)) {
            let (n, r, p, flag) = cell_values(&lc.cell);
            cross.push((lc.lang.clone(), name, format!("{}\t{name}\t{n}\t{r}\t{p}\t{flag}", lc.lang)));
        }
    }
    cross.sort_by(|a, b| {
        let pos = |n: &str| NLI_NAMES.iter().position(|x| *x == n);
        (&a.0, pos(a.1)).cmp(&(&b.0, pos(b.1)))
    });
    let cross: Vec<String> = cross.into_iter().map(|c| c.2).collect();
    manifest.write_output(
        &out.join("cross_setting.tsv"),
        &render(Some(&hash), "lang\tmetric\tn\tr\tp\tflag", &cross),
    )?;
    manifest.write(&manifest_in(&out))
}

// ---- shared annotation loading ---------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum LevelChoice {
    Sentence,
    Atomic,
    Both,
}

fn level_choice(ctx: &Ctx, flag: Option<LevelChoice>, default: LevelChoice) -> Result<LevelChoice, CliError> {
    if let Some(l) = flag {
        return Ok(l);
    }
    match ctx.resolver.string(None, "level") {
        None => Ok(default),
        Some(s) => <LevelChoice as ValueEnum>::from_str(&s, false).map_err(|_| CliError::Usage(format!("unknown level {s:?}"))),
    }
}

fn levels(choice: LevelChoice) -> Vec<Level> {
    match choice {
        LevelChoice::Sentence => vec![Level::Sentence],
        LevelChoice::Atomic => vec![Level::Atomic],
        LevelChoice::Both => vec![Level::Sentence, Level::Atomic],
    }
}

fn load_records(ctx: &Ctx, flag: Option<&PathBuf>, lenient: bool, manifest: &mut Manifest) -> Result<Vec<AnnotationRecord>, CliError> {
    let path = ctx.resolver.require_path(flag, "annotations")?;
    manifest.input("annotations", &path)?;
    let mode = if ctx.resolver.flag(lenient, "lenient")? { LoadMode::Lenient } else { LoadMode::Strict };
    manifest.setting("lenient", mode == LoadMode::Lenient);
    let set = load_annotations(&path, mode)?;
    for q in &set.quarantined {
        eprintln!("notice: quarantined line {} ({}): {}", q.line, q.example_id, q.message);
    }
    let mut records = set.records;
    records.retain(|r| ctx.keep_language(&r.language));
    Ok(records)
}

// ---- eval-auc -------------------------------------------------------------

#[derive(Debug, Args)]
pub(crate) struct EvalAucArgs {
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// References; enables the computed reference-setting metrics.
    #[arg(long)]
    refs: Option<PathBuf>,
    /// Generations; enables the computed pairwise metrics.
    #[arg(long)]
    gen: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    /// External scores as `name=path` (or a path; the name is its stem).
    #[arg(long)]
    scores: Vec<String>,
    /// factual or nonfactual: rank against fully supported examples.
    /// verifiable or unverifiable: rank against unverifiable facts.
    #[arg(long)]
    positive: Option<String>,
    #[arg(long, value_enum)]
    level: Option<LevelChoice>,
    #[arg(long, value_enum)]
    setting: Option<SettingChoice>,
    /// Use raw ENT/CON/DIFF scores for AUC instead of thresholded ones.
    #[arg(long)]
    continuous: bool,
    /// Thresholds as `ent=0.5,con=0.5,diff=0`.
    #[arg(long)]
    thresholds: Option<String>,
    #[arg(long)]
    random_trials: Option<usize>,
    /// Quarantine invalid annotation rows instead of failing.
    #[arg(long)]
    lenient: bool,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Output TSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `ent=0.5,con=0.5,diff=0`; kinds left out keep their default.
pub(crate) fn parse_thresholds(s: &str) -> Result<Vec<(MetricKind, f64)>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("threshold {p:?}: expected kind=value")))?;
            let kind = MetricKind::parse(k.trim())?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("threshold {p:?}: not a number")))?;
            discretize(&MetricVector::new("probe", vec![], Source::Computed, orientation_for("probe"))?, kind, Some(v))?;
            Ok((kind, v))
        })
        .collect()
}

fn fmt_auc(r: &Result<f64, String>) -> String {
    r.as_ref().map_or("-".to_string(), |v| fmt_fixed(100.0 * v, 2))
}

fn agreement_line(row: &AgreementRow) -> String {
    let (r, p) = match &row.pearson {
        Some(CorrelationCell::Available(c)) => (fmt_fixed(c.r, 4), fmt_fixed(c.p, 6)),
        _ => ("-".into(), "-".into()),
    };
    format!("{}\t{}\t{r}\t{p}\t{}\t{}", row.metric, row.setting, fmt_auc(&row.auc_good), fmt_auc(&row.auc_bad))
}

pub(crate) fn eval_auc(ctx: &Ctx, args: &EvalAucArgs) -> Result<(), CliError> {
    let positive_s = ctx.resolver.string(args.positive.as_ref(), "positive").unwrap_or_else(|| "factual".into());
    let positive = PositiveClass::parse(&positive_s)
        .ok_or_else(|| CliError::Usage(format!("unknown positive class {positive_s:?}")))?;
    let task = Task::from_positive(positive);
    let level = level_choice(ctx, args.level, LevelChoice::Sentence)?;
    let continuous = ctx.resolver.flag(args.continuous, "continuous")?;
    let thresholds = match ctx.resolver.string(args.thresholds.as_ref(), "thresholds") {
        Some(s) => parse_thresholds(&s)?,
        None => Vec::new(),
    };
    let threshold_for = |k: MetricKind| thresholds.iter().rev().find(|(x, _)| *x == k).map(|(_, v)| *v);
    let trials = ctx.resolver.value(args.random_trials, "random_trials")?.unwrap_or(RANDOM_TRIALS);
    let out = out_path(ctx, args.out.as_ref())?;

    let mut manifest = Manifest::new("eval-auc");
    let mut records = load_records(ctx, args.annotations.as_ref(), args.lenient, &mut manifest)?;
    let known: HashSet<String> = records.iter().map(|r| r.example_id.clone()).collect();
    let wanted = levels(level);
    records.retain(|r| wanted.contains(&r.level));
    if records.is_empty() {
        return Err(CliError::Usage("no annotation records left after the level and language filters".into()));
    }

    let refs_path = ctx.resolver.path(args.refs.as_ref(), "refs");
    let gen_given = ctx.resolver.path(args.gen.as_ref(), "gen").is_some();
    let mut settings = Vec::new();
    let choice = setting_choice(ctx, args.setting)?;
    if refs_path.is_some() && choice != SettingChoice::Pairwise {
        settings.push(Setting::Reference);
    }
    if gen_given && choice != SettingChoice::Reference {
        settings.push(Setting::Pairwise);
    }
    let refs = match &refs_path {
        Some(p) if settings.contains(&Setting::Reference) => {
            if !p.exists() {
                return Err(CliError::Usage(format!("--refs: {} does not exist", p.display())));
            }
            manifest.input("refs", p)?;
            ingest_references(p)?
        }
        _ => ReferenceSet::default(),
    };
    let groups = if settings.contains(&Setting::Pairwise) {
        let (gen, k, groups, _) = load_corpus(ctx, args.gen.as_ref(), args.k)?;
        manifest.input("gen", &gen)?.setting("k", k);
        groups
    } else {
        Vec::new()
    };
    let external_paths = ctx.resolver.named_paths(&args.scores, "scores")?;
    let mut external = Vec::new();
    for (name, path) in &external_paths {
        manifest.input(&format!("scores:{name}"), path)?;
        let (v, warnings) = load_external_scores(path, name, Some(&known))?;
        for w in warnings {
            eprintln!("notice: {name}: {w}");
        }
        external.push(v);
    }
    if settings.is_empty() && external.is_empty() {
        return Err(CliError::Usage("nothing to evaluate: give --refs, --gen or --scores".into()));
    }
    let client = if settings.is_empty() { None } else { Some(ctx.backend()?) };
    let languages: BTreeSet<String> = records.iter().map(|r| r.language.clone()).collect();
    let bank = load_stopwords(ctx, args.stopwords.as_ref(), &languages, Some(&mut manifest))?;

    manifest
        .setting("positive", positive)
        .setting("level", format!("{level:?}").to_lowercase())
        .setting("continuous", continuous)
        .setting("random_trials", trials)
        .setting("seed", ctx.seed)
        .setting("languages", ctx.languages_setting())
        .setting(
            "settings",
            settings.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(","),
        );
    for kind in [MetricKind::Ent, MetricKind::Con, MetricKind::Diff] {
        manifest.setting(&format!("threshold_{kind}"), threshold_for(kind).unwrap_or(kind.default_threshold()));
    }
    if let Some(c) = &client {
        manifest.setting("nli_model", &c.models().nli).setting("ner_model", &c.models().ner);
    }
    if ctx.dry_run {
        println!("dry run: {} annotation records, {} external metrics", records.len(), external.len());
        return Ok(());
    }

    let metric_names: &[&str] = match task {
        Task::Verifiable => &["r1_p", "rl_p", "neo_p", "diff", "ent", "con"],
        Task::Unverifiable => &["unv"],
    };
    let mut rows = vec![random_row(&records, task, trials, ctx.seed)?];
    let mut skipped = Vec::new();
    if let Some(client) = &client {
        let inputs = MetricInputs {
            references: &refs,
            groups: &groups,
            stopwords: &bank,
            nli: client,
            ner: client,
        };
        // Pairwise rows first.
        for setting in settings.iter().rev() {
            let computed = annotation_metrics(&records, *setting, &inputs)?;
            for (id, reason) in &computed.skipped {
                skipped.push(format!("{setting}\t{id}\t{reason}"));
            }
            for name in metric_names {
                let raw = computed.vectors.iter().find(|v| v.name == *name).expect("known metric");
                let classifier = match MetricKind::parse(name) {
                    Ok(kind) if !continuous => discretize(raw, kind, threshold_for(kind))?,
                    _ => raw.clone(),
                };
                rows.push(agreement_row(setting.as_str(), raw, &classifier, &records, task));
            }
        }
    }
    for v in &external {
        rows.push(agreement_row("external", v, v, &records, task));
    }

    let hash = manifest.hash();
    let header = format!("metric\tsetting\t{}", task.columns().join("\t"));
    let lines: Vec<String> = rows.iter().map(agreement_line).collect();
    manifest.write_output(&out, &render(Some(&hash), &header, &lines))?;
    let population: Vec<String> = rows
        .iter()
        .flat_map(|r| r.population.iter().map(move |id| format!("{}\t{}\t{id}", r.metric, r.setting)))
        .collect();
    manifest.write_output(
        &sibling(&out, "population.tsv"),
        &render(Some(&hash), "metric\tsetting\texample_id", &population),
    )?;
    manifest.write_output(
        &sibling(&out, "skipped.tsv"),
        &render(Some(&hash), "setting\texample_id\treason", &skipped),
    )?;
    manifest.write(&manifest_beside(&out))
}

// ---- rates ----------------------------------------------------------------

#[derive(Debug, Args)]
pub(crate) struct RatesArgs {
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// macro (mean of per-example ratios) or micro (pooled counts).
    #[arg(long)]
    averaging: Option<String>,
    #[arg(long, value_enum)]
    level: Option<LevelChoice>,
    #[arg(long)]
    lenient: bool,
    /// Output TSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub(crate) fn rates(ctx: &Ctx, args: &RatesArgs) -> Result<(), CliError> {
    let averaging_s = ctx.resolver.string(args.averaging.as_ref(), "averaging").unwrap_or_else(|| "macro".into());
    let averaging =
        Averaging::parse(&averaging_s).ok_or_else(|| CliError::Usage(format!("unknown averaging {averaging_s:?}")))?;
    let level = level_choice(ctx, args.level, LevelChoice::Both)?;
    let out = out_path(ctx, args.out.as_ref())?;
    let mut manifest = Manifest::new("rates");
    let records = load_records(ctx, args.annotations.as_ref(), args.lenient, &mut manifest)?;
    manifest
        .setting("averaging", averaging.as_str())
        .setting("level", format!("{level:?}").to_lowercase())
        .setting("languages", ctx.languages_setting());
    let columns: Vec<Level> = levels(level)
        .into_iter()
        .filter(|l| level != LevelChoice::Both || records.iter().any(|r| r.level == *l))
        .collect();
    if ctx.dry_run {
        println!("dry run: {} annotation records", records.len());
        return Ok(());
    }
    let summaries = columns
        .iter()
        .map(|l| {
            let subset: Vec<AnnotationRecord> = records.iter().filter(|r| r.level == *l).cloned().collect();
            rate_summary(&subset, averaging)
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (l, s) in columns.iter().zip(&summaries) {
        if !s.excluded.is_empty() {
            eprintln!("notice: {l}: {} example(s) with zero facts left out of the fact rates", s.excluded.len());
        }
    }
    let header = format!(
        "statistic\t{}",
        columns.iter().map(|l| l.as_str()).collect::<Vec<_>>().join("\t")
    );
    let n_rows = summaries.first().map_or(0, |s| s.rows().len());
    let lines: Vec<String> = (0..n_rows)
        .map(|i| {
            let label = summaries[0].rows()[i].0;
            let cells: Vec<String> = summaries.iter().map(|s| s.rows()[i].1.clone()).collect();
            format!("{label}\t{}", cells.join("\t"))
        })
        .collect();
    let hash = manifest.hash();
    manifest.write_output(&out, &render(Some(&hash), &header, &lines))?;
    manifest.write(&manifest_beside(&out))
}

// ---- validate -------------------------------------------------------------

#[derive(Debug, Args)]
pub(crate) struct ValidateArgs {
    #[arg(long)]
    gen: Option<PathBuf>,
    #[arg(long)]
    refs: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    annotations: Option<PathBuf>,
    #[arg(long)]
    templates: Option<PathBuf>,
    /// External scores as `name=path`.
    #[arg(long)]
    scores: Vec<String>,
    #[arg(long)]
    lenient: bool,
}

pub(crate) fn validate(ctx: &Ctx, args: &ValidateArgs) -> Result<(), CliError> {
    let mut checked = Vec::new();
    let mut known = None;
    if ctx.resolver.path(args.gen.as_ref(), "gen").is_some() {
        let (_, _, groups, ragged) = load_corpus(ctx, args.gen.as_ref(), args.k)?;
        checked.push(format!("gen: {} groups, {} ragged", groups.len(), ragged.len()));
    }
    if let Some(p) = ctx.resolver.path(args.refs.as_ref(), "refs") {
        let p = ctx.resolver.require_path(Some(&p), "refs")?;
        checked.push(format!("refs: {} documents", ingest_references(&p)?.len()));
    }
    if ctx.resolver.path(args.annotations.as_ref(), "annotations").is_some() {
        let mut m = Manifest::new("validate");
        let records = load_records(ctx, args.annotations.as_ref(), args.lenient, &mut m)?;
        checked.push(format!("annotations: {} records", records.len()));
        known = Some(records.iter().map(|r| r.example_id.clone()).collect::<HashSet<_>>());
    }
    if let Some(p) = ctx.resolver.path(args.templates.as_ref(), "templates") {
        let p = ctx.resolver.require_path(Some(&p), "templates")?;
        checked.push(format!("templates: {} languages", load_templates(&p)?.len()));
    }
    for (name, path) in ctx.resolver.named_paths(&args.scores, "scores")? {
        let (v, warnings) = load_external_scores(&path, &name, known.as_ref())?;
        checked.push(format!("scores {name}: {} values, {} warnings", v.len(), warnings.len()));
    }
    if ctx.has_backend() {
        ctx.backend()?;
        checked.push("backend: configured".into());
    }
    if checked.is_empty() {
        return Err(CliError::Usage("nothing to validate".into()));
    }
    for line in checked {
        println!("ok\t{line}");
    }
    Ok(())
}
