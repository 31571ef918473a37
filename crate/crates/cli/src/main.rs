//! Command-line front end for the troll-account analysis toolkit.
//!
//! Every subcommand reads files, writes files, and writes a
//! `<output>.manifest.json` provenance record next to its primary
//! output. Outputs are pure functions of inputs plus flags: rerunning
//! a command with the same inputs and seed produces byte-identical
//! files.
//!
//! Exit codes: 0 on success, 1 for command-line usage errors, 2 for
//! data or I/O errors.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use trollsweep_core::eval::{detect_in_wild, false_positive_eval, leave_one_campaign_eval};
use trollsweep_core::features::{
    balance_sample, default_reference_time, featurize_corpora, Dataset, FeatureContext,
    LanguageTable,
};
use trollsweep_core::learn::{
    cv::{ablate_components, cross_validate},
    gini_importance, load_model, save_model, train, Algorithm, ModelMeta, TrainConfig,
};
use trollsweep_core::manifest::Manifest;
use trollsweep_core::model::{read_canonical_jsonl, write_canonical_jsonl, Corpus, CorpusLabel};
use trollsweep_core::source::SourceCatalog;
use trollsweep_core::stats::{
    app_timeseries, campaign_metrics, comparison_report, cross_corpus_duplicates, documents,
    source_count_cdf, tfidf_contrast, DocUnit,
};
use trollsweep_core::exec;
use trollsweep_core::synth::{generate, SynthConfig};

#[derive(Parser)]
#[command(
    name = "trollsweep",
    version,
    about = "Contrast, classify, and hunt state-backed troll accounts from activity dumps"
)]
struct Cli {
    /// Worker threads for data-parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a raw dump into the canonical corpus form.
    Ingest(IngestArgs),
    /// Turn corpora into a per-account feature matrix.
    Featurize(FeaturizeArgs),
    /// Two-sample distribution tests per feature across the classes.
    KsReport(KsReportArgs),
    /// Volume, client-mix, and amplification summary per corpus.
    CampaignMetrics(CampaignMetricsArgs),
    /// Posting volume of one client app over time.
    Timeseries(TimeseriesArgs),
    /// Texts recirculated across otherwise unrelated corpora.
    Duplicates(DuplicatesArgs),
    /// Cumulative distribution of distinct client counts per account.
    Cdf(CdfArgs),
    /// Highest-leverage terms distinguishing two corpora.
    Tfidf(TfidfArgs),
    /// Cross-validate and fit a classifier on a feature matrix.
    Train(TrainArgs),
    /// Score each feature group alone against the full set.
    Ablate(AblateArgs),
    /// Per-feature importances of a trained forest.
    Importance(ImportanceArgs),
    /// Train on each campaign alone and detect the others.
    CrossEval(CrossEvalArgs),
    /// False-positive rate on a disjoint benign holdout.
    FpEval(FpEvalArgs),
    /// Sweep an unlabeled corpus, gated on impersonated clients.
    Detect(DetectArgs),
    /// Generate a labeled synthetic corpus pair.
    Synth(SynthArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Campaign activity dump (CSV).
    #[arg(long, conflicts_with = "sample_jsonl", required_unless_present = "sample_jsonl")]
    campaign_csv: Option<PathBuf>,
    /// Streamed 1% sample (JSONL, one status object per line).
    #[arg(long)]
    sample_jsonl: Option<PathBuf>,
    /// Label stamped on a campaign CSV's accounts (default: troll).
    #[arg(long)]
    label: Option<String>,
    /// Canonical corpus output (JSONL).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FeaturizeArgs {
    /// Canonical corpus; repeat for several.
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Feature matrix output (CSV, plus a provenance sidecar).
    #[arg(long)]
    out: PathBuf,
    /// Age reference: "auto" (newest tweet) or epoch seconds.
    #[arg(long, default_value = "auto")]
    ref_time: String,
    /// Sample this many accounts per class instead of taking all.
    #[arg(long)]
    balance: Option<usize>,
    /// Sampling seed, used with --balance.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Client-name catalog (TOML); embedded default otherwise.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Language table (one code per line); embedded default otherwise.
    #[arg(long)]
    languages: Option<PathBuf>,
}

#[derive(Args)]
struct KsReportArgs {
    /// Feature matrix (CSV) with both classes present.
    #[arg(long)]
    features: PathBuf,
    /// Significance level for the per-feature tests.
    #[arg(long, default_value_t = trollsweep_core::stats::DEFAULT_ALPHA)]
    alpha: f64,
    /// Restrict to named features; repeat for several.
    #[arg(long = "feature")]
    selected: Vec<String>,
    /// Report output (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CampaignMetricsArgs {
    /// Canonical corpus; repeat for several (one summary each).
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Summary output (JSON array).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TimeseriesArgs {
    /// Canonical corpus; repeat for several.
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Exact client name to trace.
    #[arg(long)]
    app: String,
    /// Bin width in seconds.
    #[arg(long, default_value_t = 86_400)]
    bin_seconds: i64,
    /// Series output (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DuplicatesArgs {
    /// Canonical corpus; repeat, at least two.
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Keep texts seen in at least this many corpora.
    #[arg(long, default_value_t = 2)]
    min_corpora: usize,
    /// Duplicate records output (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CdfArgs {
    /// Canonical corpus; repeat for several.
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// CDF points output (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TfidfArgs {
    /// First corpus (canonical JSONL).
    #[arg(long)]
    group_a: PathBuf,
    /// Second corpus (canonical JSONL).
    #[arg(long)]
    group_b: PathBuf,
    /// Document unit: "account" or "tweet".
    #[arg(long, default_value = "account")]
    unit: String,
    /// Terms kept per group.
    #[arg(long, default_value_t = 50)]
    top: usize,
    /// Contrast table output (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LearnerArgs {
    /// Classifier: knn, dt, svm, or rf.
    #[arg(long, default_value = "rf", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Neighbors consulted by knn.
    #[arg(long, default_value_t = 5)]
    knn_k: usize,
    /// Margin softness for svm.
    #[arg(long, default_value_t = 1.0)]
    svm_c: f64,
    /// Training passes for svm.
    #[arg(long, default_value_t = 200)]
    svm_epochs: usize,
    /// Trees in a forest.
    #[arg(long, default_value_t = 100)]
    trees: usize,
    /// Split candidates per forest node; 0 means sqrt of the width.
    #[arg(long, default_value_t = 0)]
    forest_features: usize,
    /// Depth cap for trees and forests; unlimited when absent.
    #[arg(long)]
    max_depth: Option<usize>,
    /// Smallest admissible leaf.
    #[arg(long, default_value_t = 1)]
    min_samples_leaf: usize,
}

impl LearnerArgs {
    fn to_config(&self) -> TrainConfig {
        TrainConfig {
            algorithm: self.algorithm,
            seed: self.seed,
            knn_k: self.knn_k,
            svm_c: self.svm_c,
            svm_epochs: self.svm_epochs,
            forest_trees: self.trees,
            forest_features: self.forest_features,
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Feature matrix (CSV) to learn from.
    #[arg(long)]
    features: PathBuf,
    #[command(flatten)]
    learner: LearnerArgs,
    /// Cross-validation folds before the final fit; 0 skips.
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Where to write the cross-validation report (JSON).
    #[arg(long)]
    cv_report: Option<PathBuf>,
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    languages: Option<PathBuf>,
    /// Trained model output (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AblateArgs {
    /// Feature matrix (CSV) to learn from.
    #[arg(long)]
    features: PathBuf,
    #[command(flatten)]
    learner: LearnerArgs,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Ablation table output (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ImportanceArgs {
    /// Trained forest model (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Ranked importances output (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CrossEvalArgs {
    /// Troll corpus carrying campaign tags; repeat for several.
    #[arg(long = "campaign", required = true)]
    campaigns: Vec<PathBuf>,
    /// Benign corpus the per-campaign models train against.
    #[arg(long)]
    benign: PathBuf,
    #[command(flatten)]
    learner: LearnerArgs,
    /// Accounts sampled per class for each training round.
    #[arg(long, default_value_t = 500)]
    n_per_class: usize,
    /// Score at or above which a target counts as detected.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value = "auto")]
    ref_time: String,
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    languages: Option<PathBuf>,
    /// Cross-campaign report output (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FpEvalArgs {
    /// Trained model (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Benign corpus disjoint from the model's training accounts.
    #[arg(long)]
    holdout: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value = "auto")]
    ref_time: String,
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    languages: Option<PathBuf>,
    /// False-positive report output (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Trained model (JSON).
    #[arg(long)]
    model: PathBuf,
    /// Unlabeled or benign corpus to sweep.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value = "auto")]
    ref_time: String,
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    languages: Option<PathBuf>,
    /// Sweep report output (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    n_troll: usize,
    #[arg(long, default_value_t = 500)]
    n_benign: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Pin every behavioral knob to the benign constant, leaving
    /// client choice as the only contrast.
    #[arg(long)]
    source_contrast_only: bool,
    #[arg(long)]
    scheduled_fraction: Option<f64>,
    #[arg(long)]
    fake_source_fraction: Option<f64>,
    #[arg(long)]
    retweet_fraction: Option<f64>,
    #[arg(long)]
    copypasta_pool: Option<usize>,
    #[arg(long)]
    hour_concentration: Option<f64>,
    #[arg(long)]
    mention_intensity: Option<f64>,
    #[arg(long)]
    verbosity: Option<usize>,
    /// Troll corpus output (JSONL).
    #[arg(long)]
    out_troll: PathBuf,
    /// Benign corpus output (JSONL).
    #[arg(long)]
    out_benign: PathBuf,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: trollsweep_core::Error| e.to_string())
}

fn load_corpus(path: &Path) -> anyhow::Result<Corpus> {
    read_canonical_jsonl(path).with_context(|| format!("reading corpus {}", path.display()))
}

fn load_corpora(paths: &[PathBuf]) -> anyhow::Result<Vec<Corpus>> {
    paths.iter().map(|p| load_corpus(p)).collect()
}

fn load_catalog(path: Option<&PathBuf>) -> anyhow::Result<SourceCatalog> {
    match path {
        Some(p) => SourceCatalog::from_toml_file(p)
            .with_context(|| format!("reading catalog {}", p.display())),
        None => Ok(SourceCatalog::default()),
    }
}

fn load_languages(path: Option<&PathBuf>) -> anyhow::Result<LanguageTable> {
    match path {
        Some(p) => LanguageTable::from_file(p)
            .with_context(|| format!("reading language table {}", p.display())),
        None => Ok(LanguageTable::default()),
    }
}

/// Resolve "--ref-time auto" against the corpora actually loaded.
fn resolve_ref_time(spec: &str, corpora: &[&Corpus]) -> anyhow::Result<i64> {
    if spec == "auto" {
        return Ok(default_reference_time(corpora));
    }
    spec.parse::<i64>()
        .map_err(|_| anyhow::anyhow!("--ref-time must be \"auto\" or epoch seconds, got '{spec}'"))
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> anyhow::Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Provenance sidecar written alongside a feature matrix.
fn provenance_sidecar(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.provenance.csv"))
}

fn manifest_for(subcommand: &str, catalog: &SourceCatalog) -> Manifest {
    Manifest::new(subcommand, catalog.sha256())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(err) = exec::configure_threads(threads) {
            eprintln!("error: --threads {threads}: {err}");
            std::process::exit(1);
        }
    }
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err:#}");
        std::process::exit(2);
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Featurize(args) => cmd_featurize(args),
        Command::KsReport(args) => cmd_ks_report(args),
        Command::CampaignMetrics(args) => cmd_campaign_metrics(args),
        Command::Timeseries(args) => cmd_timeseries(args),
        Command::Duplicates(args) => cmd_duplicates(args),
        Command::Cdf(args) => cmd_cdf(args),
        Command::Tfidf(args) => cmd_tfidf(args),
        Command::Train(args) => cmd_train(args),
        Command::Ablate(args) => cmd_ablate(args),
        Command::Importance(args) => cmd_importance(args),
        Command::CrossEval(args) => cmd_cross_eval(args),
        Command::FpEval(args) => cmd_fp_eval(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Synth(args) => cmd_synth(args),
    }
}

fn cmd_ingest(args: IngestArgs) -> anyhow::Result<()> {
    let catalog = SourceCatalog::default();
    let mut manifest = manifest_for("ingest", &catalog);

    let ingested = if let Some(csv) = &args.campaign_csv {
        let label: CorpusLabel = args.label.as_deref().unwrap_or("troll").parse()?;
        manifest.set("mode", "campaign-csv").set("label", label);
        manifest.add_input(csv)?;
        trollsweep_core::ingest::parse_campaign_csv(csv, label)?
    } else {
        let jsonl = args.sample_jsonl.as_ref().expect("clap enforces one input form");
        if args.label.as_deref().is_some_and(|l| l != "benign") {
            bail!("a 1%-sample dump is always benign; drop --label or pass --label benign");
        }
        manifest.set("mode", "sample-jsonl").set("label", CorpusLabel::Benign);
        manifest.add_input(jsonl)?;
        trollsweep_core::ingest::parse_sample_jsonl(jsonl)?
    };

    write_canonical_jsonl(&ingested.corpus, &args.out)?;
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    eprintln!(
        "ingested {} accounts / {} tweets into {} ({} rows skipped)",
        ingested.corpus.accounts.len(),
        ingested.corpus.tweet_count(),
        args.out.display(),
        ingested.skipped
    );
    Ok(())
}

/// Merge same-label corpora into one for balanced sampling.
fn merge_by_label(corpora: &[Corpus], label: CorpusLabel) -> anyhow::Result<Corpus> {
    let accounts: Vec<_> = corpora
        .iter()
        .filter(|c| c.label == label)
        .flat_map(|c| c.accounts.iter().cloned())
        .collect();
    if accounts.is_empty() {
        bail!("--balance needs at least one {label} corpus among the inputs");
    }
    Ok(Corpus::new(accounts, label, format!("merged:{label}"))?)
}

fn cmd_featurize(args: FeaturizeArgs) -> anyhow::Result<()> {
    let catalog = load_catalog(args.catalog.as_ref())?;
    let languages = load_languages(args.languages.as_ref())?;
    let corpora = load_corpora(&args.inputs)?;
    let refs: Vec<&Corpus> = corpora.iter().collect();
    let reference_time = resolve_ref_time(&args.ref_time, &refs)?;
    let ctx = FeatureContext { reference_time, catalog: &catalog, languages: &languages };

    let ds = match args.balance {
        Some(n) => {
            let trolls = merge_by_label(&corpora, CorpusLabel::Troll)?;
            let benign = merge_by_label(&corpora, CorpusLabel::Benign)?;
            let (ds, warnings) = balance_sample(&trolls, &benign, n, args.seed, &ctx)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            ds
        }
        None => featurize_corpora(&refs, &ctx)?,
    };
    ds.save_csv(&args.out)?;

    let mut manifest = manifest_for("featurize", &catalog);
    manifest
        .set("ref_time", reference_time)
        .set("seed", args.seed)
        .set("balance", args.balance.map_or("none".to_string(), |n| n.to_string()));
    if let Some(p) = &args.catalog {
        manifest.set("catalog", p.display());
    }
    for input in &args.inputs {
        manifest.add_input(input)?;
    }
    manifest.add_output(&args.out)?;
    manifest.add_output(&provenance_sidecar(&args.out))?;
    manifest.write_beside(&args.out)?;
    eprintln!("featurized {} accounts into {}", ds.len(), args.out.display());
    Ok(())
}

fn cmd_ks_report(args: KsReportArgs) -> anyhow::Result<()> {
    let ds = Dataset::load_csv(&args.features)?;
    let indices: Vec<usize> = if args.selected.is_empty() {
        (0..ds.feature_names.len()).collect()
    } else {
        args.selected
            .iter()
            .map(|name| {
                ds.feature_names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| anyhow::anyhow!("feature '{name}' not in the matrix"))
            })
            .collect::<anyhow::Result<_>>()?
    };
    let report = comparison_report(&ds, &indices, args.alpha)?;
    write_json(&report, &args.out)?;

    let catalog = SourceCatalog::default();
    let mut manifest = manifest_for("ks-report", &catalog);
    manifest.set("alpha", args.alpha).set("features_tested", indices.len());
    manifest.add_input(&args.features)?;
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    let significant = report.rows.iter().filter(|r| r.significant).count();
    eprintln!(
        "{significant} of {} features separate the classes at alpha {}",
        report.rows.len(),
        args.alpha
    );
    Ok(())
}

fn cmd_campaign_metrics(args: CampaignMetricsArgs) -> anyhow::Result<()> {
    let catalog = load_catalog(args.catalog.as_ref())?;
    let corpora = load_corpora(&args.inputs)?;
    let summaries: Vec<_> = corpora.iter().map(|c| campaign_metrics(c, &catalog)).collect();
    write_json(&summaries, &args.out)?;

    let mut manifest = manifest_for("campaign-metrics", &catalog);
    for input in &args.inputs {
        manifest.add_input(input)?;
    }
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    eprintln!("summarized {} corpora into {}", summaries.len(), args.out.display());
    Ok(())
}

fn cmd_timeseries(args: TimeseriesArgs) -> anyhow::Result<()> {
    let corpora = load_corpora(&args.inputs)?;
    let refs: Vec<&Corpus> = corpora.iter().collect();
    let series = app_timeseries(&refs, &args.app, args.bin_seconds)?;
    write_json(&series, &args.out)?;

    let catalog = SourceCatalog::default();
    let mut manifest = manifest_for("timeseries", &catalog);
    manifest.set("app", &args.app).set("bin_seconds", args.bin_seconds);
    for input in &args.inputs {
        manifest.add_input(input)?;
    }
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    eprintln!("{} bins for '{}' written to {}", series.len(), args.app, args.out.display());
    Ok(())
}

fn cmd_duplicates(args: DuplicatesArgs) -> anyhow::Result<()> {
    let corpora = load_corpora(&args.inputs)?;
    let refs: Vec<&Corpus> = corpora.iter().collect();
    let records = cross_corpus_duplicates(&refs, args.min_corpora)?;
    write_json(&records, &args.out)?;

    let catalog = SourceCatalog::default();
    let mut manifest = manifest_for("duplicates", &catalog);
    manifest.set("min_corpora", args.min_corpora);
    for input in &args.inputs {
        manifest.add_input(input)?;
    }
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    eprintln!("{} recirculated texts written to {}", records.len(), args.out.display());
    Ok(())
}

fn cmd_cdf(args: CdfArgs) -> anyhow::Result<()> {
    let corpora = load_corpora(&args.inputs)?;
    let refs: Vec<&Corpus> = corpora.iter().collect();
    let points = source_count_cdf(&refs)?;
    write_json(&points, &args.out)?;

    let catalog = SourceCatalog::default();
    let mut manifest = manifest_for("cdf", &catalog);
    for input in &args.inputs {
        manifest.add_input(input)?;
    }
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    eprintln!("{} CDF points written to {}", points.len(), args.out.display());
    Ok(())
}

fn cmd_tfidf(args: TfidfArgs) -> anyhow::Result<()> {
    let unit: DocUnit = args.unit.parse()?;
    let a = load_corpus(&args.group_a)?;
    let b = load_corpus(&args.group_b)?;
    let docs_a = documents(&a, unit);
    let docs_b = documents(&b, unit);
    let report = tfidf_contrast(&docs_a, &docs_b, args.top)?;
    write_json(&report, &args.out)?;

    let catalog = SourceCatalog::default();
    let mut manifest = manifest_for("tfidf", &catalog);
    manifest.set("unit", &args.unit).set("top", args.top);
    manifest.add_input(&args.group_a)?;
    manifest.add_input(&args.group_b)?;
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    eprintln!(
        "top {} terms per side written to {}",
        report.group_a.len().max(report.group_b.len()),
        args.out.display()
    );
    Ok(())
}

fn cmd_train(args: TrainArgs) -> anyhow::Result<()> {
    let catalog = load_catalog(args.catalog.as_ref())?;
    let languages = load_languages(args.languages.as_ref())?;
    let ds = Dataset::load_csv(&args.features)?;
    let config = args.learner.to_config();

    let cv = if args.folds > 0 {
        let report = cross_validate(&ds, &config, args.folds)?;
        eprintln!(
            "{}-fold cv ({}): accuracy {:.4}, precision {:.4}, recall {:.4}, f1 {:.4}",
            args.folds,
            config.algorithm,
            report.pooled.accuracy,
            report.pooled.precision,
            report.pooled.recall,
            report.pooled.f1
        );
        Some(report)
    } else {
        None
    };
    if let (Some(report), Some(path)) = (&cv, &args.cv_report) {
        write_json(report, path)?;
    } else if args.cv_report.is_some() {
        bail!("--cv-report needs --folds of at least 2");
    }

    let meta = ModelMeta::new(&languages, catalog.sha256());
    let model = train(&ds, &config, meta)?;
    save_model(&model, &args.out)?;

    let mut manifest = manifest_for("train", &catalog);
    manifest
        .set("algorithm", config.algorithm)
        .set("seed", config.seed)
        .set("folds", args.folds)
        .set("rows", ds.len());
    manifest.add_input(&args.features)?;
    manifest.add_output(&args.out)?;
    if let Some(path) = &args.cv_report {
        manifest.add_output(path)?;
    }
    manifest.write_beside(&args.out)?;
    eprintln!("model written to {}", args.out.display());
    Ok(())
}

fn cmd_ablate(args: AblateArgs) -> anyhow::Result<()> {
    let ds = Dataset::load_csv(&args.features)?;
    let config = args.learner.to_config();
    let report = ablate_components(&ds, &config, args.folds)?;
    write_json(&report, &args.out)?;

    let catalog = SourceCatalog::default();
    let mut manifest = manifest_for("ablate", &catalog);
    manifest
        .set("algorithm", config.algorithm)
        .set("seed", config.seed)
        .set("folds", args.folds);
    manifest.add_input(&args.features)?;
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    for row in &report.rows {
        eprintln!(
            "{:<12} {:>2} features: f1 {:.4}",
            row.component, row.feature_count, row.metrics.f1
        );
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct ImportanceRow {
    feature: String,
    importance: f64,
}

fn cmd_importance(args: ImportanceArgs) -> anyhow::Result<()> {
    let model = load_model(&args.model)?;
    let importances = gini_importance(&model)?;
    let mut rows: Vec<ImportanceRow> = model
        .feature_names
        .iter()
        .zip(&importances)
        .map(|(feature, &importance)| ImportanceRow { feature: feature.clone(), importance })
        .collect();
    rows.sort_by(|a, b| {
        b.importance.total_cmp(&a.importance).then_with(|| a.feature.cmp(&b.feature))
    });
    write_json(&rows, &args.out)?;

    let catalog = SourceCatalog::default();
    let mut manifest = manifest_for("importance", &catalog);
    manifest.add_input(&args.model)?;
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    if let Some(top) = rows.first() {
        eprintln!("strongest feature: {} ({:.4})", top.feature, top.importance);
    }
    Ok(())
}

fn cmd_cross_eval(args: CrossEvalArgs) -> anyhow::Result<()> {
    let catalog = load_catalog(args.catalog.as_ref())?;
    let languages = load_languages(args.languages.as_ref())?;
    let troll_corpora = load_corpora(&args.campaigns)?;
    let benign = load_corpus(&args.benign)?;
    let troll_refs: Vec<&Corpus> = troll_corpora.iter().collect();
    let mut all_refs = troll_refs.clone();
    all_refs.push(&benign);
    let reference_time = resolve_ref_time(&args.ref_time, &all_refs)?;
    let ctx = FeatureContext { reference_time, catalog: &catalog, languages: &languages };
    let config = args.learner.to_config();

    let report = leave_one_campaign_eval(
        &troll_refs,
        &benign,
        &ctx,
        &config,
        args.n_per_class,
        args.threshold,
    )?;
    write_json(&report, &args.out)?;

    let mut manifest = manifest_for("cross-eval", &catalog);
    manifest
        .set("algorithm", config.algorithm)
        .set("seed", config.seed)
        .set("n_per_class", args.n_per_class)
        .set("threshold", args.threshold)
        .set("ref_time", reference_time);
    for input in &args.campaigns {
        manifest.add_input(input)?;
    }
    manifest.add_input(&args.benign)?;
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    for round in &report.rounds {
        eprintln!(
            "trained on {:<20} detected {}/{} foreign troll accounts ({:.1}%)",
            round.train_campaign,
            round.overall_detected,
            round.overall_scored,
            100.0 * round.overall_rate
        );
    }
    Ok(())
}

fn cmd_fp_eval(args: FpEvalArgs) -> anyhow::Result<()> {
    let catalog = load_catalog(args.catalog.as_ref())?;
    let languages = load_languages(args.languages.as_ref())?;
    let model = load_model(&args.model)?;
    let holdout = load_corpus(&args.holdout)?;
    let reference_time = resolve_ref_time(&args.ref_time, &[&holdout])?;
    let ctx = FeatureContext { reference_time, catalog: &catalog, languages: &languages };

    let report = false_positive_eval(&model, &holdout, &ctx, args.threshold)?;
    write_json(&report, &args.out)?;

    let mut manifest = manifest_for("fp-eval", &catalog);
    manifest.set("threshold", args.threshold).set("ref_time", reference_time);
    manifest.add_input(&args.model)?;
    manifest.add_input(&args.holdout)?;
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    eprintln!(
        "{} of {} holdout accounts flagged ({:.2}%)",
        report.flagged.len(),
        report.scored,
        100.0 * report.false_positive_rate
    );
    Ok(())
}

fn cmd_detect(args: DetectArgs) -> anyhow::Result<()> {
    let catalog = load_catalog(args.catalog.as_ref())?;
    let languages = load_languages(args.languages.as_ref())?;
    let model = load_model(&args.model)?;
    let corpus = load_corpus(&args.corpus)?;
    let reference_time = resolve_ref_time(&args.ref_time, &[&corpus])?;
    let ctx = FeatureContext { reference_time, catalog: &catalog, languages: &languages };

    let report = detect_in_wild(&model, &corpus, &ctx, args.threshold)?;
    write_json(&report, &args.out)?;

    let mut manifest = manifest_for("detect", &catalog);
    manifest.set("threshold", args.threshold).set("ref_time", reference_time);
    manifest.add_input(&args.model)?;
    manifest.add_input(&args.corpus)?;
    manifest.add_output(&args.out)?;
    manifest.write_beside(&args.out)?;
    eprintln!(
        "{} candidates via impersonated clients, {} flagged, out of {} accounts",
        report.candidate_count,
        report.flagged.len(),
        report.total_accounts
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> anyhow::Result<()> {
    let mut config = if args.source_contrast_only {
        SynthConfig::source_contrast_only(args.n_troll, args.n_benign, args.seed)
    } else {
        SynthConfig {
            n_troll: args.n_troll,
            n_benign: args.n_benign,
            seed: args.seed,
            ..SynthConfig::default()
        }
    };
    if let Some(v) = args.scheduled_fraction {
        config.scheduled_fraction = v;
    }
    if let Some(v) = args.fake_source_fraction {
        config.fake_source_fraction = v;
    }
    if let Some(v) = args.retweet_fraction {
        config.retweet_fraction = v;
    }
    if let Some(v) = args.copypasta_pool {
        config.copypasta_pool = v;
    }
    if let Some(v) = args.hour_concentration {
        config.hour_concentration = v;
    }
    if let Some(v) = args.mention_intensity {
        config.mention_intensity = v;
    }
    if let Some(v) = args.verbosity {
        config.verbosity = v;
    }

    let (trolls, benign) = generate(&config)?;
    write_canonical_jsonl(&trolls, &args.out_troll)?;
    write_canonical_jsonl(&benign, &args.out_benign)?;

    let catalog = SourceCatalog::default();
    let mut manifest = manifest_for("synth", &catalog);
    manifest
        .set("seed", config.seed)
        .set("n_troll", config.n_troll)
        .set("n_benign", config.n_benign)
        .set("scheduled_fraction", config.scheduled_fraction)
        .set("fake_source_fraction", config.fake_source_fraction)
        .set("retweet_fraction", config.retweet_fraction)
        .set("copypasta_pool", config.copypasta_pool)
        .set("hour_concentration", config.hour_concentration)
        .set("mention_intensity", config.mention_intensity)
        .set("verbosity", config.verbosity)
        .set("metadata_contrast", config.metadata_contrast);
    manifest.add_output(&args.out_troll)?;
    manifest.add_output(&args.out_benign)?;
    manifest.write_beside(&args.out_troll)?;
    eprintln!(
        "generated {} troll / {} benign accounts into {} and {}",
        trolls.accounts.len(),
        benign.accounts.len(),
        args.out_troll.display(),
        args.out_benign.display()
    );
    Ok(())
}
