//! The `cap2qa` command line.

use std::collections::{HashMap, HashSet};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use cap2qa_core::caption_metrics::{
    bleu_default, caption_scores, CaptionEvalSet, CaptionItem, CaptionMetricError, CiderVariant,
};
use cap2qa_core::hallucination::{chair_eval, AnswerRecord};
use cap2qa_core::vqa::{evaluate, Matching, Scorer, VqaItem};
use cap2qa_core::{dataset_stats, default_prompt_config, Clock, GenerationSettings, Generator, RuleSet, Split};
use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::coco::{load_caption_references, load_coco_captions, load_object_annotations};
use crate::config::{default_rules_toml, load_generate_file, load_prompt, load_rules, prompt_to_toml};
use crate::error::{Error, Result};
use crate::jsonl::{read_jsonl, read_qa_rows, to_line};
use crate::lexicon_io::build_lexicon;
use crate::llm::{
    prompt_hash, AssistantClient, BackendSpec, MockScript, ResponseCache, RetryPolicy, SystemTimer, API_KEY_ENV,
};
use crate::pipeline::{generate_corpus, RunOptions};
use crate::report::{self, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "cap2qa", version, about = "Caption-grounded QA generation and evaluation")]
struct Cli {
    /// More log output on stderr (-v debug, -vv trace).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate question-answer records from COCO captions.
    Generate(GenerateArgs),
    /// Sentence-level object hallucination and recall of answers.
    EvalChair(EvalChairArgs),
    /// Parsing VQA accuracy (PAcc) or exact-match accuracy.
    EvalVqa(EvalVqaArgs),
    /// Corpus BLEU-1..4 and CIDEr of candidate captions.
    EvalCaption(EvalCaptionArgs),
    /// Record, image and word counts of a question-answer dataset.
    Stats(StatsArgs),
    /// Render a saved report as JSON or a markdown table.
    Report(ReportArgs),
    /// Write the rendered prompt and its hash for every caption.
    RenderPrompts(RenderPromptsArgs),
    /// Print the built-in prompt or rule set as TOML.
    Defaults(DefaultsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BackendKind {
    Http,
    Mock,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// COCO caption annotation JSON.
    #[arg(long)]
    captions: Option<PathBuf>,
    /// Split tag for the loaded captions.
    #[arg(long)]
    split: Option<Split>,
    /// Output JSONL path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    backend: Option<BackendKind>,
    /// Chat-completions base URL; requests go to <url>/chat/completions.
    #[arg(long, env = "CAP2QA_BASE_URL")]
    base_url: Option<String>,
    #[arg(long, env = "CAP2QA_MODEL")]
    model: Option<String>,
    /// Generation attempts per caption [default: 3].
    #[arg(long)]
    retry: Option<u32>,
    /// Concurrent in-flight captions [default: 4].
    #[arg(long)]
    workers: Option<usize>,
    /// Rule set TOML; replaces the built-in rules.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Prompt TOML; replaces the built-in prompt.
    #[arg(long)]
    prompt: Option<PathBuf>,
    /// Also write every raw response to <out>.raw.jsonl.
    #[arg(long)]
    keep_raw: bool,
    /// Append to <out>, skipping captions already present.
    #[arg(long)]
    resume: bool,
    /// Mock script JSONL (mock backend).
    #[arg(long)]
    script: Option<PathBuf>,
    /// TOML file with a [generate] table of defaults for these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for the on-disk response cache; no cache without it.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Sampling temperature in [0, 2] [default: 0].
    #[arg(long)]
    temperature: Option<f64>,
    /// Output token budget per request [default: 1024].
    #[arg(long)]
    max_tokens: Option<u32>,
    /// Retries of transient HTTP failures per request [default: 5].
    #[arg(long)]
    network_retries: Option<u32>,
    /// Requests per minute sent to the backend; unlimited if unset.
    #[arg(long)]
    rpm: Option<u32>,
    /// HTTP request timeout in seconds [default: 60].
    #[arg(long)]
    timeout_secs: Option<u64>,
    /// Fixed RFC 3339 timestamp for every record's provenance.
    #[arg(long)]
    timestamp: Option<String>,
    /// Where to write the run report; stdout if unset.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalChairArgs {
    /// JSONL of {image_id, text}.
    #[arg(long)]
    answers: PathBuf,
    /// COCO instance annotation JSON.
    #[arg(long)]
    instances: PathBuf,
    /// Category list, one per line [default: the 80 COCO categories].
    #[arg(long)]
    categories: Option<PathBuf>,
    /// Synonym table, `category, form, form` per line.
    #[arg(long)]
    synonyms: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VqaMode {
    Pacc,
    Acc,
}

#[derive(Debug, Args)]
struct EvalVqaArgs {
    /// JSONL of {question_id, prediction}.
    #[arg(long)]
    pred: PathBuf,
    /// JSONL of {question_id, ground_truths}.
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, value_enum, default_value = "pacc")]
    mode: VqaMode,
    /// Compare strings as given, without case or punctuation folding.
    #[arg(long)]
    raw_match: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalCaptionArgs {
    /// JSONL of {image_id, candidate}.
    #[arg(long)]
    pred: PathBuf,
    /// COCO caption annotation JSON with the references.
    #[arg(long)]
    refs: PathBuf,
    /// Report CIDEr-D (clipped, length-penalized) instead of CIDEr.
    #[arg(long)]
    cider_d: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// JSONL or JSON array of {image_id, question, answer}.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Markdown,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "markdown")]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct RenderPromptsArgs {
    #[arg(long)]
    captions: PathBuf,
    #[arg(long, default_value = "train")]
    split: Split,
    #[arg(long)]
    prompt: Option<PathBuf>,
    /// Output JSONL of {caption_id, image_id, prompt_hash, prompt}; stdout if unset.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DefaultsWhat {
    Prompt,
    Rules,
}

#[derive(Debug, Args)]
struct DefaultsArgs {
    #[arg(value_enum)]
    what: DefaultsWhat,
}

/// Exit code for an error: 1 for bad invocations and configs, 2 for
/// failures while doing the work.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Config { .. } | Error::Rules { .. } | Error::Prompt(_) | Error::Lexicon { .. } => 1,
        _ => 2,
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    init_logging(cli.verbose);
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::EvalChair(a) => cmd_eval_chair(a),
        Command::EvalVqa(a) => cmd_eval_vqa(a),
        Command::EvalCaption(a) => cmd_eval_caption(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Report(a) => cmd_report(a),
        Command::RenderPrompts(a) => cmd_render_prompts(a),
        Command::Defaults(a) => cmd_defaults(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            log::error!("{e}");
            exit_code(&e)
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "info",
        1 => "debug",
        _ => "trace",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .try_init();
}

struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// Frozen or wall clock, chosen at run time.
enum RunClock {
    Fixed(DateTime<Utc>),
    System(SystemClock),
}

impl Clock for RunClock {
    fn now(&self) -> DateTime<Utc> {
        match self {
            RunClock::Fixed(t) => *t,
            RunClock::System(c) => c.now(),
        }
    }
}

/// `generate` settings after merging flags, environment, config file and
/// defaults, in that order of precedence.
#[derive(Debug)]
struct GenerateRun {
    captions: PathBuf,
    split: Split,
    out: PathBuf,
    backend: BackendKind,
    base_url: Option<String>,
    model: String,
    retry: u32,
    workers: usize,
    rules: Option<PathBuf>,
    prompt: Option<PathBuf>,
    keep_raw: bool,
    resume: bool,
    script: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
    temperature: f64,
    max_tokens: u32,
    network_retries: u32,
    rpm: Option<u32>,
    timeout: Duration,
    timestamp: Option<DateTime<Utc>>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

fn resolve_generate(a: GenerateArgs) -> Result<GenerateRun> {
    let file = match &a.config {
        Some(p) => load_generate_file(p)?,
        None => Default::default(),
    };
    let split = match a.split {
        Some(s) => Some(s),
        None => file.split.as_deref().map(|s| s.parse::<Split>().map_err(usage)).transpose()?,
    };
    let backend = match a.backend {
        Some(b) => Some(b),
        None => file
            .backend
            .as_deref()
            .map(|s| BackendKind::from_str(s, true).map_err(|_| usage(format!("unknown backend `{s}`"))))
            .transpose()?,
    };
    let timestamp = a
        .timestamp
        .or(file.timestamp)
        .map(|s| {
            DateTime::parse_from_rfc3339(&s)
                .map(|t| t.with_timezone(&Utc))
                .map_err(|e| usage(format!("--timestamp `{s}`: {e}")))
        })
        .transpose()?;

    let run = GenerateRun {
        captions: a.captions.or(file.captions).ok_or_else(|| usage("--captions is required"))?,
        split: split.ok_or_else(|| usage("--split is required"))?,
        out: a.out.or(file.out).ok_or_else(|| usage("--out is required"))?,
        backend: backend.ok_or_else(|| usage("--backend is required (http or mock)"))?,
        base_url: a.base_url.or(file.base_url),
        model: a.model.or(file.model).unwrap_or_else(|| GenerationSettings::default().model_id),
        retry: a.retry.or(file.retry).unwrap_or(cap2qa_core::generator::DEFAULT_RETRY),
        workers: a.workers.or(file.workers).unwrap_or(4),
        rules: a.rules.or(file.rules),
        prompt: a.prompt.or(file.prompt),
        keep_raw: a.keep_raw || file.keep_raw.unwrap_or(false),
        resume: a.resume || file.resume.unwrap_or(false),
        script: a.script.or(file.script),
        cache_dir: a.cache_dir.or(file.cache_dir),
        temperature: a.temperature.or(file.temperature).unwrap_or(0.0),
        max_tokens: a.max_tokens.or(file.max_tokens).unwrap_or(1024),
        network_retries: a.network_retries.or(file.network_retries).unwrap_or(5),
        rpm: a.rpm.or(file.rpm),
        timeout: Duration::from_secs(a.timeout_secs.or(file.timeout_secs).unwrap_or(60)),
        timestamp,
    };

    if run.retry < 1 {
        return Err(usage("--retry must be at least 1"));
    }
    if run.workers < 1 {
        return Err(usage("--workers must be at least 1"));
    }
    if !(0.0..=2.0).contains(&run.temperature) {
        return Err(usage(format!("--temperature {} outside [0, 2]", run.temperature)));
    }
    if run.max_tokens == 0 {
        return Err(usage("--max-tokens must be positive"));
    }
    if run.rpm == Some(0) {
        return Err(usage("--rpm must be positive"));
    }
    match run.backend {
        BackendKind::Mock if run.script.is_none() => return Err(usage("--backend mock needs --script")),
        BackendKind::Http if run.base_url.as_deref().is_none_or(|u| u.trim().is_empty()) => {
            return Err(usage("--backend http needs --base-url or CAP2QA_BASE_URL"))
        }
        _ => {}
    }
    Ok(run)
}

fn cmd_generate(mut a: GenerateArgs) -> Result<()> {
    let started = Utc::now();
    let report_path = a.report.take();
    let run = resolve_generate(a)?;

    let prompt = match &run.prompt {
        Some(p) => load_prompt(p)?,
        None => default_prompt_config(),
    };
    let rules = match &run.rules {
        Some(p) => load_rules(p)?,
        None => RuleSet::default_rules(),
    };
    let settings = GenerationSettings {
        retry: run.retry,
        model_id: run.model.clone(),
        temperature: run.temperature,
        max_output_tokens: run.max_tokens,
        keep_raw: run.keep_raw,
    };
    let generator = Generator::new(prompt, rules, settings).map_err(|e| usage(e.to_string()))?;

    let spec = match run.backend {
        BackendKind::Mock => BackendSpec::Mock(MockScript::load(run.script.as_deref().expect("validated"))?),
        BackendKind::Http => BackendSpec::Http {
            base_url: run.base_url.clone().expect("validated"),
            api_key: std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty()),
            timeout: run.timeout,
        },
    };
    let mut client = AssistantClient::new(spec.build()?)
        .with_retry_policy(RetryPolicy { retries: run.network_retries, ..RetryPolicy::default() })
        .with_timer(Arc::new(SystemTimer::default()));
    if let Some(rpm) = run.rpm {
        client = client.with_rate_limit(rpm);
    }
    if let Some(dir) = &run.cache_dir {
        client = client.with_cache(ResponseCache::open(dir).map_err(|e| Error::io(dir, e))?);
    }

    let captions = load_coco_captions(&run.captions, run.split)?;
    log::info!("loaded {} captions from {}", captions.len(), run.captions.display());
    let clock = match run.timestamp {
        Some(t) => RunClock::Fixed(t),
        None => RunClock::System(SystemClock),
    };
    let summary = generate_corpus(
        &captions,
        &generator,
        &client,
        &clock,
        &run.out,
        &RunOptions { workers: run.workers, resume: run.resume },
    )?;
    log::info!(
        "{} records from {} captions ({} skipped, {} uncovered)",
        summary.n_records,
        summary.n_captions,
        summary.n_skipped,
        summary.n_exhausted
    );

    let mut report = Report::new("generate", started);
    report.add_input("captions", &run.captions)?;
    for (name, path) in [("script", &run.script), ("prompt", &run.prompt), ("rules", &run.rules)] {
        if let Some(p) = path {
            report.add_input(name, p)?;
        }
    }
    report.metric("n_captions", summary.n_captions as f64);
    report.metric("n_skipped", summary.n_skipped as f64);
    report.metric("n_records", summary.n_records as f64);
    report.metric("n_exhausted", summary.n_exhausted as f64);
    report.metric("n_covered_images", summary.n_covered_images as f64);
    report.details = json!({
        "out": run.out.display().to_string(),
        "model_id": run.model,
        "prompt_version": generator.prompt().version_tag(),
        "retry": run.retry,
        "workers": run.workers,
        "backend": run.backend,
    });
    report.finished_at = Utc::now();
    report::write_or_print(&report, report_path.as_deref())
}

fn ratio_string(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn cmd_eval_chair(a: EvalChairArgs) -> Result<()> {
    let started = Utc::now();
    let lexicon = build_lexicon(a.categories.as_deref(), a.synonyms.as_deref())?;
    let answers: Vec<AnswerRecord> = read_jsonl(&a.answers)?;
    let annotations = load_object_annotations(&a.instances, &lexicon)?;
    let result = chair_eval(&answers, &annotations, &lexicon)?;

    let mut report = Report::new("eval-chair", started);
    report.add_input("answers", &a.answers)?;
    report.add_input("instances", &a.instances)?;
    if let Some(p) = &a.categories {
        report.add_input("categories", p)?;
    }
    if let Some(p) = &a.synonyms {
        report.add_input("synonyms", p)?;
    }
    report.metric("chair_s", result.chair_s_f64());
    report.metric("recall", result.recall_f64());
    report.metric("recall_wo_h", result.recall_wo_h_f64());
    report.metric("n_answers", result.n_answers as f64);
    report.details = json!({
        "exact": {
            "chair_s": ratio_string(result.chair_s),
            "recall": ratio_string(result.recall),
            "recall_wo_h": ratio_string(result.recall_wo_h),
        },
        "per_image": result.per_image,
    });
    report.finished_at = Utc::now();
    report::write_or_print(&report, a.report.as_deref())
}

#[derive(Deserialize)]
struct PredLine {
    question_id: u64,
    prediction: String,
}

#[derive(Deserialize)]
struct GtLine {
    question_id: u64,
    ground_truths: Vec<String>,
}

fn cmd_eval_vqa(a: EvalVqaArgs) -> Result<()> {
    let started = Utc::now();
    let preds: Vec<PredLine> = read_jsonl(&a.pred)?;
    let gts: Vec<GtLine> = read_jsonl(&a.gt)?;
    let mut by_id = HashMap::with_capacity(gts.len());
    for g in gts {
        let id = g.question_id;
        if by_id.insert(id, g.ground_truths).is_some() {
            return Err(usage(format!("{}: question_id {id} appears twice", a.gt.display())));
        }
    }
    let mut items = Vec::with_capacity(preds.len());
    for p in preds {
        let ground_truths = by_id.remove(&p.question_id).ok_or_else(|| {
            usage(format!(
                "{}: question_id {} has no ground truth in {}",
                a.pred.display(),
                p.question_id,
                a.gt.display()
            ))
        })?;
        items.push(VqaItem { question_id: p.question_id, ground_truths, prediction: p.prediction });
    }
    if !by_id.is_empty() {
        log::warn!("{} ground-truth questions have no prediction and are ignored", by_id.len());
    }
    let (scorer, name) = match a.mode {
        VqaMode::Pacc => (Scorer::Pacc, "pacc"),
        VqaMode::Acc => (Scorer::Acc, "acc"),
    };
    let matching = if a.raw_match { Matching::Raw } else { Matching::Normalized };
    let result = evaluate(&items, scorer, matching)?;

    let mut report = Report::new("eval-vqa", started);
    report.add_input("pred", &a.pred)?;
    report.add_input("gt", &a.gt)?;
    report.metric(name, result.mean_f64());
    report.metric("n_items", items.len() as f64);
    let per_item: Vec<_> =
        result.per_item.iter().map(|s| json!({"question_id": s.question_id, "score": ratio_string(s.score)})).collect();
    report.details = json!({
        "mode": name,
        "matching": if a.raw_match { "raw" } else { "normalized" },
        "exact_mean": ratio_string(result.mean_accuracy),
        "per_item": per_item,
    });
    report.finished_at = Utc::now();
    report::write_or_print(&report, a.report.as_deref())
}

#[derive(Deserialize)]
struct CandidateLine {
    image_id: u64,
    candidate: String,
}

fn cmd_eval_caption(a: EvalCaptionArgs) -> Result<()> {
    let started = Utc::now();
    let preds: Vec<CandidateLine> = read_jsonl(&a.pred)?;
    let mut refs = load_caption_references(&a.refs)?;
    let mut seen = HashSet::new();
    let mut items = Vec::with_capacity(preds.len());
    for p in preds {
        if !seen.insert(p.image_id) {
            return Err(usage(format!("{}: image_id {} appears twice", a.pred.display(), p.image_id)));
        }
        let references = refs.remove(&p.image_id).ok_or_else(|| {
            usage(format!(
                "{}: image_id {} has no reference captions in {}",
                a.pred.display(),
                p.image_id,
                a.refs.display()
            ))
        })?;
        items.push(CaptionItem { image_id: p.image_id, candidate: p.candidate, references });
    }
    let set = CaptionEvalSet::new(items);
    let (variant, cider_name) =
        if a.cider_d { (CiderVariant::D_DEFAULT, "cider_d") } else { (CiderVariant::Plain, "cider") };
    let (bleu, cider) = match caption_scores(&set, variant) {
        Ok(s) => (s.bleu, Some(s.cider)),
        Err(CaptionMetricError::SingletonCorpus) => {
            log::warn!("a single item gives degenerate document frequencies; CIDEr omitted");
            (bleu_default(&set)?, None)
        }
        Err(e) => return Err(e.into()),
    };

    let mut report = Report::new("eval-caption", started);
    report.add_input("pred", &a.pred)?;
    report.add_input("refs", &a.refs)?;
    for (i, b) in bleu.iter().enumerate() {
        report.metric(&format!("bleu_{}", i + 1), *b);
    }
    if let Some(c) = cider {
        report.metric(cider_name, c);
    }
    report.metric("n_items", set.items.len() as f64);
    report.finished_at = Utc::now();
    report::write_or_print(&report, a.report.as_deref())
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let started = Utc::now();
    let rows = read_qa_rows(&a.dataset)?;
    let stats = dataset_stats(&rows);
    let mut report = Report::new("stats", started);
    report.add_input("dataset", &a.dataset)?;
    report.metric("n_records", stats.n_records as f64);
    report.metric("n_distinct_images", stats.n_distinct_images as f64);
    report.metric("avg_answer_words", stats.avg_answer_words);
    report.metric("avg_question_words", stats.avg_question_words);
    report.finished_at = Utc::now();
    report::write_or_print(&report, a.report.as_deref())
}

fn print_stdout(text: &str) -> Result<()> {
    std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::io(Path::new("<stdout>"), e))
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let report = Report::load(&a.input)?;
    let format = match a.format {
        ReportFormat::Json => Format::Json,
        ReportFormat::Markdown => Format::Markdown,
    };
    print_stdout(&report::render(&report, format))
}

#[derive(Serialize)]
struct PromptLine<'a> {
    caption_id: u64,
    image_id: u64,
    prompt_hash: String,
    prompt: &'a str,
}

fn cmd_render_prompts(a: RenderPromptsArgs) -> Result<()> {
    let prompt = match &a.prompt {
        Some(p) => load_prompt(p)?,
        None => default_prompt_config(),
    };
    let captions = load_coco_captions(&a.captions, a.split)?;
    let mut buf = Vec::new();
    for c in &captions {
        let bundle = prompt.render(c)?;
        buf.extend(to_line(&PromptLine {
            caption_id: c.caption_id,
            image_id: c.image_id,
            prompt_hash: prompt_hash(&bundle.rendered),
            prompt: &bundle.rendered,
        }));
    }
    match &a.out {
        Some(p) => std::fs::write(p, buf).map_err(|e| Error::io(p, e)),
        None => print_stdout(&String::from_utf8(buf).expect("JSON is UTF-8")),
    }
}

fn cmd_defaults(a: DefaultsArgs) -> Result<()> {
    let text = match a.what {
        DefaultsWhat::Prompt => prompt_to_toml(&default_prompt_config()),
        DefaultsWhat::Rules => default_rules_toml(),
    };
    print_stdout(&text)
}
