//! `pulsegauge` command-line interface.
//!
//! Every stage reads and writes JSON Lines so stages compose through pipes:
//! `collect | preprocess | score | analyze`. Exit codes: 0 on success, 1 on
//! a runtime error (a JSON error object is printed to stderr), 2 on a usage
//! error.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use chrono::{DateTime, NaiveDate, Utc};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pulsegauge_core::analytics::{self, DriverReport, EntitySummary, SentimentSeries, Window};
use pulsegauge_core::contextual::{polarity_score, BackendDescriptor, ReferenceModel, TrainOptions};
use pulsegauge_core::ensemble::{self, Label, ValidationExample};
use pulsegauge_core::evaluation::{self, LabeledExample, ModelReport, Scorer};
use pulsegauge_core::ingest::{self, CollectionRequest, RawPost};
use pulsegauge_core::pipeline::{HybridScorer, SentimentRecord};
use pulsegauge_core::textprep::{PrepProfile, TokenSequence};
use pulsegauge_core::Error as CoreError;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::backend::build_classifier;
use crate::bench::benchmark_latency;
use crate::config::{load_tables, Settings};
use crate::error::{AppError, Result};
use crate::scoring::{score_inputs, ScoreInput};
use crate::service::{self, AppState, ServiceConfig};
use crate::source::{FileSource, PostStream, SourceSpec};
use crate::store::Store;

#[derive(Debug, Parser)]
#[command(name = "pulsegauge", version, about = "Hybrid sentiment scoring and entity monitoring")]
pub struct Cli {
    /// TOML file with `alpha`, `pos_threshold`, `neg_threshold` and friends.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory of lexicon and preprocessing tables overriding the bundled ones.
    #[arg(long, global = true, value_name = "DIR")]
    resources: Option<PathBuf>,
    /// Contextual backend: `reference[:<model.json>]`, `remote:<url>` or `fixture:<jsonl>`.
    #[arg(long, global = true, value_name = "SPEC")]
    backend: Option<String>,
    /// Ensemble weight of the lexicon score.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Human-readable tables instead of JSON Lines.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Collect posts from a file or live source and apply the quality filters.
    Collect(CollectArgs),
    /// Annotate posts with per-model token sequences.
    Preprocess(PreprocessArgs),
    /// Score a text or a JSON Lines file of posts.
    Score(ScoreArgs),
    /// Entity index, tier, series, volatility and drivers from scored records.
    Analyze(AnalyzeArgs),
    /// Compare models on a labeled dataset.
    Eval(EvalArgs),
    /// Choose the ensemble weight on a validation set.
    Gridsearch(GridArgs),
    /// Train the hashed bag-of-words reference model.
    Train(TrainArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Run collect, preprocess, score and analyze over the bundled corpus.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
struct Io {
    /// Input file, `-` for stdin.
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CollectArgs {
    /// Replay file (shorthand for `--source file:<path>`).
    #[arg(long = "in", value_name = "PATH", conflicts_with = "source")]
    input: Option<PathBuf>,
    /// `file:<path>` or `live:<url>`; defaults to `PG_SOURCE`.
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    query: String,
    #[arg(long, default_value_t = 500)]
    max_items: u32,
    #[arg(long, value_name = "YYYY-MM-DD")]
    start: NaiveDate,
    #[arg(long, value_name = "YYYY-MM-DD")]
    end: NaiveDate,
    #[arg(long)]
    min_engagement: Option<u64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileChoice {
    Vader,
    Contextual,
    All,
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, value_enum, default_value_t = ProfileChoice::All)]
    profile: ProfileChoice,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source_text").required(true).args(["text", "input"]))]
struct ScoreArgs {
    /// Score a single text.
    #[arg(long)]
    text: Option<String>,
    /// JSON Lines of posts (`text` required; `id`, `created_at`, `entity`, `prep` used when present).
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Entity to stamp on records that carry none.
    #[arg(long)]
    entity: Option<String>,
    /// Worker threads; output order is preserved.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Add `latency_ms` and `scored_at` to each record.
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    io: Io,
    #[command(flatten)]
    opts: AnalyzeOpts,
}

#[derive(Debug, Clone, Args)]
struct AnalyzeOpts {
    /// Series bucket width, e.g. `1h`, `1d`, `1w`.
    #[arg(long, default_value = "1w")]
    bucket: String,
    /// Drivers per direction.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Entity for records that carry none.
    #[arg(long, default_value = "all")]
    entity: String,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Comma-separated subset of `vader`, `contextual`, `hybrid`.
    #[arg(long, value_delimiter = ',', default_value = "vader,contextual,hybrid")]
    models: Vec<String>,
    /// JSON Lines of `{"text": ..., "gold": ...}`.
    #[arg(long, value_name = "PATH")]
    data: PathBuf,
    /// Measure mean per-item latency.
    #[arg(long)]
    timings: bool,
    #[arg(long, default_value_t = 5)]
    warmup: usize,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// JSON Lines of `{"text", "gold"}` or `{"s_vader", "s_contextual", "gold"}`.
    #[arg(long, value_name = "PATH")]
    val: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// JSON Lines of `{"text": ..., "gold": ...}`.
    #[arg(long, value_name = "PATH")]
    data: PathBuf,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    #[arg(long, default_value_t = 2048)]
    buckets: u32,
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    #[arg(long, default_value_t = 0.5)]
    learning_rate: f64,
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
    /// Hash unigrams only.
    #[arg(long)]
    unigrams_only: bool,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "PG_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    #[arg(long, env = "PG_DATA_DIR", default_value = "pulsegauge-data")]
    data_dir: PathBuf,
    /// Default source for jobs that name none.
    #[arg(long)]
    source: Option<String>,
    #[arg(long, default_value_t = 4)]
    workers: usize,
    #[arg(long, default_value_t = 16)]
    queue: usize,
    #[arg(long, default_value_t = 15)]
    heartbeat_secs: u64,
}

#[derive(Debug, Args)]
struct DemoArgs {
    /// Corpus directory of `<entity>.jsonl` files instead of the bundled one.
    #[arg(long, value_name = "DIR")]
    fixture_dir: Option<PathBuf>,
    /// Write the bundled corpus to DIR and exit.
    #[arg(long, value_name = "DIR")]
    write_fixture: Option<PathBuf>,
    #[command(flatten)]
    opts: AnalyzeOpts,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// The bundled demo corpus: `(entity, JSON Lines)`.
pub const DEMO_CORPUS: [(&str, &str); 4] = [
    ("amazon", include_str!("../data/demo/amazon.jsonl")),
    ("apple", include_str!("../data/demo/apple.jsonl")),
    ("microsoft", include_str!("../data/demo/microsoft.jsonl")),
    ("nvidia", include_str!("../data/demo/nvidia.jsonl")),
];

/// Collection window used by `demo`.
pub const DEMO_WINDOW: (&str, &str) = ("2024-01-01", "2024-06-30");

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.body()).expect("error serializes"));
            1
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let mut settings = Settings::from_env(cli.config.as_deref())?;
    if let Some(a) = cli.alpha {
        settings.ensemble.alpha = a;
        settings.ensemble.validate()?;
    }
    if let Some(b) = &cli.backend {
        settings.backend = BackendDescriptor::parse(b)?;
    }
    if cli.resources.is_some() {
        settings.resources = cli.resources.clone();
    }
    let ctx = Ctx { settings, pretty: cli.pretty };
    match cli.command {
        Command::Collect(a) => ctx.collect(a),
        Command::Preprocess(a) => ctx.preprocess(a),
        Command::Score(a) => ctx.score(a),
        Command::Analyze(a) => ctx.analyze(a),
        Command::Eval(a) => ctx.eval(a),
        Command::Gridsearch(a) => ctx.gridsearch(a),
        Command::Train(a) => ctx.train(a),
        Command::Serve(a) => ctx.serve(a),
        Command::Demo(a) => ctx.demo(a),
    }
}

struct Ctx {
    settings: Settings,
    pretty: bool,
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>> {
    match path {
        None => Err(AppError::Usage("missing --in (use `--in -` for stdin)".into())),
        Some(p) if p == Path::new("-") => Ok(Box::new(BufReader::new(io::stdin()))),
        Some(p) => Ok(Box::new(BufReader::new(File::open(p).map_err(|e| AppError::io(p, e))?))),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p).map_err(|e| AppError::io(p, e))?))),
    }
}

fn input_name(path: Option<&Path>) -> String {
    path.map_or_else(|| "-".into(), |p| p.display().to_string())
}

/// Non-blank lines parsed as JSON objects.
fn read_json_lines<T: for<'de> Deserialize<'de>>(reader: impl BufRead, name: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| AppError::io(name, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| CoreError::Parse {
            source_name: name.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

fn write_json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let line = serde_json::to_string(value).expect("value serializes");
    writeln!(out, "{line}").map_err(|e| AppError::io("<output>", e))
}

fn finish(mut out: Box<dyn Write>) -> Result<()> {
    out.flush().map_err(|e| AppError::io("<output>", e))
}

fn write_text(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| AppError::io("<output>", e))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PrepVader {
    tokens: Vec<String>,
    caps: Vec<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PrepContextual {
    tokens: Vec<String>,
}

/// Annotation written by `preprocess`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct Prep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vader: Option<PrepVader>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    contextual: Option<PrepContextual>,
}

/// One line of `score` input.
#[derive(Debug, Deserialize)]
struct ScoreLine {
    #[serde(default)]
    id: Option<String>,
    text: String,
    #[serde(default)]
    created_at: Option<DateTime<Utc>>,
    #[serde(default)]
    entity: Option<String>,
    #[serde(default)]
    prep: Option<Prep>,
}

fn analysis_line(
    entity: &str,
    records: &[SentimentRecord],
    opts: &AnalyzeOpts,
    ctx_stop: &pulsegauge_core::textprep::Stopwords,
) -> Result<EntityAnalysis> {
    let width = analytics::parse_bucket_width(&opts.bucket)?;
    let summary = analytics::summarize(entity, records, &Window::default())?;
    let series = analytics::series(records, width)?;
    let volatility = analytics::volatility(&series).ok();
    let drivers = match analytics::drivers(entity, records, opts.k, ctx_stop) {
        Ok(d) => Some(d),
        Err(CoreError::InsufficientData(_)) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(EntityAnalysis { entity: entity.to_string(), summary, series, volatility, drivers })
}

/// One line of `analyze` and `demo` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityAnalysis {
    pub entity: String,
    pub summary: EntitySummary,
    pub series: SentimentSeries,
    pub volatility: Option<f64>,
    pub drivers: Option<DriverReport>,
}

fn analysis_table(rows: &[EntityAnalysis]) -> String {
    let mut out = format!(
        "{:<16} {:>6} {:>8} {:<10} {:>5} {:>5} {:>5} {:>10}\n",
        "entity", "n", "csi", "tier", "pos", "neu", "neg", "volatility"
    );
    for r in rows {
        let s = &r.summary;
        let vol = r.volatility.map_or_else(|| "-".into(), |v| format!("{v:.3}"));
        out.push_str(&format!(
            "{:<16} {:>6} {:>8.2} {:<10} {:>5} {:>5} {:>5} {:>10}\n",
            r.entity,
            s.n,
            s.csi,
            s.tier.as_str(),
            s.label_counts.positive,
            s.label_counts.neutral,
            s.label_counts.negative,
            vol
        ));
    }
    out
}

impl Ctx {
    fn scorer(&self) -> Result<HybridScorer> {
        let (prep, vader) = load_tables(self.settings.resources.as_deref())?;
        let classifier = build_classifier(&self.settings.backend)?;
        Ok(HybridScorer::new(prep, vader, classifier, self.settings.ensemble)?)
    }

    fn collect(&self, a: CollectArgs) -> Result<()> {
        let source = match (&a.input, &a.source) {
            (Some(p), _) => SourceSpec::File(p.clone()),
            (None, Some(s)) => s.parse()?,
            (None, None) => self
                .settings
                .source
                .clone()
                .ok_or_else(|| AppError::Usage("no source: pass --in, --source or set PG_SOURCE".into()))?,
        };
        let req = CollectionRequest::new(a.query, a.max_items, a.start, a.end)?;
        let mut policy = self.settings.policy.clone();
        if let Some(m) = a.min_engagement {
            policy.min_engagement = m;
        }
        let stream: PostStream = source.open(&ingest::format_query(&req)?)?;
        let collection = ingest::collect(stream, &req, &policy);
        let mut out = open_output(a.out.as_deref())?;
        for p in &collection.posts {
            write_json_line(&mut out, p)?;
        }
        finish(out)?;
        match collection.error {
            Some(e) => Err(e.into()),
            None => Ok(()),
        }
    }

    fn preprocess(&self, a: PreprocessArgs) -> Result<()> {
        let (prep, _) = load_tables(self.settings.resources.as_deref())?;
        let name = input_name(a.io.input.as_deref());
        let rows: Vec<Map<String, Value>> = read_json_lines(open_input(a.io.input.as_deref())?, &name)?;
        let mut out = open_output(a.io.out.as_deref())?;
        for (i, mut row) in rows.into_iter().enumerate() {
            let text = row
                .get("text")
                .and_then(Value::as_str)
                .ok_or_else(|| CoreError::Parse {
                    source_name: name.clone(),
                    line: i + 1,
                    message: "missing string field `text`".into(),
                })?
                .to_string();
            let mut annotation = Prep::default();
            if a.profile != ProfileChoice::Contextual {
                let seq = prep.preprocess(&text, &PrepProfile::VADER);
                annotation.vader = Some(PrepVader { tokens: seq.tokens, caps: seq.caps });
            }
            if a.profile != ProfileChoice::Vader {
                let seq = prep.preprocess(&text, &PrepProfile::CONTEXTUAL);
                annotation.contextual = Some(PrepContextual { tokens: seq.tokens });
            }
            row.insert("prep".into(), serde_json::to_value(annotation).expect("prep serializes"));
            write_json_line(&mut out, &row)?;
        }
        finish(out)
    }

    fn score(&self, a: ScoreArgs) -> Result<()> {
        let scorer = self.scorer()?;
        let inputs: Vec<ScoreInput> = match (&a.text, &a.input) {
            (Some(text), _) => vec![ScoreInput {
                post_id: "text".into(),
                text: text.clone(),
                created_at: None,
                entity: a.entity.clone(),
                prepared: None,
            }],
            (None, input) => {
                let name = input_name(input.as_deref());
                let lines: Vec<ScoreLine> = read_json_lines(open_input(input.as_deref())?, &name)?;
                lines
                    .into_iter()
                    .enumerate()
                    .map(|(i, l)| {
                        let prepared = match l.prep {
                            Some(Prep { vader: Some(v), contextual: Some(c) }) if v.tokens.len() == v.caps.len() => {
                                Some((
                                    TokenSequence { tokens: v.tokens, caps: v.caps, source_text: l.text.clone() },
                                    c.tokens.join(" "),
                                ))
                            }
                            _ => None,
                        };
                        ScoreInput {
                            post_id: l.id.unwrap_or_else(|| format!("line-{}", i + 1)),
                            text: l.text,
                            created_at: l.created_at,
                            entity: l.entity.or_else(|| a.entity.clone()),
                            prepared,
                        }
                    })
                    .collect()
            }
        };

        let records = if a.timings {
            let mut records = Vec::with_capacity(inputs.len());
            for input in &inputs {
                let start = Instant::now();
                let mut rec = score_inputs(&scorer, std::slice::from_ref(input), 1)?.remove(0);
                rec.latency_ms = Some(start.elapsed().as_secs_f64() * 1000.0);
                rec.scored_at = Some(Utc::now());
                records.push(rec);
            }
            records
        } else {
            score_inputs(&scorer, &inputs, a.jobs)?
        };

        let mut out = open_output(a.out.as_deref())?;
        if self.pretty {
            let mut table = format!(
                "{:<14} {:<8} {:>8} {:>8} {:>8} {:>8}\n",
                "post_id", "label", "s_final", "s_vader", "s_ctx", "compound"
            );
            for r in &records {
                table.push_str(&format!(
                    "{:<14} {:<8} {:>8.4} {:>8.4} {:>8.4} {:>8.4}\n",
                    r.post_id,
                    r.label.as_str(),
                    r.s_final,
                    r.s_vader,
                    r.s_contextual,
                    r.vader.compound
                ));
            }
            write_text(&mut out, &table)?;
        } else {
            for r in &records {
                write_json_line(&mut out, r)?;
            }
        }
        finish(out)
    }

    fn analyze_records(&self, records: Vec<SentimentRecord>, opts: &AnalyzeOpts, out: Box<dyn Write>) -> Result<()> {
        let (prep, _) = load_tables(self.settings.resources.as_deref())?;
        let mut groups: std::collections::BTreeMap<String, Vec<SentimentRecord>> = Default::default();
        for r in records {
            let key = r.entity.clone().unwrap_or_else(|| opts.entity.clone());
            groups.entry(key).or_default().push(r);
        }
        let rows = groups
            .iter()
            .map(|(entity, recs)| analysis_line(entity, recs, opts, &prep.resources().stopwords))
            .collect::<Result<Vec<_>>>()?;
        let mut out = out;
        if self.pretty {
            write_text(&mut out, &analysis_table(&rows))?;
        } else {
            for r in &rows {
                write_json_line(&mut out, r)?;
            }
        }
        finish(out)
    }

    fn analyze(&self, a: AnalyzeArgs) -> Result<()> {
        let name = input_name(a.io.input.as_deref());
        let records: Vec<SentimentRecord> = read_json_lines(open_input(a.io.input.as_deref())?, &name)?;
        if records.is_empty() {
            return Err(CoreError::EmptyWindow.into());
        }
        self.analyze_records(records, &a.opts, open_output(a.io.out.as_deref())?)
    }

    fn eval(&self, a: EvalArgs) -> Result<()> {
        let scorer = self.scorer()?;
        let data: Vec<LabeledExample> = read_json_lines(open_input(Some(&a.data))?, &a.data.display().to_string())?;
        let cfg = *scorer.config();
        let vader = |t: &str| -> pulsegauge_core::Result<Label> {
            let (_, _, s) = scorer.score_vader(t)?;
            Ok(ensemble::label(s, &cfg))
        };
        let contextual = |t: &str| -> pulsegauge_core::Result<Label> {
            let (_, dist, _) = scorer.score_contextual(t)?;
            Ok(ensemble::label(polarity_score(&dist), &cfg))
        };
        let hybrid = |t: &str| -> pulsegauge_core::Result<Label> { Ok(scorer.score_text(t)?.label) };
        let mut models: Vec<(&str, &dyn Scorer)> = Vec::new();
        for m in &a.models {
            let scorer: &dyn Scorer = match m.as_str() {
                "vader" => &vader,
                "contextual" => &contextual,
                "hybrid" => &hybrid,
                other => return Err(AppError::Usage(format!("unknown model `{other}`"))),
            };
            models.push((m.as_str(), scorer));
        }
        let mut reports: Vec<ModelReport> = evaluation::compare(&models, &data)?;
        if a.timings {
            let texts: Vec<&str> = data.iter().map(|e| e.text.as_str()).collect();
            for (report, (_, model)) in reports.iter_mut().zip(&models) {
                report.report.mean_latency_ms = benchmark_latency(|t| model.predict(t), &texts, a.warmup);
            }
        }
        let mut out = open_output(None)?;
        if self.pretty {
            write_text(&mut out, &evaluation::render_table(&reports))?;
        } else {
            for r in &reports {
                write_json_line(&mut out, r)?;
            }
        }
        finish(out)
    }

    fn gridsearch(&self, a: GridArgs) -> Result<()> {
        #[derive(Deserialize)]
        struct GridLine {
            text: Option<String>,
            s_vader: Option<f64>,
            s_contextual: Option<f64>,
            gold: Label,
        }
        let lines: Vec<GridLine> = read_json_lines(open_input(Some(&a.val))?, &a.val.display().to_string())?;
        let mut scorer = None;
        let mut examples = Vec::with_capacity(lines.len());
        for l in lines {
            let (s_vader, s_contextual) = match (l.s_vader, l.s_contextual, &l.text) {
                (Some(v), Some(c), _) => (v, c),
                (_, _, Some(text)) => {
                    if scorer.is_none() {
                        scorer = Some(self.scorer()?);
                    }
                    let s = scorer.as_ref().expect("scorer built").score_text(text)?;
                    (s.s_vader, s.s_contextual)
                }
                _ => {
                    return Err(
                        CoreError::InvalidInput("validation lines need `text` or both component scores".into()).into()
                    )
                }
            };
            examples.push(ValidationExample { s_vader, s_contextual, gold: l.gold });
        }
        let result = ensemble::grid_search_alpha(&examples, a.step, &self.settings.ensemble)?;
        let mut out = open_output(None)?;
        if self.pretty {
            let mut table = format!("{:>6}  {:>8}\n", "alpha", "macro_f1");
            for (alpha, f1) in &result.curve {
                let mark = if *alpha == result.alpha { "  *" } else { "" };
                table.push_str(&format!("{alpha:>6.3}  {f1:>8.4}{mark}\n"));
            }
            write_text(&mut out, &table)?;
        } else {
            write_json_line(&mut out, &result)?;
        }
        finish(out)
    }

    fn train(&self, a: TrainArgs) -> Result<()> {
        let (prep, _) = load_tables(self.settings.resources.as_deref())?;
        let data: Vec<LabeledExample> = read_json_lines(open_input(Some(&a.data))?, &a.data.display().to_string())?;
        let examples: Vec<(String, Label)> =
            data.iter().map(|e| (prep.preprocess(&e.text, &PrepProfile::CONTEXTUAL).joined(), e.gold)).collect();
        let opts = TrainOptions {
            buckets: a.buckets,
            bigrams: !a.unigrams_only,
            epochs: a.epochs,
            learning_rate: a.learning_rate,
            l2: a.l2,
        };
        let model = ReferenceModel::train(&examples, &opts)?;
        let mut out = open_output(Some(&a.out))?;
        write_text(&mut out, &(model.to_json() + "\n"))?;
        finish(out)
    }

    fn serve(&self, a: ServeArgs) -> Result<()> {
        let scorer = Arc::new(self.scorer()?);
        let store = Arc::new(Store::open(&a.data_dir)?);
        let default_source = match &a.source {
            Some(s) => Some(s.parse()?),
            None => self.settings.source.clone(),
        };
        let config = ServiceConfig {
            queue_capacity: a.queue,
            workers: a.workers,
            heartbeat: Duration::from_secs(a.heartbeat_secs.max(1)),
            default_source,
            default_policy: self.settings.policy.clone(),
            ..ServiceConfig::default()
        };
        let runtime = tokio::runtime::Runtime::new().map_err(|e| AppError::io("tokio runtime", e))?;
        runtime.block_on(async move {
            let listener =
                tokio::net::TcpListener::bind(a.listen).await.map_err(|e| AppError::io(a.listen.to_string(), e))?;
            let addr = listener.local_addr().map_err(|e| AppError::io(a.listen.to_string(), e))?;
            let state = AppState::start(store, scorer, config, service::default_opener())?;
            println!("{}", serde_json::json!({ "listening": addr.to_string() }));
            let _ = io::stdout().flush();
            let shutdown = async {
                let _ = tokio::signal::ctrl_c().await;
            };
            service::serve(listener, state, shutdown).await.map_err(|e| AppError::io(addr.to_string(), e))
        })
    }

    fn demo(&self, a: DemoArgs) -> Result<()> {
        if let Some(dir) = &a.write_fixture {
            std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
            for (entity, body) in DEMO_CORPUS {
                let path = dir.join(format!("{entity}.jsonl"));
                std::fs::write(&path, body).map_err(|e| AppError::io(&path, e))?;
            }
            return Ok(());
        }
        let corpus: Vec<(String, Box<dyn Read>)> = match &a.fixture_dir {
            None => DEMO_CORPUS
                .iter()
                .map(|(e, body)| (e.to_string(), Box::new(body.as_bytes()) as Box<dyn Read>))
                .collect(),
            Some(dir) => {
                let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
                    .map_err(|e| AppError::io(dir, e))?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
                    .collect();
                files.sort();
                files
                    .into_iter()
                    .map(|p| {
                        let entity = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                        let file = File::open(&p).map_err(|e| AppError::io(&p, e))?;
                        Ok((entity, Box::new(file) as Box<dyn Read>))
                    })
                    .collect::<Result<_>>()?
            }
        };
        let scorer = self.scorer()?;
        let (start, end) = DEMO_WINDOW;
        let parse_date = |s: &str| NaiveDate::parse_from_str(s, "%Y-%m-%d").expect("demo window dates");
        let mut records = Vec::new();
        for (entity, reader) in corpus {
            let req = CollectionRequest::new(entity.clone(), 500, parse_date(start), parse_date(end))?;
            let mut body = String::new();
            let mut reader = reader;
            reader.read_to_string(&mut body).map_err(|e| AppError::io(&entity, e))?;
            let source = FileSource::from_reader(io::Cursor::new(body), entity.clone());
            let collection = ingest::collect(source, &req, &self.settings.policy);
            if let Some(e) = collection.error {
                return Err(e.into());
            }
            let inputs: Vec<ScoreInput> =
                collection.posts.iter().map(|p| ScoreInput::from_post(p, Some(&entity))).collect();
            records.extend(score_inputs(&scorer, &inputs, 1)?);
        }
        self.analyze_records(records, &a.opts, open_output(a.out.as_deref())?)
    }
}

/// Parses a post file into memory; used by tests and tools.
pub fn read_posts(path: &Path) -> Result<Vec<RawPost>> {
    FileSource::open(path)?.map(|r| r.map_err(AppError::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
