//! Command-line front end.
//!
//! Subcommands: `ingest`, `synth`, `simulate`, `metrics`, `sweep`,
//! `reproduce`, and `rerun` (replay a manifest). Every command writes a
//! `manifest.json` with its resolved arguments, seeds and file digests.
//!
//! `--config <file>` (TOML, or JSON by extension) supplies flags: top-level
//! keys apply to any subcommand, a table named after the subcommand applies
//! to it alone, and flags given on the command line win.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 internal error.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::bpan::{Bpan, BuildOptions, Histories};
use crate::corpus::{
    generate_synthetic, load_corpus_with_epoch, write_corpus, Corpus, DiscreteDist, Epoch,
    PaperSchedule, SyntheticSpec,
};
use crate::error::{Error, Result};
use crate::fit::{self, GridSpec, SweepConfig, Transform};
use crate::kernels::{KernelKind, KernelParams, UpdateMode};
use crate::manifest::RunManifest;
use crate::metrics::{self, LagCorrelator};
use crate::simulate::{self, Replay, SimConfig, StartMode};

const SUBCOMMANDS: [&str; 7] = [
    "ingest",
    "synth",
    "simulate",
    "metrics",
    "sweep",
    "reproduce",
    "rerun",
];

#[derive(Debug, Parser)]
#[command(
    name = "citeburst",
    version,
    about = "Author citation dynamics toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the paper->author network of a corpus and export histories.
    Ingest(IngestArgs),
    /// Generate a synthetic corpus from a spec file.
    Synth(SynthArgs),
    /// Replay a corpus under an attachment kernel.
    Simulate(SimulateArgs),
    /// Distributions, correlations and snapshots from exported histories.
    Metrics(MetricsArgs),
    /// Grid sweep of recency parameters against a corpus.
    Sweep(SweepArgs),
    /// Full pipeline: data, PA and recency runs, metrics, sweep.
    Reproduce(ReproduceArgs),
    /// Re-execute a manifest and compare output digests.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct CorpusArgs {
    /// Line-delimited JSON corpus.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Calendar month mapped to month index 0.
    #[arg(long, default_value = "1893-01")]
    pub epoch: Epoch,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
    /// Drop links from papers to their own authors.
    #[arg(long)]
    pub exclude_self: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct SynthArgs {
    /// TOML or JSON synthetic spec.
    #[arg(long)]
    pub spec: PathBuf,
    /// Overrides the spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct KernelArgs {
    #[arg(long, value_enum, default_value_t = KernelKind::Preferential)]
    pub kernel: KernelKind,
    /// Additive constant; defaults to 1.8 (pa) or 0.075 (recency).
    #[arg(long = "A")]
    pub additive: Option<f64>,
    /// Recency window in months.
    #[arg(long = "w", default_value_t = 12)]
    pub window: u32,
}

impl KernelArgs {
    pub fn params(&self) -> Result<KernelParams> {
        match self.kernel {
            KernelKind::Preferential => KernelParams::preferential(self.additive.unwrap_or(1.8)),
            KernelKind::Recency => {
                KernelParams::recency(self.additive.unwrap_or(0.075), self.window)
            }
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct RunArgs {
    /// First simulated month (YYYY-MM or index); defaults to the corpus start.
    #[arg(long)]
    pub t_in: Option<String>,
    /// Last simulated month; defaults to the corpus end.
    #[arg(long)]
    pub t_f: Option<String>,
    #[arg(long, value_enum, default_value_t = StartMode::Warm)]
    pub start: StartMode,
    #[arg(long, value_enum, default_value_t = UpdateMode::PerMonth)]
    pub update: UpdateMode,
}

impl RunArgs {
    fn months(&self, corpus: &Corpus, epoch: &Epoch) -> Result<(u32, u32)> {
        let (first, last) = corpus
            .month_range()
            .ok_or_else(|| Error::InvalidConfig("corpus is empty".into()))?;
        let t_in = self
            .t_in
            .as_deref()
            .map(|s| epoch.parse_month(s))
            .transpose()?
            .unwrap_or(first);
        let t_f = self
            .t_f
            .as_deref()
            .map(|s| epoch.parse_month(s))
            .transpose()?
            .unwrap_or(last);
        Ok((t_in, t_f))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Forbid papers from citing their own authors.
    #[arg(long)]
    pub exclude_self: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct MetricOptions {
    /// Months for citation distributions and snapshots; default: last month.
    #[arg(long)]
    pub months: Option<String>,
    /// Years for burst distributions; default: last complete year.
    #[arg(long)]
    pub years: Option<String>,
    /// Lags for correlations (`lo:hi` or list).
    #[arg(long, default_value = "1:100")]
    pub lags: String,
    /// Citation thresholds for correlations.
    #[arg(long, default_value = "0,100,500")]
    pub kmin: String,
    /// Months averaged over (`lo:hi`); default: the last 120 months.
    #[arg(long)]
    pub window: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct MetricsArgs {
    /// Directory with history.csv (and optionally authors.csv).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub options: MetricOptions,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long = "grid-A", default_value = "0.01:10:log13")]
    pub grid_a: String,
    #[arg(long = "grid-w", default_value = "1:36")]
    pub grid_w: String,
    #[arg(long, default_value_t = 5)]
    pub replicates: usize,
    /// Replica r of every cell uses seed + r.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Transform::Log10p)]
    pub transform: Transform,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Map CSV; `--resume` keeps finished cells already in it.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub resume: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ReproduceArgs {
    /// Synthetic spec; without it and without --corpus a built-in demo spec is used.
    #[arg(long, conflicts_with = "corpus")]
    pub synthetic: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value = "1893-01")]
    pub epoch: Epoch,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Number of evenly spaced year-end checkpoints.
    #[arg(long, default_value_t = 4)]
    pub checkpoints: u32,
    #[arg(long = "pa-A", default_value_t = 1.8)]
    pub pa_additive: f64,
    #[arg(long = "A", default_value_t = 0.075)]
    pub additive: f64,
    #[arg(long = "w", default_value_t = 12)]
    pub window: u32,
    #[arg(long = "grid-A", default_value = "0.025,0.075,0.225")]
    pub grid_a: String,
    #[arg(long = "grid-w", default_value = "3,6,12,18,24,36")]
    pub grid_w: String,
    #[arg(long, default_value_t = 2)]
    pub replicates: usize,
    #[arg(long)]
    pub skip_sweep: bool,
    #[arg(long, default_value = "1,2,3,6,12,24,36,50,75,100")]
    pub lags: String,
    #[arg(long, default_value = "0,100,500")]
    pub kmin: String,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct RerunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Replaces the recorded --out target.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Built-in spec used by `reproduce` when no corpus is given.
pub fn demo_spec() -> SyntheticSpec {
    SyntheticSpec {
        months: 144,
        papers_per_month: PaperSchedule::Linear { start: 20, end: 80 },
        authors_per_paper: DiscreteDist::Constant(1),
        refs_per_paper: DiscreteDist::Poisson {
            mean: 12.0,
            min: 0,
            max: 48,
        },
        new_author_prob: 0.45,
        target_kernel: KernelParams::recency(0.075, 12).expect("valid"),
        seed: 7,
    }
}

fn usage(message: impl Into<String>) -> Error {
    Error::InvalidConfig(message.into())
}

fn toml_to_json(v: toml::Value) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn flag_tokens(key: &str, value: &serde_json::Value, out: &mut Vec<String>) -> Result<()> {
    use serde_json::Value;
    let flag = format!("--{}", key.replace('_', "-"));
    let scalar = |v: &Value| -> Result<String> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(usage(format!(
                "config key `{key}`: unsupported value {other}"
            ))),
        }
    };
    match value {
        Value::Bool(true) => out.push(flag),
        Value::Bool(false) | Value::Null => {}
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect::<Result<_>>()?;
            out.push(flag);
            out.push(parts.join(","));
        }
        v => {
            out.push(flag);
            out.push(scalar(v)?);
        }
    }
    Ok(())
}

/// Removes `--config <file>` and splices the file's flags in after the
/// subcommand name, ahead of the user's own flags.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().ok_or_else(|| usage("--config needs a file"))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let table: serde_json::Value = if path.ends_with(".json") {
        serde_json::from_str(&text)?
    } else {
        toml_to_json(
            toml::from_str::<toml::Value>(&text).map_err(|e| usage(format!("{path}: {e}")))?,
        )
    };
    let serde_json::Value::Object(map) = table else {
        return Err(usage(format!("{path}: expected a table of flags")));
    };
    let Some(pos) = rest.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(rest);
    };
    let sub = rest[pos].clone();
    let mut tokens = Vec::new();
    for (k, v) in &map {
        if v.is_object() {
            continue;
        }
        flag_tokens(k, v, &mut tokens)?;
    }
    if let Some(serde_json::Value::Object(section)) = map.get(&sub) {
        for (k, v) in section {
            flag_tokens(k, v, &mut tokens)?;
        }
    }
    rest.splice(pos + 1..pos + 1, tokens);
    Ok(rest)
}

/// Parses and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let argv = args.into_iter().skip(1).collect();
    match std::panic::catch_unwind(|| execute(cli.command, argv)) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => 3,
    }
}

fn execute(command: Command, argv: Vec<String>) -> Result<()> {
    match command {
        Command::Ingest(a) => cmd_ingest(&a, argv),
        Command::Synth(a) => cmd_synth(&a, argv),
        Command::Simulate(a) => cmd_simulate(&a, argv),
        Command::Metrics(a) => cmd_metrics(&a, argv),
        Command::Sweep(a) => cmd_sweep(&a, argv),
        Command::Reproduce(a) => cmd_reproduce(&a, argv),
        Command::Rerun(a) => cmd_rerun(&a),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn create_file(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn load(input: &CorpusArgs) -> Result<Corpus> {
    load_corpus_with_epoch(&input.corpus, input.epoch)
}

/// Writes history.csv and authors.csv into `dir`.
pub fn write_histories(histories: &Histories, dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let hist = dir.join("history.csv");
    let auth = dir.join("authors.csv");
    histories.write_history_csv(create_file(&hist)?)?;
    histories.write_authors_csv(create_file(&auth)?)?;
    Ok(vec![hist, auth])
}

pub fn read_histories(dir: &Path) -> Result<Histories> {
    let hist = dir.join("history.csv");
    let auth = dir.join("authors.csv");
    let h = fs::File::open(&hist).map_err(|e| Error::io(&hist, e))?;
    let a = if auth.exists() {
        Some(fs::File::open(&auth).map_err(|e| Error::io(&auth, e))?)
    } else {
        None
    };
    Histories::read_csv(h, a)
}

fn finish(
    mut manifest: RunManifest,
    started: Instant,
    root: &Path,
    outputs: &[PathBuf],
    at: &Path,
) -> Result<()> {
    manifest.record_outputs(root, outputs)?;
    manifest.wall_clock_secs = started.elapsed().as_secs_f64();
    manifest.write(at)
}

pub fn cmd_ingest(args: &IngestArgs, argv: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let corpus = load(&args.input)?;
    let bpan = Bpan::build_with(
        &corpus,
        BuildOptions {
            exclude_self_citations: args.exclude_self,
        },
    );
    let mut outputs = write_histories(&bpan.histories, &args.out)?;
    let edges = args.out.join("edges.csv");
    bpan.write_edges_csv(create_file(&edges)?)?;
    outputs.push(edges);

    let mut m = RunManifest::new("ingest", argv, serde_json::to_value(args)?);
    m.add_input(&args.input.corpus)?;
    eprintln!(
        "ingest: {} papers, {} authors, {} author-citations",
        corpus.len(),
        bpan.histories.len(),
        bpan.total_weight()
    );
    finish(
        m,
        started,
        &args.out,
        &outputs,
        &args.out.join("manifest.json"),
    )
}

fn read_spec(path: &Path) -> Result<SyntheticSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        SyntheticSpec::from_json(&text)
    } else {
        SyntheticSpec::from_toml(&text)
    }
}

pub fn cmd_synth(args: &SynthArgs, argv: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let mut spec = read_spec(&args.spec)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let corpus = generate_synthetic(&spec)?;
    create_dir(&args.out)?;
    let path = args.out.join("corpus.jsonl");
    write_corpus(&corpus, &path)?;
    let mut m = RunManifest::new("synth", argv, json!({ "args": args, "spec": spec }));
    m.seeds = vec![spec.seed];
    m.add_input(&args.spec)?;
    eprintln!(
        "synth: {} papers, {} references",
        corpus.len(),
        corpus.reference_count()
    );
    finish(
        m,
        started,
        &args.out,
        &[path],
        &args.out.join("manifest.json"),
    )
}

fn write_trace(trace: &[simulate::MonthTotals], path: &Path) -> Result<()> {
    metrics::write_rows_csv(trace, create_file(path)?)
}

pub fn cmd_simulate(args: &SimulateArgs, argv: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let corpus = load(&args.input)?;
    let (t_in, t_f) = args.run.months(&corpus, &args.input.epoch)?;
    let kernel = args.kernel.params()?;
    let config = SimConfig {
        start_mode: args.run.start,
        update_mode: args.run.update,
        exclude_self: args.exclude_self,
        ..SimConfig::new(t_in, t_f, kernel, args.seed)
    };
    let bpan = Bpan::build(&corpus);
    let state = Replay::new(&corpus, &bpan)?.run(&config)?;
    let mut outputs = write_histories(&state.histories, &args.out)?;
    let trace = args.out.join("trace.csv");
    write_trace(&state.trace, &trace)?;
    outputs.push(trace);

    let mut m = RunManifest::new(
        "simulate",
        argv,
        json!({ "args": args, "resolved": config }),
    );
    m.seeds = vec![args.seed];
    m.add_input(&args.input.corpus)?;
    eprintln!(
        "simulate: {kernel}, months {t_in}..={t_f}, {} authors, {} citations",
        state.author_count, state.citation_total
    );
    finish(
        m,
        started,
        &args.out,
        &outputs,
        &args.out.join("manifest.json"),
    )
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| usage(format!("bad {what} `{v}`")))
        })
        .collect()
}

fn parse_range(s: &str) -> Result<(u32, u32)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("bad range `{s}`")))?;
    let lo = lo
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad range `{s}`")))?;
    let hi = hi
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad range `{s}`")))?;
    Ok((lo, hi))
}

/// Resolved metric selections.
#[derive(Debug, Clone, Serialize)]
pub struct MetricPlan {
    pub months: Vec<u32>,
    pub years: Vec<u32>,
    pub lags: Vec<u32>,
    pub kmin: Vec<u64>,
    pub window: (u32, u32),
}

impl MetricPlan {
    pub fn resolve(opts: &MetricOptions, last_month: u32) -> Result<Self> {
        let months = match &opts.months {
            Some(s) => parse_list(s, "month")?,
            None => vec![last_month],
        };
        let years = match &opts.years {
            Some(s) => parse_list(s, "year")?,
            None => ((last_month + 1) / 12).checked_sub(1).into_iter().collect(),
        };
        let window = match &opts.window {
            Some(s) => parse_range(s)?,
            None => (last_month.saturating_sub(119), last_month),
        };
        Ok(MetricPlan {
            months,
            years,
            lags: fit::parse_w_grid(&opts.lags)?,
            kmin: parse_list(&opts.kmin, "kmin")?,
            window,
        })
    }
}

/// Writes every metric of `plan` into `dir`; returns the files written.
pub fn write_metrics(histories: &Histories, plan: &MetricPlan, dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let mut out = Vec::new();
    let mut summary = serde_json::Map::new();

    for &t in &plan.months {
        let d = metrics::citation_distribution(histories, t);
        let path = dir.join(format!("citations_m{t}.csv"));
        d.histogram().write_csv(create_file(&path)?)?;
        out.push(path);
        let snap = dir.join(format!("snapshot_m{t}.csv"));
        metrics::write_rows_csv(&simulate::snapshot(histories, t), create_file(&snap)?)?;
        out.push(snap);
        summary.insert(
            format!("citations_m{t}"),
            json!({
                "n": d.len(),
                "max": d.max(),
                "support_decades": d.support_decades(),
            }),
        );
    }
    for &y in &plan.years {
        let d = metrics::burst_distribution(histories, y);
        let path = dir.join(format!("bursts_y{y}.csv"));
        d.histogram().write_csv(create_file(&path)?)?;
        out.push(path);
        summary.insert(
            format!("bursts_y{y}"),
            json!({
                "n": d.len(),
                "excluded_uncited": d.excluded,
                "median": d.median(),
                "support_decades": d.support_decades(),
            }),
        );
    }

    let correlator = LagCorrelator::new(histories);
    let mut rows = Vec::new();
    let mut degenerate = Vec::new();
    for &kmin in &plan.kmin {
        for &lag in &plan.lags {
            match correlator.correlation(lag, kmin, plan.window.0..=plan.window.1) {
                Ok(c) => rows.push(c),
                Err(Error::DegenerateCorrelation(_)) => degenerate.push(json!([lag, kmin])),
                Err(e) => return Err(e),
            }
        }
    }
    let corr = dir.join("correlations.csv");
    metrics::write_correlations_csv(&rows, create_file(&corr)?)?;
    out.push(corr);
    summary.insert("correlations_degenerate".into(), json!(degenerate));

    let maxb = dir.join("max_burst.csv");
    metrics::write_rows_csv(&metrics::max_burst_summary(histories), create_file(&maxb)?)?;
    out.push(maxb);

    summary.insert("plan".into(), serde_json::to_value(plan)?);
    let sum = dir.join("summary.json");
    write_json(&sum, &summary)?;
    out.push(sum);
    Ok(out)
}

pub fn cmd_metrics(args: &MetricsArgs, argv: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let histories = read_histories(&args.input)?;
    let plan = MetricPlan::resolve(&args.options, histories.last_month)?;
    let outputs = write_metrics(&histories, &plan, &args.out)?;
    let mut m = RunManifest::new("metrics", argv, json!({ "args": args, "plan": plan }));
    m.add_input(&args.input.join("history.csv"))?;
    finish(
        m,
        started,
        &args.out,
        &outputs,
        &args.out.join("manifest.json"),
    )
}

fn sweep_method(config: &SweepConfig) -> Result<serde_json::Value> {
    Ok(json!({
        "distance": "first Wasserstein distance between empirical samples",
        "transform": config.transform,
        "citations_at_month": config.t_f,
        "bursts_in_year": config.burst_year()?,
        "score": "mean of the two distances, each divided by its grid-wide median",
        "seeds": config.seeds(),
    }))
}

fn manifest_path_for(file: &Path) -> PathBuf {
    let stem = file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "map".into());
    file.with_file_name(format!("{stem}.manifest.json"))
}

pub fn cmd_sweep(args: &SweepArgs, argv: Vec<String>) -> Result<()> {
    let started = Instant::now();
    let corpus = load(&args.input)?;
    let (t_in, t_f) = args.run.months(&corpus, &args.input.epoch)?;
    let config = SweepConfig {
        replicates: args.replicates,
        base_seed: args.seed,
        start_mode: args.run.start,
        update_mode: args.run.update,
        transform: args.transform,
        jobs: args.jobs,
        ..SweepConfig::new(t_in, t_f, GridSpec::parse(&args.grid_a, &args.grid_w)?)
    };
    let bpan = Bpan::build(&corpus);
    let replay = Replay::new(&corpus, &bpan)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    if !args.resume && args.out.exists() {
        fs::remove_file(&args.out).map_err(|e| Error::io(&args.out, e))?;
    }
    let result = fit::sweep(&replay, &config, Some(&args.out))?;
    result.write_csv(create_file(&args.out)?)?;

    let mut m = RunManifest::new(
        "sweep",
        argv,
        json!({ "args": args, "method": sweep_method(&config)?, "best": result.best }),
    );
    m.seeds = config.seeds();
    m.add_input(&args.input.corpus)?;
    eprintln!("sweep: best cell A={} w={}", result.best.0, result.best.1);
    let root = args.out.parent().unwrap_or(Path::new(""));
    finish(
        m,
        started,
        root,
        std::slice::from_ref(&args.out),
        &manifest_path_for(&args.out),
    )
}

/// Year-end checkpoint months: `n` evenly spaced complete years inside
/// `[t_in, t_f]`, each with a previous year for burst sizes.
pub fn checkpoints(t_in: u32, t_f: u32, n: u32) -> Vec<(u32, u32)> {
    let first_year = t_in / 12 + 1;
    let complete = (t_f + 1) / 12;
    if n == 0 || complete <= first_year {
        return Vec::new();
    }
    let span = complete - first_year;
    let mut out: Vec<(u32, u32)> = (1..=n)
        .map(|k| {
            let years = first_year + (span * k).div_ceil(n);
            (12 * years - 1, years - 1)
        })
        .filter(|&(_, year)| year >= 1)
        .collect();
    out.dedup();
    out
}

pub fn cmd_reproduce(args: &ReproduceArgs, argv: Vec<String>) -> Result<()> {
    let started = Instant::now();
    create_dir(&args.out)?;
    let mut m = RunManifest::new("reproduce", argv, serde_json::to_value(args)?);
    let mut outputs = Vec::new();

    let corpus = match (&args.corpus, &args.synthetic) {
        (Some(path), _) => {
            m.add_input(path)?;
            load_corpus_with_epoch(path, args.epoch).map_err(|e| e.in_stage("load corpus"))?
        }
        (None, spec_path) => {
            let spec = match spec_path {
                Some(p) => {
                    m.add_input(p)?;
                    read_spec(p)?
                }
                None => demo_spec(),
            };
            m.seeds.push(spec.seed);
            let c = generate_synthetic(&spec).map_err(|e| e.in_stage("synthesize corpus"))?;
            let path = args.out.join("corpus.jsonl");
            write_corpus(&c, &path)?;
            write_json(&args.out.join("synthetic_spec.json"), &spec)?;
            outputs.push(path);
            outputs.push(args.out.join("synthetic_spec.json"));
            c
        }
    };
    let (t_in, t_f) = args.run.months(&corpus, &args.epoch)?;
    let bpan = Bpan::build(&corpus);
    let replay = Replay::new(&corpus, &bpan).map_err(|e| e.in_stage("prepare replay"))?;

    let points = checkpoints(t_in, t_f, args.checkpoints);
    let opts = MetricOptions {
        months: Some(join(points.iter().map(|p| p.0))),
        years: Some(join(points.iter().map(|p| p.1))),
        lags: args.lags.clone(),
        kmin: args.kmin.clone(),
        window: None,
    };
    let plan = MetricPlan::resolve(&opts, t_f)?;

    let base = SimConfig {
        start_mode: args.run.start,
        update_mode: args.run.update,
        ..SimConfig::new(
            t_in,
            t_f,
            KernelParams::preferential(args.pa_additive)?,
            args.seed,
        )
    };
    let empirical = replay.empirical_view(&base);
    let dir = args.out.join("empirical");
    outputs.extend(write_histories(&empirical, &dir)?);
    outputs.extend(
        write_metrics(&empirical, &plan, &dir).map_err(|e| e.in_stage("empirical metrics"))?,
    );

    let mut summary = serde_json::Map::new();
    for (name, kernel) in [
        ("pa", KernelParams::preferential(args.pa_additive)?),
        (
            "recency",
            KernelParams::recency(args.additive, args.window)?,
        ),
    ] {
        let config = SimConfig {
            kernel,
            ..base.clone()
        };
        let state = replay.run(&config).map_err(|e| e.in_stage("simulate"))?;
        let dir = args.out.join(name);
        outputs.extend(write_histories(&state.histories, &dir)?);
        let trace = dir.join("trace.csv");
        write_trace(&state.trace, &trace)?;
        outputs.push(trace);
        outputs.extend(
            write_metrics(&state.histories, &plan, &dir)
                .map_err(|e| e.in_stage("model metrics"))?,
        );

        let mut distances = Vec::new();
        for (&month, &year) in plan.months.iter().zip(&plan.years) {
            let dc = fit::wasserstein1(
                &metrics::citation_distribution(&state.histories, month),
                &metrics::citation_distribution(&empirical, month),
                Transform::Log10p,
            )?;
            let db = fit::wasserstein1(
                &metrics::burst_distribution(&state.histories, year),
                &metrics::burst_distribution(&empirical, year),
                Transform::Log10p,
            )
            .ok();
            distances
                .push(json!({ "month": month, "year": year, "d_citations": dc, "d_bursts": db }));
        }
        summary.insert(
            name.into(),
            json!({ "kernel": kernel.to_string(), "distances": distances }),
        );
    }
    m.seeds.push(args.seed);

    if !args.skip_sweep {
        let config = SweepConfig {
            replicates: args.replicates,
            base_seed: args.seed,
            start_mode: args.run.start,
            update_mode: args.run.update,
            jobs: args.jobs,
            ..SweepConfig::new(t_in, t_f, GridSpec::parse(&args.grid_a, &args.grid_w)?)
        };
        let result = fit::sweep(&replay, &config, None).map_err(|e| e.in_stage("sweep"))?;
        let path = args.out.join("sweep_map.csv");
        result.write_csv(create_file(&path)?)?;
        outputs.push(path);
        summary.insert(
            "sweep".into(),
            json!({ "best": result.best, "method": sweep_method(&config)? }),
        );
        m.seeds.extend(config.seeds());
    }

    let sum = args.out.join("summary.json");
    write_json(&sum, &summary)?;
    outputs.push(sum);
    eprintln!(
        "reproduce: wrote {} files to {}",
        outputs.len(),
        args.out.display()
    );
    finish(
        m,
        started,
        &args.out,
        &outputs,
        &args.out.join("manifest.json"),
    )
}

fn join(values: impl Iterator<Item = u32>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub fn cmd_rerun(args: &RerunArgs) -> Result<()> {
    let old = RunManifest::read(&args.manifest)?;
    let mut argv = vec!["citeburst".to_string()];
    argv.extend(old.argv.iter().cloned());
    if let Some(out) = &args.out {
        let pos = argv
            .iter()
            .position(|a| a == "--out")
            .ok_or_else(|| usage("recorded command has no --out"))?;
        argv[pos + 1] = out.to_string_lossy().into_owned();
    }
    let cli = Cli::try_parse_from(&argv).map_err(|e| usage(e.to_string()))?;
    if matches!(cli.command, Command::Rerun(_)) {
        return Err(usage("refusing to rerun a rerun"));
    }
    let new_manifest = match &cli.command {
        Command::Sweep(a) => manifest_path_for(&a.out),
        Command::Ingest(IngestArgs { out, .. })
        | Command::Synth(SynthArgs { out, .. })
        | Command::Simulate(SimulateArgs { out, .. })
        | Command::Metrics(MetricsArgs { out, .. })
        | Command::Reproduce(ReproduceArgs { out, .. }) => out.join("manifest.json"),
        Command::Rerun(_) => unreachable!(),
    };
    execute(cli.command, argv[1..].to_vec())?;
    let new = RunManifest::read(&new_manifest)?;
    let mismatched: Vec<String> = old
        .outputs
        .iter()
        .filter(|o| !new.outputs.contains(o))
        .map(|o| o.path.display().to_string())
        .collect();
    if mismatched.is_empty() {
        eprintln!("rerun: {} outputs identical", old.outputs.len());
        Ok(())
    } else {
        Err(Error::OutputMismatch(mismatched))
    }
}
