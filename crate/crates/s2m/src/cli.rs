//! The `s2m` command line: `gen`, `train`, `align` and `eval` subcommands
//! wired for reproducible runs.
//!
//! Exit codes: 0 on success, 1 on I/O or environment failure, 2 on invalid
//! input or configuration. Diagnostics go to stderr; machine-readable
//! output goes to files.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::datagen::{
    canonical_template, gen_benchmark, BenchmarkConfig, GeneratedCase, DEFAULT_TRAIN_COUNT,
};
use crate::embedding::EmbeddingConfig;
use crate::error::{Error, Result};
use crate::io;
use crate::model::AlignedModel;
use crate::pipeline::{
    align_baseline_full, align_test_full, cross_validate_embedding, default_embedding_candidates,
    train, RidgeSpec, SynthesisKind, SynthesisSpec, TrainConfig, DEFAULT_FOLDS,
};

#[derive(Parser, Debug)]
#[command(
    name = "s2m",
    version,
    about = "Locate blueprint patterns in time series via a learned latent space and DTW"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress progress diagnostics on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded synthetic benchmark directory.
    Gen(GenArgs),
    /// Learn a latent map from training series with known alignments.
    Train(TrainArgs),
    /// Align one series to its blueprint.
    Align(AlignArgs),
    /// Sweep noise rates and score both methods against ground truth.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Benchmark config JSON; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of series.
    #[arg(long)]
    n_series: Option<usize>,
    /// Override the noise rate.
    #[arg(long)]
    noise_rate: Option<f64>,
    /// Override the warp strength.
    #[arg(long)]
    warp_strength: Option<f64>,
    /// Override the pattern amplitude jitter.
    #[arg(long)]
    pattern_jitter: Option<f64>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Benchmark directory produced by `gen`.
    #[arg(long)]
    data: PathBuf,
    /// Training case ids, e.g. "0..18" (inclusive) or "0,2,5". Defaults to
    /// the benchmark's designated training cases.
    #[arg(long)]
    train_ids: Option<String>,
    /// Cross-validate the embedding over the candidate grid.
    #[arg(long)]
    cv: bool,
    /// Symmetric embedding half-widths for --cv, e.g. "0,5,10,20,40".
    #[arg(long)]
    candidates: Option<String>,
    /// Embedding as "past,future" (or one number for a symmetric window)
    /// when not cross-validating.
    #[arg(long)]
    embedding: Option<String>,
    /// Fixed covariance ridge; scaled automatically from the data when
    /// omitted.
    #[arg(long)]
    ridge: Option<f64>,
    #[arg(long, value_enum, default_value_t = SynthesisArg::Replication)]
    synthesis: SynthesisArg,
    /// Template file (required with --synthesis replication).
    #[arg(long)]
    template: Option<PathBuf>,
    /// Cross-validation folds.
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    folds: usize,
    /// Z-normalize series before embedding.
    #[arg(long)]
    znorm: bool,
    /// Output latent map JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AlignArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Input series (CSV or JSON).
    #[arg(long)]
    series: PathBuf,
    /// Blueprint model JSON.
    #[arg(long)]
    blueprint: PathBuf,
    /// Latent map JSON (required for --method cca).
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SynthesisArg::Binary)]
    synthesis: SynthesisArg,
    /// Template file (required with --synthesis replication).
    #[arg(long)]
    template: Option<PathBuf>,
    /// Z-normalize series before aligning.
    #[arg(long)]
    znorm: bool,
    /// Output aligned-marker JSON.
    #[arg(long, default_value = "aligned.json")]
    out_aligned: PathBuf,
    /// Output warping-path JSON.
    #[arg(long, default_value = "alignment.json")]
    out_alignment: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Benchmark directory produced by `gen`.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated noise rates, e.g. "0,0.1,0.2".
    #[arg(long)]
    rates: String,
    /// Per-series CSV output.
    #[arg(long)]
    out: PathBuf,
    /// Summary JSON output (default: <out>_summary.json).
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Symmetric embedding half-widths for cross-validation.
    #[arg(long)]
    candidates: Option<String>,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    folds: usize,
    #[arg(long, value_enum, default_value_t = SynthesisArg::Replication)]
    synthesis: SynthesisArg,
    /// Fixed covariance ridge; automatic when omitted.
    #[arg(long)]
    ridge: Option<f64>,
    /// Z-normalize series before aligning.
    #[arg(long)]
    znorm: bool,
    /// Override the benchmark seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SynthesisArg {
    Binary,
    Replication,
}

impl From<SynthesisArg> for SynthesisKind {
    fn from(value: SynthesisArg) -> Self {
        match value {
            SynthesisArg::Binary => SynthesisKind::Binary,
            SynthesisArg::Replication => SynthesisKind::Replication,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Cca,
    Dtw,
}

/// Manifest written into every benchmark directory: the full generating
/// config plus run metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkManifest {
    pub config: BenchmarkConfig,
    pub train_count: usize,
    pub run: io::RunManifest,
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn run_manifest(command: &str, config_hash: String, seed: u64, started: u64) -> io::RunManifest {
    io::RunManifest {
        command: command.to_string(),
        config_hash,
        seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started,
        finished_unix: now_unix(),
    }
}

/// Parses "a..b" (inclusive), "a", and comma-separated mixes of both.
fn parse_id_list(text: &str) -> Result<Vec<usize>> {
    let mut ids = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad id range '{part}'")))?;
            let hi: usize = hi
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad id range '{part}'")))?;
            if hi < lo {
                return Err(Error::InvalidInput(format!("empty id range '{part}'")));
            }
            ids.extend(lo..=hi);
        } else {
            ids.push(
                part.parse()
                    .map_err(|_| Error::InvalidInput(format!("bad id '{part}'")))?,
            );
        }
    }
    if ids.is_empty() {
        return Err(Error::InvalidInput("no ids given".into()));
    }
    Ok(ids)
}

fn parse_rates(text: &str) -> Result<Vec<f64>> {
    let rates: Vec<f64> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad rate '{}'", p.trim())))
        })
        .collect::<Result<_>>()?;
    if rates.is_empty() {
        return Err(Error::InvalidInput("no rates given".into()));
    }
    Ok(rates)
}

fn parse_embedding(text: &str) -> Result<EmbeddingConfig> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [half] => {
            let half: usize = half
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad embedding '{text}'")))?;
            Ok(EmbeddingConfig::symmetric(half))
        }
        [past, future] => {
            let past: usize = past
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad embedding '{text}'")))?;
            let future: usize = future
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad embedding '{text}'")))?;
            Ok(EmbeddingConfig::new(past, future))
        }
        _ => Err(Error::InvalidInput(format!("bad embedding '{text}'"))),
    }
}

fn parse_candidates(text: &str) -> Result<Vec<EmbeddingConfig>> {
    let halves: Vec<usize> = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad candidate '{}'", p.trim())))
        })
        .collect::<Result<_>>()?;
    if halves.is_empty() {
        return Err(Error::InvalidInput("no candidates given".into()));
    }
    Ok(halves.into_iter().map(EmbeddingConfig::symmetric).collect())
}

fn series_file_width(n: usize) -> usize {
    n.saturating_sub(1).to_string().len().max(3)
}

fn case_paths(dir: &Path, id: usize, width: usize) -> (PathBuf, PathBuf, PathBuf) {
    (
        dir.join(format!("series_{id:0width$}.csv")),
        dir.join(format!("blueprint_{id:0width$}.json")),
        dir.join(format!("truth_{id:0width$}.json")),
    )
}

fn load_manifest(data: &Path) -> Result<BenchmarkManifest> {
    let text = io::read_to_string(&data.join("manifest.json"))?;
    let manifest: BenchmarkManifest = serde_json::from_str(&text)?;
    manifest.config.validate()?;
    Ok(manifest)
}

fn load_case(data: &Path, id: usize, width: usize) -> Result<GeneratedCase> {
    let (series_path, blueprint_path, truth_path) = case_paths(data, id, width);
    Ok(GeneratedCase {
        series: io::load_series(&series_path)?,
        blueprint: io::load_model(&blueprint_path)?,
        truth: io::load_aligned_model(&truth_path)?,
    })
}

fn build_synthesis(kind: SynthesisArg, template: &Option<PathBuf>) -> Result<SynthesisSpec> {
    match kind {
        SynthesisArg::Binary => Ok(SynthesisSpec::binary()),
        SynthesisArg::Replication => {
            let path = template.as_ref().ok_or(Error::MissingTemplate)?;
            Ok(SynthesisSpec::replication(io::load_template(path)?))
        }
    }
}

fn cmd_gen(args: &GenArgs, quiet: bool) -> Result<()> {
    let started = now_unix();
    let mut config = match &args.config {
        Some(path) => io::load_benchmark_config(path)?,
        None => BenchmarkConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n) = args.n_series {
        config.n_series = n;
    }
    if let Some(rate) = args.noise_rate {
        config.noise_rate = rate;
    }
    if let Some(warp) = args.warp_strength {
        config.warp_strength = warp;
    }
    if let Some(jitter) = args.pattern_jitter {
        config.pattern_jitter = jitter;
    }
    config.validate()?;

    std::fs::create_dir_all(&args.out)?;
    let cases = gen_benchmark(&config)?;
    let width = series_file_width(config.n_series);
    for (id, case) in cases.iter().enumerate() {
        let (series_path, blueprint_path, truth_path) = case_paths(&args.out, id, width);
        io::write_string(&series_path, &io::series_to_csv(&case.series))?;
        io::write_string(&blueprint_path, &io::to_json_pretty(&case.blueprint))?;
        io::write_string(&truth_path, &io::to_json_pretty(&case.truth))?;
    }
    let template = canonical_template(&config);
    io::write_string(
        &args.out.join("template.csv"),
        &io::series_to_csv(&crate::model::TimeSeries::new(template.values.clone())?),
    )?;

    let manifest = BenchmarkManifest {
        train_count: DEFAULT_TRAIN_COUNT.min(config.n_series),
        run: run_manifest("gen", io::config_hash(&config), config.seed, started),
        config,
    };
    io::write_string(&args.out.join("manifest.json"), &io::to_json_pretty(&manifest))?;
    if !quiet {
        eprintln!(
            "wrote {} cases to {}",
            manifest.config.n_series,
            args.out.display()
        );
    }
    Ok(())
}

fn cmd_train(args: &TrainArgs, quiet: bool) -> Result<()> {
    let started = now_unix();
    let manifest = load_manifest(&args.data)?;
    let width = series_file_width(manifest.config.n_series);
    let ids = match &args.train_ids {
        Some(text) => parse_id_list(text)?,
        None => (0..manifest.train_count).collect(),
    };
    let cases: Vec<GeneratedCase> = ids
        .iter()
        .map(|&id| load_case(&args.data, id, width))
        .collect::<Result<_>>()?;

    let synthesis = build_synthesis(args.synthesis, &args.template)?;
    let ridge = match args.ridge {
        Some(r) => RidgeSpec::Fixed(r),
        None => RidgeSpec::Auto,
    };
    let embedding = if args.cv {
        let candidates = match &args.candidates {
            Some(text) => parse_candidates(text)?,
            None => default_embedding_candidates(),
        };
        cross_validate_embedding(&cases, &candidates, args.folds, ridge, &synthesis, args.znorm)?
    } else {
        match &args.embedding {
            Some(text) => parse_embedding(text)?,
            None => EmbeddingConfig::default(),
        }
    };
    if !quiet {
        eprintln!(
            "embedding: past={} future={} (M={})",
            embedding.past,
            embedding.future,
            embedding.dim()
        );
    }

    let trained = train(
        &cases,
        &TrainConfig {
            embedding,
            ridge,
            synthesis,
            znorm: args.znorm,
        },
    )?;
    if !quiet {
        eprintln!("rho = {}", trained.latent.rho);
    }
    io::write_string(&args.out, &io::to_json_pretty(&trained.latent))?;
    let run = run_manifest(
        "train",
        io::config_hash(&manifest.config),
        manifest.config.seed,
        started,
    );
    io::write_string(
        &manifest_sibling(&args.out),
        &io::to_json_pretty(&run),
    )?;
    Ok(())
}

fn manifest_sibling(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.manifest.json"))
}

fn cmd_align(args: &AlignArgs, quiet: bool) -> Result<()> {
    let started = now_unix();
    let series = io::load_series(&args.series)?;
    let blueprint = io::load_model(&args.blueprint)?;
    let synthesis = build_synthesis(args.synthesis, &args.template)?;

    let (aligned, alignment): (AlignedModel, _) = match args.method {
        MethodArg::Dtw => align_baseline_full(&series, &blueprint, &synthesis, args.znorm)?,
        MethodArg::Cca => {
            let model_path = args
                .model
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("--method cca requires --model".into()))?;
            let latent = io::load_latent_map(model_path)?;
            let trained = crate::pipeline::TrainedModel {
                train_config: TrainConfig {
                    embedding: latent.embedding,
                    ridge: RidgeSpec::Fixed(latent.ridge),
                    synthesis: synthesis.clone(),
                    znorm: args.znorm,
                },
                latent,
            };
            align_test_full(&series, &blueprint, &trained)?
        }
    };

    io::write_string(&args.out_aligned, &io::to_json_pretty(&aligned))?;
    io::write_string(&args.out_alignment, &io::alignment_to_json(&alignment))?;
    if !quiet {
        eprintln!(
            "aligned {} markers, path length {}, cost {}",
            aligned.markers.len(),
            alignment.path().len(),
            alignment.total_cost()
        );
    }
    let blueprint_canonical = serde_json::to_string(&blueprint)?;
    let hash: String = {
        use sha2::{Digest, Sha256};
        Sha256::digest(blueprint_canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    };
    let run = run_manifest("align", hash, 0, started);
    io::write_string(&manifest_sibling(&args.out_aligned), &io::to_json_pretty(&run))?;
    Ok(())
}

fn cmd_eval(args: &EvalArgs, quiet: bool) -> Result<()> {
    let started = now_unix();
    let manifest = load_manifest(&args.data)?;
    let mut config = manifest.config.clone();
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let rates = parse_rates(&args.rates)?;
    let candidates = match &args.candidates {
        Some(text) => parse_candidates(text)?,
        None => default_embedding_candidates(),
    };
    let ridge = match args.ridge {
        Some(r) => RidgeSpec::Fixed(r),
        None => RidgeSpec::Auto,
    };

    let report = crate::pipeline::noise_sweep(
        &config,
        &rates,
        &candidates,
        args.folds,
        ridge,
        args.synthesis.into(),
        args.znorm,
    )?;

    io::write_string(&args.out, &io::sweep_to_csv(&report))?;
    let summary_path = args.summary.clone().unwrap_or_else(|| {
        let stem = args
            .out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "sweep".into());
        args.out.with_file_name(format!("{stem}_summary.json"))
    });
    io::write_string(&summary_path, &io::sweep_summary_json(&report.summary()))?;
    if !quiet {
        for row in report.summary() {
            eprintln!(
                "rate {:>4}: {:>12} mean error {:.3}",
                row.noise_rate,
                row.method.as_str(),
                row.mean_error
            );
        }
    }
    let run = run_manifest("eval", io::config_hash(&config), config.seed, started);
    io::write_string(&manifest_sibling(&args.out), &io::to_json_pretty(&run))?;
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 1,
        _ => 2,
    }
}

/// Parses argv and runs a subcommand; returns the process exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::parse_from(argv);
    if let Some(threads) = cli.threads {
        // Ignore failure: the global pool can only be configured once.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let result = match &cli.command {
        Command::Gen(args) => cmd_gen(args, cli.quiet),
        Command::Train(args) => cmd_train(args, cli.quiet),
        Command::Align(args) => cmd_align(args, cli.quiet),
        Command::Eval(args) => cmd_eval(args, cli.quiet),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}
