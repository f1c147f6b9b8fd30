//! `scholarec`: the operational pipeline.
//!
//! ```text
//! gen-fixture → ingest → build-index (×2) → build-map → recommend / evaluate
//! ```
//!
//! All subcommands that read or write the standard artifact layout take
//! `--data DIR` (default: current directory). Exit codes: 0 success,
//! 1 runtime failure, 2 invalid invocation.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use scholarec_core::api;
use scholarec_core::artifacts::{
    index_file, load_corpus, load_usage, ArtifactPaths, LoadedArtifacts, Manifest, ARTICLES_FILE,
    MANIFEST_FILE, SIMILARITY_CSV, USAGE_FILE, VECTORS_FILE,
};
use scholarec_core::corpus::{write_usage_csv, UsageEvent};
use scholarec_core::engine::{engine_kind, EngineInputs};
use scholarec_core::evaluation::{
    leave_one_out, run_comparison, write_per_seed_csv, EngineSettings, RemovalPolicy, ReportConfig, CUTOFFS,
};
use scholarec_core::fixture::{generate, FixtureParams};
use scholarec_core::matrix::DEFAULT_SESSION_WINDOW;
use scholarec_core::semantic::{
    export_similarity_matrix, store_io, JournalVectorStore, SemanticConfig, DEFAULT_DIMENSION, DEFAULT_RNG_SEED,
    DEFAULT_SEED_ENTRIES,
};
use scholarec_core::similarity::{IndexParams, Neighborhood};
use scholarec_core::{simidx, ArticleId, Corpus};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "scholarec", version, about = "Citation- and usage-based article recommendation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate raw inputs and write canonical copies plus a manifest.
    Ingest {
        #[arg(long)]
        articles: PathBuf,
        #[arg(long)]
        usage: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build one engine's item-similarity index.
    BuildIndex {
        #[arg(long, value_parser = engine_name)]
        mode: String,
        /// Neighborhood size, or `all`.
        #[arg(long, default_value = "50")]
        k: Neighborhood,
        /// Session inactivity gap in seconds (usage mode only).
        #[arg(long)]
        window: Option<u64>,
        /// Defaults to 1 for citation, 2 for usage.
        #[arg(long)]
        min_cooccurrence: Option<u32>,
        #[arg(long, default_value = ".")]
        data: PathBuf,
        /// Output file; `<data>/<mode>.simidx` when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build journal vectors and the journal similarity matrix.
    BuildMap {
        #[arg(long, default_value_t = DEFAULT_DIMENSION)]
        dim: usize,
        /// Non-zero entries per term vector.
        #[arg(long, default_value_t = DEFAULT_SEED_ENTRIES)]
        seeds: usize,
        #[arg(long, default_value_t = DEFAULT_RNG_SEED)]
        rng_seed: u64,
        #[arg(long, default_value = ".")]
        data: PathBuf,
    },
    /// Print recommendations for one seed as JSON.
    Recommend {
        #[arg(long)]
        seed: String,
        #[arg(long, value_parser = engine_name)]
        engine: String,
        #[arg(long, default_value_t = api::DEFAULT_N, value_parser = positive)]
        n: usize,
        #[arg(long, default_value = ".")]
        data: PathBuf,
    },
    /// Run an evaluation protocol and write its report files.
    Evaluate {
        #[arg(long, value_enum)]
        protocol: Protocol,
        /// One article id per line; every corpus article when omitted.
        #[arg(long)]
        seeds: Option<PathBuf>,
        /// Result size per seed (topn: list length searched, at least 10).
        #[arg(long, default_value_t = api::DEFAULT_N, value_parser = positive)]
        n: usize,
        /// Which references the topn protocol withholds.
        #[arg(long, value_enum, default_value_t = Policy::SmallestId)]
        policy: Policy,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = ".")]
        data: PathBuf,
    },
    /// Generate a synthetic multi-topic corpus and usage log.
    GenFixture {
        #[arg(long, default_value_t = 2, value_parser = positive)]
        topics: usize,
        #[arg(long, default_value_t = 3, value_parser = positive)]
        journals_per_topic: usize,
        #[arg(long, default_value_t = 400, value_parser = positive)]
        articles: usize,
        #[arg(long, default_value_t = 42)]
        rng_seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Protocol {
    Topn,
    Comparison,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    SmallestId,
    AllReferences,
}

fn positive(raw: &str) -> Result<usize, String> {
    match raw.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("expected a positive integer, got `{raw}`")),
        Ok(n) => Ok(n),
    }
}

fn engine_name(raw: &str) -> Result<String, String> {
    engine_kind(raw).map(|kind| kind.name().to_string()).map_err(|e| e.to_string())
}

/// An invocation that parsed but is inconsistent; reported with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage_error(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn ingest(articles: &Path, usage: Option<&Path>, out: &Path) -> Result<()> {
    let corpus = load_corpus(articles)?;
    let events = usage.map(load_usage).transpose()?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut writer = create(&out.join(ARTICLES_FILE))?;
    corpus.write_jsonl(&mut writer)?;
    writer.flush()?;
    if let Some(events) = &events {
        write_usage_csv(events, create(&out.join(USAGE_FILE))?)?;
    }
    let manifest = Manifest::describe(&corpus, events.as_deref());
    write_json(&out.join(MANIFEST_FILE), &manifest)?;
    eprintln!(
        "ingested {} articles in {} journals ({} dangling references){}",
        manifest.articles,
        manifest.journals,
        manifest.dangling_references,
        manifest.usage_events.map_or(String::new(), |n| format!(", {n} usage events")),
    );
    Ok(())
}

fn build_index(
    mode: &str,
    k: Neighborhood,
    window: Option<u64>,
    min_cooccurrence: Option<u32>,
    data: &Path,
    out: Option<&Path>,
) -> Result<()> {
    let kind = engine_kind(mode)?;
    let uses_sessions = kind.provenance() == scholarec_core::similarity::Provenance::Usage;
    if window.is_some() && !uses_sessions {
        return Err(usage_error(format!("--window does not apply to {mode} mode")));
    }
    let params = IndexParams::new(k, min_cooccurrence.unwrap_or(kind.default_params().min_cooccurrence))
        .map_err(|e| usage_error(e.to_string()))?;
    let corpus = load_corpus(&data.join(ARTICLES_FILE))?;
    let events: Vec<UsageEvent> = if uses_sessions {
        let path = data.join(USAGE_FILE);
        if !path.exists() {
            bail!("{mode} mode needs {} (run ingest with --usage)", path.display());
        }
        load_usage(&path)?
    } else {
        Vec::new()
    };
    let inputs = EngineInputs {
        corpus: &corpus,
        usage: &events,
        window: window.unwrap_or(DEFAULT_SESSION_WINDOW),
    };
    let index = kind.build_index(inputs, params)?;
    let target = out.map_or_else(|| data.join(index_file(kind.name())), Path::to_path_buf);
    let mut writer = create(&target)?;
    simidx::write(&index, &mut writer)?;
    writer.flush()?;
    eprintln!("wrote {} ({} items)", target.display(), index.len());
    Ok(())
}

fn build_map(config: SemanticConfig, data: &Path) -> Result<()> {
    let corpus = load_corpus(&data.join(ARTICLES_FILE))?;
    let store = JournalVectorStore::build(&corpus, config)?;
    let matrix = export_similarity_matrix(&store)?;
    store_io::write(&store, create(&data.join(VECTORS_FILE))?)?;
    let mut csv = create(&data.join(SIMILARITY_CSV))?;
    matrix.write_csv(&mut csv)?;
    csv.flush()?;
    let silent = store.journals().filter(|v| v.empty).count();
    eprintln!("mapped {} journals ({silent} without text)", store.len());
    Ok(())
}

fn load(data: &Path) -> Result<LoadedArtifacts> {
    Ok(LoadedArtifacts::load(&ArtifactPaths::in_dir(data))?)
}

fn recommend(seed: &str, engine: &str, n: usize, data: &Path) -> Result<()> {
    let artifacts = load(data)?;
    let view = api::recommend_view(&artifacts, seed, engine, n)?;
    println!("{}", serde_json::to_string(&view)?);
    Ok(())
}

fn read_seeds(path: Option<&Path>, corpus: &Corpus) -> Result<Vec<ArticleId>> {
    let Some(path) = path else {
        return Ok(corpus.articles().iter().map(|a| a.id.clone()).collect());
    };
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut seeds = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        let id = line.trim();
        if !id.is_empty() && !id.starts_with('#') {
            seeds.push(ArticleId::new(id).expect("non-empty"));
        }
    }
    if seeds.is_empty() {
        return Err(usage_error(format!("{} lists no seeds", path.display())));
    }
    Ok(seeds)
}

#[derive(Serialize)]
struct TopNReport<'a> {
    #[serde(flatten)]
    result: &'a scholarec_core::evaluation::TopNResult,
    hit_rate_at: std::collections::BTreeMap<usize, f64>,
    k: Neighborhood,
}

fn evaluate(protocol: Protocol, seeds: Option<&Path>, n: usize, policy: Policy, out: &Path, data: &Path) -> Result<()> {
    let artifacts = load(data)?;
    let seeds = read_seeds(seeds, &artifacts.corpus)?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    match protocol {
        Protocol::Topn => {
            if n < CUTOFFS[CUTOFFS.len() - 1] {
                return Err(usage_error(format!("topn needs --n of at least {}", CUTOFFS[CUTOFFS.len() - 1])));
            }
            let index = artifacts.indices.get("citation").context("citation index not loaded")?;
            let engine = scholarec_core::engine::CitationRecommender::new(index.clone(), artifacts.corpus.clone())?;
            let policy = match policy {
                Policy::SmallestId => RemovalPolicy::SmallestId,
                Policy::AllReferences => RemovalPolicy::AllReferences,
            };
            let result = leave_one_out(&engine, &artifacts.corpus, &seeds, n, policy)?;
            let report = TopNReport {
                result: &result,
                hit_rate_at: CUTOFFS.iter().map(|&c| (c, result.hit_rate(c))).collect(),
                k: index.params().neighborhood,
            };
            write_json(&out.join("topn.json"), &report)?;
            eprintln!(
                "top-1 {:.3}, top-10 {:.3} over {} trials ({} seeds skipped)",
                result.hit_rate(1),
                result.hit_rate(10),
                result.trials,
                result.skipped
            );
        }
        Protocol::Comparison => {
            let (name_a, name_b) = api::COMPARE_ENGINES;
            let a = artifacts.engines.get(name_a)?;
            let b = artifacts.engines.get(name_b)?;
            let mut outcome = run_comparison(a.as_ref(), b.as_ref(), &artifacts.corpus, &seeds, &artifacts.vectors, n)?;
            let engines = artifacts
                .indices
                .iter()
                .map(|(name, index)| {
                    let settings = EngineSettings {
                        k: index.params().neighborhood,
                        min_cooccurrence: index.params().min_cooccurrence,
                        window: index.meta().window,
                    };
                    (name.to_string(), settings)
                })
                .collect();
            outcome.report.config = Some(ReportConfig { n, engines, semantic: *artifacts.vectors.config() });
            write_json(&out.join("report.json"), &outcome.report)?;
            let mut csv = create(&out.join("per_seed.csv"))?;
            write_per_seed_csv(&outcome.rows, &mut csv)?;
            csv.flush()?;
            let r = &outcome.report;
            eprintln!(
                "coverage {name_a} {:.3}, {name_b} {:.3}; joint {}; diversity wins {name_a} {} / {name_b} {}",
                r.coverage_a, r.coverage_b, r.joint_seeds, r.diversity_wins_a, r.diversity_wins_b
            );
        }
    }
    Ok(())
}

fn gen_fixture(params: FixtureParams, out: &Path) -> Result<()> {
    let fixture = generate(&params).map_err(|e| match e {
        scholarec_core::fixture::FixtureError::Invalid(message) => usage_error(message),
        other => other.into(),
    })?;
    fixture.write_to(out)?;
    eprintln!(
        "wrote {} articles and {} usage events to {}",
        fixture.articles.len(),
        fixture.usage.len(),
        out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { articles, usage, out } => ingest(&articles, usage.as_deref(), &out),
        Command::BuildIndex { mode, k, window, min_cooccurrence, data, out } => {
            build_index(&mode, k, window, min_cooccurrence, &data, out.as_deref())
        }
        Command::BuildMap { dim, seeds, rng_seed, data } => {
            let config = SemanticConfig::new(dim, seeds, rng_seed).map_err(|e| usage_error(e.to_string()))?;
            build_map(config, &data)
        }
        Command::Recommend { seed, engine, n, data } => recommend(&seed, &engine, n, &data),
        Command::Evaluate { protocol, seeds, n, policy, out, data } => {
            evaluate(protocol, seeds.as_deref(), n, policy, &out, &data)
        }
        Command::GenFixture { topics, journals_per_topic, articles, rng_seed, out } => {
            let params = FixtureParams { topics, journals_per_topic, articles, rng_seed, ..FixtureParams::default() };
            gen_fixture(params, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            if error.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
