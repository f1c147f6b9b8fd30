use std::net::SocketAddr;
use std::path::PathBuf;

use clap::Parser;
use scholarec_core::api::DEFAULT_N;
use scholarec_service::{serve, ServiceConfig};

/// Serve recommendations from a built data directory.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Directory holding articles.jsonl, the .simidx files and journals.jvec.
    #[arg(long, default_value = ".")]
    data: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Result size when a request omits `n`.
    #[arg(long, default_value_t = DEFAULT_N, value_parser = positive)]
    default_n: usize,
    /// Browser origin allowed by CORS; any origin when omitted.
    #[arg(long)]
    cors_origin: Option<String>,
    /// Override individual artifact paths.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long = "index")]
    indices: Vec<PathBuf>,
    #[arg(long)]
    vectors: Option<PathBuf>,
}

fn positive(raw: &str) -> Result<usize, String> {
    match raw.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("expected a positive integer, got `{raw}`")),
        Ok(n) => Ok(n),
    }
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let mut config = ServiceConfig::for_data_dir(&args.data, args.listen);
    config.default_n = args.default_n;
    config.cors_origin = args.cors_origin;
    if let Some(corpus) = args.corpus {
        config.artifacts.corpus = corpus;
    }
    if !args.indices.is_empty() {
        config.artifacts.indices = args.indices;
    }
    if let Some(vectors) = args.vectors {
        config.artifacts.vectors = vectors;
    }
    serve(config).await
}
