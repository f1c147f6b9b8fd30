#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn scholarec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scholarec")).args(args).output().expect("binary runs")
}

/// Runs a subcommand that must succeed, returning its stdout.
pub fn ok(args: &[&str]) -> Result<String, String> {
    let output = scholarec(args);
    if output.status.success() {
        Ok(String::from_utf8(output.stdout).expect("utf-8 stdout"))
    } else {
        Err(format!("`scholarec {}` failed: {}", args.join(" "), String::from_utf8_lossy(&output.stderr)))
    }
}

fn s(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

/// Full build from raw fixture files in `raw` into the data directory `data`.
pub fn build_pipeline(raw: &Path, data: &Path) -> Result<(), String> {
    let articles = raw.join("articles.jsonl");
    let usage = raw.join("usage.csv");
    ok(&["ingest", "--articles", s(&articles), "--usage", s(&usage), "--out", s(data)])?;
    ok(&["build-index", "--mode", "citation", "--data", s(data)])?;
    ok(&["build-index", "--mode", "usage", "--data", s(data), "--window", "1800"])?;
    ok(&["build-map", "--data", s(data)])?;
    Ok(())
}

/// gen-fixture, full build and both evaluations under `root`.
pub fn full_run(root: &Path, fixture_flags: &[&str]) -> Result<(), String> {
    let raw = root.join("raw");
    let data = root.join("data");
    let mut args = vec!["gen-fixture", "--out", s(&raw)];
    args.extend_from_slice(fixture_flags);
    ok(&args)?;
    build_pipeline(&raw, &data)?;
    let seeds = raw.join("seeds.txt");
    for protocol in ["comparison", "topn"] {
        let out = root.join(protocol);
        ok(&["evaluate", "--protocol", protocol, "--seeds", s(&seeds), "--data", s(&data), "--out", s(&out)])?;
    }
    Ok(())
}
