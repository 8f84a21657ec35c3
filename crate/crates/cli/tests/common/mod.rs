#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command as Process;

use c3_cli::{Cli, RunManifest};
use clap::Parser;
use serde_json::{json, Value};

/// Small model and grids so a whole subcommand runs in well under a second.
pub fn tiny_config(out_dir: &Path) -> Value {
    json!({
        "model": {"latent_size": 16, "widths": [8, 16, 16, 16], "cond_dim": 16},
        "sampler": {"steps": 2},
        "concepts": ["chair", "car"],
        "seeds": 3,
        "search": {
            "seeds_per_point": 1,
            "grids": {"Down0": [1, 1.5, 2], "Down1": [1, 2], "Down2": [1, 2, 3], "Mid": [1, 2, 3]}
        },
        "out_dir": out_dir,
    })
}

pub fn write_config(dir: &Path, name: &str, cfg: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

/// Runs the CLI in-process.
pub fn run(args: &[&str]) -> c3_cli::CliResult<RunManifest> {
    let argv: Vec<&str> = std::iter::once("c3").chain(args.iter().copied()).collect();
    Cli::try_parse_from(argv).expect("valid arguments").run()
}

/// Runs the built binary and returns its exit code.
pub fn exit_code(args: &[&str]) -> i32 {
    Process::new(env!("CARGO_BIN_EXE_c3"))
        .args(args)
        .env_remove("C3_SCORER_ENDPOINT")
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exited normally")
}

pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

pub fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

pub fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

/// Every file listed in a manifest, with its bytes.
pub fn snapshot(dir: &Path, manifest: &RunManifest) -> Vec<(String, Vec<u8>)> {
    manifest
        .files
        .iter()
        .map(|f| (f.clone(), std::fs::read(dir.join(f)).unwrap()))
        .collect()
}
