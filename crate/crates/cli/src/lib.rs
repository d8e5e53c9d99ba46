//! Command-line driver: configuration, dispatch and artifact manifests.
//!
//! Exit codes: 0 on success, 1 on configuration or input errors, 2 when a
//! solver fails. Every run that gets as far as its output directory leaves a
//! `manifest.json` there, failures included.

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;

pub mod config;
pub mod manifest;
mod run;

pub use config::{parse_config, Cli, Command, ExperimentConfig, Flags};
pub use manifest::{manifest_artifacts, read_manifest, RunManifest, MANIFEST_NAME};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;

/// Worker cap from the config, else `HF2D_THREADS`.
fn thread_cap(cfg: &ExperimentConfig) -> Option<usize> {
    cfg.threads.or_else(|| std::env::var("HF2D_THREADS").ok()?.trim().parse().ok().filter(|&t| t > 0))
}

/// Runs a validated config and writes its manifest. Returns the exit code.
pub fn run(cfg: &ExperimentConfig) -> (i32, Option<RunManifest>) {
    let start = Instant::now();
    let mut sink = match manifest::Sink::open(&cfg.out) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return (EXIT_CONFIG, None);
        }
    };
    let threads = thread_cap(cfg);
    let mut work = || (run::dispatch(cfg, &mut sink), hf2d::par::current_threads());
    let (result, used) = match threads {
        Some(t) => hf2d::par::install(t, work),
        None => work(),
    };
    let (code, status, message) = match result {
        Ok(run::Finish::Ok) => (EXIT_OK, "ok", None),
        Ok(run::Finish::SolverFailure(m)) => (EXIT_SOLVER, "solver-failure", Some(m)),
        Err(e) => (EXIT_CONFIG, "error", Some(format!("{e:#}"))),
    };
    if let Some(m) = &message {
        eprintln!("error: {m}");
    }
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        status: status.to_string(),
        exit_code: code,
        message,
        threads: used,
        artifacts: Vec::new(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    match sink.finish(manifest) {
        Ok(m) => (code, Some(m)),
        Err(e) => {
            eprintln!("error: writing manifest: {e:#}");
            (EXIT_CONFIG, None)
        }
    }
}

/// Parses `args` (program name first) and runs. Returns the exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let cfg = match parse_config(cli.command, &cli.flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_CONFIG;
        }
    };
    run(&cfg).0
}
