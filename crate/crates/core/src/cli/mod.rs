//! Command-line front end.
//!
//! ```text
//! formal-flow <solve|compose-check|evolution-check|taylor-check|formula-check|convergence>
//!     --config <file.json> [--seed N] [--paths N] [--steps N] [--out DIR]
//! ```
//!
//! Each run writes `<out>/<subcommand>.json` with a `provenance` block
//! (tool version, config hash, the effective config, wall-clock time) and a
//! `results` block that depends only on the config. Some subcommands add a
//! CSV next to it. Exit codes: 0 success, 2 invalid input, 3 numerical
//! blowup, 4 failed check, 1 output error.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde_json::json;

pub use commands::{execute, Outcome, Subcommand, COMPOSE_TOLERANCE, EVOLUTION_TOLERANCE, FORMULA_TOLERANCE};
pub use config::{ComposeInputs, ExperimentConfig, RandomCoefficients};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OUTPUT: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "formal-flow", version, about = "Taylor coefficients of stochastic flows")]
pub struct Args {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    /// Experiment configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub paths: Option<usize>,
    /// Overrides `n_steps`.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Blowup { .. } | Error::TooManyExclusions { .. } => EXIT_BLOWUP,
        Error::Io(_) => EXIT_OUTPUT,
        _ => EXIT_INVALID,
    }
}

/// Reads the config and applies flag overrides; flags win.
pub fn load_config(args: &Args) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| Error::Config {
        field: "--config".into(),
        message: format!("{}: {e}", args.config.display()),
    })?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(p) = args.paths {
        config.paths = p;
    }
    if let Some(n) = args.steps {
        config.n_steps = n;
    }
    config.validate()?;
    Ok(config)
}

/// Writes the JSON report and optional CSV; returns the report path.
pub fn write_report(
    out: &Path,
    cmd: Subcommand,
    config: &ExperimentConfig,
    outcome: &Outcome,
) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(out)?;
    let generated = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let report = json!({
        "provenance": {
            "tool": "formal-flow",
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": cmd.name(),
            "config_hash": config.hash(),
            "seed": config.seed,
            "config": config,
            "generated_unix": generated,
        },
        "results": outcome.results,
    });
    let path = out.join(format!("{}.json", cmd.name()));
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&report).expect("json values serialize"),
    )?;
    if let Some((name, body)) = &outcome.csv {
        std::fs::write(out.join(name), body)?;
    }
    Ok(path)
}

pub fn run(args: &Args) -> i32 {
    let config = match load_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let outcome = match execute(args.subcommand, &config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match write_report(&args.out, args.subcommand, &config, &outcome) {
        Ok(path) => println!("{}: {} ({})", args.subcommand.name(), outcome.summary, path.display()),
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_OUTPUT;
        }
    }
    if args.subcommand.is_check() && !outcome.passed {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    }
}

/// Parses `argv` and runs; clap handles `--help` and usage errors.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Args::try_parse_from(argv) {
        Ok(args) => run(&args),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
