//! Command-line front end: one subcommand per pipeline stage, file-based
//! inputs and outputs, and a run manifest beside every output.

mod args;
mod commands;
mod manifest;

use std::ffi::OsString;

use clap::Parser;

use crate::error::{Error, Result};

pub use args::*;
pub use commands::FileConfig;
pub use manifest::{sha256_file, RunManifest, MANIFEST_FILE};

pub const EXIT_OK: i32 = 0;
/// Usage or input errors.
pub const EXIT_INPUT: i32 = 2;
/// Numeric divergence during training.
pub const EXIT_NUMERIC: i32 = 3;

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::read(p)?,
        None => FileConfig::default(),
    };
    std::fs::create_dir_all(&cli.out_dir).map_err(|e| Error::io(&cli.out_dir, e))?;
    let ctx = commands::Context {
        seed: cli.seed,
        out_dir: cli.out_dir.clone(),
        file,
        config_path: cli.config.clone(),
    };
    match &cli.command {
        Command::CorpusBuild(a) => commands::corpus_build(a, &ctx),
        Command::Embed(a) => commands::embed(a, &ctx),
        Command::Train(a) => commands::train(a, &ctx),
        Command::Grid(a) => commands::grid(a, &ctx),
        Command::Eval(a) => commands::eval(a, &ctx),
        Command::Baseline(a) => commands::baseline(a, &ctx),
        Command::Gates(a) => commands::gates(a, &ctx),
        Command::Synth(a) => commands::synth(a, &ctx),
    }
}

pub fn exit_code(error: &Error) -> i32 {
    if error.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_INPUT
    }
}

/// Parses `args` (program name first), runs, reports errors on standard
/// error and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
