mod commands;
mod settings;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

fn run() -> Result<ExitCode, CliError> {
    let cli = match settings::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help, --version
            print!("{e}");
            return Ok(ExitCode::SUCCESS);
        }
        Err(e) => return Err(CliError::Invalid(e.to_string().trim_end().to_string())),
    };
    let cfg = settings::RunConfig::from_cli(cli, settings::max_evals_from_env()?)?;
    let outcome = commands::run(&cfg)?;
    let mut out: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    outcome.table.write(cfg.format, &mut out)?;
    out.flush()?;
    match outcome.failure {
        Some(msg) => {
            eprintln!("vacuum: {msg}");
            Ok(ExitCode::from(2))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("vacuum: {e}");
            ExitCode::from(1)
        }
    }
}
