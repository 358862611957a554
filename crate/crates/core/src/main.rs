use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use evo2048::cli::{execute, normalize_args, Cli, CliError};

fn run() -> anyhow::Result<()> {
    let cli = Cli::try_parse_from(normalize_args(std::env::args()))?;
    let mode = cli.mode;
    execute(&cli).with_context(|| match mode {
        Some(m) => format!("{} failed", format!("{m:?}").to_lowercase()),
        None => "evo2048 failed".to_string(),
    })
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(clap_err) = e.downcast_ref::<clap::Error>() {
                let _ = clap_err.print();
                return match clap_err.kind() {
                    clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                    _ => ExitCode::from(1),
                };
            }
            eprintln!("error: {e:#}");
            ExitCode::from(e.downcast_ref::<CliError>().map_or(2, CliError::exit_code))
        }
    }
}
