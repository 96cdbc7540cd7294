mod args;
mod commands;
mod config;
mod error;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::Artifact;
use crate::error::CliError;

fn emit(artifacts: &[Artifact], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for a in artifacts {
                fs::write(dir.join(&a.name), &a.contents)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for a in artifacts {
                stdout.write_all(a.contents.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Dims(a) => emit(&commands::dims(a)?, a.out.as_deref()),
        Command::Align(a) => {
            let (artifacts, failure) = commands::align(a)?;
            emit(&artifacts, a.out.as_deref())?;
            failure.map_or(Ok(()), Err)
        }
        Command::Rates(a) => emit(&commands::rates(a)?, a.network.out.as_deref()),
        Command::DofTable(a) => emit(&commands::dof_table(a)?, a.out.as_deref()),
        Command::Binlab(a) => emit(&commands::binlab(a)?, a.out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Config(e.render().to_string().trim().to_string());
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.record());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
