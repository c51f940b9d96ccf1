mod args;
mod commands;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: &Cli) -> Result<commands::Output, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Periods => commands::periods(g),
        Command::Verify { suite } => commands::verify(g, *suite),
        Command::Probe(args) => commands::probe(g, args),
        Command::Eval { what } => commands::eval(g, what),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        match &cli.global.out {
            Some(path) => commands::write_file(path, &out.text)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(out.text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| CliError::input(format!("stdout: {e}")))?;
            }
        }
        Ok(out.code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
