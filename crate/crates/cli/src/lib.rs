//! Command-line experiment runner.
//!
//! Exit codes: 0 success, 1 protocol abort (the report is still written),
//! 2 invalid arguments, 3 output failure.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use std::io::Write;

pub use args::Cli;
pub use error::CliError;
pub use report::Report;

pub struct Execution {
    pub report: Report,
    pub aborted: bool,
}

pub fn run(cli: &Cli) -> Result<Execution, CliError> {
    let out = commands::dispatch(&cli.command, cli.seed)?;
    let report = Report::new(out.experiment, cli.seed, out.params, out.results)?;
    Ok(Execution { report, aborted: out.aborted })
}

/// Runs, writes the report and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = run(cli).and_then(|e| {
        let text = e.report.render(cli.format)?;
        match &cli.out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(e.aborted)
    });
    match result {
        Ok(false) => 0,
        Ok(true) => {
            eprintln!("protocol aborted");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
