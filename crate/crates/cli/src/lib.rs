//! Command-line front end: argument types, report schemas and the
//! subcommand implementations behind the `boltzpart` binary.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use std::fs::File;
use std::io::{BufWriter, Write};

pub use args::{Cli, Command};
pub use commands::{bench, linear_fit, load_spec};
pub use error::CliError;

/// Dispatches one parsed command line, writing results to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Tune(a) => commands::tune_cmd(a, out),
        Command::Sample(a) => match &a.output {
            Some(path) => {
                let mut file = BufWriter::new(File::create(path)?);
                commands::sample_cmd(a, &mut file)?;
                file.flush()?;
                Ok(())
            }
            None => commands::sample_cmd(a, out),
        },
        Command::Count(a) => commands::count_cmd(a, out),
        Command::Analyze(a) => commands::analyze_cmd(a, out),
        Command::Validate(a) => commands::validate_cmd(a, out),
        Command::Bench(a) => commands::bench_cmd(a, out),
    }
}
