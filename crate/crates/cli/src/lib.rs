//! Command-line front end: relation files, reports and subcommands.

pub mod cli;
pub mod commands;
pub mod error;
pub mod relfile;
pub mod report;

use std::ffi::OsString;

use clap::Parser;
use quantclass_core::Budget;

pub use error::CliError;
pub use relfile::{RelationFile, Structure};
pub use report::{Format, Report};

/// What a run produced: the exit status and the bytes for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match cli::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                RunOutput { code, stdout: text, stderr: String::new() }
            } else {
                RunOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let budget = Budget { max_members: cli.max_family, max_work: cli.max_work };
    let mut rep = Report::new(commands::name(&cli.command), budget);
    let mut stderr = String::new();
    let code = match commands::execute(&cli.command, &budget, &mut rep) {
        Ok(()) => 0,
        Err(e) => {
            stderr = format!("error: {e}\n");
            rep.error = Some((e.kind().into(), e.to_string()));
            e.exit_code()
        }
    };
    for w in &rep.warnings {
        stderr.push_str(&format!("warning: {w}\n"));
    }
    RunOutput { code, stdout: rep.render(cli.format), stderr }
}
