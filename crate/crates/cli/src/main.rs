//! `resokit` command-line front end.
//!
//! Exit status: 0 on success, 2 for bad input, 3 when a numerical procedure
//! fails, 4 when `verify` finds a residual over tolerance.

mod args;
mod commands;
mod output;
mod sweep;

use std::io::Write;

use clap::CommandFactory;
use std::process::ExitCode;

use args::{Command, FeshbachCommand, Format, TwoChannelCommand};
use output::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Core(#[from] resokit::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Amplitude => "amplitude",
        Command::PhaseShift => "phase-shift",
        Command::BoundState => "bound-state",
        Command::ModifiedNorm => "modified-norm",
        Command::TwoChannel(TwoChannelCommand::Params) => "two-channel params",
        Command::TwoChannel(TwoChannelCommand::Sweep) => "two-channel sweep",
        Command::TwoChannel(TwoChannelCommand::Bound) => "two-channel bound",
        Command::Feshbach(FeshbachCommand::Sweep) => "feshbach sweep",
        Command::Feshbach(FeshbachCommand::Classify) => "feshbach classify",
        Command::Verify { .. } => "verify",
    }
}

fn run() -> Result<bool, CliError> {
    let (cli, inputs) = args::parse(std::env::args().collect())?;
    let outcome = commands::run(&cli)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let mut sink: Box<dyn Write> = match &cli.opts.out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match cli.opts.format.unwrap_or(Format::Csv) {
        Format::Csv => outcome.table.write_csv(&mut sink)?,
        Format::Json => {
            let mut report = RunReport::new(command_name(&cli.command), inputs, &outcome.table, outcome.residuals);
            report.orthogonality = outcome.orthogonality;
            serde_json::to_writer_pretty(&mut sink, &report).map_err(std::io::Error::from)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(!outcome.breach)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed: a residual exceeds its tolerance");
            ExitCode::from(4)
        }
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { 2 } else { 0 })
        }
        Err(e @ CliError::Usage(_)) => {
            eprintln!("error: {e}\n\n{}", args::Cli::command().render_usage());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
