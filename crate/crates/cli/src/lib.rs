//! Command-line harness for `gme-core`: every protocol and certificate as a
//! subcommand emitting a JSON report (or CSV for scans) with an embedded run
//! manifest.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod state_file;

use args::{Cli, Command, OutputArgs};
use output::{emit, Artifact, Format};

pub use error::{CliError, Result};

/// Runs a parsed command and returns its artifact without writing it.
pub fn execute(command: &Command) -> Result<Artifact> {
    match command {
        Command::Prop1(a) => commands::prop1(a),
        Command::Prop2(a) => commands::prop2(a),
        Command::Prop3(a) => commands::prop3(a),
        Command::Sigma(a) => commands::sigma(a),
        Command::SigmaScan(a) => commands::sigma_scan(a),
        Command::Certify(a) => commands::certify(a),
        Command::Svetlichny(a) => commands::svetlichny(a),
        Command::Distill(a) => commands::distill(a),
    }
}

fn output_args(command: &Command) -> (&OutputArgs, Format) {
    match command {
        Command::Prop1(a) => (&a.output, Format::Json),
        Command::Prop2(a) => (&a.output, Format::Json),
        Command::Prop3(a) => (&a.output, Format::Json),
        Command::Sigma(a) => (&a.output, Format::Json),
        Command::SigmaScan(a) => (&a.output, a.format),
        Command::Certify(a) => (&a.output, Format::Json),
        Command::Svetlichny(a) => (&a.output, Format::Json),
        Command::Distill(a) => (&a.output, Format::Json),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut artifact = execute(&cli.command)?;
    let (out, format) = output_args(&cli.command);
    if out.timestamp {
        artifact.manifest.stamp();
    }
    emit(&artifact, format, out.out.as_deref())
}
