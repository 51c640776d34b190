//! Command-line front end for the twistlock analyses.
//!
//! Every subcommand produces a data table and a few summary lines. With the
//! default `--format table` both go to stdout; with `--format csv` the CSV goes
//! to stdout and the summary to stderr. `--out PATH` always writes CSV to the
//! file and leaves stdout for the summary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod curves_csv;
pub mod error;
pub mod format;
pub mod svg;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{Context, GraspArgs, LockArgs, Report, StepArgs, SweepArgs};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::format::Format;

#[derive(Debug, Parser)]
#[command(name = "twistlock", version, about = "Self-locking soft finger analysis")]
pub struct Cli {
    /// TOML run configuration. Reference values are used when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Curve CSV. The bundled plate-gap curves are used when omitted.
    #[arg(long, global = true)]
    pub curves: Option<PathBuf>,
    /// Write the data table as CSV to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Holding-moment capacity of one lock.
    Lock(LockArgs),
    /// Root moment a grasp needs and whether the lock provides it.
    Grasp(GraspArgs),
    /// Plate-gap design sweep against the stiffness profile.
    Sweep(SweepArgs),
    /// First-order pressure step response.
    Step(StepArgs),
    /// Quasi-static grasp sequence from the configured schedule.
    Simulate,
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let ctx = Context {
        cfg: cfg.resolve()?,
        curves: cli.curves.clone(),
    };
    match &cli.command {
        Command::Lock(a) => commands::lock(&ctx, a),
        Command::Grasp(a) => commands::grasp(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Step(a) => commands::step(&ctx, a),
        Command::Simulate => commands::simulate(&ctx),
    }
}

/// Routes a report to the file, stdout and stderr as described in the crate
/// docs.
pub fn deliver(
    cli: &Cli,
    report: &Report,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let io = |path: &str| {
        let path = PathBuf::from(path);
        move |source| CliError::Io { path, source }
    };
    let csv = |r: &Report| {
        r.table
            .to_csv()
            .map_err(|e| CliError::Usage(format!("csv output: {e}")))
    };
    let mut summary = String::new();
    for line in &report.summary {
        summary.push_str(line);
        summary.push('\n');
    }
    if let Some(path) = &cli.out {
        std::fs::write(path, csv(report)?).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        stdout.write_all(summary.as_bytes()).map_err(io("<stdout>"))?;
        return Ok(());
    }
    match cli.format {
        Format::Csv => {
            stdout
                .write_all(csv(report)?.as_bytes())
                .map_err(io("<stdout>"))?;
            stderr.write_all(summary.as_bytes()).map_err(io("<stderr>"))?;
        }
        Format::Table => {
            let mut text = report.table.to_text();
            if !text.is_empty() && !summary.is_empty() {
                text.push('\n');
                text.push_str(&summary);
            }
            stdout.write_all(text.as_bytes()).map_err(io("<stdout>"))?;
        }
    }
    Ok(())
}
