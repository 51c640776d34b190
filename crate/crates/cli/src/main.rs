use std::process::ExitCode;

use clap::Parser;
use twistlock::error::{CliError, EXIT_INFEASIBLE};
use twistlock::{deliver, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|report| {
        deliver(
            &cli,
            &report,
            &mut std::io::stdout().lock(),
            &mut std::io::stderr().lock(),
        )?;
        Ok(report.infeasible)
    });
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(msg)) => {
            eprintln!("twistlock: {msg}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &CliError) -> ExitCode {
    eprintln!("twistlock: error: {e}");
    ExitCode::from(e.exit_code())
}
