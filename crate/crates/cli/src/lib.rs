//! Batch front end: `analyze`, `scan`, `kappa` and `curve`.
//!
//! JSON reports carry the input hash, arithmetic mode and grids used so a
//! run can be repeated; CSV tables are for plotting.

pub mod analyze;
pub mod args;
pub mod curve;
pub mod directions;
pub mod error;
pub mod input;
pub mod kappa;
pub mod report;
pub mod scan;

use args::{Cli, Command, FormatArg};
use error::CliError;
use report::emit;

/// Exit status for a failure that leaves no report.
const FAILURE: i32 = 2;

fn fail(e: &CliError) -> i32 {
    eprintln!("error: {e}");
    FAILURE
}

/// Run one command; the result is the process exit status.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Analyze(a) => {
            let cfg = match analyze::AnalysisConfig::from_args(&a) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            let report = analyze::analyze(&cfg);
            let text = match cfg.format {
                FormatArg::Json => report.to_json(),
                FormatArg::Csv => match analyze::to_csv(&report) {
                    Ok(t) => t,
                    Err(e) => return fail(&e),
                },
            };
            for e in &report.errors {
                eprintln!("error: {}: {}", e.criterion, e.message);
            }
            match emit(cfg.out.as_deref(), &text) {
                Ok(()) => report.exit_code(),
                Err(e) => fail(&e),
            }
        }
        Command::Scan(a) => match scan::scan(&a).and_then(|t| emit(a.out.as_deref(), &t)) {
            Ok(()) => 0,
            Err(e) => fail(&e),
        },
        Command::Kappa(a) => match kappa::kappa(&a).and_then(|t| emit(a.out.as_deref(), &t)) {
            Ok(()) => 0,
            Err(e) => fail(&e),
        },
        Command::Curve(a) => {
            let report = curve::curve(&a);
            for e in &report.errors {
                eprintln!("error: {}: {}", e.criterion, e.message);
            }
            match emit(a.out.as_deref(), &report.to_json()) {
                Ok(()) => report.exit_code(),
                Err(e) => fail(&e),
            }
        }
    }
}
