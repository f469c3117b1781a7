//! Command-line surface for `dirreg-core`: document schemas, the `--poly`
//! grammar, report persistence and the exit-code contract.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | positive verdict, or all checks passed |
//! | 1 | usage error |
//! | 2 | input error |
//! | 3 | negative verdict, or a check failed |
//! | 4 | no counterexample exists |

pub mod args;
pub mod commands;
pub mod doc;
pub mod error;
pub mod polyexpr;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use error::{exit, CliError};

/// Parses `argv`, runs the command, writes the report, and returns the
/// process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match commands::run(&cli.command) {
        Ok(outcome) => {
            let json = report::to_json(&outcome.report);
            let written = match &outcome.out {
                Some(path) => commands::write_atomic(path, &json),
                None => std::io::stdout()
                    .write_all(json.as_bytes())
                    .map_err(|e| CliError::input(format!("stdout: {e}"))),
            };
            match written {
                Ok(()) => outcome.code,
                Err(e) => fail(&e),
            }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> i32 {
    eprintln!("dirreg: {e}");
    e.exit_code()
}
