//! Command-line front end for `driftgreen`.

use std::ffi::OsString;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod curve;
pub mod decimal;
pub mod failure;
pub mod job;

use args::Cli;
use failure::Failure;

/// What a run prints and how it exits.
#[derive(Clone, Debug, PartialEq)]
pub struct Emitted {
    pub stdout: String,
    pub stderr: Vec<String>,
    pub exit: u8,
}

impl Emitted {
    fn failed(f: Failure, mut stderr: Vec<String>) -> Self {
        stderr.push(format!("driftgreen: {}: {}", f.class, f.message));
        Emitted {
            stdout: format!("{}\n", f.to_json()),
            stderr,
            exit: f.exit,
        }
    }
}

pub fn run<I, T>(argv: I) -> Emitted
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if e.exit_code() == 0 => {
            return Emitted {
                stdout: e.render().to_string(),
                stderr: Vec::new(),
                exit: 0,
            }
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let message = rendered.lines().next().unwrap_or_default();
            let message = message.strip_prefix("error: ").unwrap_or(message);
            return Emitted::failed(
                Failure::usage(message),
                vec![rendered.trim_end().to_string()],
            );
        }
    };
    let result = commands::configure_threads().and_then(|()| commands::execute(&cli));
    match result {
        Ok(out) => out,
        Err(f) => Emitted::failed(f, Vec::new()),
    }
}
