//! Command-line frontend for `cnp-core`.
//!
//! Every command produces an [`Outcome`]: an exit code plus a JSON report.
//! Reports are deterministic for identical inputs; the only run-dependent
//! value is `wall_time_ms` in the [`RunReport`] envelope.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub mod args;
pub mod commands;
pub mod gallery;
pub mod input;

use args::{Cli, Command};

pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {what}: {source}")]
    Json {
        what: &'static str,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid suite:\n  {}", .0.join("\n  "))]
    Suite(Vec<String>),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Descriptor(#[from] cnp_core::descriptor::DescriptorError),
    #[error(transparent)]
    Family(#[from] cnp_core::families::FamilyError),
    #[error(transparent)]
    Dbr(#[from] cnp_core::dbr::DbrError),
    #[error(transparent)]
    Cnp(#[from] cnp_core::cnp::CnpError),
    #[error(transparent)]
    Pick(#[from] cnp_core::pickinterp::PickError),
    #[error(transparent)]
    Linalg(#[from] cnp_core::linalg::LinalgError),
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub code: i32,
    pub report: Value,
    pub inputs: Value,
    /// Print the full [`RunReport`] rather than the bare report.
    pub enveloped: bool,
    /// Extra lines for stderr.
    pub diagnostics: Vec<String>,
}

impl Outcome {
    pub fn new(command: &'static str, code: i32, report: Value, inputs: Value) -> Self {
        Outcome {
            command,
            code,
            report,
            inputs,
            enveloped: false,
            diagnostics: Vec::new(),
        }
    }

    pub fn run_report(&self, wall_time_ms: u64) -> RunReport {
        RunReport {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            inputs_digest: digest(&self.inputs),
            exit_code: self.code,
            results: self.report.clone(),
            wall_time_ms,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// SHA-256 of the canonical JSON of every input (file contents included).
    pub inputs_digest: String,
    pub exit_code: i32,
    pub results: Value,
    pub wall_time_ms: u64,
}

pub fn digest(inputs: &Value) -> String {
    let text = serde_json::to_string(inputs).expect("json values serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Cnp(a) => commands::cmd_cnp(a, cli.order),
        Command::Hbcheck(a) => commands::cmd_hbcheck(a, cli.order),
        Command::Gallery(a) => gallery::cmd_gallery(a.suite.as_deref(), cli.order),
        Command::Pick(a) => commands::cmd_pick(a, cli.order),
    }
}
