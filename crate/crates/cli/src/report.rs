use std::io::{IsTerminal, Write};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

/// Errors that stop a command before it produces a verdict.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Refused(String),
}

impl CliError {
    pub fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Serialize)]
pub struct Counters {
    pub checks: u64,
    pub duration_ms: f64,
}

/// The single JSON document written to stdout by every invocation.
#[derive(Serialize)]
pub struct RunReport {
    pub format_version: &'static str,
    pub command: String,
    pub status: &'static str,
    pub exit_code: i32,
    pub input_digest: Option<String>,
    pub seed: Option<u64>,
    pub result: Value,
    pub counters: Counters,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

/// Mutable state a command fills in while it runs.
pub struct Run {
    pub command: String,
    pub digest: Option<String>,
    pub seed: Option<u64>,
    pub result: Value,
    pub checks: u64,
    pub warnings: Vec<String>,
    pub summary: Vec<String>,
    pub failed: bool,
    started: Instant,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl Run {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            digest: None,
            seed: None,
            result: Value::Null,
            checks: 0,
            warnings: Vec::new(),
            summary: Vec::new(),
            failed: false,
            started: Instant::now(),
        }
    }

    pub fn digest(&mut self, bytes: &[u8]) {
        self.digest = Some(sha256_hex(bytes));
    }

    pub fn say(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    pub fn warn(&mut self, line: impl Into<String>) {
        self.warnings.push(line.into());
    }

    pub fn finish(self, outcome: Result<(), CliError>) -> (RunReport, Vec<String>) {
        let (status, exit_code, error) = match outcome {
            Ok(()) if self.failed => ("failure", EXIT_FAILURE, None),
            Ok(()) => ("ok", EXIT_OK, None),
            Err(CliError::Input(msg)) => ("input_error", EXIT_INPUT, Some(msg)),
            Err(CliError::Refused(msg)) => ("refused", EXIT_REFUSED, Some(msg)),
        };
        let report = RunReport {
            format_version: extcore::format::FORMAT_VERSION,
            command: self.command,
            status,
            exit_code,
            input_digest: self.digest,
            seed: self.seed,
            result: self.result,
            counters: Counters { checks: self.checks, duration_ms: self.started.elapsed().as_secs_f64() * 1e3 },
            warnings: self.warnings,
            error,
        };
        (report, self.summary)
    }
}

#[derive(Clone, Copy)]
pub struct Verbosity {
    pub quiet: bool,
    pub json_only: bool,
}

fn paint(text: &str, code: &str) -> String {
    let plain = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty()) || !std::io::stderr().is_terminal();
    if plain {
        text.to_string()
    } else {
        format!("\x1b[{code}m{text}\x1b[0m")
    }
}

/// Writes the report to stdout and the human summary to stderr.
pub fn emit(report: &RunReport, summary: &[String], verbosity: Verbosity) {
    let mut err = std::io::stderr().lock();
    if !verbosity.json_only {
        for w in &report.warnings {
            let _ = writeln!(err, "{} {w}", paint("warning:", "33"));
        }
        if let Some(e) = &report.error {
            let _ = writeln!(err, "{} {e}", paint("error:", "31"));
        }
        if !verbosity.quiet {
            for line in summary {
                let _ = writeln!(err, "{line}");
            }
            let status = match report.status {
                "ok" => paint("ok", "32"),
                other => paint(other, "31"),
            };
            let _ = writeln!(
                err,
                "{}: {status} ({} checks, {:.1} ms)",
                report.command, report.counters.checks, report.counters.duration_ms
            );
        }
    }
    let mut out = std::io::stdout().lock();
    let _ = serde_json::to_writer_pretty(&mut out, report);
    let _ = writeln!(out);
}
