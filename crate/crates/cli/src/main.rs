//! `extdec`: difference operators, tower ladders and the extension decision
//! procedure from the command line. Every invocation prints one JSON report
//! on stdout.

mod commands;
mod report;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use report::{emit, CliError, Run, Verbosity};

#[derive(Parser)]
#[command(name = "extdec", version, about = "Difference operators, tower ladders and extension decisions")]
struct Cli {
    /// Suppress the human-readable summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Write nothing but the JSON report.
    #[arg(long, global = true)]
    json_only: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Difference operators D_{q,l}.
    #[command(subcommand)]
    Diff(DiffCommand),
    /// Tower models.
    #[command(subcommand)]
    Tower(TowerCommand),
    /// Decide an extension instance.
    Decide(DecideArgs),
    /// Generate a random instance file.
    Gen(GenArgs),
}

#[derive(Subcommand)]
enum DiffCommand {
    /// Build D_{p^m, l} for the smallest power l = p^k >= l0.
    Build(BuildArgs),
    /// Check the defining congruence on random algebras and maps.
    Check(CheckArgs),
}

#[derive(Subcommand)]
enum TowerCommand {
    /// Build the action ladder of a tower file and audit it exhaustively.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
pub struct OpArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub l0: Option<u64>,
}

#[derive(Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub op: OpArgs,
    /// Also write the operator file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Operator file; otherwise built from --p, --m, --l0.
    #[arg(long = "op", conflicts_with_all = ["p", "m", "l0"])]
    pub file: Option<PathBuf>,
    #[command(flatten)]
    pub op: OpArgs,
    #[arg(long, default_value_t = 50)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest |S| of the random algebras.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..=64))]
    pub max_s: u64,
    /// Largest |T| of the random algebras.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..=64))]
    pub max_t: u64,
}

#[derive(Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub l0: u64,
    /// Include the full ladder (operators and twist tables) in the report.
    #[arg(long)]
    pub ladder: bool,
}

#[derive(Args)]
pub struct DecideArgs {
    pub file: PathBuf,
    /// Cross-check against exhaustive search (finite GX only).
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub theta: u64,
    #[arg(long, default_value_t = 2)]
    pub max_rank: usize,
    /// Orders of finite summands, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,8")]
    pub summands: Vec<u64>,
    #[arg(long, default_value_t = 0)]
    pub free_rank: usize,
    #[arg(long, default_value_t = 3)]
    pub radius: u64,
    /// Steer the generator towards a YES or NO answer.
    #[arg(long, value_parser = ["yes", "no"])]
    pub hint: Option<String>,
}

fn main() {
    let verbosity_guess = Verbosity {
        quiet: std::env::args().any(|a| a == "--quiet"),
        json_only: std::env::args().any(|a| a == "--json-only"),
    };
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            std::process::exit(report::EXIT_INPUT);
        }
        Err(e) => {
            if !verbosity_guess.json_only {
                let _ = e.print();
            }
            let (report, summary) = Run::new("extdec").finish(Err(CliError::input(e.kind())));
            emit(&report, &summary, Verbosity { quiet: true, json_only: true });
            std::process::exit(report::EXIT_INPUT);
        }
    };
    let verbosity = Verbosity { quiet: cli.quiet, json_only: cli.json_only };
    let (run, outcome) = match &cli.command {
        Command::Diff(DiffCommand::Build(a)) => with_run("diff build", |r| commands::diff_build(r, a)),
        Command::Diff(DiffCommand::Check(a)) => with_run("diff check", |r| commands::diff_check(r, a)),
        Command::Tower(TowerCommand::Verify(a)) => with_run("tower verify", |r| commands::tower_verify(r, a)),
        Command::Decide(a) => with_run("decide", |r| commands::decide(r, a)),
        Command::Gen(a) => with_run("gen", |r| commands::gen(r, a)),
    };
    let (report, summary) = run.finish(outcome);
    emit(&report, &summary, verbosity);
    std::process::exit(report.exit_code);
}

fn with_run(name: &str, f: impl FnOnce(&mut Run) -> Result<(), CliError>) -> (Run, Result<(), CliError>) {
    let mut run = Run::new(name);
    let outcome = f(&mut run);
    (run, outcome)
}
