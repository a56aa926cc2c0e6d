mod commands;
mod config;
mod error;
mod parse;
mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "polymod", version, about = "Hyperbolic polyhedra from weighted points on the circle")]
struct Cli {
    /// JSON config file (default: $POLYMOD_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shape of the polyhedron of one weight vector and label
    Forward(ForwardArgs),
    /// Weight vector from the shapes seen along the two standard labels
    Invert(InvertArgs),
    /// Reports on the glued complex
    Complex(ComplexArgs),
    /// Run verification suites
    Verify(VerifyArgs),
    /// Forward map over a CSV file of weight vectors
    Sweep(SweepArgs),
}

#[derive(Args)]
pub struct ForwardArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated angles, or `equal`
    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,
    #[arg(long)]
    pub label: String,
    #[arg(long)]
    pub tol_ideal: Option<f64>,
}

#[derive(Args)]
pub struct InvertArgs {
    #[arg(long)]
    pub n: usize,
    /// `P,Q` or `P,Q,R` along ⟨12345⟩ / ⟨123456⟩
    #[arg(long)]
    pub shape1: String,
    /// `P,Q` or `P,Q,R` along ⟨21435⟩ / ⟨214356⟩
    #[arg(long)]
    pub shape2: String,
}

#[derive(Args)]
pub struct ComplexArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated angles (default: equal weight)
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// euler, cusps, pairings, singular or adjacency
    #[arg(long, default_value = "adjacency")]
    pub report: String,
    /// json or csv
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// roundtrip, orthogonality, signature, crossroute, signrule, complex or all
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// 5 or 6 (default: both)
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub label: String,
    /// Output file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Writes to stdout, ignoring a closed pipe.
pub fn write_stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let config = RunConfig::load(cli.config.as_deref())?;
    config.validate()?;
    match cli.command {
        Command::Forward(a) => commands::forward(&config, &a),
        Command::Invert(a) => commands::invert(&a),
        Command::Complex(a) => commands::complex(&config, &a),
        Command::Verify(a) => commands::verify(&config, &a),
        Command::Sweep(a) => sweep::sweep(&config, &a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}: {}", e.kind, e.message);
            write_stdout(&(polymod::json::to_string(&e.document()).unwrap_or_default() + "\n"));
            ExitCode::from(e.code as u8)
        }
    }
}
