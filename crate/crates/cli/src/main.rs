//! `evlab`: JSON reports over the evasiveness laboratory.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use report::CliError;

#[derive(Debug, Parser)]
#[command(name = "evlab", version, about = "Decision-tree complexity and evasiveness laboratory")]
pub struct Cli {
    /// Run every sweep on one thread (output is identical either way).
    #[arg(long, global = true)]
    sequential: bool,
    /// Emit JSON (the default; accepted for explicitness).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// D, D₀, D₁, μ, χ, weight-polynomial divisibility, Möbius flags.
    Analyze(FunctionArgs),
    /// Randomized complexity D_R(f, c) by column generation.
    Dr(DrArgs),
    /// Monte Carlo run of the randomized NAND-tree evaluator.
    Simulate(SimulateArgs),
    /// ℓ⁰/ℓ¹ lower bounds for read-once and/or formulas.
    Swbound(SwArgs),
    /// Packing conditions and packers on two graph files.
    Pack(PackArgs),
    /// Exhaustive audits over function families.
    Audit(AuditArgs),
    /// Extremal-graph pipeline (bipartite) or quadratic-bound witness (general).
    Pipeline(PipelineArgs),
    /// NAND recurrence values, worst cases and eigen-analysis.
    Recurrence(RecurrenceArgs),
    /// Runs the jobs of a JSON manifest and aggregates their reports.
    Batch(BatchArgs),
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["formula", "table", "property"])))]
pub struct FunctionArgs {
    /// Boolean formula, e.g. "(x1&x2)|(x3&x4)".
    #[arg(long)]
    formula: Option<String>,
    /// Function file {"n": .., "bits_hex": ..}.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Catalog graph property; requires --size.
    #[arg(long, requires = "size")]
    property: Option<String>,
    /// `v` for general properties, `nxn` for bipartite ones.
    #[arg(long)]
    size: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct DrArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// Cost file {"c0": ["p/q", ..], "c1": [..]}; unit costs when absent.
    #[arg(long)]
    costs: Option<PathBuf>,
    #[arg(long, default_value = "0")]
    tol: String,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Depth of the NAND tree (2^k leaves).
    #[arg(long)]
    k: usize,
    /// Input bits, x1 first (default: the exact worst case, k ≤ 4).
    #[arg(long)]
    input: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("shape").required(true).args(["formula", "alternating"])))]
pub struct SwArgs {
    #[arg(long)]
    formula: Option<String>,
    /// Bounds for the alternating trees of depth 0..=K against the recurrence.
    #[arg(long, value_name = "K")]
    alternating: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PackMethod {
    Swaps,
    Exhaustive,
    Matching,
    Conditions,
}

#[derive(Debug, Clone, Args)]
pub struct PackArgs {
    #[arg(long)]
    g1: PathBuf,
    #[arg(long)]
    g2: PathBuf,
    #[arg(long, value_enum, default_value = "swaps")]
    method: PackMethod,
    /// Required by the randomized methods.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 20)]
    max_tries: usize,
    #[arg(long, default_value_t = 100.0)]
    avg_divisor: f64,
    #[arg(long, default_value_t = 1000.0)]
    w_divisor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditKind {
    Monotone,
    Cyclic,
    CertificateProduct,
    IsolatedParity,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    #[arg(long, value_enum, default_value = "monotone")]
    kind: AuditKind,
    /// Variable count (vertex count for isolated-parity).
    #[arg(long)]
    n: usize,
    /// Sample this many functions instead of all (certificate-product).
    #[arg(long, requires = "seed")]
    sample: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Omit per-function records.
    #[arg(long)]
    summary_only: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    property: String,
    #[arg(long)]
    size: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecurrenceFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RecurrenceArgs {
    #[arg(long, default_value_t = 30)]
    k: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: RecurrenceFormat,
}

#[derive(Debug, Clone, Args)]
pub struct BatchArgs {
    /// {"jobs": [{"args": ["analyze", "--formula", "x1&x2"]}, ..]}
    #[arg(long)]
    manifest: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let name = commands::command_name(&cli.command);
    match commands::run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("evlab {name}: {e}");
            if let CliError::Domain { .. } = e {
                println!("{}", report::error_report(name, &e));
            }
            ExitCode::from(e.exit_code())
        }
    }
}
