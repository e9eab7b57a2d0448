//! `shatter` — set-system and edge-coloring combinatorics from the shell.
//!
//! Every subcommand prints one deterministic report (JSON by default) on
//! stdout. Exit codes: 0 success, 2 validation error, 3 work budget
//! exhausted, 4 integrity failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use shatter_cli::{ArtifactKind, Command, Format};

#[derive(Parser)]
#[command(
    name = "shatter",
    version,
    about = "Set systems, VC dimension, low-crossing partitions, and monochromatic clique search",
    propagate_version = true
)]
struct Cli {
    /// Report format printed to stdout.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Shape statistics and exact (dual) VC dimension of a set system file.
    Analyze(AnalyzeArgs),
    /// Write a named coloring construction to a file.
    Construct(ConstructArgs),
    /// Write a seeded random set system or coloring to a file.
    Random(RandomArgs),
    /// Greedy δ-separated packing of a system's ground set.
    Pack(PackArgs),
    /// Low-crossing partition of a system's ground set, re-verified.
    Partition(PartitionArgs),
    /// Monochromatic clique search on a coloring file.
    Search(SearchArgs),
    /// Level-by-level partition-and-prune trace of a coloring.
    Trace(TraceArgs),
    /// Small-case Ramsey number with stored witness and confirmation.
    RamseySmall(RamseyArgs),
    /// Re-check properties of a coloring file; violations exit nonzero.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Set system file (`.json` for JSON, text format otherwise).
    input: PathBuf,
    /// Compute the exact VC dimension.
    #[arg(long)]
    vc: bool,
    /// Compute the exact dual VC dimension.
    #[arg(long)]
    dual_vc: bool,
    /// Work budget: number of shattering tests allowed.
    #[arg(long, default_value_t = shatter::DEFAULT_SHATTER_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct ConstructArgs {
    /// The recursive lower-bound coloring of K_{2^m} with m colors.
    #[arg(long)]
    lower_bound: bool,
    /// Number of colors.
    #[arg(short, long)]
    m: usize,
    /// Destination file (`.json` for JSON, text format otherwise).
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct RandomArgs {
    /// What to generate.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Ground size (system) or vertex count (coloring).
    #[arg(short, long)]
    n: usize,
    /// Number of colors (coloring only).
    #[arg(short, long, default_value_t = 2)]
    m: usize,
    /// Number of members (system only).
    #[arg(long, default_value_t = 16)]
    count: usize,
    /// Element membership probability (system only).
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// RNG seed; echoed in the report.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination file (`.json` for JSON, text format otherwise).
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum KindArg {
    System,
    Coloring,
}

#[derive(Args)]
struct PackArgs {
    /// Set system file.
    input: PathBuf,
    /// Minimum crossing number between selected points.
    #[arg(long)]
    delta: usize,
}

#[derive(Args)]
struct PartitionArgs {
    /// Set system file.
    input: PathBuf,
    /// Separation parameter for the underlying packing.
    #[arg(long)]
    delta: usize,
    /// Dual VC dimension bound used in the size and count caps.
    #[arg(short, long)]
    d: usize,
}

#[derive(Args)]
struct SearchArgs {
    /// Coloring file.
    input: PathBuf,
    /// Per-color clique targets for greedy descent (e.g. `3,3,4`).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    targets: Option<Vec<usize>>,
    /// Colors each vertex may compete in per descent round (default: all).
    #[arg(long)]
    menu_bound: Option<usize>,
    /// Exhaustive search for a monochromatic clique of exactly this size.
    #[arg(long)]
    exact: Option<usize>,
    /// Restrict the exhaustive search to one color.
    #[arg(long)]
    color: Option<usize>,
    /// Node budget for the exhaustive search.
    #[arg(long, default_value_t = shatter::coloring::DEFAULT_CLIQUE_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct TraceArgs {
    /// Coloring file.
    input: PathBuf,
    /// Dual VC dimension bound; computed by the exact oracle when omitted.
    #[arg(short, long)]
    d: Option<usize>,
    /// Per-color clique targets (e.g. `3,3`).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    targets: Vec<usize>,
    /// Strictly descending level budgets (e.g. `8,3`).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    budgets: Vec<usize>,
    /// Work budget for the dual VC oracle when `-d` is omitted.
    #[arg(long, default_value_t = shatter::DEFAULT_SHATTER_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct RamseyArgs {
    /// Monochromatic clique size to force.
    #[arg(short, long)]
    k: usize,
    /// Number of colors.
    #[arg(short, long)]
    m: usize,
    /// Largest vertex count scanned before settling for a bracket.
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    /// Seed for the witness-hunting local search; echoed in the report.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Coloring file.
    input: PathBuf,
    /// Check that no color contains a triangle (exhaustive).
    #[arg(long)]
    triangle_free: bool,
    /// Check a clique certificate stored as JSON.
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Node budget for the triangle scan.
    #[arg(long, default_value_t = shatter::coloring::DEFAULT_CLIQUE_BUDGET)]
    budget: u64,
}

fn to_command(cmd: Cmd) -> Command {
    match cmd {
        Cmd::Analyze(a) => Command::Analyze {
            input: a.input,
            vc: a.vc,
            dual_vc: a.dual_vc,
            budget: a.budget,
        },
        Cmd::Construct(a) => Command::Construct {
            lower_bound: a.lower_bound,
            m: a.m,
            output: a.output,
        },
        Cmd::Random(a) => Command::Random {
            kind: match a.kind {
                KindArg::System => ArtifactKind::System,
                KindArg::Coloring => ArtifactKind::Coloring,
            },
            n: a.n,
            m: a.m,
            count: a.count,
            density: a.density,
            seed: a.seed,
            output: a.output,
        },
        Cmd::Pack(a) => Command::Pack {
            input: a.input,
            delta: a.delta,
        },
        Cmd::Partition(a) => Command::Partition {
            input: a.input,
            delta: a.delta,
            d: a.d,
        },
        Cmd::Search(a) => Command::Search {
            input: a.input,
            targets: a.targets,
            menu_bound: a.menu_bound,
            exact: a.exact,
            color: a.color,
            budget: a.budget,
        },
        Cmd::Trace(a) => Command::Trace {
            input: a.input,
            d: a.d,
            targets: a.targets,
            budgets: a.budgets,
            budget: a.budget,
        },
        Cmd::RamseySmall(a) => Command::RamseySmall {
            k: a.k,
            m: a.m,
            n_max: a.n_max,
            seed: a.seed,
        },
        Cmd::Verify(a) => Command::Verify {
            input: a.input,
            triangle_free: a.triangle_free,
            certificate: a.certificate,
            budget: a.budget,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = to_command(cli.command);
    match shatter_cli::run(&command) {
        Ok(report) => {
            print!("{}", shatter_cli::render(&report, cli.format));
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
