//! `schreier`: command-line access to Schreier families, the functions `F`
//! and `G`, approximating-sequence policies, basis constants and the
//! verification campaign.

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::settings::Fail;

#[derive(Parser, Debug)]
#[command(name = "schreier", version, about = "Experiments with Schreier families and ordinal trees")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Approximating-sequence policy: `default`, `shift:FILE` or `boost:FILE`.
    /// Falls back to the policy JSON named by SCHREIER_POLICY_FILE.
    #[arg(long, global = true)]
    policy: Option<String>,

    /// Largest window accepted by exhaustive enumeration.
    #[arg(long, global = true, default_value_t = 14)]
    bound: u64,

    /// Values of G above this cap are reported as overflow.
    #[arg(long, global = true, default_value_t = 1_000_000_000_000_000_000)]
    g_cap: u64,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Add per-cell timings to campaign reports.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TableKind {
    #[value(name = "F", alias = "f")]
    F,
    #[value(name = "G", alias = "g")]
    G,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Projection,
    Optimize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum RouteArg {
    Auto,
    Enumeration,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide `SET ∈ S_alpha`.
    Member {
        set: String,
        #[arg(long)]
        alpha: String,
        /// Print a decomposition certificate for members.
        #[arg(long)]
        witness: bool,
    },
    /// Certificate of membership, or exit 1 for non-members.
    Decompose {
        set: String,
        #[arg(long)]
        alpha: String,
    },
    /// All members of S_alpha inside {1..N}.
    Enumerate {
        #[arg(long)]
        alpha: String,
        #[arg(long = "n")]
        n: u64,
        /// Only the members maximal inside the window.
        #[arg(long)]
        maximal: bool,
    },
    /// F or G over a grid of ordinals and a range of n.
    Table {
        #[arg(value_enum)]
        kind: TableKind,
        /// Comma-separated ordinal literals.
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<String>,
        /// `a..b` (inclusive) or a single n.
        #[arg(long = "n")]
        n: String,
    },
    /// The ordinal graph G_n below alpha, as DOT.
    Graph {
        #[arg(long = "n")]
        n: u64,
        #[arg(long)]
        alpha: String,
    },
    /// Least N with F(n,alpha) < F(n,beta) for N < n ≤ scan.
    Separation {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = 50)]
        scan: u64,
    },
    /// Diagnostics for approximating-sequence policies.
    PolicyCheck {
        #[command(subcommand)]
        check: PolicyCheck,
    },
    /// Unconditional and greedy constants of concrete vectors.
    Constants(ConstantsArgs),
    /// Run the verification campaign.
    Verify {
        /// Check names, or `all`.
        names: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum PolicyCheck {
    /// Whether S_{beta_m} ⊆ S_{beta_{m+1}} inside {1..window}.
    Chain {
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = 6)]
        m_max: u64,
        #[arg(long, default_value_t = 10)]
        window: u64,
    },
    /// Intervals {n..max G + 1} missed by every listed family.
    Gaps {
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<String>,
        #[arg(long, default_value_t = 6)]
        n_max: u64,
    },
    /// Eventual domination of a family of growth functions by g.
    Bound {
        /// JSON array of growth-function arrays.
        #[arg(long)]
        family: PathBuf,
        /// JSON growth-function array.
        #[arg(long)]
        g: PathBuf,
    },
    /// Check the approximating-sequence contract at a limit ordinal.
    Validate {
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = 20)]
        m_max: u64,
    },
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    /// `summing`, `sup` or `schreier:ALPHA`.
    #[arg(long)]
    norm: String,

    /// `all` or an ordinal literal for S_alpha.
    #[arg(long)]
    family: Option<String>,

    #[arg(long)]
    window: Option<u64>,

    /// JSON array of vector literals.
    #[arg(long)]
    vectors: Option<PathBuf>,

    /// A vector literal such as `{"1":1,"2":-1}`; repeatable.
    #[arg(long = "vector")]
    vector: Vec<String>,

    /// Greedy constant of order M instead of the unconditional constant.
    #[arg(long, value_name = "M")]
    greedy: Option<u64>,

    #[arg(long, value_enum)]
    mode: Option<ModeArg>,

    /// Allow |A| ≤ m in the greedy denominator.
    #[arg(long)]
    non_strict: bool,

    /// Exact rational arithmetic.
    #[arg(long)]
    exact: bool,

    #[arg(long, value_enum)]
    route: Option<RouteArg>,

    /// Growth table over the standard witness vectors.
    #[arg(long)]
    growth: bool,

    #[arg(long, value_delimiter = ',')]
    alphas: Vec<String>,

    #[arg(long, value_delimiter = ',')]
    ns: Vec<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Deep ordinals recurse deeply; give the work a large stack.
    let worker = std::thread::Builder::new()
        .name("schreier".into())
        .stack_size(512 << 20)
        .spawn(move || commands::run(cli));
    let result = match worker {
        Ok(handle) => handle.join().unwrap_or_else(|_| Err(Fail::internal("worker thread panicked"))),
        Err(e) => Err(Fail::internal(format!("cannot start worker thread: {e}"))),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(fail) => {
            eprintln!("error: {}", fail.message);
            ExitCode::from(fail.code)
        }
    }
}
