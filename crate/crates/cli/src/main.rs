//! `photonion` command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 unsupported register length,
//! 3 pRNG underrun, 4 attack budget exceeded, 5 infeasible design point.

mod commands;
mod design_config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use photonion::Error;

#[derive(Parser, Debug)]
#[command(
    name = "photonion",
    version,
    about = "Parallel-LFSR layered encryption toolkit"
)]
struct Cli {
    /// Print diagnostics to stderr; repeat for more.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List primitive polynomials of degree n, or count them.
    Polys {
        n: u32,
        #[arg(long)]
        count_only: bool,
    },
    /// Generate one anonymization key and its schedule.
    Keygen(KeygenArgs),
    /// Apply layer keys to a message, innermost (last listed) first.
    Encrypt(LayerArgs),
    /// Peel layers off a flow in the listed order.
    Decrypt(LayerArgs),
    /// Send a message through a circuit and print the per-hop trace.
    Circuit(CircuitArgs),
    /// Exhaustive schedule search against an intercepted flow.
    Attack(AttackArgs),
    /// Evaluate a single design point.
    Design(DesignArgs),
    /// Evaluate a grid of design points as CSV.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct KeygenArgs {
    /// Key-generator config file.
    config: PathBuf,
    /// pRNG initialization token; overrides the file.
    #[arg(long, conflicts_with = "inject")]
    ini: Option<String>,
    /// Explicit pRNG output bits; overrides the file.
    #[arg(long)]
    inject: Option<String>,
    /// Key file; stdout when absent.
    #[arg(long)]
    key_out: Option<PathBuf>,
    /// Schedule table; stdout when absent.
    #[arg(long)]
    schedule_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LayerArgs {
    /// Bit-string file holding the flow.
    input: PathBuf,
    /// Key files, outermost layer first.
    #[arg(short, long = "key", required = true)]
    keys: Vec<PathBuf>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CircuitArgs {
    circuit: PathBuf,
    /// Message bit-string file.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    message: Option<PathBuf>,
    /// Use a random message of this many bits.
    #[arg(long)]
    random: Option<usize>,
    /// Seed for `--random`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AttackArgs {
    scenario: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    /// Skip schedules that contain an all-zero seed.
    #[arg(long)]
    no_degenerate: bool,
    /// Write `NA` for wall-clock time so reruns are byte-identical.
    #[arg(long)]
    reproducible: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct DesignFlags {
    /// Design config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Container length in Gbit.
    #[arg(long)]
    container_gbit: Option<f64>,
    /// Read Gbit as 10^9 bits instead of 2^30.
    #[arg(long)]
    decimal: bool,
    /// Line rate in bit/s.
    #[arg(long)]
    rate: Option<f64>,
    /// LFSR output rate in bit/s.
    #[arg(long)]
    lfsr_rate: Option<f64>,
    /// Seconds per decoding try.
    #[arg(long)]
    tau: Option<f64>,
    /// Target attack time as 2^bits tries.
    #[arg(long)]
    target_bits: Option<u32>,
    /// Fix the reset count instead of deriving it.
    #[arg(long)]
    resets: Option<u64>,
    /// Layers an attacker must strip.
    #[arg(long)]
    layers: Option<usize>,
    /// Key-holding nodes on the circuit.
    #[arg(long)]
    circuit_len: Option<usize>,
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    p: Option<u64>,
    #[command(flatten)]
    flags: DesignFlags,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Register lengths: `a:b:step`, `a:b`, or a comma list.
    #[arg(long)]
    n: Option<String>,
    /// LFSR counts: comma list or range.
    #[arg(long)]
    p: Option<String>,
    /// The n = 5..20 step 5, P = 2,3,4 grid with the default calibration.
    #[arg(long)]
    table1: bool,
    /// Print computed AES crossovers against the claimed ones instead.
    #[arg(long)]
    crossovers: bool,
    #[command(flatten)]
    flags: DesignFlags,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::UnsupportedDegree { .. }) => 2,
        Some(Error::Underrun { .. }) => 3,
        Some(Error::BudgetExceeded { .. }) => 4,
        Some(Error::Infeasible(_)) => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Polys { n, count_only } => commands::polys(n, count_only),
        Command::Keygen(a) => commands::keygen(a, cli.verbose),
        Command::Encrypt(a) => commands::encrypt(a),
        Command::Decrypt(a) => commands::decrypt(a),
        Command::Circuit(a) => commands::circuit(a),
        Command::Attack(a) => commands::attack(a, cli.verbose),
        Command::Design(a) => commands::design(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
