//! Command-line front end: design, bounds, baselines and plan verification.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divcode::pricing::CodingMode;

#[derive(Parser, Debug)]
#[command(name = "divcode", version, about = "Diversity-coding protection design by column generation")]
struct Cli {
    /// Print machine-readable JSON on stdout instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Design coding groups for every destination with inbound demand.
    Design(DesignArgs),
    /// Cut-based lower bound on the capacity of any coded design.
    Lowerbound(LowerboundArgs),
    /// Re-check every placed column of a plan under all single-span failures.
    Verify(VerifyArgs),
    /// Draw a gravity-model traffic matrix.
    GenTraffic(GenTrafficArgs),
    /// Exhaustive enumerate-then-place optimum for small networks.
    Oracle(OracleArgs),
    /// Dedicated 1+1 protection baseline.
    Aps(InstanceArgs),
    /// Print a bundled topology or its demo traffic.
    Fixture(FixtureArgs),
}

#[derive(Args, Debug, Clone)]
struct InstanceArgs {
    #[arg(long)]
    topology: PathBuf,
    /// Traffic CSV with `source,destination,units` rows.
    #[arg(long)]
    traffic: PathBuf,
    /// Restrict the run to one destination.
    #[arg(long)]
    dest: Option<String>,
    /// Directory for the report files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Wall-clock limit per destination, in seconds.
    #[arg(long, env = "DIVCODE_TIME_LIMIT")]
    time_limit: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Coding {
    Sdc,
    Nsdc,
    Cdc,
}

impl From<Coding> for CodingMode {
    fn from(c: Coding) -> Self {
        match c {
            Coding::Sdc => CodingMode::Sdc,
            Coding::Nsdc => CodingMode::Nsdc,
            Coding::Cdc => CodingMode::Cdc,
        }
    }
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "sdc")]
    coding: Coding,
    /// Run SDC, NSDC and CDC in turn, each starting from the previous pool.
    #[arg(long, conflicts_with = "coding")]
    sweep: bool,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Relative reduced-cost threshold for accepting a column.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Recorded in the plan; the solver itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write each destination's final pricing model in LP format.
    #[arg(long)]
    dump_models: bool,
}

#[derive(Args, Debug)]
struct LowerboundArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = divcode::lowerbound::DEFAULT_MAX_CUT)]
    max_cut_size: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    topology: PathBuf,
    #[arg(long)]
    plan: PathBuf,
}

#[derive(Args, Debug)]
struct GenTrafficArgs {
    /// Node weights CSV with `node,weight` rows.
    #[arg(long, required_unless_present = "topology")]
    weights: Option<PathBuf>,
    /// Use equal weights on every node of this topology instead.
    #[arg(long, conflicts_with = "weights")]
    topology: Option<PathBuf>,
    #[arg(long)]
    demands: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Multiply every entry, e.g. 10 to split each demand into ten units.
    #[arg(long, default_value_t = 1)]
    split: u64,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = divcode::baselines::ORACLE_MAX_NODES)]
    max_nodes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Fixture {
    Example1,
    Diamond,
    Butterfly,
    SixNode,
    Nsfnet14,
}

#[derive(Args, Debug)]
struct FixtureArgs {
    #[arg(value_enum)]
    name: Fixture,
    /// Print the demo traffic CSV instead of the topology.
    #[arg(long)]
    traffic: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let json = cli.json;
    let result = match cli.command {
        Command::Design(a) => commands::design(a, json),
        Command::Lowerbound(a) => commands::lowerbound(a, json),
        Command::Verify(a) => commands::verify(a, json),
        Command::GenTraffic(a) => commands::gen_traffic(a),
        Command::Oracle(a) => commands::oracle(a, json),
        Command::Aps(a) => commands::aps(a, json),
        Command::Fixture(a) => commands::fixture(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let doc = serde_json::json!({
                "error": format!("{e:#}"),
                "exit_code": 1,
            });
            eprintln!("{doc}");
            ExitCode::from(1)
        }
    }
}
