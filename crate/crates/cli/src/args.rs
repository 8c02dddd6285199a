use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "walk", version, about = "Scattering quantum walk search experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the walk and write per-step rows plus a summary
    Run(RunArgs),
    /// Run the invariant suites and print pass/fail per suite
    Verify(VerifyArgs),
    /// Multi-run coverage statistics for a marked complete subgraph
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Full,
    Reduced,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Number of vertices N
    #[arg(long, conflicts_with = "n_range")]
    pub n: Option<usize>,

    /// Sweep over N as `start:end:step` (end inclusive)
    #[arg(long = "n-range")]
    pub n_range: Option<String>,

    /// Number of marked vertices K (marks 0..K unless --marked-list is given)
    #[arg(long)]
    pub k: Option<usize>,

    /// Explicit marked vertices, comma separated
    #[arg(long = "marked-list", value_delimiter = ',')]
    pub marked_list: Option<Vec<usize>>,

    /// Phase in radians or one of `pi`, `pi/2`, `pi/4`
    #[arg(long, default_value = "pi/2", allow_hyphen_values = true)]
    pub phase: String,

    /// Number of steps, or `auto` for round(pi/(4x))
    #[arg(long, default_value = "auto")]
    pub steps: String,

    #[arg(long, value_enum, default_value_t = Engine::Reduced)]
    pub engine: Engine,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Default,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Perturb the reflection amplitude so that r + t != 1
    ReflectionSum,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Profile::Default)]
    pub profile: Profile,

    /// Deliberately break the step operator (the suites must then fail)
    #[arg(long, value_enum)]
    pub inject_fault: Option<Fault>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StatsMode {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    /// Size K of the marked complete subgraph
    #[arg(long)]
    pub k: usize,

    /// Number of search runs
    #[arg(long)]
    pub runs: usize,

    #[arg(long, value_enum, default_value_t = StatsMode::Exact)]
    pub mode: StatsMode,

    /// Graph size for Monte Carlo mode
    #[arg(long)]
    pub n: Option<usize>,

    /// Monte Carlo trials (each trial is `runs` searches)
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,

    /// Engine used to prepare the post-search state in Monte Carlo mode
    #[arg(long, value_enum, default_value_t = Engine::Reduced)]
    pub engine: Engine,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}
