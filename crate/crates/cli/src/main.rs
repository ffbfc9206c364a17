//! `threshold-lab`: run threshold and social-choice experiments from the shell.
//!
//! Exit status is 0 on success, 1 when the library rejects the request (an
//! error object is printed to stderr as JSON) and 2 on usage errors or
//! unreadable input files.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use threshold_lab::threshold::{DEFAULT_GRID, DEFAULT_SAMPLES};

use crate::output::CliError;

#[derive(Parser)]
#[command(name = "threshold-lab", version, about = "Sharp thresholds of monotone functions on [q]^n, and plurality social choice")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo budget (draws per estimate, or trials).
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Points on the t grid.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, global = true, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FamilyName {
    Plurality,
    RecursivePlurality,
    GraphProperty,
    AntisymMajority,
    Dictator,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum TieBreakArg {
    FirstOccurrence,
    SmallestIndex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum PropertyArg {
    MostPopularColor,
    MaxCliqueColor,
    MinIndependentSetColor,
}

/// A function from a file or a built-in family.
#[derive(Args, Clone)]
pub struct FunctionArgs {
    /// Function file (table or oracle JSON).
    #[arg(long, conflicts_with = "family")]
    pub function: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub arity: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub vertices: Option<usize>,
    #[arg(long, value_enum)]
    pub property: Option<PropertyArg>,
    #[arg(long)]
    pub coordinate: Option<usize>,
    #[arg(long, value_enum, default_value_t = TieBreakArg::FirstOccurrence)]
    pub tie_break: TieBreakArg,
}

/// A product measure; uniform when neither flag is given.
#[derive(Args, Clone)]
pub struct MeasureArgs {
    /// Measure file `{"q":..,"atoms":[..]}`.
    #[arg(long, conflicts_with = "atoms")]
    pub measure: Option<PathBuf>,
    /// Comma-separated atoms.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub atoms: Option<Vec<f64>>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    Full,
    Cyclic,
    /// Vertex relabelings acting on edges (graph-property families).
    Graph,
    None,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    Hypercontractivity,
    Level,
    Talagrand,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaArg {
    Safe,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Print a family as a function file.
    Family {
        #[command(flatten)]
        function: FunctionArgs,
        /// Emit the full table instead of the oracle form.
        #[arg(long)]
        tabulate: bool,
    },
    /// Monotone, fair, symmetric and 0-monotone verdicts with witnesses.
    Check {
        #[command(flatten)]
        function: FunctionArgs,
        /// Symmetry group; defaults to the vertex action for graph properties, else full.
        #[arg(long, value_enum)]
        group: Option<GroupArg>,
    },
    /// Efron-Stein components.
    Decompose {
        #[command(flatten)]
        function: FunctionArgs,
        #[command(flatten)]
        measure: MeasureArgs,
    },
    /// Influences and norms of the coordinate differences.
    Influences {
        #[command(flatten)]
        function: FunctionArgs,
        #[command(flatten)]
        measure: MeasureArgs,
    },
    /// Check an inequality over a corpus of files and/or random functions.
    Verify {
        #[arg(long, value_enum)]
        kind: VerifyKind,
        /// Function files (repeatable).
        #[arg(long = "function")]
        functions: Vec<PathBuf>,
        /// Number of random real functions to add.
        #[arg(long, default_value_t = 0)]
        random: usize,
        /// Alphabet size of the random functions.
        #[arg(long, default_value_t = 2)]
        q: usize,
        /// Arity of the random functions.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Level for `level` (all levels when omitted).
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, value_enum, default_value_t = SigmaArg::Safe)]
        sigma: SigmaArg,
        /// Fixed measure; random positive measures otherwise.
        #[command(flatten)]
        measure: MeasureArgs,
    },
    /// G(t) = P[f = a] along t delta_a + (1 - t) mu'.
    Scan(PathArgs),
    /// The eps-to-(1 - eps) window of G.
    Window(PathArgs),
    /// Simplex measure of the critical region.
    Sweep {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, default_value_t = 0)]
        anchor: u32,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        /// Draws per measure in Monte Carlo mode.
        #[arg(long, default_value_t = 1000)]
        inner_samples: usize,
    },
    /// Probability that a biased electorate picks its favourite.
    Jury {
        #[command(flatten)]
        function: FunctionArgs,
        #[command(flatten)]
        measure: MeasureArgs,
        #[arg(long, default_value_t = 0)]
        symbol: u32,
    },
    /// Profile whose majority relation is a given tournament.
    Mcgarvey {
        /// Tournament file `{"m":..,"relation":[[winner,loser],..]}`.
        #[arg(long, conflicts_with = "random")]
        tournament: Option<PathBuf>,
        /// Use a random tournament on this many alternatives.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Profile whose plurality choice function is a given one.
    Saari {
        #[arg(long)]
        choice: PathBuf,
        #[arg(long, default_value_t = 200)]
        budget: u64,
    },
    /// Agreement of sampled electorates with a realized choice function.
    Indeterminacy {
        #[arg(long)]
        choice: PathBuf,
        /// Realizing profile; searched for when omitted.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        budget: u64,
        /// Voters per sampled electorate.
        #[arg(long)]
        voters: usize,
    },
}

#[derive(Args, Clone)]
pub struct PathArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// The symbol `a` whose atom grows.
    #[arg(long, default_value_t = 0)]
    pub anchor: u32,
    /// Base measure `mu'` (must vanish at the anchor); uniform on the other symbols by default.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub base: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("THRESHOLD_LAB_THREADS") else { return Ok(()) };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("THRESHOLD_LAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let common = &cli.common;
    match cli.command {
        Command::Family { function, tabulate } => commands::family(common, &function, tabulate),
        Command::Check { function, group } => commands::check(common, &function, group),
        Command::Decompose { function, measure } => commands::decompose(common, &function, &measure),
        Command::Influences { function, measure } => commands::influences(common, &function, &measure),
        Command::Verify { kind, functions, random, q, n, level, sigma, measure } => {
            commands::verify(common, kind, &functions, random, q, n, level, sigma, &measure)
        }
        Command::Scan(path) => commands::scan(common, &path),
        Command::Window(path) => commands::window(common, &path),
        Command::Sweep { function, anchor, method, inner_samples } => {
            commands::sweep(common, &function, anchor, method, inner_samples)
        }
        Command::Jury { function, measure, symbol } => commands::jury(common, &function, &measure, symbol),
        Command::Mcgarvey { tournament, random } => commands::mcgarvey(common, tournament.as_deref(), random),
        Command::Saari { choice, budget } => commands::saari(common, &choice, budget),
        Command::Indeterminacy { choice, profile, budget, voters } => {
            commands::indeterminacy(common, &choice, profile.as_deref(), budget, voters)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
