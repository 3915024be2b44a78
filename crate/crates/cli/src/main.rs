use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moonlight_core::ingest::DEFAULT_MAX_SIZE;
use moonlight_core::{WeightScheme, DEFAULT_MAP_SIZE};

mod commands;
mod exit;

use exit::Failure;

#[derive(Parser)]
#[command(
    name = "moonlight",
    version,
    about = "Coverage-preserving fuzzing corpus distillation"
)]
struct Cli {
    /// Log progress to stderr (repeat for more detail)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deduplicate a raw corpus directory and write a seed manifest
    Prep(PrepArgs),
    /// Convert afl-showmap text traces to binary traces
    Trace(TraceArgs),
    /// Select a coverage-preserving subset of the corpus
    Distill(DistillArgs),
    /// Check that a selection keeps the corpus coverage
    Verify(VerifyArgs),
    /// Print file count and byte total of a corpus or selection
    Stats(StatsArgs),
    /// Run several distillers and tabulate the results
    Compare(CompareArgs),
}

#[derive(Args)]
struct PrepArgs {
    /// Corpus directory, searched recursively
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Files larger than this many bytes are dropped
    #[arg(long, default_value_t = DEFAULT_MAX_SIZE, value_parser = clap::value_parser!(u64).range(1..))]
    max_size: u64,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Directory of `<id>.showmap` files
    #[arg(long)]
    showmap_dir: PathBuf,
    /// Output directory for `<id>.mlbv` files
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAP_SIZE, value_parser = positive)]
    map_size: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Moonlight,
    Minset,
    Cmin,
    Random,
    Exact,
    Full,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Moonlight => "moonlight",
            Algo::Minset => "minset",
            Algo::Cmin => "cmin",
            Algo::Random => "random",
            Algo::Exact => "exact",
            Algo::Full => "full",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Weight {
    None,
    Size,
    Time,
}

impl From<Weight> for WeightScheme {
    fn from(w: Weight) -> Self {
        match w {
            Weight::None => WeightScheme::Unweighted,
            Weight::Size => WeightScheme::Size,
            Weight::Time => WeightScheme::Time,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Options shared by commands that run distillers.
#[derive(Args)]
struct RunOpts {
    #[arg(long, value_enum)]
    weight: Weight,
    #[arg(long)]
    manifest: PathBuf,
    /// Directory of `<id>.mlbv` or `<id>.showmap` traces
    #[arg(long)]
    traces: PathBuf,
    /// Sample size for the random distiller
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: Option<u64>,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Map size assumed for showmap traces
    #[arg(long, default_value_t = DEFAULT_MAP_SIZE, value_parser = positive)]
    map_size: usize,
}

#[derive(Args)]
struct DistillArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[command(flatten)]
    run: RunOpts,
    /// Selected ids, one per line
    #[arg(long)]
    out: PathBuf,
    /// Copy the selected seed files into this directory
    #[arg(long)]
    copy_to: Option<PathBuf>,
    /// Write a JSON report row for the run
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    selection: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    traces: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAP_SIZE, value_parser = positive)]
    map_size: usize,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    selection: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Comma-separated distillers to run, in table order
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "moonlight,minset,cmin,full"
    )]
    algos: Vec<Algo>,
    #[command(flatten)]
    run: RunOpts,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Defaults to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    let result = match cli.command {
        Command::Prep(a) => commands::prep(a),
        Command::Trace(a) => commands::trace(a),
        Command::Distill(a) => commands::distill(a),
        Command::Verify(a) => commands::verify(a),
        Command::Stats(a) => commands::stats(a),
        Command::Compare(a) => commands::compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("moonlight: {message}");
            ExitCode::from(code)
        }
    }
}
