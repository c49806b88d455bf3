mod model;
mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pamdp_core::numeric::Arith;
use pamdp_core::oracle::DEFAULT_CAP;
use pamdp_core::solver::{Direction, DEFAULT_MAX_ITER};
use thiserror::Error;

use run::{Config, Engine, Grid, Objective};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("{0}: {1}")]
    Model(String, pamdp_core::Error),
    #[error(transparent)]
    Core(#[from] pamdp_core::Error),
    #[error("unsolvable: {0}")]
    Unsolvable(String),
    #[error("engines disagree: {0}")]
    Mismatch(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Unsolvable(_) | CliError::Core(pamdp_core::Error::Unsolvable(_)) => 3,
            CliError::Core(pamdp_core::Error::Timeout) => 4,
            CliError::Mismatch(_) => 5,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pamdp",
    version,
    about = "Symblicit SSP and mean-payoff solver for monotonic MDPs"
)]
struct Cli {
    /// Progress on stderr; repeat for per-iteration statistics.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one model and write a JSON report.
    Solve(SolveArgs),
    /// Solve with both engines and check that they agree exactly.
    Compare(CompareArgs),
    /// Solve a grid of generated models and print a timing table.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ArithArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Min,
    Max,
}

#[derive(Args)]
struct ModelArgs {
    /// Generator spec: monkey:S,P, moats:C,D, random:SEED[,emp].
    #[arg(long, conflicts_with = "input")]
    gen: Option<String>,
    /// Model file in the MSS text format.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Seed for a bare `random` generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "ssp")]
    objective: Objective,
    #[arg(long, value_enum, default_value = "exact")]
    arith: ArithArg,
    /// Optimization direction; ssp only supports min.
    #[arg(long, value_enum, default_value = "min")]
    direction: DirectionArg,
    /// Wall-clock limit in seconds.
    #[arg(long, env = "PAMDP_TIMEOUT")]
    timeout: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Leave wall-clock timings out of the report so runs can be diffed.
    #[arg(long)]
    no_timings: bool,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, default_value = "symblicit")]
    engine: Engine,
    /// Largest state space the explicit engine will enumerate.
    #[arg(long, default_value_t = DEFAULT_CAP as u64)]
    cap: u64,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value_t = DEFAULT_CAP as u64)]
    cap: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Family and parameter ranges, e.g. monkey:1-2,2-3.
    #[arg(long)]
    grid: Grid,
    #[command(flatten)]
    run: RunArgs,
}

fn config(run: &RunArgs, cap: u64, verbose: u8) -> Result<Config, CliError> {
    let timeout = match run.timeout {
        Some(t) if !(t.is_finite() && t > 0.0) => {
            return Err(CliError::Usage(format!("--timeout must be positive, got {t}")))
        }
        t => t.map(Duration::from_secs_f64),
    };
    Ok(Config {
        objective: run.objective,
        arith: match run.arith {
            ArithArg::Exact => Arith::Exact,
            ArithArg::Float => Arith::Float,
        },
        direction: match run.direction {
            DirectionArg::Min => Direction::Minimize,
            DirectionArg::Max => Direction::Maximize,
        },
        timeout,
        max_iter: run.max_iter,
        cap: cap as u128,
        timings: !run.no_timings,
        verbose,
    })
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(p.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => {
            let cfg = config(&args.run, args.cap, cli.verbose)?;
            let (source, mss) = model::load(args.model.gen.as_deref(), args.model.input.as_deref(), args.model.seed)?;
            let m = model::build(mss)?;
            let r = run::solve(&cfg, args.engine, &source, &m)?;
            if cli.verbose >= 1 {
                eprintln!(
                    "{}: value {} after {} iterations",
                    source.describe(),
                    r.value,
                    r.iterations
                );
            }
            emit(args.run.out.as_ref(), &report::to_json(&r))
        }
        Command::Compare(args) => {
            let cfg = config(&args.run, args.cap, cli.verbose)?;
            let (source, mss) = model::load(args.model.gen.as_deref(), args.model.input.as_deref(), args.model.seed)?;
            let m = model::build(mss)?;
            let r = run::compare(&cfg, &source, &m)?;
            if let Some(n) = &r.notice {
                eprintln!("notice: {n}");
            }
            emit(args.run.out.as_ref(), &report::to_json(&r))?;
            match r.first_mismatch {
                Some(m) => Err(CliError::Mismatch(m)),
                None => Ok(()),
            }
        }
        Command::Bench(args) => {
            let cfg = config(&args.run, DEFAULT_CAP as u64, cli.verbose)?;
            let table = run::bench(&cfg, &args.grid)?;
            emit(args.run.out.as_ref(), &table)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
