//! Command-line driver for the DG advection solver.
//!
//! Three subcommands: `run` executes one convergence experiment and prints
//! the error table, `sweep` covers all built-in problems and initialization
//! methods at one degree, and `check` runs the acceptance suite.  Exit
//! codes: 0 on success, 1 on usage or runtime errors, 2 when the acceptance
//! suite fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use dg1d::harness::{run_experiment, sweep, ExperimentConfig};
use dg1d::{acceptance, Error};

#[derive(Parser)]
#[command(
    name = "dg1d",
    about = "Discontinuous Galerkin solver for 1-D linear advection with superconvergence diagnostics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one convergence experiment and print its error table.
    Run(RunArgs),
    /// Run every built-in problem with every initialization method.
    Sweep(SweepArgs),
    /// Run the acceptance suite; exits 2 if any criterion fails.
    Check,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` config file; flags below override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in problem name (periodic-expsin or inflow-sine).
    #[arg(long)]
    problem: Option<String>,
    /// Polynomial degree.
    #[arg(long)]
    k: Option<usize>,
    /// Initialization method id, 1 through 4.
    #[arg(long)]
    method: Option<u8>,
    /// Mesh family: uniform or split.
    #[arg(long)]
    mesh: Option<String>,
    /// Smallest cell count of the doubling sequence.
    #[arg(long)]
    nmin: Option<usize>,
    /// Largest cell count of the doubling sequence.
    #[arg(long)]
    nmax: Option<usize>,
    /// Tableau: rk4, ssprk33, or a tableau file path.
    #[arg(long)]
    tableau: Option<String>,
    /// Step rule: auto, cfl, a count, or a rule like 10N^2.
    #[arg(long)]
    steps: Option<String>,
    /// Write the report as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dump each final state in dgfield format into this directory.
    #[arg(long)]
    dump_fields: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Polynomial degree.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Largest cell count (defaults to each problem's own).
    #[arg(long)]
    nmax: Option<usize>,
    /// Directory receiving one CSV per problem/method pair.
    #[arg(long, default_value = "sweep-out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run(args) => exit_on_error(run(args)),
        Command::Sweep(args) => exit_on_error(run_sweep(args)),
        Command::Check => check(),
    }
}

fn exit_on_error(result: dg1d::Result<()>) -> ExitCode {
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(args: RunArgs) -> dg1d::Result<()> {
    let mut config = match (&args.config, &args.problem) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            let mut config = ExperimentConfig::from_config_text(&text)?;
            if let Some(problem) = &args.problem {
                config.apply("problem", problem)?;
            }
            config
        }
        (None, Some(problem)) => ExperimentConfig::new(problem)?,
        (None, None) => {
            return Err(Error::Config("run needs --config or --problem".into()));
        }
    };
    let overrides: [(&str, Option<String>); 8] = [
        ("k", args.k.map(|v| v.to_string())),
        ("method", args.method.map(|v| v.to_string())),
        ("mesh", args.mesh),
        ("nmin", args.nmin.map(|v| v.to_string())),
        ("nmax", args.nmax.map(|v| v.to_string())),
        ("tableau", args.tableau),
        ("steps", args.steps),
        ("dump_fields", args.dump_fields.map(|p| p.display().to_string())),
    ];
    for (key, value) in overrides {
        if let Some(value) = value {
            config.apply(key, &value)?;
        }
    }
    if let Some(out) = args.out {
        config.out = Some(out);
    }
    let report = run_experiment(&config)?;
    print!(
        "{} k={} method {} mesh {} steps {}\n{}",
        config.problem,
        config.degree,
        config.method.id(),
        config.mesh_kind()?,
        config.steps,
        report.to_table()
    );
    if let Some(path) = &config.out {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_sweep(args: SweepArgs) -> dg1d::Result<()> {
    let results = sweep(args.k, args.nmax, &args.out)?;
    for (label, report) in &results {
        println!("{label}\n{}", report.to_table());
    }
    println!("wrote {} CSV files under {}", results.len(), args.out.display());
    Ok(())
}

fn check() -> ExitCode {
    let outcomes = acceptance::run_all();
    for outcome in &outcomes {
        println!("{}", outcome.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed == 0 {
        println!("acceptance: all {} criteria passed", outcomes.len());
        ExitCode::SUCCESS
    } else {
        eprintln!("acceptance: {failed} of {} criteria failed", outcomes.len());
        ExitCode::from(2)
    }
}
