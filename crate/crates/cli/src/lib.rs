//! Front end for the `boa` binary: argument parsing, command execution and
//! the CSV and SVG writers.

pub mod args;
pub mod svg;
pub mod table;

use std::path::Path;

use boa_core::experiments::{speedup, sweep_proportions, with_threads, SweepRow};
use boa_core::BoaError;

pub use args::{parse_args, Cli, Command};
pub use svg::{render_speedup_svg, speedup_svg};
pub use table::{read_csv, write_csv, CsvRecord};

pub const THREADS_ENV: &str = "BOA_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Boa(#[from] BoaError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Input(String),
}

/// Worker count from `BOA_THREADS`: unset uses every core, 0 runs sequentially.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Input(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))),
        Err(e) => Err(CliError::Input(format!("{THREADS_ENV}: {e}"))),
    }
}

fn sweep(
    common: &args::CommonArgs,
    grid: &[f64],
    experiments: usize,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>, CliError> {
    let problem = common.problem()?;
    let settings = common.settings();
    let rows = with_threads(threads, || {
        sweep_proportions(&problem, grid, experiments, common.seed, &settings)
    })?;
    Ok(rows)
}

fn report(rows: &[SweepRow]) {
    if let Ok(summaries) = speedup(rows) {
        for s in summaries {
            eprintln!(
                "{}-{} p={:<6} min_population={:<8.1} evaluations={:<12.1} speedup={:.2}",
                s.problem, s.n, s.proportion, s.mean_min_population, s.mean_evaluations, s.speedup
            );
        }
    }
}

/// Executes a parsed command with the given worker count.
pub fn execute(cli: &Cli, threads: Option<usize>) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(a) => {
            let rows = sweep(&a.common, &[a.proportion], a.experiments, threads)?;
            write_csv(&rows, a.out.as_deref())?;
            for r in &rows {
                eprintln!(
                    "{}-{} p={} experiment={} min_population={} evaluations={:.1}",
                    r.problem, r.n, r.proportion, r.experiment, r.min_population, r.mean_actual_evaluations
                );
            }
        }
        Command::Sweep(a) => {
            let rows = sweep(&a.common, &a.grid(), a.experiments(), threads)?;
            write_csv(&rows, a.out.as_deref())?;
            report(&rows);
        }
        Command::Plot(a) => {
            let mut records = Vec::new();
            for path in &a.input {
                records.extend(read_csv(path).map_err(|e| in_file(path, e))?);
            }
            render_speedup_svg(&table::summarize(&records)?, &a.out)?;
        }
    }
    Ok(())
}

fn in_file(path: &Path, e: CliError) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}
