use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use boa_core::experiments::{full_grid, ExperimentSettings, DEFAULT_EXPERIMENTS, FULL_EXPERIMENTS};
use boa_core::{Metric, Problem, Selection};

#[derive(Debug, Parser)]
#[command(name = "boa", version, about = "BOA with fitness inheritance: runs, sweeps and plots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Size the population at one inheritance proportion
    Run(RunArgs),
    /// Size the population across a grid of proportions
    Sweep(SweepArgs),
    /// Render sweep CSV files as an SVG chart
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemName {
    Onemax,
    Trap4,
    Trap5,
}

impl ProblemName {
    pub fn default_n(self) -> usize {
        match self {
            ProblemName::Trap4 => 40,
            ProblemName::Onemax | ProblemName::Trap5 => 50,
        }
    }

    pub fn build(self, n: usize) -> boa_core::Result<Problem> {
        match self {
            ProblemName::Onemax => Problem::onemax(n),
            ProblemName::Trap4 => Problem::trap(4, n),
            ProblemName::Trap5 => Problem::trap(5, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricName {
    Bde,
    Bic,
}

impl From<MetricName> for Metric {
    fn from(m: MetricName) -> Metric {
        match m {
            MetricName::Bde => Metric::BdePenalized,
            MetricName::Bic => Metric::Bic,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value_t = ProblemName::Onemax)]
    pub problem: ProblemName,
    /// String length [default: 50, or 40 for trap4]
    #[arg(long)]
    pub n: Option<usize>,
    /// Master seed
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MetricName::Bde)]
    pub metric: MetricName,
    /// truncation[:ratio] or tournament:size
    #[arg(long, default_value = "truncation", value_parser = parse_selection)]
    pub selection: Selection,
    /// Independent runs that must all succeed at a population size
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
}

impl CommonArgs {
    pub fn problem(&self) -> boa_core::Result<Problem> {
        self.problem.build(self.n.unwrap_or(self.problem.default_n()))
    }

    pub fn settings(&self) -> ExperimentSettings {
        ExperimentSettings {
            selection: self.selection,
            metric: self.metric.into(),
            runs_per_probe: self.runs as usize,
            ..ExperimentSettings::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Fraction of offspring whose fitness is estimated
    #[arg(long, default_value_t = 0.0, value_parser = parse_proportion)]
    pub proportion: f64,
    #[arg(long, default_value_t = 1)]
    pub experiments: usize,
    /// CSV output path [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// "paper" (the 28-point grid) or a comma-separated list of proportions
    #[arg(long, default_value = "paper", value_parser = parse_grid)]
    pub grid: Grid,
    #[arg(long, default_value_t = DEFAULT_EXPERIMENTS)]
    pub experiments: usize,
    /// Full grid with 30 experiments per proportion
    #[arg(long, conflicts_with_all = ["grid", "experiments"])]
    pub paper: bool,
    /// CSV output path [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SweepArgs {
    pub fn grid(&self) -> Vec<f64> {
        if self.paper {
            full_grid()
        } else {
            self.grid.0.clone()
        }
    }

    pub fn experiments(&self) -> usize {
        if self.paper {
            FULL_EXPERIMENTS
        } else {
            self.experiments
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Sweep CSV files; each problem becomes one series
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// SVG output path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_proportion(s: &str) -> Result<f64, String> {
    let p: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if (0.0..1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("proportion must lie in [0, 1), got {p}"))
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    if s == "paper" {
        return Ok(Grid(full_grid()));
    }
    let points = s.split(',').map(parse_proportion).collect::<Result<Vec<_>, _>>()?;
    if points.windows(2).any(|w| w[0] >= w[1]) {
        return Err("grid must be strictly increasing".into());
    }
    Ok(Grid(points))
}

pub fn parse_selection(s: &str) -> Result<Selection, String> {
    let (name, arg) = match s.split_once(':') {
        Some((name, arg)) => (name, Some(arg)),
        None => (s, None),
    };
    match (name, arg) {
        ("truncation", None) => Ok(Selection::default()),
        ("truncation", Some(r)) => match r.parse::<f64>() {
            Ok(r) if r > 0.0 && r <= 1.0 => Ok(Selection::Truncation(r)),
            _ => Err(format!("truncation ratio must lie in (0, 1], got {r:?}")),
        },
        ("tournament", Some(k)) => match k.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Selection::Tournament(k)),
            _ => Err(format!("tournament size must be a positive integer, got {k:?}")),
        },
        _ => Err(format!("expected truncation[:ratio] or tournament:size, got {s:?}")),
    }
}

/// Parses and validates a command line; the first item is the program name.
pub fn parse_args<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let common = match &cli.command {
        Command::Run(a) => Some(&a.common),
        Command::Sweep(a) => Some(&a.common),
        Command::Plot(_) => None,
    };
    if let Some(common) = common {
        if let Err(e) = common.problem() {
            return Err(Cli::command().error(ErrorKind::ValueValidation, e));
        }
    }
    Ok(cli)
}
