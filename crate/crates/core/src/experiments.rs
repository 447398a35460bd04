//! Population sizing by bisection and the inheritance-proportion sweep.
//!
//! An experiment finds the smallest population size at which every one of
//! `runs_per_probe` independent runs reaches the success threshold, and
//! reports the mean number of actual evaluations of those runs. Population
//! sizes are probed by doubling from [`INITIAL_POPULATION`] until a success,
//! then by bisection of `[last failure, first success]` until the upper end
//! is within [`BRACKET_TOLERANCE`] of the lower.
//!
//! Randomness is keyed: run `r` of probe `k` in experiment `e` uses stream
//! `mix_key([k, r])` of seed `mix_key([master_seed, e])`. The proportion is
//! not part of the key, so experiments with the same index are paired across
//! proportions, and results never depend on thread scheduling.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::bayesnet::{Metric, NetworkMode, ScoreParams};
use crate::engine::{run_boa, BoaConfig, Selection};
use crate::error::{BoaError, Result};
use crate::problems::{Problem, DEFAULT_SUCCESS_THRESHOLD};
use crate::rng::{derive_stream, mix_key};

pub const INITIAL_POPULATION: usize = 64;
pub const MAX_POPULATION: usize = 1 << 24;
pub const BRACKET_TOLERANCE: f64 = 1.1;
pub const DEFAULT_RUNS_PER_PROBE: usize = 10;
pub const DEFAULT_EXPERIMENTS: usize = 10;
pub const FULL_EXPERIMENTS: usize = 30;

/// The 28 proportions: 0 to 0.9 by 0.1, 0.91 to 0.99 by 0.01, 0.991 to 0.999 by 0.001.
pub fn full_grid() -> Vec<f64> {
    let coarse = (0..10).map(|i| i as f64 / 10.0);
    let fine = (1..10).map(|i| (90 + i) as f64 / 100.0);
    let finest = (1..10).map(|i| (990 + i) as f64 / 1000.0);
    coarse.chain(fine).chain(finest).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Probe {
    pub population: usize,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectionResult {
    pub min_population: usize,
    /// Actual evaluations of each run at `min_population`.
    pub runs_evaluations: Vec<u64>,
    pub probes: Vec<Probe>,
}

impl BisectionResult {
    pub fn mean_evaluations(&self) -> f64 {
        self.runs_evaluations.iter().sum::<u64>() as f64 / self.runs_evaluations.len() as f64
    }
}

/// Algorithm settings shared by every run of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSettings {
    pub selection: Selection,
    pub metric: Metric,
    pub mode: NetworkMode,
    pub runs_per_probe: usize,
    pub success_threshold: f64,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        ExperimentSettings {
            selection: Selection::default(),
            metric: Metric::BdePenalized,
            mode: NetworkMode::Tree,
            runs_per_probe: DEFAULT_RUNS_PER_PROBE,
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
        }
    }
}

impl ExperimentSettings {
    pub fn config(&self, problem: &Problem, population: usize, proportion: f64) -> BoaConfig<f64> {
        let mut cfg = BoaConfig::new(population, problem.n());
        cfg.inheritance_proportion = proportion;
        cfg.selection = self.selection;
        cfg.score = ScoreParams::new(self.metric, population);
        cfg.mode = self.mode;
        cfg.success_threshold = self.success_threshold;
        cfg
    }
}

/// Doubling-then-bisection search over an arbitrary probe.
///
/// `probe(population, probe_index)` returns the per-run evaluation counts if
/// all runs succeeded and `None` otherwise.
pub fn bisect_with<P>(mut probe: P) -> Result<BisectionResult>
where
    P: FnMut(usize, usize) -> Result<Option<Vec<u64>>>,
{
    let mut probes = Vec::new();
    let mut last_failure = None;
    let mut population = INITIAL_POPULATION;
    let (mut high, mut evaluations) = loop {
        match probe(population, probes.len())? {
            Some(evals) => {
                probes.push(Probe { population, success: true });
                break (population, evals);
            }
            None => {
                probes.push(Probe { population, success: false });
                last_failure = Some(population);
                if population >= MAX_POPULATION {
                    return Err(BoaError::InvalidArgument(format!(
                        "no population up to {MAX_POPULATION} succeeded; probes: {probes:?}"
                    )));
                }
                population *= 2;
            }
        }
    };
    if let Some(mut low) = last_failure {
        while high as f64 > BRACKET_TOLERANCE * low as f64 {
            let mid = low + (high - low) / 2;
            if mid == low {
                break;
            }
            match probe(mid, probes.len())? {
                Some(evals) => {
                    probes.push(Probe { population: mid, success: true });
                    high = mid;
                    evaluations = evals;
                }
                None => {
                    probes.push(Probe { population: mid, success: false });
                    low = mid;
                }
            }
        }
    }
    Ok(BisectionResult {
        min_population: high,
        runs_evaluations: evaluations,
        probes,
    })
}

/// Runs `settings.runs_per_probe` independent BOA runs at `population`; stops
/// launching new runs once one has failed.
fn probe_population(
    problem: &Problem,
    proportion: f64,
    settings: &ExperimentSettings,
    experiment_seed: u64,
    population: usize,
    probe_index: usize,
) -> Result<Option<Vec<u64>>> {
    let cfg = settings.config(problem, population, proportion);
    let failed = AtomicBool::new(false);
    let results: Vec<Result<Option<u64>>> = (0..settings.runs_per_probe)
        .into_par_iter()
        .map(|run| {
            if failed.load(Ordering::Relaxed) {
                return Ok(None);
            }
            let mut rng = derive_stream(experiment_seed, mix_key(&[probe_index as u64, run as u64]));
            let stats = run_boa(&cfg, problem, &mut rng)?;
            if stats.succeeded {
                Ok(Some(stats.actual_evaluations))
            } else {
                failed.store(true, Ordering::Relaxed);
                Ok(None)
            }
        })
        .collect();
    let outcomes = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(outcomes.into_iter().collect())
}

pub fn bisect_min_popsize(
    problem: &Problem,
    proportion: f64,
    settings: &ExperimentSettings,
    experiment_seed: u64,
) -> Result<BisectionResult> {
    if settings.runs_per_probe == 0 {
        return Err(BoaError::invalid("runs per probe must be >= 1"));
    }
    settings.config(problem, 2, proportion).validate()?;
    bisect_with(|population, k| {
        probe_population(problem, proportion, settings, experiment_seed, population, k)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub problem: String,
    pub n: usize,
    pub proportion: f64,
    pub experiment: usize,
    pub seed: u64,
    pub min_population: usize,
    pub mean_actual_evaluations: f64,
}

pub fn experiment_seed(master_seed: u64, experiment: usize) -> u64 {
    mix_key(&[master_seed, experiment as u64])
}

pub fn run_experiment(
    problem: &Problem,
    proportion: f64,
    experiment: usize,
    master_seed: u64,
    settings: &ExperimentSettings,
) -> Result<SweepRow> {
    let result = bisect_min_popsize(
        problem,
        proportion,
        settings,
        experiment_seed(master_seed, experiment),
    )?;
    Ok(SweepRow {
        problem: problem.id(),
        n: problem.n(),
        proportion,
        experiment,
        seed: master_seed,
        min_population: result.min_population,
        mean_actual_evaluations: result.mean_evaluations(),
    })
}

/// Every `(proportion, experiment)` pair, ordered by proportion then experiment.
pub fn sweep_proportions(
    problem: &Problem,
    grid: &[f64],
    experiments_per_point: usize,
    master_seed: u64,
    settings: &ExperimentSettings,
) -> Result<Vec<SweepRow>> {
    if let Some(bad) = grid.iter().find(|p| !(0.0..1.0).contains(*p)) {
        return Err(BoaError::invalid(format!("proportion {bad} outside [0, 1)")));
    }
    let jobs: Vec<(f64, usize)> = grid
        .iter()
        .flat_map(|&p| (0..experiments_per_point).map(move |e| (p, e)))
        .collect();
    jobs.into_par_iter()
        .map(|(p, e)| run_experiment(problem, p, e, master_seed, settings))
        .collect()
}

/// Runs `f` on a dedicated pool; `Some(0)` means a single worker.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProportionSummary {
    pub problem: String,
    pub n: usize,
    pub proportion: f64,
    pub experiments: usize,
    pub mean_evaluations: f64,
    pub mean_min_population: f64,
    /// Baseline mean evaluations divided by this proportion's.
    pub speedup: f64,
}

/// Aggregates rows per `(problem, n, proportion)` and computes speedups
/// against proportion 0 of the same problem.
pub fn speedup(rows: &[SweepRow]) -> Result<Vec<ProportionSummary>> {
    let mut summaries: Vec<ProportionSummary> = Vec::new();
    for row in rows {
        let existing = summaries.iter_mut().find(|s| {
            s.problem == row.problem && s.n == row.n && s.proportion == row.proportion
        });
        match existing {
            Some(s) => {
                s.experiments += 1;
                s.mean_evaluations += row.mean_actual_evaluations;
                s.mean_min_population += row.min_population as f64;
            }
            None => summaries.push(ProportionSummary {
                problem: row.problem.clone(),
                n: row.n,
                proportion: row.proportion,
                experiments: 1,
                mean_evaluations: row.mean_actual_evaluations,
                mean_min_population: row.min_population as f64,
                speedup: f64::NAN,
            }),
        }
    }
    for s in &mut summaries {
        s.mean_evaluations /= s.experiments as f64;
        s.mean_min_population /= s.experiments as f64;
    }
    let baselines: Vec<(String, usize, f64)> = summaries
        .iter()
        .filter(|s| s.proportion == 0.0)
        .map(|s| (s.problem.clone(), s.n, s.mean_evaluations))
        .collect();
    for s in &mut summaries {
        let base = baselines
            .iter()
            .find(|(p, n, _)| *p == s.problem && *n == s.n)
            .map(|b| b.2)
            .ok_or_else(|| {
                BoaError::invalid(format!("no proportion-0 baseline for {}-{}", s.problem, s.n))
            })?;
        s.speedup = if s.proportion == 0.0 { 1.0 } else { base / s.mean_evaluations };
    }
    summaries.sort_by(|a, b| {
        (a.problem.as_str(), a.n)
            .cmp(&(b.problem.as_str(), b.n))
            .then(a.proportion.total_cmp(&b.proportion))
    });
    Ok(summaries)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // average rank for ties, 1-based
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mock(threshold: Option<usize>) -> Result<BisectionResult> {
        bisect_with(|n, _| {
            Ok(match threshold {
                Some(t) if n >= t => Some(vec![n as u64; 3]),
                _ => None,
            })
        })
    }

    #[test]
    fn grid_has_28_points() {
        let grid = full_grid();
        assert_eq!(grid.len(), 28);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[9], 0.9);
        assert_eq!(grid[10], 0.91);
        assert_eq!(grid[18], 0.99);
        assert_eq!(grid[27], 0.999);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn bisection_brackets_threshold() {
        let r = mock(Some(300)).unwrap();
        assert!((300..=330).contains(&r.min_population), "{}", r.min_population);
        let sizes: Vec<usize> = r.probes.iter().map(|p| p.population).collect();
        assert_eq!(&sizes[..4], &[64, 128, 256, 512]);
        assert!(r.probes[..3].iter().all(|p| !p.success));
        for p in &r.probes {
            assert_eq!(p.success, p.population >= 300);
        }
        let failing_below = r
            .probes
            .iter()
            .filter(|p| !p.success)
            .map(|p| p.population)
            .max()
            .unwrap();
        assert!(r.min_population as f64 <= BRACKET_TOLERANCE * failing_below as f64);
        assert_eq!(r.runs_evaluations, vec![r.min_population as u64; 3]);
    }

    #[test]
    fn immediate_success() {
        let r = mock(Some(1)).unwrap();
        assert_eq!(r.min_population, INITIAL_POPULATION);
        assert_eq!(r.probes.len(), 1);
    }

    #[test]
    fn gives_up_at_cap() {
        let err = mock(None).unwrap_err();
        assert!(err.to_string().contains("16777216"));
    }

    #[test]
    fn speedup_ratios() {
        let row = |p: f64, e: f64| SweepRow {
            problem: "onemax".into(),
            n: 50,
            proportion: p,
            experiment: 0,
            seed: 1,
            min_population: 100,
            mean_actual_evaluations: e,
        };
        let s = speedup(&[row(0.0, 30_000.0), row(0.999, 1000.0)]).unwrap();
        assert_eq!(s[0].speedup, 1.0);
        assert!((s[1].speedup - 30.0).abs() < 1e-12);
        assert!(speedup(&[row(0.5, 10.0)]).is_err());
    }

    #[test]
    fn grid_validation_and_row_count() {
        let p = Problem::onemax(8).unwrap();
        let s = ExperimentSettings { runs_per_probe: 2, ..Default::default() };
        assert!(sweep_proportions(&p, &[1.0], 1, 0, &s).is_err());
        let rows = sweep_proportions(&p, &[0.0], 3, 5, &s).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.mean_actual_evaluations >= r.min_population as f64));
        assert_eq!(rows.iter().map(|r| r.experiment).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn spearman_values() {
        let xs = [0.0, 0.5, 0.9, 0.99];
        assert!((spearman(&xs, &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        assert!((spearman(&xs, &[4.0, 3.0, 1.0, 2.0]) + 0.8).abs() < 1e-12);
        assert!((spearman(&[1.0, 2.0, 3.0], &[5.0, 5.0, 6.0]) - 0.866_025_403_784_438_6).abs() < 1e-12);
    }
}
