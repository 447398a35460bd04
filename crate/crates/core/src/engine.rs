//! The generational loop with fitness inheritance.
//!
//! One generation: select parents, learn a network from all of them, rebuild
//! the fitness statistics from the parents whose fitness is actual, sample a
//! full offspring population, evaluate a random subset with the true fitness
//! (adding each result to the statistics), estimate the rest from the model,
//! and replace the population wholesale.

use rand::seq::index;
use rand::Rng;

use crate::bayesnet::{learn_network, BayesianNetwork, Metric, NetworkMode, Sampler, ScoreParams};
use crate::error::{BoaError, Result};
use crate::fitmodel::{record_actual, FitnessEstimator, FitnessStatsPool};
use crate::population::{
    best_index, random_population, BitString, Individual, Population, Provenance,
};
use crate::problems::{Problem, DEFAULT_SUCCESS_THRESHOLD};
use crate::rng::RandomStream;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    /// Keep the best `ceil(ratio * N)` members.
    Truncation(f64),
    /// `N` tournaments of the given size, drawn with replacement.
    Tournament(usize),
}

impl Default for Selection {
    fn default() -> Self {
        Selection::Truncation(0.5)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoaConfig<F> {
    pub population_size: usize,
    /// Fraction of offspring whose fitness is estimated, in `[0, 1)`.
    pub inheritance_proportion: f64,
    pub selection: Selection,
    /// Metric and prior; the data size is reset to the parent count each generation.
    pub score: ScoreParams<F>,
    pub mode: NetworkMode,
    pub max_generations: usize,
    pub success_threshold: f64,
}

impl<F: Scalar> BoaConfig<F> {
    /// Defaults for a problem of `n` bits: truncation 0.5, penalized BDe,
    /// decision trees, at most `5n` generations, 90% correct bits.
    pub fn new(population_size: usize, n: usize) -> Self {
        BoaConfig {
            population_size,
            inheritance_proportion: 0.0,
            selection: Selection::default(),
            score: ScoreParams::new(Metric::BdePenalized, population_size.max(1)),
            mode: NetworkMode::Tree,
            max_generations: 5 * n,
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(BoaError::invalid("population size must be at least 2"));
        }
        if !(0.0..1.0).contains(&self.inheritance_proportion) {
            return Err(BoaError::invalid(format!(
                "inheritance proportion must lie in [0, 1), got {}",
                self.inheritance_proportion
            )));
        }
        if !(self.success_threshold > 0.0 && self.success_threshold <= 1.0) {
            return Err(BoaError::invalid("success threshold must lie in (0, 1]"));
        }
        match self.selection {
            Selection::Truncation(r) if !(r > 0.0 && r <= 1.0) => {
                Err(BoaError::invalid("truncation ratio must lie in (0, 1]"))
            }
            Selection::Tournament(0) => Err(BoaError::invalid("tournament size must be >= 1")),
            _ => self.score.with_data_size(1).validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunStats<F> {
    pub actual_evaluations: u64,
    pub generations_run: usize,
    pub succeeded: bool,
    pub best_true_fitness: F,
}

/// Result of one generation, with the model kept for inspection.
#[derive(Debug, Clone)]
pub struct GenerationOutcome<F> {
    pub population: Population<F>,
    pub actual_evaluations: u64,
    pub network: BayesianNetwork<F>,
    pub pool: FitnessStatsPool<F>,
}

pub fn select<F: Scalar>(
    pop: &Population<F>,
    selection: Selection,
    rng: &mut RandomStream,
) -> Result<Population<F>> {
    let members = pop.members();
    let fitness: Vec<F> = members
        .iter()
        .map(|m| m.fitness_or_err())
        .collect::<Result<_>>()?;
    let parents = match selection {
        Selection::Truncation(ratio) => {
            let keep = ((ratio * members.len() as f64).ceil() as usize).clamp(1, members.len());
            let mut order: Vec<usize> = (0..members.len()).collect();
            // Stable: equal fitness keeps index order.
            order.sort_by(|&a, &b| fitness[b].partial_cmp(&fitness[a]).unwrap_or(std::cmp::Ordering::Equal));
            order[..keep].iter().map(|&i| members[i].clone()).collect()
        }
        Selection::Tournament(size) => (0..members.len())
            .map(|_| {
                let mut best = rng.random_range(0..members.len());
                for _ in 1..size {
                    let c = rng.random_range(0..members.len());
                    if fitness[c] > fitness[best] || (fitness[c] == fitness[best] && c < best) {
                        best = c;
                    }
                }
                members[best].clone()
            })
            .collect(),
    };
    Population::new(parents, pop.generation())
}

/// Splits offspring indices into `(estimate, evaluate)` sets.
///
/// Exactly `round(p * count)` offspring are estimated, capped at `count - 1`
/// so every generation has at least one actual evaluation. Both sets are
/// returned in ascending order.
pub fn inheritance_partition(
    offspring_count: usize,
    proportion: f64,
    rng: &mut RandomStream,
) -> (Vec<usize>, Vec<usize>) {
    let estimated = ((proportion * offspring_count as f64).round() as usize)
        .min(offspring_count.saturating_sub(1));
    if estimated == 0 {
        return (Vec::new(), (0..offspring_count).collect());
    }
    let mut chosen = vec![false; offspring_count];
    for i in index::sample(rng, offspring_count, estimated) {
        chosen[i] = true;
    }
    (0..offspring_count).partition(|&i| chosen[i])
}

fn evaluate_actual<F: Scalar>(problem: &Problem, bits: BitString) -> Result<Individual<F>> {
    let f = problem.evaluate(&bits)?;
    Ok(Individual::with_actual(bits, f))
}

/// Initial population: uniform random and fully evaluated.
pub fn initial_population<F: Scalar>(
    cfg: &BoaConfig<F>,
    problem: &Problem,
    rng: &mut RandomStream,
) -> Result<Population<F>> {
    let mut pop = random_population(problem.n(), cfg.population_size, rng)?;
    for m in pop.members_mut() {
        let f = problem.evaluate(m.bits())?;
        m.assign_actual(f);
    }
    Ok(pop)
}

pub fn generation_step<F: Scalar>(
    pop: &Population<F>,
    cfg: &BoaConfig<F>,
    problem: &Problem,
    rng: &mut RandomStream,
) -> Result<GenerationOutcome<F>> {
    step(pop, cfg, problem, rng, Statistics::Full)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Statistics {
    Full,
    /// Parents only; used to check that offspring records reach estimates.
    ParentsOnly,
    /// Skipped entirely when nothing is estimated; the result is the same.
    WhenEstimating,
}

fn step<F: Scalar>(
    pop: &Population<F>,
    cfg: &BoaConfig<F>,
    problem: &Problem,
    rng: &mut RandomStream,
    statistics: Statistics,
) -> Result<GenerationOutcome<F>> {
    let parents = select(pop, cfg.selection, rng)?;
    let data: Vec<BitString> = parents.members().iter().map(|m| m.bits().clone()).collect();
    let params = cfg.score.with_data_size(data.len());
    let mut network = learn_network(&data, &params, cfg.mode)?;

    let sampler = Sampler::new(&network)?;
    let offspring_bits = (0..cfg.population_size)
        .map(|_| sampler.sample(rng))
        .collect::<Result<Vec<_>>>()?;
    drop(sampler);

    let (estimate_set, evaluate_set) =
        inheritance_partition(offspring_bits.len(), cfg.inheritance_proportion, rng);
    let record = statistics != Statistics::WhenEstimating || !estimate_set.is_empty();

    let mut pool = FitnessStatsPool::new();
    if record {
        for parent in parents.members() {
            if parent.provenance() == Provenance::Actual {
                record_actual(&mut network, &mut pool, parent)?;
            }
        }
    }

    let mut offspring: Vec<Option<Individual<F>>> = vec![None; offspring_bits.len()];
    let mut offspring_bits: Vec<Option<BitString>> = offspring_bits.into_iter().map(Some).collect();
    let mut take = |i: usize| {
        offspring_bits[i]
            .take()
            .ok_or_else(|| BoaError::Internal(format!("offspring {i} partitioned twice")))
    };
    for &i in &evaluate_set {
        let child = evaluate_actual(problem, take(i)?)?;
        if record && statistics != Statistics::ParentsOnly {
            record_actual(&mut network, &mut pool, &child)?;
        }
        offspring[i] = Some(child);
    }
    if !estimate_set.is_empty() {
        let estimator = FitnessEstimator::new(&network, &pool)?;
        for &i in &estimate_set {
            let bits = take(i)?;
            let f = estimator.estimate(&bits)?;
            offspring[i] = Some(Individual::with_estimate(bits, f));
        }
    }
    let members = offspring
        .into_iter()
        .map(|m| m.ok_or_else(|| BoaError::Internal("offspring left unassigned".into())))
        .collect::<Result<Vec<_>>>()?;

    Ok(GenerationOutcome {
        population: Population::new(members, pop.generation() + 1)?,
        actual_evaluations: evaluate_set.len() as u64,
        network,
        pool,
    })
}

/// Runs until the best member (by assigned fitness) has the required fraction
/// of correct bits, or the generation cap is hit.
///
/// The success check and `best_true_fitness` use the true fitness function
/// but are not counted as evaluations.
pub fn run_boa<F: Scalar>(
    cfg: &BoaConfig<F>,
    problem: &Problem,
    rng: &mut RandomStream,
) -> Result<RunStats<F>> {
    cfg.validate()?;
    let mut pop = initial_population(cfg, problem, rng)?;
    let mut actual_evaluations = cfg.population_size as u64;
    let mut generations_run = 0;
    let succeeded = loop {
        let best = &pop.members()[best_index(pop.members())?];
        if problem.is_success(best.bits(), cfg.success_threshold)? {
            break true;
        }
        if generations_run >= cfg.max_generations {
            break false;
        }
        let outcome = step(&pop, cfg, problem, rng, Statistics::WhenEstimating)?;
        actual_evaluations += outcome.actual_evaluations;
        pop = outcome.population;
        generations_run += 1;
    };
    let best = &pop.members()[best_index(pop.members())?];
    Ok(RunStats {
        actual_evaluations,
        generations_run,
        succeeded,
        best_true_fitness: problem.evaluate(best.bits())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    fn pop_with(fitness: &[f64]) -> Population<f64> {
        let members = fitness
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let mut b = BitString::zeros(8);
                for k in 0..8 {
                    b.set(k, (i >> k) & 1 == 1);
                }
                Individual::with_actual(b, f)
            })
            .collect();
        Population::new(members, 0).unwrap()
    }

    #[test]
    fn truncation_keeps_top_half() {
        let pop = pop_with(&[1.0, 2.0, 3.0, 4.0]);
        let parents = select(&pop, Selection::Truncation(0.5), &mut derive_stream(0, 0)).unwrap();
        let mut f: Vec<f64> = parents.members().iter().map(|m| m.fitness().unwrap()).collect();
        f.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(f, vec![3.0, 4.0]);
    }

    #[test]
    fn truncation_ties_by_index() {
        let pop = pop_with(&[1.0; 6]);
        let parents = select(&pop, Selection::Truncation(0.5), &mut derive_stream(0, 0)).unwrap();
        assert_eq!(parents.members(), &pop.members()[..3]);
    }

    #[test]
    fn full_tournament_returns_best() {
        let pop = pop_with(&[1.0, 9.0, 3.0, 9.0, 2.0]);
        let parents = select(&pop, Selection::Tournament(64), &mut derive_stream(1, 0)).unwrap();
        assert_eq!(parents.len(), 5);
        assert!(parents.members().iter().all(|m| m.fitness() == Some(9.0)));
    }

    #[test]
    fn selection_rejects_unevaluated() {
        let mut members = pop_with(&[1.0, 2.0]).into_members();
        members.push(Individual::new(BitString::zeros(8)));
        let pop = Population::new(members, 0).unwrap();
        assert!(matches!(
            select(&pop, Selection::Truncation(0.5), &mut derive_stream(0, 0)),
            Err(BoaError::ContractViolation(_))
        ));
    }

    #[test]
    fn partition_sizes() {
        let mut rng = derive_stream(3, 3);
        let (est, eval) = inheritance_partition(100, 0.9, &mut rng);
        assert_eq!((est.len(), eval.len()), (90, 10));
        let mut all: Vec<usize> = est.iter().chain(&eval).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());

        let (est, eval) = inheritance_partition(100, 0.999, &mut rng);
        assert_eq!((est.len(), eval.len()), (99, 1));

        let (est, eval) = inheritance_partition(100, 0.0, &mut rng);
        assert!(est.is_empty());
        assert_eq!(eval.len(), 100);
    }

    #[test]
    fn zero_proportion_consumes_no_randomness() {
        let mut a = derive_stream(9, 9);
        let mut b = derive_stream(9, 9);
        inheritance_partition(50, 0.0, &mut a);
        assert_eq!(a.random::<u64>(), b.random::<u64>());
    }

    #[test]
    fn config_validation() {
        let mut cfg = BoaConfig::<f64>::new(100, 10);
        assert!(cfg.validate().is_ok());
        cfg.inheritance_proportion = 1.0;
        assert!(cfg.validate().is_err());
        cfg.inheritance_proportion = 0.5;
        cfg.population_size = 1;
        assert!(cfg.validate().is_err());
        cfg.population_size = 10;
        cfg.selection = Selection::Tournament(0);
        assert!(cfg.validate().is_err());
        assert_eq!(BoaConfig::<f64>::new(10, 40).max_generations, 200);
    }

    #[test]
    fn step_accounting_and_provenance() {
        let problem = Problem::onemax(30).unwrap();
        let mut cfg = BoaConfig::<f64>::new(100, 30);
        cfg.inheritance_proportion = 0.9;
        let mut rng = derive_stream(21, 0);
        let pop = initial_population(&cfg, &problem, &mut rng).unwrap();
        let out = generation_step(&pop, &cfg, &problem, &mut rng).unwrap();
        assert_eq!(out.actual_evaluations, 10);
        assert_eq!(out.population.len(), 100);
        assert_eq!(out.population.generation(), 1);
        let actual = out
            .population
            .members()
            .iter()
            .filter(|m| m.provenance() == Provenance::Actual)
            .count();
        assert_eq!(actual, 10);
        // 50 actual parents + 10 evaluated offspring
        assert_eq!(out.pool.global_count, 60);
    }

    #[test]
    fn no_inheritance_evaluates_everything() {
        let problem = Problem::trap(4, 20).unwrap();
        let cfg = BoaConfig::<f64>::new(80, 20);
        let mut rng = derive_stream(2, 0);
        let pop = initial_population(&cfg, &problem, &mut rng).unwrap();
        let out = generation_step(&pop, &cfg, &problem, &mut rng).unwrap();
        assert!(out.population.members().iter().all(|m| m.provenance() == Provenance::Actual));
        for m in out.population.members() {
            assert_eq!(m.fitness().unwrap(), problem.evaluate::<f64>(m.bits()).unwrap());
        }
    }

    #[test]
    fn offspring_records_feed_estimates() {
        let problem = Problem::onemax(20).unwrap();
        let mut cfg = BoaConfig::<f64>::new(60, 20);
        cfg.inheritance_proportion = 0.5;
        let mut rng = derive_stream(5, 1);
        let pop = initial_population(&cfg, &problem, &mut rng).unwrap();
        let with = step(&pop, &cfg, &problem, &mut rng.clone(), Statistics::Full).unwrap();
        let without = step(&pop, &cfg, &problem, &mut rng.clone(), Statistics::ParentsOnly).unwrap();
        let bits = |o: &GenerationOutcome<f64>| -> Vec<BitString> {
            o.population.members().iter().map(|m| m.bits().clone()).collect()
        };
        assert_eq!(bits(&with), bits(&without));
        let estimates = |o: &GenerationOutcome<f64>| -> Vec<f64> {
            o.population
                .members()
                .iter()
                .filter(|m| m.provenance() == Provenance::Estimated)
                .map(|m| m.fitness().unwrap())
                .collect()
        };
        assert_eq!(estimates(&with).len(), 30);
        assert_ne!(estimates(&with), estimates(&without));
    }

    #[test]
    fn zero_generations() {
        let problem = Problem::onemax(40).unwrap();
        let mut cfg = BoaConfig::<f64>::new(30, 40);
        cfg.max_generations = 0;
        let stats = run_boa(&cfg, &problem, &mut derive_stream(1, 1)).unwrap();
        assert_eq!(stats.actual_evaluations, 30);
        assert_eq!(stats.generations_run, 0);
        assert!(!stats.succeeded);
    }

    #[test]
    fn run_is_deterministic_and_accounted() {
        let problem = Problem::onemax(10).unwrap();
        let cfg = BoaConfig::<f64>::new(200, 10);
        let a = run_boa(&cfg, &problem, &mut derive_stream(77, 0)).unwrap();
        let b = run_boa(&cfg, &problem, &mut derive_stream(77, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.actual_evaluations, 200 * (a.generations_run as u64 + 1));
    }

    #[test]
    fn small_onemax_solves() {
        let problem = Problem::onemax(10).unwrap();
        let cfg = BoaConfig::<f64>::new(200, 10);
        let ok = (0..30)
            .filter(|&s| {
                let r = run_boa(&cfg, &problem, &mut derive_stream(s, 0)).unwrap();
                r.succeeded && r.generations_run <= 30
            })
            .count();
        assert!(ok >= 29, "{ok}/30");
    }
}
