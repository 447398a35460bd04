//! Bayesian optimization algorithm (BOA) with decision-tree Bayesian networks
//! whose leaves double as a fitness model.
//!
//! A configurable proportion of each generation's offspring receives a
//! fitness estimated from statistics stored in the network leaves instead of
//! a call to the true fitness function. The [`experiments`] module finds the
//! minimum population size by bisection and measures how many actual
//! evaluations inheritance saves.
//!
//! All fitness-carrying types are generic over a [`Scalar`] (`f32` or `f64`);
//! the `*64` aliases below fix the scalar to `f64`, which the experiments use.

pub mod bayesnet;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod fitmodel;
pub mod population;
pub mod problems;
pub mod rng;
pub mod scalar;

pub use bayesnet::{BayesianNetwork, DecisionTree, Leaf, Metric, NetworkMode, ScoreParams};
pub use engine::{BoaConfig, RunStats, Selection};
pub use error::{BoaError, Result};
pub use fitmodel::{FitnessStatsPool, UmdaFitnessModel};
pub use population::{BitString, Individual, Population, Provenance};
pub use problems::Problem;
pub use rng::{derive_stream, RandomStream};
pub use scalar::Scalar;

pub type Individual64 = Individual<f64>;
pub type Population64 = Population<f64>;
pub type BayesianNetwork64 = BayesianNetwork<f64>;
pub type DecisionTree64 = DecisionTree<f64>;
pub type Leaf64 = Leaf<f64>;
pub type ScoreParams64 = ScoreParams<f64>;
pub type FitnessStatsPool64 = FitnessStatsPool<f64>;
pub type UmdaFitnessModel64 = UmdaFitnessModel<f64>;
pub type BoaConfig64 = BoaConfig<f64>;
pub type RunStats64 = RunStats<f64>;

pub type Individual32 = Individual<f32>;
pub type BayesianNetwork32 = BayesianNetwork<f32>;
pub type BoaConfig32 = BoaConfig<f32>;
