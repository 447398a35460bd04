//! Fitness inheritance: statistics stored in network leaves and the
//! estimator built on them.
//!
//! Every leaf of tree `i` keeps the fitness sum and count of actually
//! evaluated solutions routed to it, split by the value of `X_i`. A new
//! string is estimated as
//!
//! ```text
//! f_est(x) = f̄ + Σ_i [ f̄(X_i = x_i | leaf_i(x)) - f̄(leaf_i(x)) ]
//! ```
//!
//! where `f̄` is the mean over all recorded solutions and `f̄(leaf)` the mean
//! over those routed to the leaf. A term whose leaf has no record with
//! `X_i = x_i` contributes nothing.

use crate::bayesnet::{BayesianNetwork, Leaf, Node};
use crate::error::{BoaError, Result};
use crate::population::{BitString, Individual, Provenance};
use crate::scalar::Scalar;

/// Running mean of every actual fitness recorded since the last reset.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitnessStatsPool<F> {
    pub global_sum: F,
    pub global_count: u64,
}

impl<F: Scalar> FitnessStatsPool<F> {
    pub fn new() -> Self {
        FitnessStatsPool {
            global_sum: F::zero(),
            global_count: 0,
        }
    }

    pub fn mean(&self) -> Option<F> {
        (self.global_count > 0).then(|| self.global_sum / F::from_count(self.global_count))
    }

    pub fn reset(&mut self) {
        *self = Self::new();
    }
}

/// Adds one actually evaluated solution to every leaf it reaches and to the pool.
pub fn record_actual<F: Scalar>(
    net: &mut BayesianNetwork<F>,
    pool: &mut FitnessStatsPool<F>,
    individual: &Individual<F>,
) -> Result<()> {
    if individual.provenance() != Provenance::Actual {
        return Err(BoaError::contract(format!(
            "only actual fitness may enter the statistics (got {:?})",
            individual.provenance()
        )));
    }
    let bits = individual.bits();
    if bits.len() != net.n() {
        return Err(BoaError::invalid(format!(
            "string has {} bits, network has {} variables",
            bits.len(),
            net.n()
        )));
    }
    let fitness = individual.fitness_or_err()?;
    for tree in net.trees_mut() {
        let id = tree.leaf_for(bits);
        let value = bits.get(tree.target());
        tree.leaf_mut(id).expect("traversal ends at a leaf").add_fitness(value, fitness);
    }
    pool.global_sum += fitness;
    pool.global_count += 1;
    Ok(())
}

/// Mean fitness of recorded solutions at this leaf with `X_i = value`.
pub fn leaf_fitness_mean<F: Scalar>(leaf: &Leaf<F>, value: bool, fallback: F) -> F {
    match leaf.fit_count(value) {
        0 => fallback,
        count => leaf.fit_sum(value) / F::from_count(count),
    }
}

/// Mean fitness of all recorded solutions routed to this leaf.
///
/// This equals `Σ_x p(x | leaf) · f̄(x | leaf)` with `p` the frequencies of
/// `X_i` among those same records; with only one value observed it is that
/// value's mean.
pub fn leaf_condition_mean<F: Scalar>(leaf: &Leaf<F>, fallback: F) -> F {
    match leaf.fit_count0 + leaf.fit_count1 {
        0 => fallback,
        count => (leaf.fit_sum0 + leaf.fit_sum1) / F::from_count(count),
    }
}

pub fn estimate_fitness<F: Scalar>(
    net: &BayesianNetwork<F>,
    pool: &FitnessStatsPool<F>,
    bits: &BitString,
) -> Result<F> {
    let global = pool
        .mean()
        .ok_or_else(|| BoaError::NotReady("no actual fitness recorded yet".into()))?;
    if bits.len() != net.n() {
        return Err(BoaError::invalid("string length differs from network size"));
    }
    let mut estimate = global;
    for tree in net.trees() {
        let leaf = tree.leaf(tree.leaf_for(bits)).expect("traversal ends at a leaf");
        let value = bits.get(tree.target());
        if leaf.fit_count(value) > 0 {
            estimate += leaf_fitness_mean(leaf, value, global) - leaf_condition_mean(leaf, global);
        }
    }
    Ok(estimate)
}

#[derive(Debug, Clone, Copy)]
enum EstimatorNode<F> {
    Split { var: u32, children: [u32; 2] },
    /// The term added for `X_i = 0` and `X_i = 1`, or `None` without data.
    Leaf([Option<F>; 2]),
}

/// [`estimate_fitness`] with every leaf term precomputed, for estimating
/// many strings against statistics that no longer change.
#[derive(Debug, Clone)]
pub struct FitnessEstimator<F> {
    global: F,
    roots: Vec<u32>,
    nodes: Vec<EstimatorNode<F>>,
}

impl<F: Scalar> FitnessEstimator<F> {
    pub fn new(net: &BayesianNetwork<F>, pool: &FitnessStatsPool<F>) -> Result<Self> {
        let global = pool
            .mean()
            .ok_or_else(|| BoaError::NotReady("no actual fitness recorded yet".into()))?;
        let mut roots = Vec::with_capacity(net.n());
        let mut nodes = Vec::new();
        for tree in net.trees() {
            let base = nodes.len() as u32;
            roots.push(base);
            nodes.extend(tree.nodes().iter().map(|node| match node {
                Node::Split { var, children } => EstimatorNode::Split {
                    var: *var as u32,
                    children: [base + children[0] as u32, base + children[1] as u32],
                },
                Node::Leaf(leaf) => EstimatorNode::Leaf([false, true].map(|value| {
                    (leaf.fit_count(value) > 0).then(|| {
                        leaf_fitness_mean(leaf, value, global) - leaf_condition_mean(leaf, global)
                    })
                })),
            }));
        }
        Ok(FitnessEstimator { global, roots, nodes })
    }

    pub fn estimate(&self, bits: &BitString) -> Result<F> {
        if bits.len() != self.roots.len() {
            return Err(BoaError::invalid("string length differs from network size"));
        }
        let mut estimate = self.global;
        for (target, &root) in self.roots.iter().enumerate() {
            let mut id = root as usize;
            let terms = loop {
                match &self.nodes[id] {
                    EstimatorNode::Leaf(terms) => break terms,
                    EstimatorNode::Split { var, children } => {
                        id = children[bits.get(*var as usize) as usize] as usize
                    }
                }
            };
            if let Some(term) = terms[bits.get(target) as usize] {
                estimate += term;
            }
        }
        Ok(estimate)
    }
}

/// Clears all fitness statistics; structure and leaf counts are untouched.
pub fn reset<F: Scalar>(net: &mut BayesianNetwork<F>, pool: &mut FitnessStatsPool<F>) {
    for tree in net.trees_mut() {
        for leaf in tree.leaves_mut() {
            leaf.clear_fitness();
        }
    }
    pool.reset();
}

/// Univariate baseline: per-position mean fitness of zeros and ones.
#[derive(Debug, Clone, PartialEq)]
pub struct UmdaFitnessModel<F> {
    sums: Vec<[F; 2]>,
    counts: Vec<[u64; 2]>,
    pool: FitnessStatsPool<F>,
}

impl<F: Scalar> UmdaFitnessModel<F> {
    pub fn new(n: usize) -> Self {
        UmdaFitnessModel {
            sums: vec![[F::zero(); 2]; n],
            counts: vec![[0; 2]; n],
            pool: FitnessStatsPool::new(),
        }
    }

    pub fn record(&mut self, bits: &BitString, fitness: F) -> Result<()> {
        if bits.len() != self.sums.len() {
            return Err(BoaError::invalid("string length differs from model size"));
        }
        for (i, (sum, count)) in self.sums.iter_mut().zip(&mut self.counts).enumerate() {
            let x = bits.get(i) as usize;
            sum[x] += fitness;
            count[x] += 1;
        }
        self.pool.global_sum += fitness;
        self.pool.global_count += 1;
        Ok(())
    }

    pub fn global_count(&self) -> u64 {
        self.pool.global_count
    }

    /// Fraction of recorded strings with a 1 at `i`.
    pub fn probability_one(&self, i: usize) -> Option<f64> {
        let [c0, c1] = self.counts[i];
        (c0 + c1 > 0).then(|| c1 as f64 / (c0 + c1) as f64)
    }

    /// `f̄ + Σ_i (f̄(X_i = x_i) - f̄)`, skipping positions with no data for `x_i`.
    pub fn estimate(&self, bits: &BitString) -> Result<F> {
        let global = self
            .pool
            .mean()
            .ok_or_else(|| BoaError::NotReady("no fitness recorded yet".into()))?;
        if bits.len() != self.sums.len() {
            return Err(BoaError::invalid("string length differs from model size"));
        }
        let mut estimate = global;
        for (i, (sum, count)) in self.sums.iter().zip(&self.counts).enumerate() {
            let x = bits.get(i) as usize;
            if count[x] > 0 {
                estimate += sum[x] / F::from_count(count[x]) - global;
            }
        }
        Ok(estimate)
    }
}

pub fn umda_estimate<F: Scalar>(model: &UmdaFitnessModel<F>, bits: &BitString) -> Result<F> {
    model.estimate(bits)
}
