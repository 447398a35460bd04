//! Independent reference computations shared by the integration tests.
//!
//! Nothing here reads the fitness statistics or probabilities computed by the
//! library: trees are walked node by node and every average is recomputed
//! from the raw records.

#![allow(dead_code)]

use boa_core::bayesnet::{learn_network, Node};
use boa_core::rng::RandomStream;
use boa_core::{BayesianNetwork, BitString, Metric, NetworkMode, ScoreParams};
use rand::Rng;

/// The `(variable, value)` tests on the path that `bits` takes through tree `i`.
pub fn path_conditions(net: &BayesianNetwork<f64>, i: usize, bits: &BitString) -> Vec<(usize, bool)> {
    let tree = net.tree(i);
    let mut id = 0;
    let mut path = Vec::new();
    while let Node::Split { var, children } = tree.node(id) {
        let value = bits.get(*var);
        path.push((*var, value));
        id = children[value as usize];
    }
    path
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Fitness estimate obtained by scanning the records for every conditional average.
pub fn brute_force_estimate(
    net: &BayesianNetwork<f64>,
    records: &[(BitString, f64)],
    bits: &BitString,
) -> f64 {
    let global = mean(records.iter().map(|r| r.1)).expect("non-empty pool");
    let mut estimate = global;
    for i in 0..net.n() {
        let path = path_conditions(net, i, bits);
        let in_leaf = |r: &&(BitString, f64)| path.iter().all(|&(v, x)| r.0.get(v) == x);
        let leaf_mean = mean(records.iter().filter(in_leaf).map(|r| r.1));
        let value_mean = mean(
            records
                .iter()
                .filter(in_leaf)
                .filter(|r| r.0.get(i) == bits.get(i))
                .map(|r| r.1),
        );
        if let (Some(v), Some(l)) = (value_mean, leaf_mean) {
            estimate += v - l;
        }
    }
    estimate
}

/// Joint probability from the leaf counts with the Laplace correction.
pub fn brute_force_joint(net: &BayesianNetwork<f64>, bits: &BitString) -> f64 {
    (0..net.n())
        .map(|i| {
            let tree = net.tree(i);
            let mut id = 0;
            let leaf = loop {
                match tree.node(id) {
                    Node::Split { var, children } => id = children[bits.get(*var) as usize],
                    Node::Leaf(leaf) => break leaf,
                }
            };
            let p1 = (leaf.count1 as f64 + 1.0) / ((leaf.count0 + leaf.count1) as f64 + 2.0);
            if bits.get(i) {
                p1
            } else {
                1.0 - p1
            }
        })
        .product()
}

pub fn all_strings(n: usize) -> impl Iterator<Item = BitString> {
    (0u64..1 << n).map(move |k| {
        let mut b = BitString::zeros(n);
        for i in 0..n {
            b.set(i, (k >> i) & 1 == 1);
        }
        b
    })
}

/// Data in which each bit copies, negates or ANDs earlier bits with some
/// noise, so that learned networks have edges.
pub fn correlated_data(n: usize, rows: usize, rng: &mut RandomStream) -> Vec<BitString> {
    let plan: Vec<(usize, usize, u8)> = (0..n)
        .map(|i| {
            let a = if i > 0 { rng.random_range(0..i) } else { 0 };
            let b = if i > 0 { rng.random_range(0..i) } else { 0 };
            (a, b, if i == 0 { 3 } else { rng.random_range(0..4u8) })
        })
        .collect();
    (0..rows)
        .map(|_| {
            let mut bits = BitString::zeros(n);
            for (i, &(a, b, kind)) in plan.iter().enumerate() {
                let v = match kind {
                    0 => bits.get(a),
                    1 => !bits.get(a),
                    2 => bits.get(a) && bits.get(b),
                    _ => rng.random(),
                };
                bits.set(i, if rng.random::<f64>() < 0.1 { !v } else { v });
            }
            bits
        })
        .collect()
}

pub fn random_learned_network(n: usize, rng: &mut RandomStream) -> BayesianNetwork<f64> {
    let rows = rng.random_range(20..300);
    let data = correlated_data(n, rows, rng);
    let metric = if rng.random() { Metric::BdePenalized } else { Metric::Bic };
    let mode = if rng.random::<f64>() < 0.8 { NetworkMode::Tree } else { NetworkMode::FullCpt };
    learn_network(&data, &ScoreParams::new(metric, rows), mode).expect("learning succeeds")
}

pub fn random_records(n: usize, count: usize, rng: &mut RandomStream) -> Vec<(BitString, f64)> {
    (0..count)
        .map(|_| (BitString::random(n, rng), rng.random_range(-10.0..10.0)))
        .collect()
}
