use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::RngCore;

use crate::error::{BoaError, Result};
use crate::population::BitString;
use crate::rng::RandomStream;
use crate::scalar::Scalar;

use super::tree::Leaf;
use super::BayesianNetwork;

/// Laplace-corrected `p(X_i = 1)` at a leaf: `(count1 + 1) / (count0 + count1 + 2)`.
///
/// Never 0 or 1, so sampling can always flip a bit back.
pub fn leaf_probability<F: Scalar>(leaf: &Leaf<F>) -> F {
    F::from_count(leaf.count1 + 1) / F::from_count(leaf.count0 + leaf.count1 + 2)
}

/// Ancestral ordering: parents before children, lowest index first among
/// the variables that are ready.
pub fn topological_order<F: Scalar>(net: &BayesianNetwork<F>) -> Result<Vec<usize>> {
    let n = net.n();
    let mut children = vec![Vec::new(); n];
    let mut pending: Vec<usize> = (0..n).map(|i| net.parents(i).len()).collect();
    for i in 0..n {
        for &p in net.parents(i) {
            children[p].push(i);
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&i| pending[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &c in &children[v] {
            pending[c] -= 1;
            if pending[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    if order.len() != n {
        return Err(BoaError::Internal("dependency graph contains a cycle".into()));
    }
    Ok(order)
}

#[derive(Clone, Copy)]
enum Flat {
    Split { var: u32, children: [u32; 2] },
    /// `p(X = 1)` scaled to the full `u64` range.
    Leaf { threshold: u64 },
}

/// Draws strings from a network; the ancestral order and leaf
/// probabilities are computed once.
pub struct Sampler {
    n: usize,
    order: Vec<usize>,
    roots: Vec<u32>,
    nodes: Vec<Flat>,
}

impl Sampler {
    pub fn new<F: Scalar>(net: &BayesianNetwork<F>) -> Result<Self> {
        let order = topological_order(net)?;
        let mut roots = Vec::with_capacity(net.n());
        let mut nodes = Vec::new();
        for tree in net.trees() {
            let base = nodes.len() as u32;
            roots.push(base);
            nodes.extend(tree.nodes().iter().map(|node| match node {
                super::Node::Leaf(leaf) => Flat::Leaf {
                    threshold: (leaf_probability(leaf).as_f64() * 2f64.powi(64)) as u64,
                },
                super::Node::Split { var, children } => Flat::Split {
                    var: *var as u32,
                    children: [base + children[0] as u32, base + children[1] as u32],
                },
            }));
        }
        // every split variable is a parent, so the ancestral order assigns it first
        let mut position = vec![0; net.n()];
        for (k, &v) in order.iter().enumerate() {
            position[v] = k;
        }
        for tree in net.trees() {
            if let Some(v) = tree.split_vars().into_iter().find(|&v| position[v] >= position[tree.target()]) {
                return Err(BoaError::Internal(format!(
                    "tree {} reads variable {v} before it is sampled",
                    tree.target()
                )));
            }
        }
        Ok(Sampler { n: net.n(), order, roots, nodes })
    }

    pub fn sample(&self, rng: &mut RandomStream) -> Result<BitString> {
        let mut bits = BitString::zeros(self.n);
        for &i in &self.order {
            let mut id = self.roots[i] as usize;
            let threshold = loop {
                match self.nodes[id] {
                    Flat::Leaf { threshold } => break threshold,
                    Flat::Split { var, children } => id = children[bits.get(var as usize) as usize] as usize,
                }
            };
            if rng.next_u64() < threshold {
                bits.set(i, true);
            }
        }
        Ok(bits)
    }
}

pub fn sample_individual<F: Scalar>(
    net: &BayesianNetwork<F>,
    rng: &mut RandomStream,
) -> Result<BitString> {
    Sampler::new(net)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayesnet::{DecisionTree, NetworkMode};
    use crate::rng::derive_stream;

    #[test]
    fn laplace_values() {
        assert_eq!(leaf_probability(&Leaf::<f64>::with_counts(0, 0)), 0.5);
        assert!((leaf_probability(&Leaf::<f64>::with_counts(3, 1)) - 1.0 / 3.0).abs() < 1e-15);
        let p = leaf_probability(&Leaf::<f64>::with_counts(0, 1000));
        assert_eq!(p, 1001.0 / 1002.0);
        assert!(p < 1.0);
    }

    #[test]
    fn order_on_simple_graphs() {
        let empty = BayesianNetwork::<f64>::empty(5, NetworkMode::Tree, 0, 0);
        assert_eq!(topological_order(&empty).unwrap(), vec![0, 1, 2, 3, 4]);

        let mut t2 = DecisionTree::new(2, Leaf::default());
        let [a, _] = t2.split_leaf(0, 0, Leaf::default(), Leaf::default()).unwrap();
        t2.split_leaf(a, 1, Leaf::default(), Leaf::default()).unwrap();
        let trees = vec![DecisionTree::new(0, Leaf::default()), DecisionTree::new(1, Leaf::default()), t2];
        let net = BayesianNetwork::<f64>::from_trees(trees, NetworkMode::Tree).unwrap();
        let order = topological_order(&net).unwrap();
        let pos = |v| order.iter().position(|&x| x == v).unwrap();
        assert!(pos(2) > pos(0) && pos(2) > pos(1));

        // reverse chain 2 -> 1 -> 0
        let mut t0 = DecisionTree::new(0, Leaf::default());
        t0.split_leaf(0, 1, Leaf::default(), Leaf::default()).unwrap();
        let mut t1 = DecisionTree::new(1, Leaf::default());
        t1.split_leaf(0, 2, Leaf::default(), Leaf::default()).unwrap();
        let net = BayesianNetwork::<f64>::from_trees(
            vec![t0, t1, DecisionTree::new(2, Leaf::default())],
            NetworkMode::Tree,
        )
        .unwrap();
        assert_eq!(topological_order(&net).unwrap(), vec![2, 1, 0]);
    }

    #[test]
    fn nearly_deterministic_leaves() {
        let n = 8;
        let net = BayesianNetwork::<f64>::empty(n, NetworkMode::Tree, 0, 1_000_000);
        let sampler = Sampler::new(&net).unwrap();
        let mut rng = derive_stream(4, 4);
        let mut ones = vec![0usize; n];
        for _ in 0..10_000 {
            let b = sampler.sample(&mut rng).unwrap();
            for (i, o) in ones.iter_mut().enumerate() {
                *o += b.get(i) as usize;
            }
        }
        assert!(ones.iter().all(|&o| o as f64 / 10_000.0 >= 0.999));
    }

    #[test]
    fn copied_pairs() {
        let mut t1 = DecisionTree::new(1, Leaf::default());
        t1.split_leaf(0, 0, Leaf::with_counts(1_000_000, 0), Leaf::with_counts(0, 1_000_000))
            .unwrap();
        let net = BayesianNetwork::<f64>::from_trees(
            vec![DecisionTree::new(0, Leaf::with_counts(5, 5)), t1],
            NetworkMode::Tree,
        )
        .unwrap();
        let mut rng = derive_stream(5, 0);
        let sampler = Sampler::new(&net).unwrap();
        let same = (0..10_000)
            .filter(|_| {
                let b = sampler.sample(&mut rng).unwrap();
                b.get(0) == b.get(1)
            })
            .count();
        assert!(same as f64 / 10_000.0 >= 0.995);
    }

    #[test]
    fn uniform_marginals() {
        let net = BayesianNetwork::<f64>::empty(1, NetworkMode::Tree, 1, 1);
        let mut rng = derive_stream(6, 0);
        let sampler = Sampler::new(&net).unwrap();
        let ones = (0..100_000)
            .filter(|_| sampler.sample(&mut rng).unwrap().get(0))
            .count();
        let frac = ones as f64 / 100_000.0;
        assert!((0.48..=0.52).contains(&frac));
    }
}
