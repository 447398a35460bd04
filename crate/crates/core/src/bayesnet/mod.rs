//! Bayesian networks over string positions with one decision tree per
//! variable.
//!
//! A network stores, for every position `i`, a [`DecisionTree`] encoding
//! `p(X_i | parents)`. The dependency graph has an edge `j -> i` exactly when
//! `j` is a split variable somewhere in tree `i`; it is kept acyclic.
//!
//! [`NetworkMode::FullCpt`] is the special case where every tree is complete
//! over its parent set, i.e. a classical conditional probability table.

mod dump;
mod learn;
mod sample;
mod score;
mod tree;

pub use dump::{dump, parse_dump};
pub use learn::{learn_network, split_gain, SplitGain};
pub use sample::{leaf_probability, sample_individual, topological_order, Sampler};
pub use score::{leaf_score, Metric, ScoreParams};
pub use tree::{DecisionTree, Leaf, Node, NodeId};

use crate::error::{BoaError, Result};
use crate::population::BitString;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NetworkMode {
    /// Each leaf may be split independently.
    #[default]
    Tree,
    /// Adding parent `j` to variable `i` splits every leaf of tree `i` on `j`.
    FullCpt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesianNetwork<F> {
    trees: Vec<DecisionTree<F>>,
    parents: Vec<Vec<usize>>,
    mode: NetworkMode,
}

impl<F: Scalar> BayesianNetwork<F> {
    /// Edge-free network whose leaves all hold the given counts.
    pub fn empty(n: usize, mode: NetworkMode, count0: u64, count1: u64) -> Self {
        BayesianNetwork {
            trees: (0..n)
                .map(|i| DecisionTree::new(i, Leaf::with_counts(count0, count1)))
                .collect(),
            parents: vec![Vec::new(); n],
            mode,
        }
    }

    /// Assembles a network from per-variable trees, deriving the dependency
    /// graph and checking every structural invariant.
    pub fn from_trees(trees: Vec<DecisionTree<F>>, mode: NetworkMode) -> Result<Self> {
        let n = trees.len();
        for (i, tree) in trees.iter().enumerate() {
            if tree.target() != i {
                return Err(BoaError::invalid(format!(
                    "tree at position {i} targets variable {}",
                    tree.target()
                )));
            }
            tree.validate()?;
            if tree.split_vars().iter().any(|&v| v >= n) {
                return Err(BoaError::invalid(format!("tree {i} splits on unknown variable")));
            }
        }
        let parents = trees.iter().map(|t| t.split_vars()).collect();
        let net = BayesianNetwork {
            trees,
            parents,
            mode,
        };
        topological_order(&net).map_err(|_| BoaError::invalid("dependency graph has a cycle"))?;
        if mode == NetworkMode::FullCpt {
            for (i, tree) in net.trees.iter().enumerate() {
                if tree.leaf_count() != 1usize << net.parents[i].len() {
                    return Err(BoaError::invalid(format!(
                        "tree {i} is not a complete table over its parents"
                    )));
                }
            }
        }
        Ok(net)
    }

    pub fn n(&self) -> usize {
        self.trees.len()
    }

    pub fn mode(&self) -> NetworkMode {
        self.mode
    }

    pub fn tree(&self, i: usize) -> &DecisionTree<F> {
        &self.trees[i]
    }

    pub fn trees(&self) -> &[DecisionTree<F>] {
        &self.trees
    }

    pub(crate) fn trees_mut(&mut self) -> &mut [DecisionTree<F>] {
        &mut self.trees
    }

    /// Parents of `i`, ascending.
    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    /// All edges `(from, to)`, ordered by `to` then `from`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(to, ps)| ps.iter().map(move |&from| (from, to)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// True if a directed path `from ~> to` exists (a node reaches itself).
    pub fn has_path(&self, from: usize, to: usize) -> bool {
        let n = self.n();
        let mut children = vec![Vec::new(); n];
        for (child, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                children[p].push(child);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if !std::mem::replace(&mut seen[v], true) {
                stack.extend(children[v].iter().copied());
            }
        }
        false
    }

    /// Probability of a complete string under the encoded joint distribution.
    pub fn joint_probability(&self, bits: &BitString) -> F {
        self.trees
            .iter()
            .map(|tree| {
                let leaf = tree.leaf(tree.leaf_for(bits)).expect("traversal ends at a leaf");
                let p = leaf_probability(leaf);
                if bits.get(tree.target()) {
                    p
                } else {
                    F::one() - p
                }
            })
            .fold(F::one(), |acc, p| acc * p)
    }

    pub(crate) fn add_parent(&mut self, child: usize, parent: usize) {
        let ps = &mut self.parents[child];
        if let Err(pos) = ps.binary_search(&parent) {
            ps.insert(pos, parent);
        }
    }
}
