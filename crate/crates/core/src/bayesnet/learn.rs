//! Greedy structure learning.
//!
//! The data set is transposed into one bitset column per variable, and each
//! leaf keeps the bitset of rows routed to it, so the counts needed to score
//! a candidate split are two popcounts over `N / 64` words.
//!
//! Tree mode applies, per iteration, the single best `(tree, leaf, variable)`
//! split with positive gain. FullCpt mode applies the best edge `j -> i`,
//! where the gain of an edge is the summed gain of splitting every leaf of
//! tree `i` on `j`. Ties go to the lowest `(tree, leaf, variable)`. Splits
//! that would close a cycle are never taken.

use crate::error::{BoaError, Result};
use crate::population::BitString;
use crate::scalar::Scalar;

use super::score::{leaf_score, ScoreParams, ScoreTable};
use super::tree::{DecisionTree, Leaf, NodeId};
use super::{BayesianNetwork, NetworkMode};

/// Outcome of scoring one candidate split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitGain<F> {
    /// Score difference `children - leaf` (bits).
    Gain(F),
    /// The split would add an edge closing a directed cycle.
    Cyclic,
}

/// Scores splitting `leaf` of tree `target` on `split_var` by scanning
/// `data` directly.
///
/// Only rows that satisfy the leaf's path condition are counted.
pub fn split_gain<F: Scalar>(
    net: &BayesianNetwork<F>,
    target: usize,
    leaf: NodeId,
    split_var: usize,
    data: &[BitString],
    params: &ScoreParams<F>,
) -> Result<SplitGain<F>> {
    params.validate()?;
    let n = net.n();
    if target >= n || split_var >= n {
        return Err(BoaError::invalid("variable index out of range"));
    }
    if split_var == target {
        return Err(BoaError::invalid("a variable cannot split its own tree"));
    }
    let tree = net.tree(target);
    let path = tree.path_to(leaf)?;
    if path.iter().any(|&(v, _)| v == split_var) {
        return Err(BoaError::invalid(format!(
            "variable {split_var} already on the path to leaf {leaf}"
        )));
    }
    if net.has_path(target, split_var) {
        return Ok(SplitGain::Cyclic);
    }
    // counts[x_j][x_i]
    let mut counts = [[0u64; 2]; 2];
    for row in data {
        if row.len() != n {
            return Err(BoaError::invalid("data row length differs from network size"));
        }
        if path.iter().all(|&(v, value)| row.get(v) == value) {
            counts[row.get(split_var) as usize][row.get(target) as usize] += 1;
        }
    }
    let parent = leaf_score(counts[0][0] + counts[1][0], counts[0][1] + counts[1][1], params);
    let children = leaf_score(counts[0][0], counts[0][1], params)
        + leaf_score(counts[1][0], counts[1][1], params);
    Ok(SplitGain::Gain(children - parent))
}

/// Learns a network from `data` by greedy splitting until no split improves
/// the score. Leaf counts are filled from `data`; fitness statistics start empty.
pub fn learn_network<F: Scalar>(
    data: &[BitString],
    params: &ScoreParams<F>,
    mode: NetworkMode,
) -> Result<BayesianNetwork<F>> {
    if data.is_empty() {
        return Err(BoaError::invalid("cannot learn a network from empty data"));
    }
    params.validate()?;
    let n = data[0].len();
    if data.iter().any(|row| row.len() != n) {
        return Err(BoaError::invalid("data rows differ in length"));
    }
    let columns = Columns::new(data);
    let table = ScoreTable::new(params, data.len());
    let mut learner = Learner::new(n, &columns, &table, mode);
    match mode {
        NetworkMode::Tree => learner.run_tree_mode(),
        NetworkMode::FullCpt => learner.run_full_cpt_mode(),
    }
    Ok(learner.net)
}

struct Columns {
    cols: Vec<Vec<u64>>,
    all: Vec<u64>,
}

impl Columns {
    fn new(data: &[BitString]) -> Self {
        let rows = data.len();
        let words = rows.div_ceil(64);
        let n = data[0].len();
        let mut cols = vec![vec![0u64; words]; n];
        for (r, row) in data.iter().enumerate() {
            let (w, b) = (r / 64, r % 64);
            for (v, col) in cols.iter_mut().enumerate() {
                if row.get(v) {
                    col[w] |= 1 << b;
                }
            }
        }
        let mut all = vec![u64::MAX; words];
        if rows % 64 != 0 {
            all[words - 1] = (1u64 << (rows % 64)) - 1;
        }
        Columns { cols, all }
    }
}

#[inline]
fn and_count(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum()
}

fn and_mask(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn and_not_mask(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & !y).collect()
}

/// `reach[a]` holds every node reachable from `a` by a non-empty path.
struct Reachability {
    words: usize,
    reach: Vec<Vec<u64>>,
}

impl Reachability {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Reachability {
            words,
            reach: vec![vec![0; words]; n],
        }
    }

    #[inline]
    fn reaches(&self, from: usize, to: usize) -> bool {
        (self.reach[from][to / 64] >> (to % 64)) & 1 == 1
    }

    /// Edge `from -> to` is admissible unless `to` already reaches `from`.
    #[inline]
    fn admissible(&self, from: usize, to: usize) -> bool {
        !self.reaches(to, from)
    }

    fn add_edge(&mut self, from: usize, to: usize) {
        let mut gained = self.reach[to].clone();
        gained[to / 64] |= 1 << (to % 64);
        for a in 0..self.reach.len() {
            if a == from || self.reaches(a, from) {
                for w in 0..self.words {
                    self.reach[a][w] |= gained[w];
                }
            }
        }
    }
}

struct LeafState<F> {
    node: NodeId,
    rows: Vec<u64>,
    m0: u64,
    m1: u64,
    /// `None` when the variable is the target or already on the leaf's path.
    gains: Vec<Option<F>>,
    /// Cached best admissible positive candidate `(gain, var)`.
    best: Option<(F, usize)>,
}

struct Learner<'a, F> {
    n: usize,
    columns: &'a Columns,
    table: &'a ScoreTable<F>,
    net: BayesianNetwork<F>,
    leaves: Vec<Vec<LeafState<F>>>,
    reach: Reachability,
}

impl<'a, F: Scalar> Learner<'a, F> {
    fn new(n: usize, columns: &'a Columns, table: &'a ScoreTable<F>, mode: NetworkMode) -> Self {
        let mut net = BayesianNetwork::empty(n, mode, 0, 0);
        let mut leaves = Vec::with_capacity(n);
        for i in 0..n {
            let rows = columns.all.clone();
            let state = Self::make_leaf(n, columns, table, i, 0, rows, &[]);
            *net.trees_mut()[i].leaf_mut(0).expect("root leaf") =
                Leaf::with_counts(state.m0, state.m1);
            leaves.push(vec![state]);
        }
        Learner {
            n,
            columns,
            table,
            net,
            leaves,
            reach: Reachability::new(n),
        }
    }

    fn make_leaf(
        n: usize,
        columns: &Columns,
        table: &ScoreTable<F>,
        target: usize,
        node: NodeId,
        rows: Vec<u64>,
        path: &[usize],
    ) -> LeafState<F> {
        let rows_one = and_mask(&rows, &columns.cols[target]);
        let total: u64 = rows.iter().map(|w| w.count_ones() as u64).sum();
        let m1: u64 = rows_one.iter().map(|w| w.count_ones() as u64).sum();
        let m0 = total - m1;
        let score = table.score(m0, m1);
        let gains = (0..n)
            .map(|j| {
                if j == target || path.contains(&j) {
                    return None;
                }
                if total == 0 {
                    // Both children empty-or-equal: exactly one extra penalty.
                    return Some(table.score(0, 0));
                }
                let col = &columns.cols[j];
                let with_j = and_count(&rows, col);
                let both = and_count(&rows_one, col);
                let (c1_m0, c1_m1) = (with_j - both, both);
                let (c0_m0, c0_m1) = (m0 - c1_m0, m1 - both);
                Some(table.score(c0_m0, c0_m1) + table.score(c1_m0, c1_m1) - score)
            })
            .collect();
        LeafState {
            node,
            rows,
            m0,
            m1,
            gains,
            best: None,
        }
    }

    fn refresh_best(state: &mut LeafState<F>, target: usize, reach: &Reachability) {
        let mut best: Option<(F, usize)> = None;
        for (j, gain) in state.gains.iter().enumerate() {
            if let Some(g) = *gain {
                if g > F::zero()
                    && best.is_none_or(|(bg, _)| g > bg)
                    && reach.admissible(j, target)
                {
                    best = Some((g, j));
                }
            }
        }
        state.best = best;
    }

    fn path_vars(&self, target: usize, node: NodeId) -> Vec<usize> {
        self.net.tree(target)
            .path_to(node)
            .expect("leaf state refers to a live leaf")
            .into_iter()
            .map(|(v, _)| v)
            .collect()
    }

    fn split(&mut self, target: usize, leaf_index: usize, var: usize) {
        let state = self.leaves[target].remove(leaf_index);
        let mut path = self.path_vars(target, state.node);
        path.push(var);
        let col = &self.columns.cols[var];
        let rows1 = and_mask(&state.rows, col);
        let rows0 = and_not_mask(&state.rows, col);
        let tree: &mut DecisionTree<F> = &mut self.net.trees_mut()[target];
        let ids = tree.split_leaf_unchecked(state.node, var, Leaf::default(), Leaf::default());
        for (id, rows) in ids.into_iter().zip([rows0, rows1]) {
            let mut child =
                Self::make_leaf(self.n, self.columns, self.table, target, id, rows, &path);
            *self.net.trees_mut()[target].leaf_mut(id).expect("new leaf") =
                Leaf::with_counts(child.m0, child.m1);
            Self::refresh_best(&mut child, target, &self.reach);
            // New ids exceed all live ones, so appending keeps the list sorted.
            self.leaves[target].push(child);
        }
        if !self.net.parents(target).contains(&var) {
            self.net.add_parent(target, var);
            self.reach.add_edge(var, target);
        }
    }

    fn run_tree_mode(&mut self) {
        for i in 0..self.n {
            for state in &mut self.leaves[i] {
                Self::refresh_best(state, i, &self.reach);
            }
        }
        loop {
            let mut best: Option<(F, usize, usize, usize)> = None;
            for (i, states) in self.leaves.iter().enumerate() {
                for (k, state) in states.iter().enumerate() {
                    if let Some((g, j)) = state.best {
                        if best.is_none_or(|(bg, ..)| g > bg) {
                            best = Some((g, i, k, j));
                        }
                    }
                }
            }
            let Some((_, i, k, j)) = best else { break };
            // Admissibility only ever shrinks, so a stale cache is re-derived
            // lazily and the search repeated.
            if !self.reach.admissible(j, i) {
                Self::refresh_best(&mut self.leaves[i][k], i, &self.reach);
                continue;
            }
            self.split(i, k, j);
        }
    }

    fn run_full_cpt_mode(&mut self) {
        loop {
            let mut best: Option<(F, usize, usize)> = None;
            for i in 0..self.n {
                let states = &self.leaves[i];
                for j in 0..self.n {
                    if j == i || self.net.parents(i).contains(&j) || !self.reach.admissible(j, i) {
                        continue;
                    }
                    let total: F = states
                        .iter()
                        .map(|s| s.gains[j].expect("non-parent variable is splittable"))
                        .sum();
                    if total > F::zero() && best.is_none_or(|(bg, ..)| total > bg) {
                        best = Some((total, i, j));
                    }
                }
            }
            let Some((_, i, j)) = best else { break };
            let count = self.leaves[i].len();
            for _ in 0..count {
                // Each split removes the front leaf and appends its children.
                self.split(i, 0, j);
            }
        }
    }
}
