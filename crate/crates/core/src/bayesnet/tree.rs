use crate::error::{BoaError, Result};
use crate::population::BitString;
use crate::scalar::Scalar;

/// Index of a node inside its tree's arena. The root is always `0`.
pub type NodeId = usize;

/// Leaf payload: Bernoulli counts from model building plus fitness
/// statistics from actually evaluated solutions, split by the value of the
/// tree's own variable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Leaf<F> {
    pub count0: u64,
    pub count1: u64,
    pub fit_sum0: F,
    pub fit_sum1: F,
    pub fit_count0: u64,
    pub fit_count1: u64,
}

impl<F: Scalar> Leaf<F> {
    pub fn with_counts(count0: u64, count1: u64) -> Self {
        Leaf {
            count0,
            count1,
            fit_sum0: F::zero(),
            fit_sum1: F::zero(),
            fit_count0: 0,
            fit_count1: 0,
        }
    }

    pub fn fit_count(&self, value: bool) -> u64 {
        if value {
            self.fit_count1
        } else {
            self.fit_count0
        }
    }

    pub fn fit_sum(&self, value: bool) -> F {
        if value {
            self.fit_sum1
        } else {
            self.fit_sum0
        }
    }

    pub(crate) fn add_fitness(&mut self, value: bool, fitness: F) {
        if value {
            self.fit_sum1 += fitness;
            self.fit_count1 += 1;
        } else {
            self.fit_sum0 += fitness;
            self.fit_count0 += 1;
        }
    }

    pub(crate) fn clear_fitness(&mut self) {
        self.fit_sum0 = F::zero();
        self.fit_sum1 = F::zero();
        self.fit_count0 = 0;
        self.fit_count1 = 0;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node<F> {
    /// `children[0]` is followed when the split variable is 0.
    Split { var: usize, children: [NodeId; 2] },
    Leaf(Leaf<F>),
}

/// Conditional distribution of one variable given its parents.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree<F> {
    target: usize,
    nodes: Vec<Node<F>>,
}

impl<F: Scalar> DecisionTree<F> {
    /// A single-leaf tree (no parents).
    pub fn new(target: usize, root: Leaf<F>) -> Self {
        DecisionTree {
            target,
            nodes: vec![Node::Leaf(root)],
        }
    }

    pub(crate) fn from_nodes(target: usize, nodes: Vec<Node<F>>) -> Self {
        DecisionTree { target, nodes }
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn nodes(&self) -> &[Node<F>] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node<F> {
        &self.nodes[id]
    }

    pub fn leaf(&self, id: NodeId) -> Option<&Leaf<F>> {
        match self.nodes.get(id) {
            Some(Node::Leaf(leaf)) => Some(leaf),
            _ => None,
        }
    }

    pub fn leaf_mut(&mut self, id: NodeId) -> Option<&mut Leaf<F>> {
        match self.nodes.get_mut(id) {
            Some(Node::Leaf(leaf)) => Some(leaf),
            _ => None,
        }
    }

    /// Leaf ids in pre-order (0-branch before 1-branch).
    pub fn leaf_ids(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![0];
        while let Some(id) = stack.pop() {
            match &self.nodes[id] {
                Node::Leaf(_) => out.push(id),
                Node::Split { children, .. } => {
                    stack.push(children[1]);
                    stack.push(children[0]);
                }
            }
        }
        out
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    /// Variables used as splits anywhere in the tree, sorted and deduplicated.
    pub fn split_vars(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { var, .. } => Some(*var),
                Node::Leaf(_) => None,
            })
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Conditions `(var, value)` on the path from the root to `leaf`.
    pub fn path_to(&self, leaf: NodeId) -> Result<Vec<(usize, bool)>> {
        fn walk<F>(
            nodes: &[Node<F>],
            at: NodeId,
            goal: NodeId,
            path: &mut Vec<(usize, bool)>,
        ) -> bool {
            if at == goal {
                return true;
            }
            if let Node::Split { var, children } = &nodes[at] {
                for (value, &child) in [false, true].into_iter().zip(children) {
                    path.push((*var, value));
                    if walk(nodes, child, goal, path) {
                        return true;
                    }
                    path.pop();
                }
            }
            false
        }
        if self.leaf(leaf).is_none() {
            return Err(BoaError::invalid(format!("node {leaf} is not a leaf")));
        }
        let mut path = Vec::new();
        if walk(&self.nodes, 0, leaf, &mut path) {
            Ok(path)
        } else {
            Err(BoaError::Internal(format!("leaf {leaf} unreachable from root")))
        }
    }

    /// Leaf reached by a fully assigned string.
    #[inline]
    pub fn leaf_for(&self, bits: &BitString) -> NodeId {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf(_) => return id,
                Node::Split { var, children } => id = children[bits.get(*var) as usize],
            }
        }
    }

    /// Replaces `leaf` with a split on `var`; returns the new `[child0, child1]`.
    pub fn split_leaf(
        &mut self,
        leaf: NodeId,
        var: usize,
        child0: Leaf<F>,
        child1: Leaf<F>,
    ) -> Result<[NodeId; 2]> {
        let path = self.path_to(leaf)?;
        if var == self.target || path.iter().any(|&(v, _)| v == var) {
            return Err(BoaError::invalid(format!(
                "variable {var} cannot split leaf {leaf} of tree {}",
                self.target
            )));
        }
        Ok(self.split_leaf_unchecked(leaf, var, child0, child1))
    }

    pub(crate) fn split_leaf_unchecked(
        &mut self,
        leaf: NodeId,
        var: usize,
        child0: Leaf<F>,
        child1: Leaf<F>,
    ) -> [NodeId; 2] {
        debug_assert!(matches!(self.nodes[leaf], Node::Leaf(_)));
        let ids = [self.nodes.len(), self.nodes.len() + 1];
        self.nodes.push(Node::Leaf(child0));
        self.nodes.push(Node::Leaf(child1));
        self.nodes[leaf] = Node::Split { var, children: ids };
        ids
    }

    pub(crate) fn leaves_mut(&mut self) -> impl Iterator<Item = &mut Leaf<F>> {
        self.nodes.iter_mut().filter_map(|n| match n {
            Node::Leaf(leaf) => Some(leaf),
            Node::Split { .. } => None,
        })
    }

    /// Checks that no variable repeats on a path and the target never splits.
    pub fn validate(&self) -> Result<()> {
        fn walk<F>(tree: &DecisionTree<F>, at: NodeId, seen: &mut Vec<usize>) -> Result<()> {
            if let Node::Split { var, children } = &tree.nodes[at] {
                if *var == tree.target || seen.contains(var) {
                    return Err(BoaError::Internal(format!(
                        "tree {} repeats variable {var} on a path",
                        tree.target
                    )));
                }
                seen.push(*var);
                walk(tree, children[0], seen)?;
                walk(tree, children[1], seen)?;
                seen.pop();
            }
            Ok(())
        }
        walk(self, 0, &mut Vec::new())
    }
}
