//! Plain-text model dump.
//!
//! Trees are written in variable order, each in pre-order (0-branch first):
//!
//! ```text
//! node <var>
//! leaf <count0> <count1> <fitsum0> <fitcount0> <fitsum1> <fitcount1>
//! ```
//!
//! Pre-order makes each tree self-delimiting, so no separators are needed.

use std::fmt::Write as _;

use crate::error::{BoaError, Result};
use crate::scalar::Scalar;

use super::tree::{DecisionTree, Leaf, Node, NodeId};
use super::{BayesianNetwork, NetworkMode};

pub fn dump<F: Scalar>(net: &BayesianNetwork<F>) -> String {
    let mut out = String::new();
    for tree in net.trees() {
        let mut stack = vec![0];
        while let Some(id) = stack.pop() {
            match tree.node(id) {
                Node::Split { var, children } => {
                    writeln!(out, "node {var}").unwrap();
                    stack.push(children[1]);
                    stack.push(children[0]);
                }
                Node::Leaf(l) => {
                    writeln!(
                        out,
                        "leaf {} {} {} {} {} {}",
                        l.count0, l.count1, l.fit_sum0, l.fit_count0, l.fit_sum1, l.fit_count1
                    )
                    .unwrap();
                }
            }
        }
    }
    out
}

enum Token<F> {
    Split(usize),
    Leaf(Leaf<F>),
}

fn parse_line<F: Scalar>(line_no: usize, line: &str) -> Result<Token<F>> {
    let bad = |what: &str| BoaError::invalid(format!("line {}: {what}: {line:?}", line_no + 1));
    let fields: Vec<&str> = line.split_whitespace().collect();
    let int = |s: &str| s.parse::<u64>().map_err(|_| bad("bad integer"));
    let real = |s: &str| F::from_str_radix(s, 10).map_err(|_| bad("bad number"));
    match fields.as_slice() {
        ["node", var] => Ok(Token::Split(var.parse().map_err(|_| bad("bad variable"))?)),
        ["leaf", c0, c1, s0, f0, s1, f1] => Ok(Token::Leaf(Leaf {
            count0: int(c0)?,
            count1: int(c1)?,
            fit_sum0: real(s0)?,
            fit_count0: int(f0)?,
            fit_sum1: real(s1)?,
            fit_count1: int(f1)?,
        })),
        _ => Err(bad("unrecognized line")),
    }
}

/// Reads a dump of an `n`-variable network back.
pub fn parse_dump<F: Scalar>(text: &str, n: usize, mode: NetworkMode) -> Result<BayesianNetwork<F>> {
    let mut tokens = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line::<F>(i, l));

    // Rebuilds a subtree in pre-order, returning its node id.
    fn build<F: Scalar>(
        tokens: &mut impl Iterator<Item = Result<Token<F>>>,
        nodes: &mut Vec<Node<F>>,
    ) -> Result<NodeId> {
        let token = tokens
            .next()
            .ok_or_else(|| BoaError::invalid("dump ended inside a tree"))??;
        let id = nodes.len();
        match token {
            Token::Leaf(leaf) => nodes.push(Node::Leaf(leaf)),
            Token::Split(var) => {
                nodes.push(Node::Split { var, children: [0, 0] });
                let c0 = build(tokens, nodes)?;
                let c1 = build(tokens, nodes)?;
                nodes[id] = Node::Split { var, children: [c0, c1] };
            }
        }
        Ok(id)
    }

    let mut trees = Vec::with_capacity(n);
    for target in 0..n {
        let mut nodes = Vec::new();
        build(&mut tokens, &mut nodes)?;
        trees.push(DecisionTree::from_nodes(target, nodes));
    }
    if tokens.next().is_some() {
        return Err(BoaError::invalid(format!("dump holds more than {n} trees")));
    }
    BayesianNetwork::from_trees(trees, mode)
}
