//! Binary form of a full component and its random marking.
//!
//! One tree edge is split by a new root `r`. Every node keeps its children in
//! order of decreasing incident cost (ties: smaller edge id); a node with more
//! than two children becomes a chain of zero-cost dummy nodes, so the most
//! expensive edges sit at the highest consecutive levels. Non-root nodes with
//! a single child are shortcut: the two edges merge, costs add up and the
//! merged edge remembers both originals.

use serde::Serialize;

use crate::cost::Cost;
use crate::decomposition::WeightedTree;
use crate::error::{Error, Result};
use crate::instance::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinNode {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Cost of the edge to the parent.
    pub cost: Cost,
    /// The edge to the parent was created by chain splitting.
    pub dummy: bool,
    /// Original tree edges represented by the edge to the parent, top first.
    pub origin: Vec<usize>,
    /// Tree node this vertex stands for; `None` for the root and dummies.
    pub node: Option<NodeId>,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkedBinaryTree {
    pub nodes: Vec<BinNode>,
    pub root: usize,
    /// `marked[x]` says the edge from `x` to its parent is marked.
    pub marked: Vec<bool>,
    pub split_edge: usize,
}

impl MarkedBinaryTree {
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&x| self.nodes[x].children.is_empty()).collect()
    }

    pub fn is_leaf(&self, x: usize) -> bool {
        self.nodes[x].children.is_empty()
    }

    /// Vertices whose parent edge lies on the path between `a` and `b`.
    pub fn path(&self, mut a: usize, mut b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while self.nodes[a].level > self.nodes[b].level {
            out.push(a);
            a = self.nodes[a].parent.expect("non-root");
        }
        while self.nodes[b].level > self.nodes[a].level {
            out.push(b);
            b = self.nodes[b].parent.expect("non-root");
        }
        while a != b {
            out.push(a);
            out.push(b);
            a = self.nodes[a].parent.expect("non-root");
            b = self.nodes[b].parent.expect("non-root");
        }
        out
    }

    /// The leaf reached from `x` by always taking the unmarked child.
    pub fn unmarked_descent(&self, mut x: usize) -> usize {
        while !self.is_leaf(x) {
            x = *self.nodes[x]
                .children
                .iter()
                .find(|&&c| !self.marked[c])
                .expect("one child is unmarked");
        }
        x
    }

    /// Vertices whose parent edge represents original edge `e`. Only the
    /// split edge has two, and the half that keeps its cost comes first.
    pub fn images(&self, e: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&x| self.nodes[x].origin.contains(&e)).collect()
    }

    pub fn primary(&self, e: usize) -> Option<usize> {
        self.images(e).first().copied()
    }
}

/// Binary tree split at the smallest edge id.
pub fn build_binary_tree(tree: &WeightedTree) -> Result<MarkedBinaryTree> {
    build_binary_tree_split(tree, 0)
}

pub fn build_binary_tree_split(tree: &WeightedTree, split_edge: usize) -> Result<MarkedBinaryTree> {
    if tree.terminals().len() < 2 {
        return Err(Error::InvalidParameter("binary tree needs at least two terminals".into()));
    }
    tree.require_full_component()?;
    if split_edge >= tree.edges().len() {
        return Err(Error::UnknownEdge(split_edge));
    }
    let mut b = Builder { tree, nodes: Vec::new() };
    b.nodes.push(BinNode {
        parent: None,
        children: Vec::new(),
        cost: Cost::ZERO,
        dummy: false,
        origin: Vec::new(),
        node: None,
        level: 0,
    });
    let s = tree.edge(split_edge);
    // the half towards `u` keeps the cost; both halves stand for the split edge
    b.attach(0, s.u, s.v, s.cost, vec![split_edge]);
    b.attach(0, s.v, s.u, Cost::ZERO, vec![split_edge]);
    let marked = vec![false; b.nodes.len()];
    Ok(MarkedBinaryTree { nodes: b.nodes, root: 0, marked, split_edge })
}

struct Builder<'a> {
    tree: &'a WeightedTree,
    nodes: Vec<BinNode>,
}

impl Builder<'_> {
    fn push(&mut self, parent: usize, cost: Cost, origin: Vec<usize>, node: Option<NodeId>) -> usize {
        let id = self.nodes.len();
        let level = self.nodes[parent].level + 1;
        self.nodes.push(BinNode {
            parent: Some(parent),
            children: Vec::new(),
            cost,
            dummy: node.is_none(),
            origin,
            node,
            level,
        });
        self.nodes[parent].children.push(id);
        id
    }

    /// Hangs tree node `x`, entered from `from`, below `parent`.
    fn attach(&mut self, parent: usize, mut x: NodeId, mut from: NodeId, mut cost: Cost, mut origin: Vec<usize>) {
        let mut kids = self.children(x, from);
        while kids.len() == 1 {
            let (next, e) = kids[0];
            cost += self.tree.edge(e).cost;
            origin.push(e);
            from = x;
            x = next;
            kids = self.children(x, from);
        }
        let mut cur = self.push(parent, cost, origin, Some(x));
        let k = kids.len();
        for (j, &(w, e)) in kids.iter().enumerate() {
            self.attach(cur, w, x, self.tree.edge(e).cost, vec![e]);
            if j + 2 < k {
                cur = self.push(cur, Cost::ZERO, Vec::new(), None);
            }
        }
    }

    fn children(&self, x: NodeId, from: NodeId) -> Vec<(NodeId, usize)> {
        let mut kids: Vec<(NodeId, usize)> =
            self.tree.neighbors(x).iter().copied().filter(|&(w, _)| w != from).collect();
        kids.sort_by(|a, b| self.tree.edge(b.1).cost.cmp(&self.tree.edge(a.1).cost).then(a.1.cmp(&b.1)));
        kids
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::TreeEdge;

    fn tree(n: usize, edges: &[(usize, usize, i128)], terminals: &[usize]) -> WeightedTree {
        let edges = edges
            .iter()
            .map(|&(u, v, c)| TreeEdge { u, v, cost: Cost::integer(c) })
            .collect();
        WeightedTree::new(n, edges, terminals.iter().copied()).unwrap()
    }

    fn is_binary(b: &MarkedBinaryTree) -> bool {
        b.nodes.iter().all(|n| n.children.is_empty() || n.children.len() == 2)
    }

    #[test]
    fn expensive_edges_sit_high() {
        // center 0 with leaves 1..=5; the cost-1 edge is split
        let t = tree(6, &[(0, 1, 1), (0, 2, 9), (0, 3, 7), (0, 4, 5), (0, 5, 1)], &[1, 2, 3, 4, 5]);
        let b = build_binary_tree(&t).unwrap();
        assert!(is_binary(&b));
        let level = |e: usize| b.nodes[b.primary(e).unwrap()].level;
        assert!(level(1) < level(2) && level(2) < level(3));
        assert_eq!(level(3), level(4));
        let dummies: Vec<&BinNode> = b.nodes.iter().filter(|n| n.dummy).collect();
        assert_eq!(dummies.len(), 2);
        assert!(dummies.iter().all(|n| n.cost.is_zero() && n.origin.is_empty()));
    }

    #[test]
    fn binary_component_keeps_shape() {
        let t = tree(6, &[(0, 1, 2), (0, 2, 3), (1, 3, 1), (1, 4, 4), (0, 5, 6)], &[2, 3, 4, 5]);
        let b = build_binary_tree(&t).unwrap();
        assert!(is_binary(&b));
        assert_eq!(b.nodes.len(), 2 * 4 - 1);
        assert!(b.nodes.iter().all(|n| !n.dummy));
        assert_eq!(b.leaves().len(), 4);
    }

    #[test]
    fn degree_two_nodes_are_shortcut() {
        // path 0 - 1 - 2, then terminal leaves 3 and 4 on node 2
        let t = tree(5, &[(0, 1, 2), (1, 2, 3), (2, 3, 4), (2, 4, 5)], &[0, 3, 4]);
        let b = build_binary_tree(&t).unwrap();
        assert!(is_binary(&b));
        let merged = b.nodes.iter().find(|n| n.origin.len() == 2).unwrap();
        assert_eq!(merged.origin, vec![0, 1]);
        assert_eq!(merged.cost, Cost::integer(3));
        assert!(b.nodes.iter().all(|n| n.node != Some(1)));
    }

    #[test]
    fn needs_two_terminals_and_full_component() {
        let t = tree(3, &[(0, 1, 2), (1, 2, 3)], &[0, 1, 2]);
        assert!(build_binary_tree(&t).is_err());
    }
}
