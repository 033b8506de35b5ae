//! Power and cost of trees.
//!
//! The power of a node with respect to an edge set is the largest cost of an
//! incident edge; the power of the set is the sum over its nodes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::{EdgeId, Instance, NodeId};
use crate::util::DisjointSets;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerTree {
    pub edges: Vec<EdgeId>,
    pub node_powers: BTreeMap<NodeId, Cost>,
    pub total_power: Cost,
    pub total_cost: Cost,
}

impl PowerTree {
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_powers.keys().copied()
    }
}

/// Per-node power of an arbitrary edge set (no tree requirement).
pub fn node_powers(instance: &Instance, edges: &[EdgeId]) -> BTreeMap<NodeId, Cost> {
    let mut powers = BTreeMap::new();
    for &id in edges {
        let e = instance.edge(id);
        for x in [e.u, e.v] {
            let p = powers.entry(x).or_insert(Cost::ZERO);
            if e.cost > *p {
                *p = e.cost;
            }
        }
    }
    powers
}

pub fn edge_set_power(instance: &Instance, edges: &[EdgeId]) -> Cost {
    node_powers(instance, edges).values().sum()
}

/// Power of an edge set in the instance's scaled integer weights.
pub(crate) fn scaled_power(instance: &Instance, edges: &[EdgeId]) -> i128 {
    let mut best: BTreeMap<NodeId, i128> = BTreeMap::new();
    for &id in edges {
        let e = instance.edge(id);
        let w = instance.weight(id);
        for x in [e.u, e.v] {
            let p = best.entry(x).or_insert(0);
            *p = (*p).max(w);
        }
    }
    best.values().sum()
}

/// Evaluates a tree spanning the instance's terminals.
pub fn evaluate(instance: &Instance, edge_set: &[EdgeId]) -> Result<PowerTree> {
    if let Some(&bad) = edge_set.iter().find(|&&e| e >= instance.edge_count()) {
        return Err(Error::UnknownEdge(bad));
    }
    let mut sets = DisjointSets::new(instance.node_count());
    for &id in edge_set {
        let e = instance.edge(id);
        if !sets.union(e.u, e.v) {
            return Err(Error::CyclicEdgeSet);
        }
    }
    let powers = node_powers(instance, edge_set);
    if edge_set.is_empty() {
        if let [_, second, ..] = instance.terminals() {
            return Err(Error::TerminalNotCovered(*second));
        }
    } else {
        let anchor = instance.edge(edge_set[0]).u;
        if powers.keys().any(|&v| !sets.same(v, anchor)) {
            return Err(Error::DisconnectedEdgeSet);
        }
        if let Some(&t) = instance.terminals().iter().find(|t| !powers.contains_key(t)) {
            return Err(Error::TerminalNotCovered(t));
        }
    }
    let mut edges = edge_set.to_vec();
    edges.sort_unstable();
    let total_power = powers.values().sum();
    let total_cost = edges.iter().map(|&e| instance.cost(e)).sum();
    let mut node_powers = powers;
    if edges.is_empty() {
        node_powers.insert(instance.root(), Cost::ZERO);
    }
    Ok(PowerTree { edges, node_powers, total_power, total_cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Edge;

    fn inst(n: usize, edges: &[(usize, usize, i128)], terminals: &[usize]) -> Instance {
        let edges = edges
            .iter()
            .map(|&(u, v, c)| Edge { u, v, cost: Cost::integer(c) })
            .collect();
        Instance::new(n, edges, terminals.iter().copied(), terminals[0]).unwrap()
    }

    #[test]
    fn single_edge() {
        let i = inst(2, &[(0, 1, 5)], &[0, 1]);
        let t = evaluate(&i, &[0]).unwrap();
        assert_eq!(t.total_cost, Cost::integer(5));
        assert_eq!(t.total_power, Cost::integer(10));
    }

    #[test]
    fn star_of_three() {
        let i = inst(4, &[(0, 1, 2), (0, 2, 2), (0, 3, 2)], &[1, 2, 3]);
        let t = evaluate(&i, &[0, 1, 2]).unwrap();
        assert_eq!(t.total_cost, Cost::integer(6));
        assert_eq!(t.total_power, Cost::integer(8));
    }

    #[test]
    fn path_of_two() {
        let i = inst(3, &[(0, 1, 1), (1, 2, 3)], &[0, 2]);
        let t = evaluate(&i, &[0, 1]).unwrap();
        assert_eq!(t.total_cost, Cost::integer(4));
        assert_eq!(t.total_power, Cost::integer(7));
        assert_eq!(t.node_powers[&1], Cost::integer(3));
    }

    #[test]
    fn rejects_cycles_and_uncovered_terminals() {
        let i = inst(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], &[0, 2]);
        assert_eq!(evaluate(&i, &[0, 1, 2]), Err(Error::CyclicEdgeSet));
        assert_eq!(evaluate(&i, &[0]), Err(Error::TerminalNotCovered(2)));
        assert_eq!(evaluate(&i, &[]), Err(Error::TerminalNotCovered(2)));
        assert_eq!(evaluate(&i, &[9]), Err(Error::UnknownEdge(9)));
    }

    #[test]
    fn empty_tree_for_single_terminal() {
        let i = inst(2, &[(0, 1, 4)], &[1]);
        let t = evaluate(&i, &[]).unwrap();
        assert_eq!(t.total_power, Cost::ZERO);
    }

    #[test]
    fn scaled_power_matches_exact() {
        let edges = vec![
            Edge { u: 0, v: 1, cost: Cost::new(1, 2) },
            Edge { u: 1, v: 2, cost: Cost::new(3, 10) },
        ];
        let i = Instance::new(3, edges, [0, 2], 0).unwrap();
        let exact = evaluate(&i, &[0, 1]).unwrap().total_power;
        assert_eq!(i.unscale(scaled_power(&i, &[0, 1])), exact);
    }
}
