//! Heavy, middle and light edges of a tree.
//!
//! Each node's power is set by one incident edge, its most expensive one
//! (smallest edge id on ties). An edge is heavy when it sets the power of both
//! endpoints, middle for exactly one, light for neither. Then
//! `p(S) = (2 γ_H + γ_M) c(S)` where `γ_X = c(X) / c(S)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cost::Cost;
use crate::decomposition::WeightedTree;
use crate::instance::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeClassification {
    pub heavy: Vec<usize>,
    pub middle: Vec<usize>,
    pub light: Vec<usize>,
    pub gamma_h: Cost,
    pub gamma_m: Cost,
    /// `2 γ_H + γ_M`; 1 for a zero-cost tree.
    pub alpha: Cost,
}

pub fn classify_edges(tree: &WeightedTree) -> EdgeClassification {
    let mut defining: BTreeMap<NodeId, usize> = BTreeMap::new();
    for (i, e) in tree.edges().iter().enumerate() {
        for x in [e.u, e.v] {
            let slot = defining.entry(x).or_insert(i);
            if e.cost > tree.edge(*slot).cost {
                *slot = i;
            }
        }
    }
    let (mut heavy, mut middle, mut light) = (Vec::new(), Vec::new(), Vec::new());
    for (i, e) in tree.edges().iter().enumerate() {
        match usize::from(defining[&e.u] == i) + usize::from(defining[&e.v] == i) {
            2 => heavy.push(i),
            1 => middle.push(i),
            _ => light.push(i),
        }
    }
    let sum = |set: &[usize]| -> Cost { set.iter().map(|&i| tree.edge(i).cost).sum() };
    let total = tree.cost();
    let (gamma_h, gamma_m, alpha) = if total.is_zero() {
        (Cost::ZERO, Cost::ZERO, Cost::integer(1))
    } else {
        let inv = total.ratio().recip();
        let gh = sum(&heavy) * inv;
        let gm = sum(&middle) * inv;
        (gh, gm, gh * 2 + gm)
    };
    EdgeClassification { heavy, middle, light, gamma_h, gamma_m, alpha }
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

    #[test]
    fn path_of_two() {
        let t = tree(3, &[(0, 1, 1), (1, 2, 3)], &[0, 2]);
        let c = classify_edges(&t);
        assert_eq!(c.heavy, vec![1]);
        assert_eq!(c.middle, vec![0]);
        assert_eq!(c.gamma_h, Cost::new(3, 4));
        assert_eq!(c.gamma_m, Cost::new(1, 4));
        assert_eq!(c.alpha, Cost::new(7, 4));
        assert_eq!(t.power(), t.cost() * c.alpha.ratio());
    }

    #[test]
    fn uniform_star_identity() {
        let t = tree(4, &[(0, 1, 2), (0, 2, 2), (0, 3, 2)], &[1, 2, 3]);
        let c = classify_edges(&t);
        assert_eq!(c.heavy, vec![0]);
        assert_eq!(c.middle, vec![1, 2]);
        assert_eq!(t.power(), t.cost() * c.alpha.ratio());
    }

    #[test]
    fn zero_cost_tree() {
        let t = tree(2, &[(0, 1, 0)], &[0, 1]);
        assert_eq!(classify_edges(&t).alpha, Cost::integer(1));
    }
}
