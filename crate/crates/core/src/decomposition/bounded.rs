//! Splitting high-degree nodes until every part has degree at most Δ.
//!
//! The tree is rooted at its smallest-id leaf. A split node has degree above
//! Δ while all its descendants are within Δ. Its children, sorted by edge
//! cost, are cut into groups of ⌈Δ/2⌉ until at most Δ − 2 remain; each group
//! with its subtrees becomes a part, and consecutive parts are tied together
//! by a cheapest descending path out of the previous group.

use num_rational::Ratio;

use super::{Decomposition, Rooted, WeightedTree};
use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::NodeId;

/// Worst-case power blow-up `1 + 2 / (⌈Δ/2⌉ − 1)`.
pub fn degree_bound_factor(delta: usize) -> Ratio<i128> {
    let half = delta.div_ceil(2) as i128;
    Ratio::from_integer(1) + Ratio::new(2, half - 1)
}

pub fn bounded_degree_decompose(tree: &WeightedTree, delta: usize) -> Result<Decomposition> {
    if delta < 3 {
        return Err(Error::InvalidParameter(format!("degree bound must be at least 3, got {delta}")));
    }
    tree.require_full_component()?;
    let m = tree.edges().len();
    let root = tree
        .nodes()
        .into_iter()
        .find(|&v| tree.degree(v) == 1)
        .expect("a tree with edges has a leaf");
    let group = delta.div_ceil(2);

    let mut remainder = vec![true; m];
    let mut parts = Vec::new();
    loop {
        let rooted = Rooted::new(tree, &remainder, root);
        let degree = |v: NodeId| rooted.children[v].len() + usize::from(rooted.parent[v].is_some());
        let mut big_below = vec![false; tree.node_count()];
        for &x in rooted.order.iter().rev() {
            big_below[x] = rooted.children[x]
                .iter()
                .any(|&(c, _)| big_below[c] || degree(c) > delta);
        }
        let Some(v) = rooted
            .order
            .iter()
            .copied()
            .filter(|&x| degree(x) > delta && !big_below[x])
            .min()
        else {
            break;
        };

        // cheapest descent value below each node, entering through its parent edge
        let mut descent: Vec<Option<(Cost, Option<usize>)>> = vec![None; tree.node_count()];
        let below = subtree_nodes(&rooted, v);
        for &x in below.iter().rev() {
            let c_in = tree.edge(rooted.parent[x].expect("below v").1).cost;
            descent[x] = Some(if rooted.children[x].is_empty() {
                (c_in, None)
            } else {
                rooted.children[x]
                    .iter()
                    .enumerate()
                    .map(|(k, &(w, e))| {
                        let c = tree.edge(e).cost;
                        (c_in.max(c) + descent[w].expect("child before parent").0, Some(k))
                    })
                    .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
                    .expect("internal node has children")
            });
        }
        let path_from = |u: NodeId, first_edge: usize| -> Vec<usize> {
            let mut path = vec![first_edge];
            let mut x = u;
            while let Some((_, Some(k))) = descent[x] {
                let (w, e) = rooted.children[x][k];
                path.push(e);
                x = w;
            }
            path
        };

        let mut kids = rooted.children[v].clone();
        kids.sort_by(|a, b| tree.edge(a.1).cost.cmp(&tree.edge(b.1).cost).then(a.0.cmp(&b.0)));
        let mut groups: Vec<&[(NodeId, usize)]> = Vec::new();
        let mut rest = kids.as_slice();
        while rest.len() > delta - 2 {
            let (head, tail) = rest.split_at(group);
            groups.push(head);
            rest = tail;
        }
        let mut carry: Option<Vec<usize>> = None;
        for g in &groups {
            let mut edges = Vec::new();
            for &(u, e) in g.iter() {
                edges.push(e);
                edges.extend(subtree_edges(&rooted, u));
            }
            for &e in &edges {
                remainder[e] = false;
            }
            if let Some(p) = carry.take() {
                edges.extend(p);
            }
            parts.push(tree.make_part(edges));
            let &(u, e) = g
                .iter()
                .min_by(|a, b| descent[a.0].unwrap().0.cmp(&descent[b.0].unwrap().0))
                .expect("groups are nonempty");
            carry = Some(path_from(u, e));
        }
        for e in carry.expect("at least one group") {
            remainder[e] = true;
        }
    }
    let last: Vec<usize> = (0..m).filter(|&e| remainder[e]).collect();
    parts.push(tree.make_part(last));
    Ok(Decomposition::from_parts(tree, parts))
}

/// Nodes strictly below `v`, parents before children.
fn subtree_nodes(rooted: &Rooted, v: NodeId) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut stack: Vec<NodeId> = rooted.children[v].iter().rev().map(|&(c, _)| c).collect();
    while let Some(x) = stack.pop() {
        out.push(x);
        stack.extend(rooted.children[x].iter().rev().map(|&(c, _)| c));
    }
    out
}

fn subtree_edges(rooted: &Rooted, u: NodeId) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![u];
    while let Some(x) = stack.pop() {
        for &(c, e) in &rooted.children[x] {
            out.push(e);
            stack.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{component_graph, TreeEdge};

    /// The split example: root leaf f, split node v with children s4, s2, d
    /// (edge costs 1, 2, 4); s4 has leaves a (6), b (3); s2 has leaf c (8).
    pub(crate) fn split_example() -> WeightedTree {
        // f=0 e=1 d=2 a=3 b=4 c=5 r=6 v=7 s4=8 s2=9
        let e = |u, v, c| TreeEdge { u, v, cost: Cost::integer(c) };
        let edges = vec![
            e(6, 0, 5),
            e(6, 1, 5),
            e(6, 7, 5),
            e(7, 8, 1),
            e(7, 9, 2),
            e(7, 2, 4),
            e(8, 3, 6),
            e(8, 4, 3),
            e(9, 5, 8),
        ];
        WeightedTree::new(10, edges, [0, 1, 2, 3, 4, 5]).unwrap()
    }

    #[test]
    fn split_example_delta_three() {
        let t = split_example();
        let d = bounded_degree_decompose(&t, 3).unwrap();
        assert_eq!(d.parts.len(), 2);
        // V1 = {s4, s2} with their subtrees
        assert_eq!(d.parts[0].edges, vec![3, 4, 6, 7, 8]);
        assert_eq!(d.parts[0].terminals, vec![3, 4, 5]);
        // remainder keeps d and gains the path v - s4 - b
        assert_eq!(d.parts[1].edges, vec![0, 1, 2, 3, 5, 7]);
        assert_eq!(d.parts[1].terminals, vec![0, 1, 2, 4]);
        assert!(component_graph(&t, &d).is_tree);
        assert!(d.max_part_degree(&t) <= 3);
        assert!(d.total_power.ratio() <= degree_bound_factor(3) * t.power().ratio());
    }

    #[test]
    fn low_degree_tree_is_one_part() {
        let t = split_example();
        let d = bounded_degree_decompose(&t, 4).unwrap();
        assert_eq!(d.parts.len(), 1);
        assert_eq!(d.total_power, t.power());
    }

    #[test]
    fn rejects_small_delta_and_non_full_trees() {
        let t = split_example();
        assert!(matches!(bounded_degree_decompose(&t, 2), Err(Error::InvalidParameter(_))));
        let e = |u, v| TreeEdge { u, v, cost: Cost::integer(1) };
        let p = WeightedTree::new(3, vec![e(0, 1), e(1, 2)], [0, 1, 2]).unwrap();
        assert!(matches!(bounded_degree_decompose(&p, 3), Err(Error::NotFullComponent(_))));
    }

    #[test]
    fn factors() {
        assert_eq!(degree_bound_factor(3), Ratio::from_integer(3));
        assert_eq!(degree_bound_factor(4), Ratio::from_integer(3));
        assert_eq!(degree_bound_factor(5), Ratio::from_integer(2));
    }
}
