//! Decomposition into components with at most h^h terminals.
//!
//! First every node degree is capped at h. A part that still has more than
//! h^h terminals is rooted at its smallest-id non-terminal, degree-2 internal
//! nodes are shortcut, and the nodes on levels ≡ q (mod h) are marked. Cutting
//! at marked nodes gives edge-disjoint subtrees; each marked internal leaf of a
//! subtree gets the path to its rightmost child followed by the leftmost
//! descent to a terminal, so the subtrees stay glued together.

use serde::Serialize;

use super::{bounded_degree_decompose, Decomposition, Part, Rooted, WeightedTree};
use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::NodeId;

/// Largest h accepted; h^h must stay a meaningful count.
const H_MAX: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QChoice {
    Fixed(usize),
    /// The cheapest of all h offsets (smallest q on ties).
    Best,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HPowReport {
    pub decomposition: Decomposition,
    pub q: usize,
    /// Total power for each offset q = 0..h.
    pub per_q: Vec<Cost>,
    /// Power after the degree-capping stage alone.
    pub stage1_power: Cost,
}

pub fn h_power_decompose(tree: &WeightedTree, h: usize, q: QChoice) -> Result<HPowReport> {
    if !(3..=H_MAX).contains(&h) {
        return Err(Error::InvalidParameter(format!("h must lie in 3..={H_MAX}, got {h}")));
    }
    if let QChoice::Fixed(q) = q {
        if q >= h {
            return Err(Error::InvalidParameter(format!("offset {q} must be below h = {h}")));
        }
    }
    let stage1 = bounded_degree_decompose(tree, h)?;
    let cap = h.pow(h as u32);
    let build = |offset: usize| -> Decomposition {
        let parts = stage1
            .parts
            .iter()
            .flat_map(|p| {
                if p.terminals.len() > cap {
                    split_by_levels(tree, &p.edges, h, offset)
                } else {
                    vec![p.clone()]
                }
            })
            .collect();
        Decomposition::from_parts(tree, parts)
    };
    let all: Vec<Decomposition> = (0..h).map(build).collect();
    let per_q: Vec<Cost> = all.iter().map(|d| d.total_power).collect();
    let chosen = match q {
        QChoice::Fixed(q) => q,
        QChoice::Best => (0..h).min_by_key(|&i| (per_q[i], i)).expect("h >= 3"),
    };
    let decomposition = all.into_iter().nth(chosen).expect("chosen < h");
    Ok(HPowReport { decomposition, q: chosen, per_q, stage1_power: stage1.total_power })
}

/// Level-marking split of one full component given by `edges`.
pub fn split_by_levels(tree: &WeightedTree, edges: &[usize], h: usize, q: usize) -> Vec<Part> {
    let mut active = vec![false; tree.edges().len()];
    for &e in edges {
        active[e] = true;
    }
    let mut degree = vec![0usize; tree.node_count()];
    for &e in edges {
        degree[tree.edge(e).u] += 1;
        degree[tree.edge(e).v] += 1;
    }
    let Some(root) = (0..tree.node_count()).find(|&v| degree[v] > 0 && !tree.is_terminal(v)) else {
        return vec![tree.make_part(edges.to_vec())];
    };
    let rooted = Rooted::new(tree, &active, root);

    // shortcut tree: children of x are the next nodes of degree != 2 below it,
    // each reached by a chain of original edges
    let n = tree.node_count();
    let mut kids: Vec<Vec<(NodeId, Vec<usize>)>> = vec![Vec::new(); n];
    let mut order = vec![root];
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for &(c, e) in &rooted.children[x] {
            let mut chain = vec![e];
            let mut y = c;
            while rooted.children[y].len() == 1 {
                let (z, f) = rooted.children[y][0];
                chain.push(f);
                y = z;
            }
            kids[x].push((y, chain));
            order.push(y);
        }
        kids[x].sort_by_key(|(y, _)| *y);
    }
    let mut level = vec![0usize; n];
    let mut owner = vec![root; n];
    for &x in &order {
        for (y, _) in &kids[x] {
            level[*y] = level[x] + 1;
        }
    }
    let marked = |x: NodeId| level[x] % h == q;
    for &x in &order {
        for (y, _) in &kids[x] {
            owner[*y] = if marked(*y) { *y } else { owner[x] };
        }
    }
    owner[root] = root;

    let mut groups: Vec<(NodeId, Vec<usize>)> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for &x in &order {
        if x == root || marked(x) {
            index[x] = groups.len();
            groups.push((x, Vec::new()));
        }
    }
    let rightmost_path = |v: NodeId| -> Vec<usize> {
        let (mut y, chain) = kids[v].last().expect("internal node").clone();
        let mut path = chain;
        while let Some((z, chain)) = kids[y].first() {
            path.extend_from_slice(chain);
            y = *z;
        }
        path
    };
    for &x in &order {
        let g = index[owner[x]];
        for (y, chain) in &kids[x] {
            groups[g].1.extend_from_slice(chain);
            if marked(*y) && !kids[*y].is_empty() {
                let extra = rightmost_path(*y);
                groups[g].1.extend(extra);
            }
        }
    }
    groups
        .into_iter()
        .filter(|(_, edges)| !edges.is_empty())
        .map(|(_, edges)| tree.make_part(edges))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{component_graph, TreeEdge};

    /// Binary component with root r, marked nodes at levels 1 and 4 for q = 1.
    fn level_example() -> WeightedTree {
        // r=0 s1=1 v=2 s3=3 a=4 b=5 u=6 s7=7 c=8 s9=9 d=10 e=11 f=12 s13=13 g=14 h=15 i=16
        let pairs = [
            (0, 1),
            (0, 2),
            (1, 3),
            (1, 4),
            (2, 5),
            (2, 6),
            (3, 7),
            (3, 8),
            (6, 9),
            (6, 10),
            (7, 11),
            (7, 12),
            (9, 13),
            (9, 14),
            (13, 15),
            (13, 16),
        ];
        let edges = pairs
            .iter()
            .map(|&(u, v)| TreeEdge { u, v, cost: Cost::integer(1) })
            .collect();
        WeightedTree::new(17, edges, [4, 5, 8, 10, 11, 12, 14, 15, 16]).unwrap()
    }

    #[test]
    fn level_example_offset_one() {
        let t = level_example();
        let all: Vec<usize> = (0..t.edges().len()).collect();
        let parts = split_by_levels(&t, &all, 3, 1);
        let terminal_sets: Vec<Vec<NodeId>> = parts.iter().map(|p| p.terminals.clone()).collect();
        // root part {a, h}, s1 part {a, c, e, f}, v part {b, d, g, i}, s13 part {h, i}
        assert_eq!(
            terminal_sets,
            vec![vec![4, 15], vec![4, 8, 11, 12], vec![5, 10, 14, 16], vec![15, 16]]
        );
        let u = 6;
        let with_u = parts
            .iter()
            .filter(|p| p.edges.iter().any(|&e| t.edge(e).u == u || t.edge(e).v == u))
            .count();
        assert_eq!(with_u, 2);
        let dec = Decomposition::from_parts(&t, parts);
        assert!(dec.covers(&t));
        assert!(component_graph(&t, &dec).is_tree);
    }

    #[test]
    fn small_trees_skip_the_second_stage() {
        let t = level_example();
        let r = h_power_decompose(&t, 3, QChoice::Best).unwrap();
        assert_eq!(r.per_q, vec![r.stage1_power; 3]);
        assert_eq!(r.q, 0);
    }

    #[test]
    fn parameter_checks() {
        let t = level_example();
        assert!(h_power_decompose(&t, 2, QChoice::Best).is_err());
        assert!(h_power_decompose(&t, 3, QChoice::Fixed(3)).is_err());
    }
}
