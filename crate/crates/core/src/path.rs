//! Min-power path between two nodes (symmetric unicast).
//!
//! Search runs over states "at node x, entered through edge e". Moving on
//! through edge e' costs `max(c(e), c(e'))`, the power paid at x; the first
//! node pays the first edge and the last node pays the last edge.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::{EdgeId, Instance, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathResult {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub power: Cost,
}

/// Arc `2e` traverses edge `e` from `u` to `v`; arc `2e + 1` from `v` to `u`.
fn arc_tail(inst: &Instance, arc: usize) -> NodeId {
    let e = inst.edge(arc / 2);
    if arc % 2 == 0 {
        e.u
    } else {
        e.v
    }
}

fn arc_head(inst: &Instance, arc: usize) -> NodeId {
    let e = inst.edge(arc / 2);
    if arc % 2 == 0 {
        e.v
    } else {
        e.u
    }
}

fn arc_from(inst: &Instance, edge: EdgeId, from: NodeId) -> usize {
    if inst.edge(edge).u == from {
        2 * edge
    } else {
        2 * edge + 1
    }
}

type Key = (i128, usize);

/// Cost-to-go from each arc state, keyed by (power, remaining edges).
fn cost_to_go(inst: &Instance, dst: NodeId) -> Vec<Option<Key>> {
    let mut best: Vec<Option<Key>> = vec![None; 2 * inst.edge_count()];
    let mut heap = BinaryHeap::new();
    for &(_, e) in inst.neighbors(dst) {
        let arc = 2 * e + usize::from(inst.edge(e).u == dst);
        let key = (inst.weight(e), 0);
        best[arc] = Some(key);
        heap.push(Reverse((key, arc)));
    }
    while let Some(Reverse((key, arc))) = heap.pop() {
        if best[arc] != Some(key) {
            continue;
        }
        let x = arc_tail(inst, arc);
        if x == dst {
            continue;
        }
        let w_out = inst.weight(arc / 2);
        for &(_, e) in inst.neighbors(x) {
            // arc entering x through e
            let incoming = 2 * e + usize::from(inst.edge(e).u == x);
            let cand = (inst.weight(e).max(w_out) + key.0, key.1 + 1);
            if best[incoming].map_or(true, |b| cand < b) {
                best[incoming] = Some(cand);
                heap.push(Reverse((cand, incoming)));
            }
        }
    }
    best
}

/// Minimum-power `src`-`dst` path. Ties go to fewer edges, then to the
/// lexicographically smallest node sequence.
pub fn min_power_path(instance: &Instance, src: NodeId, dst: NodeId) -> Result<PathResult> {
    let n = instance.node_count();
    for x in [src, dst] {
        if x >= n {
            return Err(Error::NodeOutOfRange(x));
        }
    }
    if src == dst {
        return Err(Error::SameEndpoints(src));
    }
    let togo = cost_to_go(instance, dst);
    let start_value = |arc: usize| -> Option<Key> {
        togo[arc].map(|(c, h)| (instance.weight(arc / 2) + c, h + 1))
    };
    let mut options: Vec<(Key, NodeId, usize)> = instance
        .neighbors(src)
        .iter()
        .filter_map(|&(y, e)| {
            let arc = arc_from(instance, e, src);
            start_value(arc).map(|k| (k, y, arc))
        })
        .collect();
    options.sort();
    let Some(&(opt, _, first)) = options.first() else {
        return Err(Error::Unreachable { from: src, to: dst });
    };

    let mut nodes = vec![src, arc_head(instance, first)];
    let mut edges = vec![first / 2];
    let mut arc = first;
    while arc_head(instance, arc) != dst {
        let x = arc_head(instance, arc);
        let target = togo[arc].expect("on an optimal walk");
        let w_in = instance.weight(arc / 2);
        let next = instance
            .neighbors(x)
            .iter()
            .filter_map(|&(y, e)| {
                let out = arc_from(instance, e, x);
                let (c, h) = togo[out]?;
                ((w_in.max(instance.weight(e)) + c, h + 1) == target).then_some((y, out))
            })
            .min()
            .expect("optimal continuation exists");
        nodes.push(next.0);
        edges.push(next.1 / 2);
        arc = next.1;
    }
    Ok(PathResult { nodes, edges, power: instance.unscale(opt.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Edge;

    fn inst(n: usize, edges: &[(usize, usize, i128)]) -> Instance {
        let edges = edges
            .iter()
            .map(|&(u, v, c)| Edge { u, v, cost: Cost::integer(c) })
            .collect();
        Instance::new(n, edges, 0..n, 0).unwrap()
    }

    #[test]
    fn single_edge_pays_twice() {
        let i = inst(2, &[(0, 1, 5)]);
        let p = min_power_path(&i, 0, 1).unwrap();
        assert_eq!(p.nodes, vec![0, 1]);
        assert_eq!(p.power, Cost::integer(10));
    }

    // s = 0, a = 1, t = 2
    #[test]
    fn detour_beats_expensive_direct_edge() {
        let i = inst(3, &[(0, 1, 1), (1, 2, 3), (0, 2, 5)]);
        let p = min_power_path(&i, 0, 2).unwrap();
        assert_eq!(p.nodes, vec![0, 1, 2]);
        assert_eq!(p.power, Cost::integer(7));
    }

    #[test]
    fn direct_edge_beats_detour() {
        let i = inst(3, &[(0, 1, 4), (1, 2, 4), (0, 2, 5)]);
        let p = min_power_path(&i, 0, 2).unwrap();
        assert_eq!(p.nodes, vec![0, 2]);
        assert_eq!(p.power, Cost::integer(10));
    }

    #[test]
    fn ties_prefer_fewer_edges_then_smaller_nodes() {
        // 0-3 direct costs 2 (power 4); 0-1-3 and 0-2-3 with zero costs cost 0.
        let i = inst(4, &[(0, 3, 2), (0, 2, 0), (2, 3, 0), (0, 1, 0), (1, 3, 0)]);
        let p = min_power_path(&i, 0, 3).unwrap();
        assert_eq!(p.power, Cost::ZERO);
        assert_eq!(p.nodes, vec![0, 1, 3]);
        // equal power, fewer edges wins
        let j = inst(3, &[(0, 2, 1), (0, 1, 1), (1, 2, 0)]);
        let q = min_power_path(&j, 0, 2).unwrap();
        assert_eq!(q.power, Cost::integer(2));
        assert_eq!(q.nodes, vec![0, 2]);
    }

    #[test]
    fn errors() {
        let i = Instance::new(3, vec![Edge { u: 0, v: 1, cost: Cost::integer(1) }], [0, 1], 0)
            .unwrap();
        assert_eq!(min_power_path(&i, 0, 2), Err(Error::Unreachable { from: 0, to: 2 }));
        assert_eq!(min_power_path(&i, 1, 1), Err(Error::SameEndpoints(1)));
        assert_eq!(min_power_path(&i, 0, 9), Err(Error::NodeOutOfRange(9)));
    }
}
