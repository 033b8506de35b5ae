//! Iterative randomized rounding.
//!
//! Each round solves the LP on the current costs, samples one terminal set
//! `Q` with probability proportional to `Σ_s x_{Q,s}`, and sets the cost of
//! its min-power component to zero. Costs are zeroed, never contracted. The
//! run stops once the zero-cost edges connect all terminals; the answer is
//! extracted from the zero-cost edges and evaluated under the original costs.

use std::cmp::Reverse;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::component::{enumerate_columns, prune_leaves, K_CAP};
use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::{EdgeId, Instance, NodeId};
use crate::lp::{solve_lp, DEFAULT_TOL};
use crate::power::{evaluate, scaled_power, PowerTree};
use crate::util::DisjointSets;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub lp_objective: f64,
    pub terminals: Vec<NodeId>,
    pub sink: NodeId,
    /// Power of the sampled component under the costs of this round.
    pub component_power: Cost,
    pub component_edges: Vec<EdgeId>,
    pub newly_zeroed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTrace {
    pub seed: u64,
    pub k: usize,
    pub iterations: Vec<IterationRecord>,
}

impl RunTrace {
    pub fn sampled_power(&self) -> Cost {
        self.iterations.iter().map(|r| r.component_power).sum()
    }
}

/// A failed run together with the rounds completed before the failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct IrrFailure {
    pub error: Error,
    pub trace: RunTrace,
}

impl From<IrrFailure> for Error {
    fn from(f: IrrFailure) -> Self {
        f.error
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrrOptions {
    pub k: usize,
    pub seed: u64,
    /// Defaults to `50 · |E|` (at least 1).
    pub max_iters: Option<usize>,
    pub tol: f64,
}

impl IrrOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        IrrOptions { k, seed, max_iters: None, tol: DEFAULT_TOL }
    }

    pub fn max_iters(mut self, n: usize) -> Self {
        self.max_iters = Some(n);
        self
    }
}

/// Default iteration cap for an instance.
pub fn default_max_iters(instance: &Instance) -> usize {
    (50 * instance.edge_count()).max(1)
}

pub fn irr_solve(instance: &Instance, options: IrrOptions) -> Result<(PowerTree, RunTrace), IrrFailure> {
    let mut trace = RunTrace { seed: options.seed, k: options.k, iterations: Vec::new() };
    let fail = |error: Error, trace: RunTrace| IrrFailure { error, trace };
    if !(2..=K_CAP).contains(&options.k) {
        let msg = format!("k must lie in 2..={K_CAP}, got {}", options.k);
        return Err(fail(Error::InvalidParameter(msg), trace));
    }
    let max_iters = options.max_iters.unwrap_or_else(|| default_max_iters(instance));
    if max_iters == 0 {
        return Err(fail(Error::InvalidParameter("max_iters must be positive".into()), trace));
    }
    if instance.terminals().len() == 1 {
        let tree = evaluate(instance, &[]).map_err(|e| fail(e, trace.clone()))?;
        return Ok((tree, trace));
    }
    let k = options.k.min(instance.terminals().len());
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut current = instance.clone();
    loop {
        if trace.iterations.len() == max_iters {
            return Err(fail(Error::IterationCap(max_iters), trace));
        }
        let columns = match enumerate_columns(&current, k) {
            Ok(c) => c,
            Err(e) => return Err(fail(e, trace)),
        };
        let lp = match solve_lp(&current, columns, options.tol) {
            Ok(lp) => lp,
            Err(e) => return Err(fail(e, trace)),
        };
        // columns of one terminal set are adjacent; sample a set by its mass
        let mut groups: Vec<(usize, f64)> = Vec::new();
        for (j, col) in lp.columns.iter().enumerate() {
            let mass = lp.x[j].max(0.0);
            match groups.last_mut() {
                Some((first, m)) if lp.columns[*first].mask == col.mask => *m += mass,
                _ => groups.push((j, mass)),
            }
        }
        let total: f64 = groups.iter().map(|g| g.1).sum();
        let draw: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = groups.iter().rposition(|g| g.1 > 0.0).map(|i| groups[i].0);
        for &(j, m) in &groups {
            acc += m;
            if m > 0.0 && draw < acc {
                chosen = Some(j);
                break;
            }
        }
        let Some(j) = chosen else {
            return Err(fail(Error::LpNumerical("LP solution carries no mass".into()), trace));
        };
        let col = &lp.columns[j];
        let comp = &col.component;
        let newly_zeroed = comp.edges.iter().filter(|&&e| !current.cost(e).is_zero()).count();
        trace.iterations.push(IterationRecord {
            lp_objective: lp.objective,
            terminals: col.terminals.clone(),
            sink: col.sink,
            component_power: comp.power,
            component_edges: comp.edges.clone(),
            newly_zeroed,
        });
        current = current.with_zeroed(comp.edges.iter().copied());
        if zero_power_tree_exists(&current) {
            break;
        }
    }
    let zero: Vec<EdgeId> = (0..current.edge_count()).filter(|&e| current.cost(e).is_zero()).collect();
    match prune(instance, &zero) {
        Ok(tree) => Ok((tree, trace)),
        Err(e) => Err(fail(e, trace)),
    }
}

/// True iff the zero-cost edges connect all terminals.
pub fn zero_power_tree_exists(instance: &Instance) -> bool {
    let mut sets = DisjointSets::new(instance.node_count());
    for (i, e) in instance.edges().iter().enumerate() {
        if instance.cost(i).is_zero() {
            sets.union(e.u, e.v);
        }
    }
    let first = instance.terminals()[0];
    instance.terminals().iter().all(|&t| sets.same(first, t))
}

/// Extracts a tree spanning the terminals from an edge set that connects
/// them. Non-bridge edges are deleted one at a time, each time the one whose
/// removal lowers the power most (ties: higher cost, then smaller id); then
/// non-terminal leaves are removed.
pub fn prune(instance: &Instance, edge_set: &[EdgeId]) -> Result<PowerTree> {
    let mut edges = edge_set.to_vec();
    edges.sort_unstable();
    edges.dedup();
    if let Some(&bad) = edges.iter().find(|&&e| e >= instance.edge_count()) {
        return Err(Error::UnknownEdge(bad));
    }
    let terminals = instance.terminals();
    let mut sets = DisjointSets::new(instance.node_count());
    for &e in &edges {
        sets.union(instance.edge(e).u, instance.edge(e).v);
    }
    if let Some(&t) = terminals.iter().find(|&&t| !sets.same(t, terminals[0])) {
        return Err(Error::TerminalNotCovered(t));
    }
    edges.retain(|&e| sets.same(instance.edge(e).u, terminals[0]));

    loop {
        let before = scaled_power(instance, &edges);
        let mut best: Option<((i128, i128, Reverse<EdgeId>), usize)> = None;
        for (pos, &e) in edges.iter().enumerate() {
            let rest: Vec<EdgeId> = edges.iter().copied().filter(|&f| f != e).collect();
            let mut s = DisjointSets::new(instance.node_count());
            for &f in &rest {
                s.union(instance.edge(f).u, instance.edge(f).v);
            }
            let edge = instance.edge(e);
            if !s.same(edge.u, edge.v) {
                continue;
            }
            let rank = (before - scaled_power(instance, &rest), instance.weight(e), Reverse(e));
            if best.as_ref().map_or(true, |(r, _)| rank > *r) {
                best = Some((rank, pos));
            }
        }
        match best {
            Some((_, pos)) => {
                edges.remove(pos);
            }
            None => break,
        }
    }
    let tree = prune_leaves(instance, edges, terminals);
    evaluate(instance, &tree)
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
    fn zero_instance_halts_after_one_round() {
        let i = inst(3, &[(0, 1, 0), (1, 2, 0)], &[0, 2]);
        let (tree, trace) = irr_solve(&i, IrrOptions::new(2, 1)).unwrap();
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(tree.total_power, Cost::ZERO);
    }

    #[test]
    fn single_edge() {
        let i = inst(2, &[(0, 1, 3)], &[0, 1]);
        let (tree, trace) = irr_solve(&i, IrrOptions::new(2, 9)).unwrap();
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(tree.edges, vec![0]);
        assert_eq!(tree.total_power, Cost::integer(6));
    }

    #[test]
    fn zero_tree_detection() {
        assert!(!zero_power_tree_exists(&inst(3, &[(0, 1, 1), (1, 2, 1)], &[0, 2])));
        assert!(zero_power_tree_exists(&inst(3, &[(0, 1, 0), (1, 2, 0)], &[0, 2])));
        assert!(!zero_power_tree_exists(&inst(4, &[(0, 1, 0), (1, 2, 1), (2, 3, 0)], &[0, 3])));
    }

    #[test]
    fn prune_keeps_tree_and_drops_cycle_edge() {
        let i = inst(3, &[(0, 1, 2), (1, 2, 2), (0, 2, 0)], &[0, 1, 2]);
        assert_eq!(prune(&i, &[0, 1]).unwrap().edges, vec![0, 1]);
        // dropping either cost-2 edge lowers the power; the zero edge stays
        let t = prune(&i, &[0, 1, 2]).unwrap();
        assert_eq!(t.edges, vec![1, 2]);
        assert_eq!(t.total_power, Cost::integer(4));
    }

    #[test]
    fn prune_requires_connection() {
        let i = inst(3, &[(0, 1, 2), (1, 2, 2)], &[0, 2]);
        assert_eq!(prune(&i, &[0]), Err(Error::TerminalNotCovered(2)));
    }

    #[test]
    fn deterministic_trace() {
        let i = inst(
            5,
            &[(0, 1, 3), (1, 2, 1), (2, 3, 4), (3, 4, 2), (0, 4, 5), (1, 3, 2)],
            &[0, 2, 4],
        );
        let a = irr_solve(&i, IrrOptions::new(3, 5)).unwrap();
        let b = irr_solve(&i, IrrOptions::new(3, 5)).unwrap();
        assert_eq!(a, b);
        assert!(a.0.total_power <= a.1.sampled_power());
    }

    #[test]
    fn iteration_cap_reports_partial_trace() {
        let i = inst(4, &[(0, 1, 3), (1, 2, 1), (2, 3, 4)], &[0, 1, 2, 3]);
        let err = irr_solve(&i, IrrOptions::new(2, 0).max_iters(1)).unwrap_err();
        assert_eq!(err.error, Error::IterationCap(1));
        assert_eq!(err.trace.iterations.len(), 1);
    }
}
