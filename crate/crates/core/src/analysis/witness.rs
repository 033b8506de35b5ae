//! Random witness trees over the binary form of a full component.
//!
//! Every internal vertex marks one of its two child edges uniformly at random.
//! Two terminals are joined in the witness tree `T*` iff the binary-tree path
//! between them holds exactly one marked edge. The witness set `W(f)` of an
//! original edge `f` lists the `T*` edges whose path crosses an image of `f`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::binary::{build_binary_tree_split, MarkedBinaryTree};
use super::delta::delta_steiner;
use crate::decomposition::WeightedTree;
use crate::error::{Error, Result};
use crate::instance::NodeId;
use crate::util::{mix_seed, DisjointSets};

/// Fewest trials accepted by [`witness_stats`].
pub const MIN_TRIALS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessStructure {
    pub sbin: MarkedBinaryTree,
    /// Witness edges as pairs of terminals, smaller id first, sorted.
    pub tstar: Vec<(NodeId, NodeId)>,
    /// Original edge index to the indices of its witness edges in `tstar`.
    pub witness: BTreeMap<usize, Vec<usize>>,
}

impl WitnessStructure {
    /// `T*` connects all terminals and has no cycle.
    pub fn is_terminal_spanning_tree(&self, terminals: &[NodeId]) -> bool {
        let n = terminals.iter().chain(self.tstar.iter().flat_map(|(a, b)| [a, b])).max().map_or(0, |m| m + 1);
        let mut sets = DisjointSets::new(n);
        for &(a, b) in &self.tstar {
            if !sets.union(a, b) {
                return false;
            }
        }
        self.tstar.len() + 1 == terminals.len() && terminals.iter().all(|&t| sets.same(t, terminals[0]))
    }

    /// Witness edges of original edge `f` as terminal pairs.
    pub fn witness_pairs(&self, f: usize) -> Vec<(NodeId, NodeId)> {
        self.witness.get(&f).map_or_else(Vec::new, |ids| ids.iter().map(|&i| self.tstar[i]).collect())
    }
}

/// Marks one child edge per internal vertex, uniformly and independently.
pub fn sample_witness(sbin: &MarkedBinaryTree, seed: u64) -> WitnessStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut marked = vec![false; sbin.nodes.len()];
    for node in &sbin.nodes {
        if let [a, b] = node.children[..] {
            marked[if rng.gen_bool(0.5) { a } else { b }] = true;
        }
    }
    witness_from_marks(sbin, &marked)
}

/// Witness structure for a fixed marking, given per vertex (true: the edge to
/// its parent is marked).
pub fn witness_from_marks(sbin: &MarkedBinaryTree, marked: &[bool]) -> WitnessStructure {
    let mut sbin = sbin.clone();
    sbin.marked = marked.to_vec();
    let leaves = sbin.leaves();
    let label = |x: usize| sbin.nodes[x].node.expect("leaves are tree nodes");
    let mut tstar = Vec::new();
    let mut paths = Vec::new();
    for (i, &a) in leaves.iter().enumerate() {
        for &b in &leaves[i + 1..] {
            let path = sbin.path(a, b);
            if path.iter().filter(|&&x| sbin.marked[x]).count() == 1 {
                let (p, q) = (label(a), label(b));
                tstar.push((p.min(q), p.max(q)));
                paths.push(path);
            }
        }
    }
    let mut order: Vec<usize> = (0..tstar.len()).collect();
    order.sort_by_key(|&i| tstar[i]);
    let tstar: Vec<(NodeId, NodeId)> = order.iter().map(|&i| tstar[i]).collect();
    let mut witness: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (rank, &i) in order.iter().enumerate() {
        for &x in &paths[i] {
            for &f in &sbin.nodes[x].origin {
                witness.entry(f).or_default().insert(rank);
            }
        }
    }
    let witness = witness.into_iter().map(|(f, s)| (f, s.into_iter().collect())).collect();
    WitnessStructure { sbin, tstar, witness }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub node: NodeId,
    pub i: usize,
    pub trials: usize,
    /// `|W^i(v)|` value to number of trials.
    pub histogram: BTreeMap<usize, usize>,
    /// `2^{-i}`.
    pub expected_frequency: f64,
    /// Share of trials where the unmarked walk from `v` ends at `d′`.
    pub frequency: f64,
    /// Binomial standard deviation of `frequency`.
    pub sigma: f64,
    pub frequency_within_3_sigma: bool,
    pub mean_harmonic: f64,
    /// Standard error of `mean_harmonic`.
    pub mean_harmonic_se: f64,
    pub delta_bound: f64,
    /// `mean_harmonic <= delta_bound + 3 · se`; one-sided, the bound is not tight.
    pub mean_within_bound: bool,
    pub all_spanning: bool,
    pub max_within_count: usize,
}

struct Trial {
    w_size: usize,
    hit: bool,
    spanning: bool,
    within: usize,
}

/// Repeats the marking `trials` times around node `v` of a full component.
///
/// The binary tree is split at the cheapest edge of `v` (smallest id on
/// ties), so the remaining edges `e^1, e^2, ...` of `v` in order of decreasing
/// cost hang off a chain below `v`. The subtree `T′` holds the first `i` links
/// of that chain; `d′` is its leaf that is not an `e^j` endpoint and `s′` is
/// where the unmarked walk from `v` leaves `T′`.
pub fn witness_stats(tree: &WeightedTree, v: NodeId, i: usize, trials: usize, seed: u64) -> Result<WitnessReport> {
    if v >= tree.node_count() || tree.degree(v) < 3 {
        return Err(Error::InvalidParameter(format!("node {v} is not an internal node of degree at least 3")));
    }
    if i < 1 || i + 2 > tree.degree(v) {
        return Err(Error::OutOfRange(format!("i = {i} outside 1..={}", tree.degree(v) - 2)));
    }
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(format!("at least {MIN_TRIALS} trials required")));
    }
    let split = tree
        .neighbors(v)
        .iter()
        .map(|&(_, e)| e)
        .min_by(|&a, &b| tree.edge(a).cost.cmp(&tree.edge(b).cost).then(a.cmp(&b)))
        .expect("v has edges");
    let sbin = build_binary_tree_split(tree, split)?;
    let top = *sbin.images(split).iter().find(|&&x| sbin.nodes[x].node == Some(v)).expect("v sits below the root");

    // chain below v: at step j the e^j child and the continuation
    let mut steps = Vec::with_capacity(i);
    let mut cur = top;
    for _ in 0..i {
        let [a, b] = sbin.nodes[cur].children[..] else { unreachable!("chain nodes are binary") };
        steps.push((a, b));
        cur = b;
    }
    let e_edges: Vec<usize> = steps.iter().map(|&(a, _)| sbin.nodes[a].origin[0]).collect();
    let d_prime = cur;
    let tprime_leaves: Vec<usize> = steps.iter().map(|&(a, _)| a).chain([d_prime]).collect();

    let outcomes: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ws = sample_witness(&sbin, mix_seed(seed, t as u64));
            let marked = &ws.sbin.marked;
            let hit = steps.iter().all(|&(a, _)| marked[a]);
            let mut w: BTreeSet<usize> = BTreeSet::new();
            for e in &e_edges {
                w.extend(ws.witness.get(e).into_iter().flatten().copied());
            }
            let c_leaves: BTreeSet<NodeId> = tprime_leaves
                .iter()
                .map(|&x| ws.sbin.nodes[ws.sbin.unmarked_descent(x)].node.expect("leaf"))
                .collect();
            let within = ws.tstar.iter().filter(|(a, b)| c_leaves.contains(a) && c_leaves.contains(b)).count();
            Trial { w_size: w.len(), hit, spanning: ws.is_terminal_spanning_tree(tree.terminals()), within }
        })
        .collect();

    let mut histogram = BTreeMap::new();
    for o in &outcomes {
        *histogram.entry(o.w_size).or_insert(0) += 1;
    }
    let n = trials as f64;
    let expected = 0.5f64.powi(i as i32);
    let frequency = outcomes.iter().filter(|o| o.hit).count() as f64 / n;
    let sigma = (expected * (1.0 - expected) / n).sqrt();
    let h = |k: usize| (1..=k).map(|j| 1.0 / j as f64).sum::<f64>();
    let values: Vec<f64> = outcomes.iter().map(|o| h(o.w_size)).collect();
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    let delta_bound = delta_steiner(1.0, i)?;
    Ok(WitnessReport {
        node: v,
        i,
        trials,
        histogram,
        expected_frequency: expected,
        frequency,
        sigma,
        frequency_within_3_sigma: (frequency - expected).abs() <= 3.0 * sigma,
        mean_harmonic: mean,
        mean_harmonic_se: se,
        delta_bound,
        mean_within_bound: mean <= delta_bound + 3.0 * se,
        all_spanning: outcomes.iter().all(|o| o.spanning),
        max_within_count: outcomes.iter().map(|o| o.within).max().unwrap_or(0),
    })
}
