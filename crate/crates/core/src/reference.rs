//! Exact min-power solvers and min-cost baselines.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use crate::component::{prune_leaves, tree_within};
use crate::error::{Error, Result};
use crate::instance::{EdgeId, Instance, NodeId};
use crate::power::{evaluate, scaled_power, PowerTree};
use crate::util::DisjointSets;

/// Node limit of [`exact_min_power`].
pub const EXACT_NODE_LIMIT: usize = 12;
/// Terminal limit of the subset dynamic programs.
pub const SUBSET_TERMINAL_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeMode {
    Steiner,
    /// Every node is a terminal.
    Spanning,
}

impl fmt::Display for TreeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeMode::Steiner => "steiner",
            TreeMode::Spanning => "spanning",
        })
    }
}

impl FromStr for TreeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "steiner" => Ok(TreeMode::Steiner),
            "spanning" => Ok(TreeMode::Spanning),
            _ => Err(Error::InvalidParameter(format!("unknown mode `{s}`"))),
        }
    }
}

/// The instance a mode actually solves.
pub fn mode_instance(instance: &Instance, mode: TreeMode) -> Result<Instance> {
    match mode {
        TreeMode::Steiner => Ok(instance.clone()),
        TreeMode::Spanning => Ok(instance.spanning()?),
    }
}

/// Minimum-power tree by branch and bound over the subtrees that contain the
/// root. A subtree is grown by including or excluding the lowest-id frontier
/// edge; growth stops once every terminal is covered. Ties go to the
/// lexicographically smallest sorted edge list.
pub fn exact_min_power(instance: &Instance, mode: TreeMode) -> Result<PowerTree> {
    if instance.node_count() > EXACT_NODE_LIMIT {
        return Err(Error::NodeGuard { nodes: instance.node_count(), limit: EXACT_NODE_LIMIT });
    }
    let inst = mode_instance(instance, mode)?;
    if inst.terminals().len() == 1 {
        return evaluate(&inst, &[]);
    }
    let start = exact_min_power_dp(&inst, TreeMode::Steiner)?;
    let mut start_edges = start.edges.clone();
    start_edges.sort_unstable();
    let mut search = Search {
        inst: &inst,
        terminal_mask: inst.terminals().iter().fold(0u32, |m, &t| m | 1 << t),
        best: (scaled_power(&inst, &start_edges), start_edges),
        power: vec![0; inst.node_count()],
        edges: Vec::new(),
    };
    let root = inst.root();
    search.grow(1 << root, 0, 0);
    let edges = search.best.1;
    evaluate(&inst, &edges)
}

struct Search<'a> {
    inst: &'a Instance,
    terminal_mask: u32,
    best: (i128, Vec<EdgeId>),
    power: Vec<i128>,
    edges: Vec<EdgeId>,
}

impl Search<'_> {
    fn grow(&mut self, nodes: u32, total: i128, excluded: u128) {
        let inst = self.inst;
        let uncovered = self.terminal_mask & !nodes;
        if uncovered == 0 {
            let tree = prune_leaves(inst, self.edges.clone(), inst.terminals());
            let key = (scaled_power(inst, &tree), tree);
            if key < self.best {
                self.best = key;
            }
            return;
        }
        let mut bound = total;
        let mut rest = uncovered;
        while rest != 0 {
            let t = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let cheapest = inst
                .neighbors(t)
                .iter()
                .filter(|&&(_, e)| excluded >> e & 1 == 0)
                .map(|&(_, e)| inst.weight(e))
                .min();
            match cheapest {
                Some(w) => bound += w,
                None => return,
            }
        }
        if bound > self.best.0 {
            return;
        }
        let frontier = (0..inst.edge_count()).find(|&e| {
            let edge = inst.edge(e);
            excluded >> e & 1 == 0 && ((nodes >> edge.u & 1) ^ (nodes >> edge.v & 1)) == 1
        });
        let Some(e) = frontier else { return };
        let edge = inst.edge(e);
        let (a, b) = if nodes >> edge.u & 1 == 1 { (edge.u, edge.v) } else { (edge.v, edge.u) };
        let w = inst.weight(e);
        let old = self.power[a];
        let raised = old.max(w);
        self.power[a] = raised;
        self.power[b] = w;
        self.edges.push(e);
        self.grow(nodes | 1 << b, total - old + raised + w, excluded);
        self.edges.pop();
        self.power[a] = old;
        self.power[b] = 0;
        self.grow(nodes, total, excluded | 1 << e);
    }
}

#[derive(Debug, Clone, Copy)]
enum Back {
    Unset,
    Base,
    Merge(u32),
    Lower,
    Extend { from: usize, edge: EdgeId },
}

/// Minimum-power tree by a dynamic program over terminal subsets.
///
/// `F(D, v, l)` is the least power, not counting `v` itself, of a tree that
/// contains `D ∪ {v}` and uses only edges at `v` of cost at most the `l`-th
/// distinct cost incident to `v`. Subtrees are merged at `v` and extended
/// along one edge at a time by a Dijkstra pass. Polynomial in the node count
/// and exponential only in the terminal count.
pub fn exact_min_power_dp(instance: &Instance, mode: TreeMode) -> Result<PowerTree> {
    let inst = mode_instance(instance, mode)?;
    let terminals = inst.terminals();
    let k = terminals.len();
    if k > SUBSET_TERMINAL_LIMIT {
        return Err(Error::TerminalGuard { terminals: k, limit: SUBSET_TERMINAL_LIMIT });
    }
    if k == 1 {
        return evaluate(&inst, &[]);
    }
    let n = inst.node_count();
    let levels: Vec<Vec<i128>> = (0..n)
        .map(|v| {
            let mut l: Vec<i128> = inst.neighbors(v).iter().map(|&(_, e)| inst.weight(e)).collect();
            l.sort_unstable();
            l.dedup();
            l
        })
        .collect();
    let mut offset = vec![0usize; n + 1];
    for v in 0..n {
        offset[v + 1] = offset[v] + levels[v].len();
    }
    let width = offset[n];
    let state_node: Vec<NodeId> = (0..n).flat_map(|v| std::iter::repeat(v).take(levels[v].len())).collect();
    let full = (1u32 << k) - 1;
    let mut value = vec![i128::MAX; (full as usize + 1) * width];
    let mut back = vec![Back::Unset; value.len()];

    for mask in 1..=full {
        let base = mask as usize * width;
        if mask.count_ones() == 1 {
            let t = terminals[mask.trailing_zeros() as usize];
            for s in offset[t]..offset[t + 1] {
                value[base + s] = 0;
                back[base + s] = Back::Base;
            }
        } else {
            let low = mask & mask.wrapping_neg();
            let mut sub = (mask - 1) & mask;
            while sub > 0 {
                if sub & low != 0 {
                    let (a, b) = (sub as usize * width, (mask ^ sub) as usize * width);
                    for s in 0..width {
                        let (x, y) = (value[a + s], value[b + s]);
                        if x != i128::MAX && y != i128::MAX && x + y < value[base + s] {
                            value[base + s] = x + y;
                            back[base + s] = Back::Merge(sub);
                        }
                    }
                }
                sub = (sub - 1) & mask;
            }
        }
        let slice = &mut value[base..base + width];
        let backs = &mut back[base..base + width];
        let mut heap: BinaryHeap<Reverse<(i128, usize)>> = (0..width)
            .filter(|&s| slice[s] != i128::MAX)
            .map(|s| Reverse((slice[s], s)))
            .collect();
        while let Some(Reverse((d, s))) = heap.pop() {
            if slice[s] != d {
                continue;
            }
            let v = state_node[s];
            let level = levels[v][s - offset[v]];
            if s + 1 < offset[v + 1] && d < slice[s + 1] {
                slice[s + 1] = d;
                backs[s + 1] = Back::Lower;
                heap.push(Reverse((d, s + 1)));
            }
            for &(y, e) in inst.neighbors(v) {
                let w = inst.weight(e);
                let cand = d + w.max(level);
                let target = offset[y] + levels[y].binary_search(&w).expect("incident cost");
                if cand < slice[target] {
                    slice[target] = cand;
                    backs[target] = Back::Extend { from: s, edge: e };
                    heap.push(Reverse((cand, target)));
                }
            }
        }
    }

    let r = inst.root();
    let (best_state, _) = (offset[r]..offset[r + 1])
        .filter(|&s| value[full as usize * width + s] != i128::MAX)
        .map(|s| (s, value[full as usize * width + s] + levels[r][s - offset[r]]))
        .min_by_key(|&(s, v)| (v, s))
        .ok_or(Error::NotConnectable)?;
    let mut edges = Vec::new();
    let mut stack = vec![(full, best_state)];
    while let Some((mask, s)) = stack.pop() {
        match back[mask as usize * width + s] {
            Back::Unset => unreachable!("finite state has a back pointer"),
            Back::Base => {}
            Back::Merge(sub) => {
                stack.push((sub, s));
                stack.push((mask ^ sub, s));
            }
            Back::Lower => stack.push((mask, s - 1)),
            Back::Extend { from, edge } => {
                edges.push(edge);
                stack.push((mask, from));
            }
        }
    }
    let tree = tree_within(&inst, &edges, terminals);
    evaluate(&inst, &tree)
}

/// How [`baseline_min_cost`] finds its min-cost tree in Steiner mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteinerCost {
    /// Exact subset dynamic program; fails above the terminal limit.
    Exact,
    /// Exact when within the terminal limit, metric-closure MST otherwise.
    ExactOrApprox,
    /// Always the metric-closure MST.
    Approx,
}

/// Min-cost tree evaluated for power: the MST in spanning mode, a min-cost
/// Steiner tree in Steiner mode.
pub fn baseline_min_cost(instance: &Instance, mode: TreeMode, steiner: SteinerCost) -> Result<PowerTree> {
    let inst = mode_instance(instance, mode)?;
    let edges = match mode {
        TreeMode::Spanning => {
            let all: Vec<EdgeId> = (0..inst.edge_count()).collect();
            kruskal(&inst, &all)
        }
        TreeMode::Steiner => {
            let exact_ok = inst.terminals().len() <= SUBSET_TERMINAL_LIMIT;
            match steiner {
                SteinerCost::Exact if !exact_ok => {
                    return Err(Error::TerminalGuard {
                        terminals: inst.terminals().len(),
                        limit: SUBSET_TERMINAL_LIMIT,
                    })
                }
                SteinerCost::Exact | SteinerCost::ExactOrApprox if exact_ok => min_cost_steiner(&inst),
                _ => metric_closure_tree(&inst),
            }
        }
    };
    evaluate(&inst, &edges)
}

/// Minimum spanning forest of `edges`, ties by edge id.
fn kruskal(inst: &Instance, edges: &[EdgeId]) -> Vec<EdgeId> {
    let mut sorted = edges.to_vec();
    sorted.sort_by_key(|&e| (inst.weight(e), e));
    let mut sets = DisjointSets::new(inst.node_count());
    let mut out: Vec<EdgeId> = sorted
        .into_iter()
        .filter(|&e| sets.union(inst.edge(e).u, inst.edge(e).v))
        .collect();
    out.sort_unstable();
    out
}

/// Single-source shortest paths by cost; returns distances and parent edges.
fn dijkstra(inst: &Instance, src: NodeId) -> (Vec<i128>, Vec<Option<EdgeId>>) {
    let n = inst.node_count();
    let mut dist = vec![i128::MAX; n];
    let mut parent = vec![None; n];
    dist[src] = 0;
    let mut heap = BinaryHeap::from([Reverse((0i128, src))]);
    while let Some(Reverse((d, x))) = heap.pop() {
        if d != dist[x] {
            continue;
        }
        for &(y, e) in inst.neighbors(x) {
            let cand = d + inst.weight(e);
            if cand < dist[y] {
                dist[y] = cand;
                parent[y] = Some(e);
                heap.push(Reverse((cand, y)));
            }
        }
    }
    (dist, parent)
}

/// Dreyfus-Wagner min-cost Steiner tree.
fn min_cost_steiner(inst: &Instance) -> Vec<EdgeId> {
    let terminals = inst.terminals();
    let k = terminals.len();
    if k == 1 {
        return Vec::new();
    }
    let n = inst.node_count();
    let full = (1u32 << k) - 1;
    let mut value = vec![i128::MAX; (full as usize + 1) * n];
    let mut back = vec![Back::Unset; value.len()];
    for mask in 1..=full {
        let base = mask as usize * n;
        if mask.count_ones() == 1 {
            let t = terminals[mask.trailing_zeros() as usize];
            value[base + t] = 0;
            back[base + t] = Back::Base;
        } else {
            let low = mask & mask.wrapping_neg();
            let mut sub = (mask - 1) & mask;
            while sub > 0 {
                if sub & low != 0 {
                    let (a, b) = (sub as usize * n, (mask ^ sub) as usize * n);
                    for v in 0..n {
                        let (x, y) = (value[a + v], value[b + v]);
                        if x != i128::MAX && y != i128::MAX && x + y < value[base + v] {
                            value[base + v] = x + y;
                            back[base + v] = Back::Merge(sub);
                        }
                    }
                }
                sub = (sub - 1) & mask;
            }
        }
        let slice = &mut value[base..base + n];
        let backs = &mut back[base..base + n];
        let mut heap: BinaryHeap<Reverse<(i128, usize)>> =
            (0..n).filter(|&v| slice[v] != i128::MAX).map(|v| Reverse((slice[v], v))).collect();
        while let Some(Reverse((d, v))) = heap.pop() {
            if slice[v] != d {
                continue;
            }
            for &(y, e) in inst.neighbors(v) {
                let cand = d + inst.weight(e);
                if cand < slice[y] {
                    slice[y] = cand;
                    backs[y] = Back::Extend { from: v, edge: e };
                    heap.push(Reverse((cand, y)));
                }
            }
        }
    }
    let mut edges = Vec::new();
    let mut stack = vec![(full, inst.root())];
    while let Some((mask, v)) = stack.pop() {
        match back[mask as usize * n + v] {
            Back::Unset | Back::Lower => unreachable!("finite state has a back pointer"),
            Back::Base => {}
            Back::Merge(sub) => {
                stack.push((sub, v));
                stack.push((mask ^ sub, v));
            }
            Back::Extend { from, edge } => {
                edges.push(edge);
                stack.push((mask, from));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    prune_leaves(inst, kruskal(inst, &edges), terminals)
}

/// Metric-closure MST over the terminals, expanded to graph paths, then
/// re-spanned and pruned.
fn metric_closure_tree(inst: &Instance) -> Vec<EdgeId> {
    let terminals = inst.terminals();
    let runs: Vec<(Vec<i128>, Vec<Option<EdgeId>>)> =
        terminals.iter().map(|&t| dijkstra(inst, t)).collect();
    let mut pairs = Vec::new();
    for i in 0..terminals.len() {
        for j in i + 1..terminals.len() {
            pairs.push((runs[i].0[terminals[j]], i, j));
        }
    }
    pairs.sort_unstable();
    let mut sets = DisjointSets::new(terminals.len());
    let mut edges = Vec::new();
    for (_, i, j) in pairs {
        if sets.union(i, j) {
            let mut x = terminals[j];
            while let Some(e) = runs[i].1[x] {
                edges.push(e);
                x = inst.edge(e).other(x);
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    prune_leaves(inst, kruskal(inst, &edges), terminals)
}
