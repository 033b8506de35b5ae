//! Min-power components on small terminal sets and LP column enumeration.
//!
//! A component on `Q` is a tree whose terminals are exactly `Q`; its other
//! nodes are non-terminals. The search enumerates the non-terminal branch
//! nodes `A` (degree >= 3, at most `|Q| - 2` of them) and every labelled tree
//! shape on `Q ∪ A`. Each shape edge `xy` is realized as a boundary edge at
//! `x`, a path through unused non-terminals, and a boundary edge at `y`.
//!
//! Boundary edges at a shape node fix its power, so for a fixed shape the
//! choices decouple once every shape node is assigned a power level: a tree
//! DP over the shape picks levels, and each shape edge takes its cheapest
//! realization under the two endpoint levels. Realizations that overlap are
//! repaired by extracting a spanning tree of their union, which never costs
//! more than the DP value.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::{EdgeId, Instance, NodeId};
use crate::power::edge_set_power;
use crate::util::{subsets_up_to, DisjointSets};

/// Largest terminal-set size the component search accepts.
pub const K_CAP: usize = 4;

/// Upper bound on the number of LP columns `enumerate_columns` will build.
pub const COLUMN_GUARD: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub terminals: Vec<NodeId>,
    pub sink: Option<NodeId>,
    pub edges: Vec<EdgeId>,
    pub power: Cost,
}

impl Component {
    pub fn with_sink(&self, sink: NodeId) -> Component {
        Component { sink: Some(sink), ..self.clone() }
    }
}

/// One LP variable `x_{Q,s}`.
#[derive(Debug, Clone)]
pub struct Column {
    pub terminals: Vec<NodeId>,
    /// Bitmask over terminal slots (see [`Instance::terminal_slot`]).
    pub mask: u64,
    pub sink: NodeId,
    pub sink_slot: usize,
    pub power: Cost,
    pub component: Arc<Component>,
}

struct LinkTable {
    rows: usize,
    cols: usize,
    /// Prefix-minimized over both level axes: cell (a, b) is the cheapest
    /// realization whose boundary costs are within levels a and b.
    cells: Vec<Option<(i128, usize)>>,
    paths: Vec<Vec<EdgeId>>,
}

impl LinkTable {
    fn get(&self, a: usize, b: usize) -> Option<(i128, usize)> {
        self.cells[a * self.cols + b]
    }
}

struct Frame {
    nodes: Vec<NodeId>,
    levels: Vec<Vec<i128>>,
    /// Keyed by (i, j) with i < j, rows indexed by levels of node i.
    links: HashMap<(usize, usize), LinkTable>,
}

impl Frame {
    fn build(inst: &Instance, nodes: Vec<NodeId>) -> Frame {
        let pos: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let interior = |v: NodeId| !inst.is_terminal(v) && !pos.contains_key(&v);
        let levels: Vec<Vec<i128>> = nodes
            .iter()
            .map(|&v| {
                let set: BTreeSet<i128> =
                    inst.neighbors(v).iter().map(|&(_, e)| inst.weight(e)).collect();
                set.into_iter().collect()
            })
            .collect();
        let level_of = |i: usize, w: i128| levels[i].binary_search(&w).expect("incident weight");

        // raw[(i, j)] = realizations (level at i, level at j, interior cost, edges)
        let mut raw: HashMap<(usize, usize), Vec<(usize, usize, i128, Vec<EdgeId>)>> =
            HashMap::new();
        for (i, &x) in nodes.iter().enumerate() {
            for &(w, e) in inst.neighbors(x) {
                let wx = inst.weight(e);
                if let Some(&j) = pos.get(&w) {
                    if i < j {
                        let (a, b) = (level_of(i, wx), level_of(j, wx));
                        raw.entry((i, j)).or_default().push((a, b, 0, vec![e]));
                    }
                    continue;
                }
                if !interior(w) {
                    continue;
                }
                for (y, ey, cost, path) in interior_search(inst, x, e, &pos, &interior) {
                    let j = pos[&y];
                    if i < j {
                        let (a, b) = (level_of(i, wx), level_of(j, inst.weight(ey)));
                        raw.entry((i, j)).or_default().push((a, b, cost, path));
                    }
                }
            }
        }

        let links = raw
            .into_iter()
            .map(|((i, j), entries)| {
                let (rows, cols) = (levels[i].len(), levels[j].len());
                let mut cells: Vec<Option<(i128, usize)>> = vec![None; rows * cols];
                let mut paths = Vec::with_capacity(entries.len());
                for (a, b, cost, path) in entries {
                    let idx = paths.len();
                    paths.push(path);
                    let cell = &mut cells[a * cols + b];
                    if cell.map_or(true, |(c, _)| cost < c) {
                        *cell = Some((cost, idx));
                    }
                }
                for a in 0..rows {
                    for b in 0..cols {
                        let mut best = cells[a * cols + b];
                        for prev in [
                            (a > 0).then(|| cells[(a - 1) * cols + b]).flatten(),
                            (b > 0).then(|| cells[a * cols + b - 1]).flatten(),
                        ]
                        .into_iter()
                        .flatten()
                        {
                            if best.map_or(true, |(c, _)| prev.0 < c) {
                                best = Some(prev);
                            }
                        }
                        cells[a * cols + b] = best;
                    }
                }
                ((i, j), LinkTable { rows, cols, cells, paths })
            })
            .collect();
        Frame { nodes, levels, links }
    }

    /// Cheapest realization of shape edge (parent p, child c) at levels (a, b).
    fn link(&self, p: usize, c: usize, a: usize, b: usize) -> Option<(i128, &[EdgeId])> {
        let (key, (ra, rb)) = if p < c { ((p, c), (a, b)) } else { ((c, p), (b, a)) };
        let table = self.links.get(&key)?;
        debug_assert!(ra < table.rows && rb < table.cols);
        table.get(ra, rb).map(|(cost, idx)| (cost, table.paths[idx].as_slice()))
    }

    /// Tree DP over one shape; returns the value and the realized edges.
    fn solve_shape(&self, shape: &[(usize, usize)]) -> Option<(i128, Vec<EdgeId>)> {
        let m = self.nodes.len();
        let mut adj = vec![Vec::new(); m];
        for &(a, b) in shape {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut order = Vec::with_capacity(m);
        let mut parent = vec![usize::MAX; m];
        let mut stack = vec![0usize];
        parent[0] = 0;
        while let Some(x) = stack.pop() {
            order.push(x);
            for &y in &adj[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        // val[x][a]: best power of x's subtree with x at level a;
        // pick[x][a][k]: chosen level of x's k-th child.
        let mut val: Vec<Vec<Option<i128>>> = vec![Vec::new(); m];
        let mut pick: Vec<Vec<Vec<usize>>> = vec![Vec::new(); m];
        for &x in order.iter().rev() {
            let children: Vec<usize> = adj[x].iter().copied().filter(|&y| parent[y] == x && y != 0).collect();
            let nl = self.levels[x].len();
            val[x] = vec![None; nl];
            pick[x] = vec![Vec::new(); nl];
            'level: for a in 0..nl {
                let mut total = self.levels[x][a];
                let mut chosen = Vec::with_capacity(children.len());
                for &c in &children {
                    let mut best: Option<(i128, usize)> = None;
                    for (b, cv) in val[c].iter().enumerate() {
                        let Some(cv) = cv else { continue };
                        let Some((lc, _)) = self.link(x, c, a, b) else { continue };
                        let cand = lc + cv;
                        if best.map_or(true, |(v, _)| cand < v) {
                            best = Some((cand, b));
                        }
                    }
                    let Some((v, b)) = best else { continue 'level };
                    total += v;
                    chosen.push(b);
                }
                val[x][a] = Some(total);
                pick[x][a] = chosen;
            }
        }
        let (root_level, value) = val[0]
            .iter()
            .enumerate()
            .filter_map(|(a, v)| v.map(|v| (a, v)))
            .min_by_key(|&(a, v)| (v, a))?;

        let mut edges = Vec::new();
        let mut stack = vec![(0usize, root_level)];
        while let Some((x, a)) = stack.pop() {
            let children: Vec<usize> = adj[x].iter().copied().filter(|&y| parent[y] == x && y != 0).collect();
            for (k, &c) in children.iter().enumerate() {
                let b = pick[x][a][k];
                let (_, path) = self.link(x, c, a, b).expect("chosen link exists");
                edges.extend_from_slice(path);
                stack.push((c, b));
            }
        }
        Some((value, edges))
    }
}

/// Shortest interior-cost paths from shape node `x` leaving through edge
/// `start`, restricted to interior nodes, ending at any other shape node.
/// Returns (end node, end edge, interior power, edges).
fn interior_search(
    inst: &Instance,
    x: NodeId,
    start: EdgeId,
    shape_nodes: &HashMap<NodeId, usize>,
    interior: &dyn Fn(NodeId) -> bool,
) -> Vec<(NodeId, EdgeId, i128, Vec<EdgeId>)> {
    // states are (node, entering edge); stored by entering edge and direction
    let arc = |e: EdgeId, to: NodeId| 2 * e + usize::from(inst.edge(e).u == to);
    let head = |a: usize| {
        let e = inst.edge(a / 2);
        if a % 2 == 0 {
            e.v
        } else {
            e.u
        }
    };
    let mut dist: Vec<Option<i128>> = vec![None; 2 * inst.edge_count()];
    let mut pred: Vec<usize> = vec![usize::MAX; 2 * inst.edge_count()];
    let first = arc(start, inst.edge(start).other(x));
    dist[first] = Some(0);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0i128, first)));
    let mut arrivals: HashMap<(NodeId, EdgeId), (i128, usize)> = HashMap::new();
    while let Some(Reverse((d, a))) = heap.pop() {
        if dist[a] != Some(d) {
            continue;
        }
        let z = head(a);
        let w_in = inst.weight(a / 2);
        for &(y, e) in inst.neighbors(z) {
            if e == a / 2 || y == x {
                continue;
            }
            let nd = d + w_in.max(inst.weight(e));
            if shape_nodes.contains_key(&y) {
                let slot = arrivals.entry((y, e)).or_insert((i128::MAX, usize::MAX));
                if nd < slot.0 {
                    *slot = (nd, a);
                }
            } else if interior(y) {
                let na = arc(e, y);
                if dist[na].map_or(true, |old| nd < old) {
                    dist[na] = Some(nd);
                    pred[na] = a;
                    heap.push(Reverse((nd, na)));
                }
            }
        }
    }
    let mut out: Vec<_> = arrivals
        .into_iter()
        .map(|((y, e), (cost, last))| {
            let mut edges = vec![e];
            let mut a = last;
            while a != usize::MAX {
                edges.push(a / 2);
                a = if a == first { usize::MAX } else { pred[a] };
            }
            (y, e, cost, edges)
        })
        .collect();
    out.sort_by_key(|(y, e, c, _)| (*y, *e, *c));
    out
}

/// Decodes every Prüfer sequence over `m` labels into an edge list.
fn labelled_trees(m: usize) -> Vec<Vec<(usize, usize)>> {
    if m < 2 {
        return vec![Vec::new()];
    }
    if m == 2 {
        return vec![vec![(0, 1)]];
    }
    let len = m - 2;
    let total = m.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut seq = Vec::with_capacity(len);
        let mut c = code;
        for _ in 0..len {
            seq.push(c % m);
            c /= m;
        }
        let mut degree = vec![1usize; m];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(m - 1);
        for &s in &seq {
            let leaf = (0..m).find(|&v| degree[v] == 1).expect("leaf exists");
            edges.push((leaf, s));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..m).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

/// Spanning tree of `edges` restricted to the part containing `keep`, with
/// leaves outside `keep` pruned repeatedly.
pub(crate) fn tree_within(inst: &Instance, edges: &[EdgeId], keep: &[NodeId]) -> Vec<EdgeId> {
    let mut sorted: Vec<EdgeId> = edges.to_vec();
    sorted.sort_by_key(|&e| (inst.weight(e), e));
    sorted.dedup();
    let mut sets = DisjointSets::new(inst.node_count());
    let mut forest: Vec<EdgeId> = sorted
        .into_iter()
        .filter(|&e| sets.union(inst.edge(e).u, inst.edge(e).v))
        .collect();
    if let Some(&anchor) = keep.first() {
        forest.retain(|&e| sets.same(inst.edge(e).u, anchor));
    }
    prune_leaves(inst, forest, keep)
}

pub(crate) fn prune_leaves(inst: &Instance, mut edges: Vec<EdgeId>, keep: &[NodeId]) -> Vec<EdgeId> {
    loop {
        let mut degree: HashMap<NodeId, usize> = HashMap::new();
        for &e in &edges {
            *degree.entry(inst.edge(e).u).or_default() += 1;
            *degree.entry(inst.edge(e).v).or_default() += 1;
        }
        let removable = |v: NodeId| degree.get(&v) == Some(&1) && !keep.contains(&v);
        let before = edges.len();
        edges.retain(|&e| !removable(inst.edge(e).u) && !removable(inst.edge(e).v));
        if edges.len() == before {
            edges.sort_unstable();
            return edges;
        }
    }
}

/// Minimum-power tree whose terminals are exactly `terminal_set`.
pub fn min_power_component(
    instance: &Instance,
    terminal_set: &[NodeId],
    k_cap: usize,
) -> Result<Component> {
    if k_cap > K_CAP {
        return Err(Error::InvalidParameter(format!("k_cap {k_cap} exceeds {K_CAP}")));
    }
    let mut q: Vec<NodeId> = terminal_set.to_vec();
    q.sort_unstable();
    q.dedup();
    if q.is_empty() {
        return Err(Error::InvalidParameter("empty terminal set".into()));
    }
    if let Some(&bad) = q.iter().find(|&&v| v >= instance.node_count() || !instance.is_terminal(v)) {
        return Err(Error::NotTerminal(bad));
    }
    if q.len() > k_cap {
        return Err(Error::TooManyTerminals { size: q.len(), cap: k_cap });
    }
    if q.len() == 1 {
        return Ok(Component { terminals: q, sink: None, edges: Vec::new(), power: Cost::ZERO });
    }

    let non_terminals: Vec<NodeId> = instance.non_terminals().collect();
    let mut best: Option<(i128, Vec<EdgeId>)> = None;
    for branch in subsets_up_to(&non_terminals, q.len() - 2) {
        let mut nodes = q.clone();
        nodes.extend_from_slice(&branch);
        let frame = Frame::build(instance, nodes);
        let m = frame.nodes.len();
        for shape in labelled_trees(m) {
            let mut degree = vec![0usize; m];
            for &(a, b) in &shape {
                degree[a] += 1;
                degree[b] += 1;
            }
            if (q.len()..m).any(|i| degree[i] < 3) {
                continue;
            }
            if let Some((value, edges)) = frame.solve_shape(&shape) {
                if best.as_ref().map_or(true, |(b, _)| value < *b) {
                    best = Some((value, edges));
                }
            }
        }
    }
    let (_, union) = best.ok_or(Error::NotConnectable)?;
    let edges = tree_within(instance, &union, &q);
    let power = edge_set_power(instance, &edges);
    Ok(Component { terminals: q, sink: None, edges, power })
}

/// Number of `(Q, s)` pairs with `2 <= |Q| <= k` over `t` terminals.
pub fn column_count(t: usize, k: usize) -> usize {
    let mut total = 0usize;
    let mut binom = 1usize;
    for size in 1..=k.min(t) {
        binom = binom * (t - size + 1) / size;
        if size >= 2 {
            total = total.saturating_add(binom.saturating_mul(size));
        }
    }
    total
}

/// One column per `(Q, s)` with `2 <= |Q| <= k` and `s ∈ Q`, skipping terminal
/// sets that cannot be connected. Components are shared across sinks.
pub fn enumerate_columns(instance: &Instance, k: usize) -> Result<Vec<Column>> {
    if !(2..=K_CAP).contains(&k) {
        return Err(Error::InvalidParameter(format!("k must lie in 2..={K_CAP}, got {k}")));
    }
    let terminals = instance.terminals();
    let count = column_count(terminals.len(), k);
    if count > COLUMN_GUARD || terminals.len() > 64 {
        return Err(Error::ColumnGuard { count, limit: COLUMN_GUARD });
    }
    let sets: Vec<Vec<NodeId>> = subsets_up_to(terminals, k)
        .into_iter()
        .filter(|s| s.len() >= 2)
        .collect();
    let components: Vec<Result<Component>> = sets
        .par_iter()
        .map(|q| min_power_component(instance, q, k))
        .collect();
    let mut columns = Vec::with_capacity(count);
    for (q, comp) in sets.into_iter().zip(components) {
        let comp = match comp {
            Ok(c) => Arc::new(c),
            Err(Error::NotConnectable) => continue,
            Err(e) => return Err(e),
        };
        let mask = q
            .iter()
            .map(|&t| 1u64 << instance.terminal_slot(t).expect("terminal"))
            .fold(0, |a, b| a | b);
        for &s in &q {
            columns.push(Column {
                terminals: q.clone(),
                mask,
                sink: s,
                sink_slot: instance.terminal_slot(s).expect("terminal"),
                power: comp.power,
                component: Arc::clone(&comp),
            });
        }
    }
    Ok(columns)
}
