//! Decompositions of a tree into components.
//!
//! A part is a subtree given as a list of edge indices into the source tree;
//! parts may share edges. Its terminals are the source-tree terminals it
//! touches. [`bounded_degree_decompose`] caps the degree inside every part and
//! [`h_power_decompose`] additionally caps the number of terminals per part.

mod bounded;
mod hpow;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::{EdgeId, Instance, NodeId};
use crate::util::DisjointSets;

pub use bounded::{bounded_degree_decompose, degree_bound_factor};
pub use hpow::{h_power_decompose, split_by_levels, HPowReport, QChoice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub cost: Cost,
}

/// An edge-weighted tree with a terminal set. Nodes not touched by any edge
/// are ignored, so node ids can be shared with a larger instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedTree {
    node_count: usize,
    edges: Vec<TreeEdge>,
    terminals: Vec<NodeId>,
    #[serde(skip)]
    adjacency: Vec<Vec<(NodeId, usize)>>,
}

impl WeightedTree {
    pub fn new(
        node_count: usize,
        edges: Vec<TreeEdge>,
        terminals: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self> {
        let mut terminals: Vec<NodeId> = terminals.into_iter().collect();
        terminals.sort_unstable();
        terminals.dedup();
        let mut adjacency = vec![Vec::new(); node_count];
        let mut sets = DisjointSets::new(node_count);
        for (i, e) in edges.iter().enumerate() {
            for x in [e.u, e.v] {
                if x >= node_count {
                    return Err(Error::NodeOutOfRange(x));
                }
            }
            if e.cost.is_negative() {
                return Err(Error::InvalidParameter(format!("edge {i} has negative cost")));
            }
            if !sets.union(e.u, e.v) {
                return Err(Error::CyclicEdgeSet);
            }
            adjacency[e.u].push((e.v, i));
            adjacency[e.v].push((e.u, i));
        }
        if let Some(&bad) = terminals.iter().find(|&&t| t >= node_count) {
            return Err(Error::NodeOutOfRange(bad));
        }
        if terminals.is_empty() {
            return Err(Error::InvalidParameter("tree has no terminals".into()));
        }
        if let Some(first) = edges.first() {
            let anchor = first.u;
            if edges.iter().any(|e| !sets.same(e.u, anchor)) {
                return Err(Error::DisconnectedEdgeSet);
            }
            if let Some(&t) = terminals.iter().find(|&&t| adjacency[t].is_empty()) {
                return Err(Error::TerminalNotCovered(t));
            }
        } else if terminals.len() > 1 {
            return Err(Error::TerminalNotCovered(terminals[1]));
        }
        Ok(WeightedTree { node_count, edges, terminals, adjacency })
    }

    /// The tree formed by `edge_ids` of `instance`, with the instance terminals.
    pub fn from_instance(instance: &Instance, edge_ids: &[EdgeId]) -> Result<Self> {
        let mut edges = Vec::with_capacity(edge_ids.len());
        for &id in edge_ids {
            if id >= instance.edge_count() {
                return Err(Error::UnknownEdge(id));
            }
            let e = instance.edge(id);
            edges.push(TreeEdge { u: e.u, v: e.v, cost: e.cost });
        }
        WeightedTree::new(instance.node_count(), edges, instance.terminals().iter().copied())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &TreeEdge {
        &self.edges[i]
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: NodeId) -> bool {
        self.terminals.binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    /// Nodes touched by at least one edge (or the lone terminal of an empty tree).
    pub fn nodes(&self) -> Vec<NodeId> {
        if self.edges.is_empty() {
            return self.terminals.clone();
        }
        (0..self.node_count).filter(|&v| !self.adjacency[v].is_empty()).collect()
    }

    pub fn cost(&self) -> Cost {
        self.edges.iter().map(|e| e.cost).sum()
    }

    pub fn power(&self) -> Cost {
        self.power_of(&(0..self.edges.len()).collect::<Vec<_>>())
    }

    pub fn node_powers_of(&self, edges: &[usize]) -> BTreeMap<NodeId, Cost> {
        let mut powers = BTreeMap::new();
        for &i in edges {
            let e = &self.edges[i];
            for x in [e.u, e.v] {
                let p = powers.entry(x).or_insert(Cost::ZERO);
                if e.cost > *p {
                    *p = e.cost;
                }
            }
        }
        powers
    }

    pub fn power_of(&self, edges: &[usize]) -> Cost {
        self.node_powers_of(edges).values().sum()
    }

    /// True iff the terminals are exactly the leaves and there are at least two.
    pub fn is_full_component(&self) -> bool {
        self.terminals.len() >= 2
            && self.nodes().into_iter().all(|v| (self.degree(v) == 1) == self.is_terminal(v))
    }

    pub(crate) fn require_full_component(&self) -> Result<()> {
        if self.terminals.len() < 2 {
            return Err(Error::NotFullComponent("fewer than two terminals".into()));
        }
        for v in self.nodes() {
            match (self.degree(v) == 1, self.is_terminal(v)) {
                (true, false) => {
                    return Err(Error::NotFullComponent(format!("leaf {v} is not a terminal")))
                }
                (false, true) => {
                    return Err(Error::NotFullComponent(format!("terminal {v} is not a leaf")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub(crate) fn make_part(&self, mut edges: Vec<usize>) -> Part {
        edges.sort_unstable();
        edges.dedup();
        let nodes: BTreeSet<NodeId> =
            edges.iter().flat_map(|&i| [self.edges[i].u, self.edges[i].v]).collect();
        let terminals = nodes.into_iter().filter(|&v| self.is_terminal(v)).collect();
        let power = self.power_of(&edges);
        Part { edges, terminals, power }
    }
}

/// Rooted view of a subset of tree edges.
pub(crate) struct Rooted {
    pub parent: Vec<Option<(NodeId, usize)>>,
    /// Children sorted by node id, with the connecting edge.
    pub children: Vec<Vec<(NodeId, usize)>>,
    /// Breadth-first order from the root.
    pub order: Vec<NodeId>,
}

impl Rooted {
    pub fn new(tree: &WeightedTree, active: &[bool], root: NodeId) -> Rooted {
        let n = tree.node_count();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        let mut order = vec![root];
        seen[root] = true;
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            let mut kids: Vec<(NodeId, usize)> = tree
                .neighbors(x)
                .iter()
                .copied()
                .filter(|&(y, e)| active[e] && !seen[y])
                .collect();
            kids.sort_unstable();
            for &(y, e) in &kids {
                seen[y] = true;
                parent[y] = Some((x, e));
                order.push(y);
            }
            children[x] = kids;
        }
        Rooted { parent, children, order }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Part {
    pub edges: Vec<usize>,
    pub terminals: Vec<NodeId>,
    pub power: Cost,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub parts: Vec<Part>,
    pub total_power: Cost,
    pub source_power: Cost,
}

impl Decomposition {
    pub(crate) fn from_parts(tree: &WeightedTree, parts: Vec<Part>) -> Decomposition {
        let total_power = parts.iter().map(|p| p.power).sum();
        Decomposition { parts, total_power, source_power: tree.power() }
    }

    /// Every source edge lies in at least one part.
    pub fn covers(&self, tree: &WeightedTree) -> bool {
        let mut seen = vec![false; tree.edges().len()];
        for p in &self.parts {
            for &e in &p.edges {
                seen[e] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Largest node degree inside any single part.
    pub fn max_part_degree(&self, tree: &WeightedTree) -> usize {
        self.parts
            .iter()
            .map(|p| {
                let mut deg: BTreeMap<NodeId, usize> = BTreeMap::new();
                for &i in &p.edges {
                    *deg.entry(tree.edge(i).u).or_default() += 1;
                    *deg.entry(tree.edge(i).v).or_default() += 1;
                }
                deg.into_values().max().unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }
}

/// Star replacement of a decomposition: one center per part joined to the
/// part's terminals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentGraph {
    pub terminals: Vec<NodeId>,
    pub centers: usize,
    /// (part index, terminal)
    pub edges: Vec<(usize, NodeId)>,
    pub is_tree: bool,
}

pub fn component_graph(tree: &WeightedTree, decomposition: &Decomposition) -> ComponentGraph {
    let terminals = tree.terminals().to_vec();
    let slot = |t: NodeId| terminals.binary_search(&t).expect("part terminal is a tree terminal");
    let centers = decomposition.parts.len();
    let mut edges = Vec::new();
    let mut sets = DisjointSets::new(terminals.len() + centers);
    for (i, part) in decomposition.parts.iter().enumerate() {
        for &t in &part.terminals {
            edges.push((i, t));
            sets.union(terminals.len() + i, slot(t));
        }
    }
    let node_total = terminals.len() + centers;
    let connected = (1..node_total).all(|x| sets.same(0, x));
    let is_tree = connected && edges.len() + 1 == node_total;
    ComponentGraph { terminals, centers, edges, is_tree }
}

/// Hangs a cost-0 pendant leaf off every terminal; the pendants become the
/// terminal set. Pendant of the i-th terminal is node `n + i` joined by edge
/// `m + i`.
pub fn attach_dummy_leaves(tree: &WeightedTree) -> WeightedTree {
    let n = tree.node_count();
    let mut edges = tree.edges().to_vec();
    for (i, &t) in tree.terminals().iter().enumerate() {
        edges.push(TreeEdge { u: t, v: n + i, cost: Cost::ZERO });
    }
    let terminals = n..n + tree.terminals().len();
    WeightedTree::new(n + tree.terminals().len(), edges, terminals).expect("pendants keep a tree")
}

/// Maps a decomposition of `attach_dummy_leaves(original)` back onto
/// `original` by dropping pendant edges.
pub fn contract_dummy_leaves(original: &WeightedTree, decomposition: &Decomposition) -> Decomposition {
    let m = original.edges().len();
    let parts = decomposition
        .parts
        .iter()
        .map(|p| p.edges.iter().copied().filter(|&e| e < m).collect::<Vec<_>>())
        .filter(|edges| !edges.is_empty())
        .map(|edges| original.make_part(edges))
        .collect();
    Decomposition::from_parts(original, parts)
}

/// Random full component: a random tree on `internal` non-terminals, each
/// given up to `max_leaves` terminal leaves (at least enough to keep every
/// internal node off the leaf set), integer costs in `1..=max_cost`, and
/// shuffled node ids.
pub fn random_full_component(
    internal: usize,
    max_leaves: usize,
    max_cost: u32,
    seed: u64,
) -> WeightedTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let internal = internal.max(1);
    let mut pairs: Vec<(usize, usize)> = (1..internal).map(|i| (rng.gen_range(0..i), i)).collect();
    let mut degree = vec![0usize; internal];
    for &(a, b) in &pairs {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut next = internal;
    for x in 0..internal {
        let leaves = rng.gen_range(0..=max_leaves).max(2usize.saturating_sub(degree[x]));
        for _ in 0..leaves {
            pairs.push((x, next));
            next += 1;
        }
    }
    let mut labels: Vec<NodeId> = (0..next).collect();
    labels.shuffle(&mut rng);
    let max = max_cost.max(1) as i128;
    let edges = pairs
        .into_iter()
        .map(|(a, b)| TreeEdge {
            u: labels[a],
            v: labels[b],
            cost: Cost::integer(rng.gen_range(1..=max)),
        })
        .collect();
    let terminals = (internal..next).map(|x| labels[x]);
    WeightedTree::new(next, edges, terminals).expect("generated tree is valid")
}
