//! Instance model and the line-oriented instance file format.
//!
//! ```text
//! # comment
//! nodes 4
//! edge 0 1 2.5
//! edge 1 2 3
//! terminals 0 2
//! root 0
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_integer::Integer;

use crate::cost::Cost;
use crate::util::DisjointSets;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub cost: Cost,
}

impl Edge {
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("line {line}: malformed directive: {message}")]
    Malformed { line: usize, message: String },
    #[error("missing `{0}` directive")]
    MissingDirective(&'static str),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("edge endpoint {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("negative cost on edge {0}-{1}")]
    NegativeCost(NodeId, NodeId),
    #[error("terminal id {0} out of range")]
    TerminalOutOfRange(NodeId),
    #[error("root not a terminal: {0}")]
    RootNotTerminal(NodeId),
    #[error("no terminals")]
    NoTerminals,
    #[error("disconnected terminals: {0} and {1} are not connected")]
    DisconnectedTerminals(NodeId, NodeId),
    #[error("node count must be positive")]
    EmptyGraph,
}

/// Undirected graph with nonnegative exact costs, a terminal set and a root
/// terminal. Immutable once built; cost updates produce a new instance.
#[derive(Debug, Clone)]
pub struct Instance {
    node_count: usize,
    edges: Vec<Edge>,
    terminals: Vec<NodeId>,
    root: NodeId,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
    edge_index: HashMap<(NodeId, NodeId), EdgeId>,
    terminal_slot: Vec<Option<usize>>,
    scale: i128,
    weights: Vec<i128>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count
            && self.edges == other.edges
            && self.terminals == other.terminals
            && self.root == other.root
    }
}

impl Eq for Instance {}

fn key(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Instance {
    pub fn new(
        node_count: usize,
        edges: Vec<Edge>,
        terminals: impl IntoIterator<Item = NodeId>,
        root: NodeId,
    ) -> Result<Instance, InstanceError> {
        if node_count == 0 {
            return Err(InstanceError::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); node_count];
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (id, e) in edges.iter().enumerate() {
            for x in [e.u, e.v] {
                if x >= node_count {
                    return Err(InstanceError::NodeOutOfRange(x));
                }
            }
            if e.u == e.v {
                return Err(InstanceError::SelfLoop(e.u));
            }
            if e.cost.is_negative() {
                return Err(InstanceError::NegativeCost(e.u, e.v));
            }
            if edge_index.insert(key(e.u, e.v), id).is_some() {
                return Err(InstanceError::DuplicateEdge(e.u, e.v));
            }
            adjacency[e.u].push((e.v, id));
            adjacency[e.v].push((e.u, id));
        }
        let terminal_set: BTreeSet<NodeId> = terminals.into_iter().collect();
        if terminal_set.is_empty() {
            return Err(InstanceError::NoTerminals);
        }
        if let Some(&t) = terminal_set.iter().find(|&&t| t >= node_count) {
            return Err(InstanceError::TerminalOutOfRange(t));
        }
        if !terminal_set.contains(&root) {
            return Err(InstanceError::RootNotTerminal(root));
        }
        let terminals: Vec<NodeId> = terminal_set.into_iter().collect();
        let mut terminal_slot = vec![None; node_count];
        for (i, &t) in terminals.iter().enumerate() {
            terminal_slot[t] = Some(i);
        }

        let mut sets = DisjointSets::new(node_count);
        for e in &edges {
            sets.union(e.u, e.v);
        }
        if let Some(&t) = terminals.iter().find(|&&t| !sets.same(t, root)) {
            return Err(InstanceError::DisconnectedTerminals(root, t));
        }

        let scale = edges.iter().fold(1i128, |acc, e| acc.lcm(&e.cost.denom()));
        let weights = edges
            .iter()
            .map(|e| e.cost.numer() * (scale / e.cost.denom()))
            .collect();

        Ok(Instance {
            node_count,
            edges,
            terminals,
            root,
            adjacency,
            edge_index,
            terminal_slot,
            scale,
            weights,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn cost(&self, id: EdgeId) -> Cost {
        self.edges[id].cost
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn is_terminal(&self, v: NodeId) -> bool {
        self.terminal_slot[v].is_some()
    }

    /// Position of `v` in the sorted terminal list; used for bitmask encodings.
    pub fn terminal_slot(&self, v: NodeId) -> Option<usize> {
        self.terminal_slot[v]
    }

    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.edge_index.get(&key(u, v)).copied()
    }

    /// Costs scaled by the common denominator, so searches can run on integers.
    pub fn weight(&self, id: EdgeId) -> i128 {
        self.weights[id]
    }

    pub fn weights(&self) -> &[i128] {
        &self.weights
    }

    pub fn unscale(&self, w: i128) -> Cost {
        Cost::new(w, self.scale)
    }

    pub fn non_terminals(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count).filter(|&v| !self.is_terminal(v))
    }

    /// Same graph with every node a terminal; fails if the graph is disconnected.
    pub fn spanning(&self) -> Result<Instance, InstanceError> {
        Instance::new(self.node_count, self.edges.clone(), 0..self.node_count, self.root)
    }

    pub fn with_terminals(
        &self,
        terminals: impl IntoIterator<Item = NodeId>,
        root: NodeId,
    ) -> Result<Instance, InstanceError> {
        Instance::new(self.node_count, self.edges.clone(), terminals, root)
    }

    pub fn with_costs(&self, costs: &[Cost]) -> Instance {
        assert_eq!(costs.len(), self.edges.len());
        let edges = self
            .edges
            .iter()
            .zip(costs)
            .map(|(e, &cost)| Edge { cost, ..*e })
            .collect();
        Instance::new(self.node_count, edges, self.terminals.iter().copied(), self.root)
            .expect("cost update keeps instance valid")
    }

    /// Copy of the instance where the listed edges cost zero.
    pub fn with_zeroed(&self, zeroed: impl IntoIterator<Item = EdgeId>) -> Instance {
        let mut costs: Vec<Cost> = self.edges.iter().map(|e| e.cost).collect();
        for e in zeroed {
            costs[e] = Cost::ZERO;
        }
        self.with_costs(&costs)
    }

    pub fn parse(text: &str) -> Result<Instance, InstanceError> {
        parse_instance(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "nodes {}", self.node_count);
        for e in &self.edges {
            let _ = writeln!(out, "edge {} {} {}", e.u, e.v, e.cost);
        }
        let terms: Vec<String> = self.terminals.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(out, "terminals {}", terms.join(" "));
        let _ = writeln!(out, "root {}", self.root);
        out
    }
}

fn malformed(line: usize, message: impl Into<String>) -> InstanceError {
    InstanceError::Malformed { line, message: message.into() }
}

fn parse_node(line: usize, token: &str) -> Result<NodeId, InstanceError> {
    token
        .parse()
        .map_err(|_| malformed(line, format!("bad node id `{token}`")))
}

/// Parses the instance file format. Costs are read exactly (decimal or `p/q`).
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut nodes = None;
    let mut edges = Vec::new();
    let mut terminals: Option<Vec<NodeId>> = None;
    let mut root = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let directive = tokens.next().unwrap_or_default();
        let args: Vec<&str> = tokens.collect();
        match directive {
            "nodes" => {
                if args.len() != 1 || nodes.is_some() {
                    return Err(malformed(line, "expected `nodes <n>` once"));
                }
                nodes = Some(parse_node(line, args[0])?);
            }
            "edge" => {
                if args.len() != 3 {
                    return Err(malformed(line, "expected `edge <u> <v> <cost>`"));
                }
                let u = parse_node(line, args[0])?;
                let v = parse_node(line, args[1])?;
                let cost: Cost = args[2]
                    .parse()
                    .map_err(|_| malformed(line, format!("bad cost `{}`", args[2])))?;
                edges.push(Edge { u, v, cost });
            }
            "terminals" => {
                if args.is_empty() || terminals.is_some() {
                    return Err(malformed(line, "expected `terminals <t1> ...` once"));
                }
                terminals = Some(
                    args.iter()
                        .map(|t| parse_node(line, t))
                        .collect::<Result<_, _>>()?,
                );
            }
            "root" => {
                if args.len() != 1 || root.is_some() {
                    return Err(malformed(line, "expected `root <r>` once"));
                }
                root = Some(parse_node(line, args[0])?);
            }
            other => return Err(malformed(line, format!("unknown directive `{other}`"))),
        }
    }

    let nodes = nodes.ok_or(InstanceError::MissingDirective("nodes"))?;
    let terminals = terminals.ok_or(InstanceError::MissingDirective("terminals"))?;
    let root = root.ok_or(InstanceError::MissingDirective("root"))?;
    Instance::new(nodes, edges, terminals, root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let inst = parse_instance("nodes 2\nedge 0 1 5\nterminals 0 1\nroot 0\n").unwrap();
        assert_eq!(inst.edge_count(), 1);
        assert_eq!(inst.cost(0), Cost::integer(5));
        assert_eq!(inst.terminals(), &[0, 1]);
    }

    #[test]
    fn decimal_cost_is_exact() {
        let inst = parse_instance("nodes 2\nedge 0 1 2.50\nterminals 0 1\nroot 0").unwrap();
        assert_eq!(inst.cost(0), Cost::new(5, 2));
        assert_eq!(inst.weight(0), 5);
        assert_eq!(inst.unscale(5), Cost::new(5, 2));
    }

    #[test]
    fn diagnostics_are_distinct() {
        let root_bad = parse_instance("nodes 4\nedge 0 1 1\nterminals 0 1\nroot 3");
        assert_eq!(root_bad.unwrap_err(), InstanceError::RootNotTerminal(3));
        assert_eq!(
            root_bad_msg(),
            "root not a terminal: 3",
        );

        let dup = parse_instance("nodes 2\nedge 0 1 1\nedge 1 0 2\nterminals 0 1\nroot 0");
        assert_eq!(dup.unwrap_err(), InstanceError::DuplicateEdge(1, 0));

        let range = parse_instance("nodes 2\nedge 0 1 1\nterminals 0 7\nroot 0");
        assert_eq!(range.unwrap_err(), InstanceError::TerminalOutOfRange(7));

        let disc = parse_instance("nodes 3\nedge 0 1 1\nterminals 0 2\nroot 0");
        assert_eq!(disc.unwrap_err(), InstanceError::DisconnectedTerminals(0, 2));

        let bad = parse_instance("nodes 2\nedge 0 1\nterminals 0 1\nroot 0");
        assert!(matches!(bad.unwrap_err(), InstanceError::Malformed { line: 2, .. }));

        let unknown = parse_instance("nodes 2\nfoo\n");
        assert!(matches!(unknown.unwrap_err(), InstanceError::Malformed { line: 2, .. }));

        let missing = parse_instance("nodes 2\nedge 0 1 1\nterminals 0 1\n");
        assert_eq!(missing.unwrap_err(), InstanceError::MissingDirective("root"));
    }

    fn root_bad_msg() -> String {
        parse_instance("nodes 4\nedge 0 1 1\nterminals 0 1\nroot 3")
            .unwrap_err()
            .to_string()
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\nnodes 3 # three\nedge 0 1 1\nedge 1 2 0.5\nterminals 0 2\nroot 2\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.root(), 2);
        assert!(!inst.is_terminal(1));
        assert_eq!(inst.edge_between(2, 1), Some(1));
    }

    #[test]
    fn single_terminal_without_edges() {
        let inst = parse_instance("nodes 1\nterminals 0\nroot 0").unwrap();
        assert_eq!(inst.edge_count(), 0);
        assert_eq!(parse_instance(&inst.to_text()).unwrap(), inst);
    }

    #[test]
    fn self_loops_and_negative_costs_rejected() {
        assert_eq!(
            parse_instance("nodes 2\nedge 1 1 1\nterminals 0\nroot 0").unwrap_err(),
            InstanceError::SelfLoop(1)
        );
        assert_eq!(
            parse_instance("nodes 2\nedge 0 1 -1\nterminals 0 1\nroot 0").unwrap_err(),
            InstanceError::NegativeCost(0, 1)
        );
    }
}
