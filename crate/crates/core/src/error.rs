use crate::instance::{EdgeId, InstanceError, NodeId};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("edge id {0} does not exist")]
    UnknownEdge(EdgeId),
    #[error("edge set contains a cycle")]
    CyclicEdgeSet,
    #[error("edge set is not connected")]
    DisconnectedEdgeSet,
    #[error("terminal {0} not covered by the edge set")]
    TerminalNotCovered(NodeId),
    #[error("source and destination are both {0}")]
    SameEndpoints(NodeId),
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("{to} unreachable from {from}")]
    Unreachable { from: NodeId, to: NodeId },
    #[error("node {0} is not a terminal")]
    NotTerminal(NodeId),
    #[error("terminal set of size {size} exceeds cap {cap}")]
    TooManyTerminals { size: usize, cap: usize },
    #[error("terminal set cannot be connected")]
    NotConnectable,
    #[error("column count {count} exceeds guard {limit}")]
    ColumnGuard { count: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("LP infeasible: terminal {0} is covered by no column")]
    LpInfeasible(NodeId),
    #[error("LP solver failure: {0}")]
    LpNumerical(String),
    #[error("iteration cap {0} reached")]
    IterationCap(usize),
    #[error("instance has {nodes} nodes, exact solver guard is {limit}")]
    NodeGuard { nodes: usize, limit: usize },
    #[error("instance has {terminals} terminals, guard is {limit}")]
    TerminalGuard { terminals: usize, limit: usize },
    #[error("tree is not a full component: {0}")]
    NotFullComponent(String),
    #[error("index {0} out of range")]
    OutOfRange(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
