//! Min-power Steiner tree and min-power spanning tree toolkit.
//!
//! The power of a node in a tree is the largest cost of an incident tree
//! edge; the power of the tree is the sum over its nodes.
//!
//! The main solver is [`irr::irr_solve`], which rounds the component LP of
//! [`lp`] one sampled component at a time. [`reference`](mod@reference) holds exact solvers
//! for small instances to compare against.

pub mod analysis;
pub mod component;
pub mod cost;
pub mod decomposition;
pub mod error;
pub mod generate;
pub mod instance;
pub mod irr;
pub mod lp;
pub mod path;
pub mod power;
pub mod reference;
pub mod util;

pub use cost::Cost;
pub use error::{Error, Result};
pub use instance::{parse_instance, Edge, EdgeId, Instance, NodeId};
pub use power::{evaluate, PowerTree};
