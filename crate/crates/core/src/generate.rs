//! Seeded instance generators and the cost-to-power reduction.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::instance::{Edge, Instance, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    UniformRandom,
    EuclideanPowerlaw,
    TwoLevel,
    ReductionWrapped,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 4] = [
        GeneratorKind::UniformRandom,
        GeneratorKind::EuclideanPowerlaw,
        GeneratorKind::TwoLevel,
        GeneratorKind::ReductionWrapped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::UniformRandom => "uniform-random",
            GeneratorKind::EuclideanPowerlaw => "euclidean-powerlaw",
            GeneratorKind::TwoLevel => "two-level",
            GeneratorKind::ReductionWrapped => "reduction-wrapped",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown generator `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub nodes: usize,
    pub terminals: usize,
    pub seed: u64,
    /// Probability of each non-tree edge (graph generators only).
    pub density: f64,
    /// Integer costs are drawn from `1..=max_cost`.
    pub max_cost: u32,
    /// Power-law exponent for the Euclidean generator.
    pub exponent: u32,
    /// Side of the integer grid the Euclidean points are drawn from.
    pub grid: u32,
    /// Cost pair `(a, b)` with `0 <= a < b` for the two-level generator.
    pub levels: (Cost, Cost),
}

impl GeneratorParams {
    pub fn new(nodes: usize, terminals: usize, seed: u64) -> Self {
        GeneratorParams {
            nodes,
            terminals,
            seed,
            density: 0.5,
            max_cost: 10,
            exponent: 2,
            grid: 100,
            levels: (Cost::ZERO, Cost::integer(1)),
        }
    }

    pub fn density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn max_cost(mut self, max_cost: u32) -> Self {
        self.max_cost = max_cost;
        self
    }

    pub fn exponent(mut self, exponent: u32) -> Self {
        self.exponent = exponent;
        self
    }

    pub fn levels(mut self, a: Cost, b: Cost) -> Self {
        self.levels = (a, b);
        self
    }
}

pub fn generate(kind: GeneratorKind, params: &GeneratorParams) -> Result<Instance> {
    if params.nodes == 0 || params.terminals == 0 {
        return Err(Error::InvalidParameter("node and terminal counts must be positive".into()));
    }
    if params.terminals > params.nodes {
        return Err(Error::InvalidParameter(format!(
            "terminal count {} exceeds node count {}",
            params.terminals, params.nodes
        )));
    }
    if !(0.0..=1.0).contains(&params.density) {
        return Err(Error::InvalidParameter("density must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let instance = match kind {
        GeneratorKind::UniformRandom => {
            if params.max_cost == 0 {
                return Err(Error::InvalidParameter("max_cost must be positive".into()));
            }
            let pairs = random_topology(&mut rng, params.nodes, params.density);
            let max = params.max_cost as i128;
            let edges = pairs
                .into_iter()
                .map(|(u, v)| Edge { u, v, cost: Cost::integer(rng.gen_range(1..=max)) })
                .collect();
            finish(&mut rng, params, edges)?
        }
        GeneratorKind::TwoLevel => {
            let (a, b) = params.levels;
            if a.is_negative() || a >= b {
                return Err(Error::InvalidParameter("two-level costs need 0 <= a < b".into()));
            }
            let pairs = random_topology(&mut rng, params.nodes, params.density);
            let edges = pairs
                .into_iter()
                .map(|(u, v)| Edge { u, v, cost: if rng.gen_bool(0.5) { a } else { b } })
                .collect();
            finish(&mut rng, params, edges)?
        }
        GeneratorKind::EuclideanPowerlaw => {
            let points = euclidean_points(&mut rng, params.nodes, params.grid);
            let mut edges = Vec::new();
            for u in 0..params.nodes {
                for v in u + 1..params.nodes {
                    let cost = power_law_cost(points[u], points[v], params.exponent);
                    edges.push(Edge { u, v, cost });
                }
            }
            finish(&mut rng, params, edges)?
        }
        GeneratorKind::ReductionWrapped => {
            let base = generate(GeneratorKind::UniformRandom, params)?;
            reduce_cost_to_power(&base)
        }
    };
    Ok(instance)
}

/// Seeded integer point set used by the Euclidean generator.
pub fn euclidean_points(rng: &mut ChaCha8Rng, n: usize, grid: u32) -> Vec<(i64, i64)> {
    let side = grid.max(1) as i64;
    (0..n)
        .map(|_| (rng.gen_range(0..side), rng.gen_range(0..side)))
        .collect()
}

/// `d^exponent` for integer points; exact for even exponents, otherwise
/// rounded to three decimals.
pub fn power_law_cost(a: (i64, i64), b: (i64, i64), exponent: u32) -> Cost {
    let (dx, dy) = ((a.0 - b.0) as i128, (a.1 - b.1) as i128);
    let sq = dx * dx + dy * dy;
    if exponent % 2 == 0 {
        Cost::integer(sq.pow(exponent / 2))
    } else {
        Cost::from_f64_rounded((sq as f64).sqrt().powi(exponent as i32), 3)
    }
}

/// Connected random graph: a random spanning tree plus each remaining pair
/// with probability `density`.
fn random_topology(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<(NodeId, NodeId)> {
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    let mut present = vec![vec![false; n]; n];
    let mut pairs = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (u, v) = (order[i].min(order[j]), order[i].max(order[j]));
        present[u][v] = true;
    }
    for u in 0..n {
        for v in u + 1..n {
            if present[u][v] || rng.gen_bool(density) {
                pairs.push((u, v));
            }
        }
    }
    pairs
}

fn finish(rng: &mut ChaCha8Rng, params: &GeneratorParams, edges: Vec<Edge>) -> Result<Instance> {
    let mut nodes: Vec<NodeId> = (0..params.nodes).collect();
    nodes.shuffle(rng);
    let mut terminals: Vec<NodeId> = nodes[..params.terminals].to_vec();
    terminals.sort_unstable();
    let root = terminals[0];
    Ok(Instance::new(params.nodes, edges, terminals, root)?)
}

/// Replaces each edge `(u, v, c)` with `u - x - y - v` of costs `0, c/2, 0`.
/// Fresh node ids for edge `i` are `n + 2i` and `n + 2i + 1`.
pub fn reduce_cost_to_power(instance: &Instance) -> Instance {
    let n = instance.node_count();
    let mut edges = Vec::with_capacity(3 * instance.edge_count());
    for (i, e) in instance.edges().iter().enumerate() {
        let (x, y) = (n + 2 * i, n + 2 * i + 1);
        edges.push(Edge { u: e.u, v: x, cost: Cost::ZERO });
        edges.push(Edge { u: x, v: y, cost: e.cost / 2 });
        edges.push(Edge { u: y, v: e.v, cost: Cost::ZERO });
    }
    Instance::new(
        n + 2 * instance.edge_count(),
        edges,
        instance.terminals().iter().copied(),
        instance.root(),
    )
    .expect("reduction preserves validity")
}
