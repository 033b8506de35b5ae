//! Brute-force oracles shared by the integration tests. Everything here is
//! written independently of the library algorithms and only uses the public
//! instance accessors.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::Ratio;
use powertree::generate::{generate, GeneratorKind, GeneratorParams};
use powertree::{Cost, Edge, EdgeId, Instance, NodeId};

pub type Q = Ratio<i128>;

pub fn inst(n: usize, edges: &[(usize, usize, i128)], terminals: &[usize]) -> Instance {
    let edges = edges
        .iter()
        .map(|&(u, v, c)| Edge { u, v, cost: Cost::integer(c) })
        .collect();
    Instance::new(n, edges, terminals.iter().copied(), terminals[0]).unwrap()
}

/// Connected random instance with a bounded edge count, so subset
/// enumeration stays cheap.
pub fn small_instance(nodes: usize, terminals: usize, seed: u64, max_edges: usize) -> Instance {
    let mut density = 0.5;
    loop {
        let p = GeneratorParams::new(nodes, terminals, seed).density(density).max_cost(9);
        let i = generate(GeneratorKind::UniformRandom, &p).unwrap();
        if i.edge_count() <= max_edges || density == 0.0 {
            return i;
        }
        density = (density - 0.1f64).max(0.0);
    }
}

/// Power of an edge set computed from scratch.
pub fn power(inst: &Instance, edges: &[EdgeId]) -> Q {
    let mut best: BTreeMap<NodeId, Q> = BTreeMap::new();
    for &e in edges {
        let edge = inst.edge(e);
        let c = edge.cost.ratio();
        for x in [edge.u, edge.v] {
            let slot = best.entry(x).or_insert(c);
            if c > *slot {
                *slot = c;
            }
        }
    }
    best.values().sum()
}

pub fn cost(inst: &Instance, edges: &[EdgeId]) -> Q {
    edges.iter().map(|&e| inst.edge(e).cost.ratio()).sum()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    r
}

/// The edge set is a single tree (acyclic and connected) touching every terminal.
pub fn is_terminal_tree(inst: &Instance, edges: &[EdgeId]) -> bool {
    let mut parent: Vec<usize> = (0..inst.node_count()).collect();
    for &e in edges {
        let (a, b) = (find(&mut parent, inst.edge(e).u), find(&mut parent, inst.edge(e).v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    let t = inst.terminals();
    if edges.is_empty() {
        return t.len() == 1;
    }
    let anchor = find(&mut parent, inst.edge(edges[0]).u);
    edges.iter().all(|&e| find(&mut parent, inst.edge(e).u) == anchor)
        && t.iter().all(|&x| find(&mut parent, x) == anchor)
}

/// Every edge subset that forms a tree touching all terminals.
pub fn terminal_trees(inst: &Instance) -> Vec<Vec<EdgeId>> {
    let m = inst.edge_count();
    assert!(m <= 20, "too many edges for subset enumeration");
    (0u32..1 << m)
        .map(|bits| (0..m).filter(|&e| bits >> e & 1 == 1).collect::<Vec<_>>())
        .filter(|s| is_terminal_tree(inst, s))
        .collect()
}

pub fn brute_min_power(inst: &Instance) -> Q {
    terminal_trees(inst).iter().map(|s| power(inst, s)).min().expect("connected instance")
}

pub fn brute_min_cost(inst: &Instance) -> Q {
    terminal_trees(inst).iter().map(|s| cost(inst, s)).min().expect("connected instance")
}

/// Minimum power over all simple paths from `s` to `t`.
pub fn brute_path_power(inst: &Instance, s: NodeId, t: NodeId) -> Option<Q> {
    fn dfs(inst: &Instance, x: NodeId, t: NodeId, seen: &mut Vec<bool>, path: &mut Vec<EdgeId>, best: &mut Option<Q>) {
        if x == t {
            let p = power(inst, path);
            if best.map_or(true, |b| p < b) {
                *best = Some(p);
            }
            return;
        }
        for &(y, e) in inst.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                path.push(e);
                dfs(inst, y, t, seen, path, best);
                path.pop();
                seen[y] = false;
            }
        }
    }
    let mut seen = vec![false; inst.node_count()];
    seen[s] = true;
    let mut best = None;
    dfs(inst, s, t, &mut seen, &mut Vec::new(), &mut best);
    best
}

/// Solves `A y = b` exactly; `None` when singular.
pub fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != Q::from(0))?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && a[r][col] != Q::from(0) {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
                let v = b[col];
                b[r] -= f * v;
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Optimum of `min c·x, A x >= 1, x >= 0` computed through its dual
/// `max Σ y, Aᵀ y <= c, y >= 0` by enumerating dual vertices exactly.
/// `rows[r]` lists the columns with coefficient 1 in row r.
pub fn covering_lp_value(rows: &[Vec<usize>], costs: &[Q]) -> Q {
    let r = rows.len();
    let n = costs.len();
    // constraint i < n: Σ_{r ∋ i} y_r <= c_i; constraint n + j: -y_j <= 0
    let coef = |i: usize, j: usize| -> Q {
        if i < n {
            Q::from(i128::from(rows[j].contains(&i)))
        } else {
            Q::from(-i128::from(i - n == j))
        }
    };
    let rhs = |i: usize| if i < n { costs[i] } else { Q::from(0) };
    let total = n + r;
    let mut best: Option<Q> = None;
    let mut pick: Vec<usize> = (0..r).collect();
    loop {
        let a: Vec<Vec<Q>> = pick.iter().map(|&i| (0..r).map(|j| coef(i, j)).collect()).collect();
        let b: Vec<Q> = pick.iter().map(|&i| rhs(i)).collect();
        if let Some(y) = solve_exact(a, b) {
            let feasible = (0..total).all(|i| (0..r).map(|j| coef(i, j) * y[j]).sum::<Q>() <= rhs(i));
            if feasible {
                let v: Q = y.iter().sum();
                if best.map_or(true, |b| v > b) {
                    best = Some(v);
                }
            }
        }
        // next r-combination of 0..total
        let mut k = r;
        loop {
            if k == 0 {
                return best.expect("y = 0 is a vertex");
            }
            k -= 1;
            if pick[k] < total - r + k {
                pick[k] += 1;
                for j in k + 1..r {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}
