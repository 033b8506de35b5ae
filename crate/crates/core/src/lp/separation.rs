//! Cut separation by max-flow on the column gadget network.
//!
//! Nodes are the terminal slots followed by one gadget per column. Column
//! `(Q, s)` gets arcs `q -> g` of unbounded capacity for `q ∈ Q - {s}` and
//! `g -> s` of capacity `x_{Q,s}`. A terminal that cannot push one unit to
//! the root exposes a violated cut: the terminals on its side of a min cut.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::component::Column;

struct Arc {
    to: usize,
    cap: f64,
}

pub(crate) struct FlowNetwork {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork { arcs: Vec::new(), out: vec![Vec::new(); n] }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: f64) {
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0.0 });
    }

    /// Edmonds-Karp max flow, stopping once `limit` is reached. Returns the
    /// flow value and the nodes reachable from `s` in the final residual graph.
    pub fn max_flow(&self, s: usize, t: usize, limit: f64) -> (f64, Vec<bool>) {
        let mut residual: Vec<f64> = self.arcs.iter().map(|a| a.cap).collect();
        let n = self.out.len();
        let mut total = 0.0;
        loop {
            let mut via = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                if x == t {
                    break;
                }
                for &a in &self.out[x] {
                    let y = self.arcs[a].to;
                    if !seen[y] && residual[a] > 1e-12 {
                        seen[y] = true;
                        via[y] = a;
                        queue.push_back(y);
                    }
                }
            }
            if !seen[t] || total >= limit {
                return (total, seen);
            }
            let mut push = f64::INFINITY;
            let mut y = t;
            while y != s {
                let a = via[y];
                push = push.min(residual[a]);
                y = self.arcs[a ^ 1].to;
            }
            let mut y = t;
            while y != s {
                let a = via[y];
                residual[a] -= push;
                residual[a ^ 1] += push;
                y = self.arcs[a ^ 1].to;
            }
            total += push;
        }
    }
}

/// Most violated cut over all non-root terminals, as a terminal-slot mask,
/// together with the smallest flow value found. `None` when every terminal
/// sends at least `1 - tol`.
pub(crate) fn most_violated(
    terminal_count: usize,
    root_slot: usize,
    columns: &[Column],
    x: &[f64],
    tol: f64,
) -> Option<(u64, f64)> {
    let mut net = FlowNetwork::new(terminal_count + columns.len());
    for (j, col) in columns.iter().enumerate() {
        if x[j] <= 0.0 {
            continue;
        }
        let g = terminal_count + j;
        for slot in 0..terminal_count {
            if col.mask >> slot & 1 == 1 && slot != col.sink_slot {
                net.add_arc(slot, g, f64::INFINITY);
            }
        }
        net.add_arc(g, col.sink_slot, x[j]);
    }
    let results: Vec<(f64, usize, u64)> = (0..terminal_count)
        .into_par_iter()
        .filter(|&t| t != root_slot)
        .map(|t| {
            let (value, side) = net.max_flow(t, root_slot, 1.0);
            let mask = (0..terminal_count)
                .filter(|&v| side[v])
                .fold(0u64, |m, v| m | 1 << v);
            (value, t, mask)
        })
        .collect();
    results
        .into_iter()
        .filter(|&(value, _, _)| value < 1.0 - tol)
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(value, _, mask)| (mask, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_flow_on_a_diamond() {
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 0.5);
        net.add_arc(0, 2, 0.25);
        net.add_arc(1, 3, 1.0);
        net.add_arc(2, 3, 1.0);
        let (v, side) = net.max_flow(0, 3, f64::INFINITY);
        assert!((v - 0.75).abs() < 1e-12);
        assert_eq!(side, vec![true, false, false, false]);
    }
}
