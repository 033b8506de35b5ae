//! The directed-component LP relaxation, solved by cutting planes.
//!
//! There is one variable `x_{Q,s}` per column. For every terminal set `W`
//! avoiding the root, the columns whose sink lies outside `W` and whose
//! terminals meet `W` must carry total mass at least 1. Rows start as the
//! singletons `{t}` and grow one most-violated cut per round.

mod separation;
mod simplex;

use serde::Serialize;

use crate::component::Column;
use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId};

pub use simplex::{lp_core_solve, CoreError, CoreSolution};

/// Default LP tolerance.
pub const DEFAULT_TOL: f64 = 1e-7;

const MAX_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, Serialize)]
pub struct LpState {
    #[serde(skip)]
    pub columns: Vec<Column>,
    /// Active cut rows as terminal-slot masks.
    pub rows: Vec<u64>,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Working-LP objective after each cutting-plane round.
    pub history: Vec<f64>,
}

impl LpState {
    /// Terminals of a row mask.
    pub fn row_terminals(instance: &Instance, row: u64) -> Vec<NodeId> {
        instance
            .terminals()
            .iter()
            .enumerate()
            .filter(|&(slot, _)| row >> slot & 1 == 1)
            .map(|(_, &t)| t)
            .collect()
    }
}

/// Whether column `col` has coefficient 1 in the row for `w`.
pub fn in_row(col: &Column, w: u64) -> bool {
    w >> col.sink_slot & 1 == 0 && col.mask & w != 0
}

/// Left-hand side of the row for `w` under `x`.
pub fn row_value(columns: &[Column], x: &[f64], w: u64) -> f64 {
    columns
        .iter()
        .zip(x)
        .filter(|(c, _)| in_row(c, w))
        .map(|(_, v)| v)
        .sum()
}

/// Every nonempty subset of non-root terminal slots.
pub fn all_rows(instance: &Instance) -> Vec<u64> {
    let t = instance.terminals().len();
    let root = instance.terminal_slot(instance.root()).expect("root is a terminal");
    let free: Vec<usize> = (0..t).filter(|&s| s != root).collect();
    (1u64..1 << free.len())
        .map(|bits| {
            free.iter()
                .enumerate()
                .filter(|&(i, _)| bits >> i & 1 == 1)
                .fold(0u64, |m, (_, &s)| m | 1 << s)
        })
        .collect()
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol <= 1e-4 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must lie in (0, 1e-4], got {tol}")))
    }
}

/// Most violated cut under `x`, as the list of terminals on the cut side.
pub fn separate(instance: &Instance, columns: &[Column], x: &[f64], tol: f64) -> Option<Vec<NodeId>> {
    let root = instance.terminal_slot(instance.root()).expect("root is a terminal");
    separation::most_violated(instance.terminals().len(), root, columns, x, tol)
        .map(|(mask, _)| LpState::row_terminals(instance, mask))
}

/// Solves the LP restricted to `rows` directly.
pub fn solve_rows(columns: &[Column], rows: &[u64], tol: f64) -> Result<CoreSolution> {
    let costs: Vec<f64> = columns.iter().map(|c| c.power.to_f64()).collect();
    let lists: Vec<Vec<usize>> = rows
        .iter()
        .map(|&w| (0..columns.len()).filter(|&j| in_row(&columns[j], w)).collect())
        .collect();
    Ok(lp_core_solve(&lists, &costs, tol.min(1e-9))?)
}

pub fn solve_lp(instance: &Instance, columns: Vec<Column>, tol: f64) -> Result<LpState> {
    check_tol(tol)?;
    let terminals = instance.terminals();
    if terminals.len() > 64 {
        return Err(Error::TerminalGuard { terminals: terminals.len(), limit: 64 });
    }
    let root = instance.terminal_slot(instance.root()).expect("root is a terminal");
    let mut rows: Vec<u64> = (0..terminals.len()).filter(|&s| s != root).map(|s| 1u64 << s).collect();
    for &w in &rows {
        if !columns.iter().any(|c| in_row(c, w)) {
            return Err(Error::LpInfeasible(terminals[w.trailing_zeros() as usize]));
        }
    }
    let costs: Vec<f64> = columns.iter().map(|c| c.power.to_f64()).collect();
    let mut lists: Vec<Vec<usize>> = rows
        .iter()
        .map(|&w| (0..columns.len()).filter(|&j| in_row(&columns[j], w)).collect())
        .collect();
    let mut history = Vec::new();
    for _ in 0..MAX_ROUNDS {
        let sol = lp_core_solve(&lists, &costs, tol.min(1e-9)).map_err(|e| match e {
            CoreError::Infeasible(r) => Error::LpInfeasible(terminals[rows[r].trailing_zeros() as usize]),
            other => other.into(),
        })?;
        history.push(sol.objective);
        match separation::most_violated(terminals.len(), root, &columns, &sol.x, tol) {
            None => {
                return Ok(LpState { columns, rows, x: sol.x, objective: sol.objective, history });
            }
            Some((w, _)) => {
                if rows.contains(&w) {
                    return Err(Error::LpNumerical(format!("cut {w:#b} separated twice")));
                }
                lists.push((0..columns.len()).filter(|&j| in_row(&columns[j], w)).collect());
                rows.push(w);
            }
        }
    }
    Err(Error::IterationCap(MAX_ROUNDS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::enumerate_columns;
    use crate::cost::Cost;
    use crate::instance::Edge;

    fn inst(n: usize, edges: &[(usize, usize, i128)], terminals: &[usize]) -> Instance {
        let edges = edges
            .iter()
            .map(|&(u, v, c)| Edge { u, v, cost: Cost::integer(c) })
            .collect();
        Instance::new(n, edges, terminals.iter().copied(), terminals[0]).unwrap()
    }

    #[test]
    fn two_terminals_one_edge() {
        let i = inst(2, &[(0, 1, 3)], &[0, 1]);
        let cols = enumerate_columns(&i, 2).unwrap();
        let lp = solve_lp(&i, cols, DEFAULT_TOL).unwrap();
        assert!((lp.objective - 6.0).abs() < 1e-9);
        let j = lp.columns.iter().position(|c| c.sink == 0).unwrap();
        assert!((lp.x[j] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn star_of_three_matches_full_row_set() {
        let i = inst(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)], &[1, 2, 3]);
        let cols = enumerate_columns(&i, 3).unwrap();
        let full = solve_rows(&cols, &all_rows(&i), 1e-9).unwrap();
        let lp = solve_lp(&i, cols, DEFAULT_TOL).unwrap();
        assert!(lp.objective <= 4.0 + 1e-9);
        assert!((lp.objective - full.objective).abs() < 1e-7);
    }

    #[test]
    fn zero_costs_give_zero() {
        let i = inst(3, &[(0, 1, 0), (1, 2, 0)], &[0, 1, 2]);
        let lp = solve_lp(&i, enumerate_columns(&i, 3).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(lp.objective, 0.0);
    }

    #[test]
    fn separation_on_zero_and_integral_points() {
        let i = inst(2, &[(0, 1, 3)], &[0, 1]);
        let cols = enumerate_columns(&i, 2).unwrap();
        assert_eq!(separate(&i, &cols, &[0.0, 0.0], DEFAULT_TOL), Some(vec![1]));
        let x: Vec<f64> = cols.iter().map(|c| if c.sink == 0 { 1.0 } else { 0.0 }).collect();
        assert_eq!(separate(&i, &cols, &x, DEFAULT_TOL), None);
    }

    #[test]
    fn bad_tolerance() {
        let i = inst(2, &[(0, 1, 3)], &[0, 1]);
        let cols = enumerate_columns(&i, 2).unwrap();
        assert!(matches!(solve_lp(&i, cols, 0.1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn uncovered_terminal_is_infeasible() {
        let i = inst(2, &[(0, 1, 3)], &[0, 1]);
        assert_eq!(solve_lp(&i, Vec::new(), DEFAULT_TOL).unwrap_err(), Error::LpInfeasible(1));
    }
}
