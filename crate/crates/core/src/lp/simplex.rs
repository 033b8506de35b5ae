//! Dense dual simplex for covering LPs: minimize `c·x` subject to
//! `Σ_{j ∈ row} x_j >= 1` for every row, `x >= 0`, with `c >= 0`.
//!
//! Starting from the all-surplus basis the reduced costs are `c >= 0`, so the
//! start is dual feasible and no phase one is needed. The leaving row is the
//! infeasible basic variable of smallest index and the entering column wins
//! the ratio test with ties to the smallest index, which rules out cycling.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct CoreSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("row {0} cannot be satisfied")]
    Infeasible(usize),
    #[error("pivot limit {0} reached")]
    PivotLimit(usize),
    #[error("negative objective coefficient on column {0}")]
    NegativeCost(usize),
}

impl From<CoreError> for Error {
    fn from(e: CoreError) -> Self {
        Error::LpNumerical(e.to_string())
    }
}

/// Each row lists the columns with coefficient 1.
pub fn lp_core_solve(rows: &[Vec<usize>], costs: &[f64], tol: f64) -> Result<CoreSolution, CoreError> {
    let n = costs.len();
    let m = rows.len();
    if let Some(j) = costs.iter().position(|&c| c < 0.0) {
        return Err(CoreError::NegativeCost(j));
    }
    let width = n + m;
    // Row i reads -A_i x + s_i = -1, stored with the right-hand side last.
    let mut tab = vec![vec![0.0f64; width + 1]; m];
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            tab[i][j] = -1.0;
        }
        tab[i][n + i] = 1.0;
        tab[i][width] = -1.0;
    }
    let mut reduced: Vec<f64> = costs.iter().copied().chain(std::iter::repeat(0.0).take(m)).collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    let limit = 50 * (width + 1).max(100);
    let mut pivots = 0;
    loop {
        let leaving = (0..m)
            .filter(|&i| tab[i][width] < -tol)
            .min_by_key(|&i| basis[i]);
        let Some(r) = leaving else { break };
        let mut entering: Option<(f64, usize)> = None;
        for j in 0..width {
            let a = tab[r][j];
            if a < -PIVOT_EPS {
                let ratio = reduced[j].max(0.0) / -a;
                if entering.map_or(true, |(best, _)| ratio < best - PIVOT_EPS) {
                    entering = Some((ratio, j));
                }
            }
        }
        let Some((_, q)) = entering else {
            return Err(CoreError::Infeasible(r));
        };
        pivots += 1;
        if pivots > limit {
            return Err(CoreError::PivotLimit(limit));
        }
        let p = tab[r][q];
        for v in tab[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != r {
                let f = row[q];
                if f != 0.0 {
                    for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = reduced[q];
        if f != 0.0 {
            for (v, &pv) in reduced.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        basis[r] = q;
    }
    let mut x = vec![0.0; n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tab[i][width].max(0.0);
        }
    }
    let objective = x.iter().zip(costs).map(|(a, b)| a * b).sum();
    Ok(CoreSolution { x, objective, pivots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row() {
        let s = lp_core_solve(&[vec![0]], &[6.0], 1e-9).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-9);
        assert!((s.objective - 6.0).abs() < 1e-9);
    }

    #[test]
    fn cheaper_column_wins() {
        let s = lp_core_solve(&[vec![0, 1]], &[4.0, 6.0], 1e-9).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-9);
        assert!(s.x[1].abs() < 1e-9);
    }

    #[test]
    fn fractional_optimum() {
        // three pairwise rows over three columns: x = 1/2 each
        let rows = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        let s = lp_core_solve(&rows, &[1.0, 1.0, 1.0], 1e-9).unwrap();
        assert!((s.objective - 1.5).abs() < 1e-9);
    }

    #[test]
    fn empty_row_is_infeasible() {
        assert_eq!(lp_core_solve(&[vec![0], vec![]], &[1.0], 1e-9), Err(CoreError::Infeasible(1)));
    }

    #[test]
    fn no_rows() {
        let s = lp_core_solve(&[], &[3.0, 2.0], 1e-9).unwrap();
        assert_eq!(s.objective, 0.0);
    }
}
