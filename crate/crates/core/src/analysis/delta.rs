//! Harmonic deletion-time bounds and the resulting approximation factors.

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::reference::TreeMode;

/// Largest index for which exact harmonic numbers fit in `i128`.
pub const HARMONIC_MAX: usize = 60;

/// Largest index accepted by [`check_delta_properties`].
pub const PROPERTY_MAX: usize = 50;

/// Exact `H_n = 1 + 1/2 + ... + 1/n`.
pub fn harmonic(n: usize) -> Result<Ratio<i128>> {
    if n > HARMONIC_MAX {
        return Err(Error::OutOfRange(format!("harmonic index {n} above {HARMONIC_MAX}")));
    }
    Ok((1..=n as i128).fold(Ratio::zero(), |acc, k| acc + Ratio::new(1, k)))
}

fn harmonic_f64(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// `M · H_i`, exactly.
pub fn delta_spanning(m: Ratio<i128>, i: usize) -> Result<Ratio<i128>> {
    if i < 1 {
        return Err(Error::InvalidParameter("index must be at least 1".into()));
    }
    Ok(m * harmonic(i)?)
}

/// `2^{-i} M H_i + (1 - 2^{-i}) Σ_{q>=1} 2^{-q} M H_{q+i}`. The series stops
/// once the tail bound `(H_{q+i} + 2) 2^{-q}` drops below `1e-12`.
pub fn delta_steiner(m: f64, i: usize) -> Result<f64> {
    if i < 1 {
        return Err(Error::InvalidParameter("index must be at least 1".into()));
    }
    if m <= 0.0 {
        return Err(Error::InvalidParameter("scale must be positive".into()));
    }
    let w = 0.5f64.powi(i as i32);
    let mut h = harmonic_f64(i);
    let head = w * h;
    let mut series = 0.0;
    let mut weight = 1.0;
    let mut q = 0usize;
    loop {
        q += 1;
        h += 1.0 / (q + i) as f64;
        weight *= 0.5;
        series += weight * h;
        if (h + 2.0) * weight < 1e-12 {
            break;
        }
    }
    Ok(m * (head + (1.0 - w) * series))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DeltaKind {
    Spanning,
    Steiner,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaReport {
    pub kind: DeltaKind,
    /// `values[j]` is `δ^{j+1}` with `M = 1`.
    pub values: Vec<f64>,
    /// `δ^i <= δ^{i+1}` for all checked i.
    pub increasing: bool,
    /// Increments do not grow.
    pub diminishing: bool,
}

pub fn delta_value(kind: DeltaKind, i: usize) -> Result<f64> {
    match kind {
        DeltaKind::Spanning => {
            let d = delta_spanning(Ratio::one(), i)?;
            Ok(*d.numer() as f64 / *d.denom() as f64)
        }
        DeltaKind::Steiner => delta_steiner(1.0, i),
    }
}

/// Checks monotonicity and diminishing increments of `δ^i` for
/// `i <= i_max` with tolerance `1e-9`.
pub fn check_delta_properties(kind: DeltaKind, i_max: usize) -> Result<DeltaReport> {
    if !(1..=PROPERTY_MAX).contains(&i_max) {
        return Err(Error::InvalidParameter(format!("i_max must lie in 1..={PROPERTY_MAX}")));
    }
    let values: Vec<f64> = (1..=i_max + 1).map(|i| delta_value(kind, i)).collect::<Result<_>>()?;
    let tol = 1e-9;
    let increasing = (0..i_max).all(|j| values[j] <= values[j + 1] + tol);
    let diminishing =
        (1..i_max).all(|j| values[j] - values[j - 1] + tol >= values[j + 1] - values[j]);
    let mut values = values;
    values.truncate(i_max);
    Ok(DeltaReport { kind, values, increasing, diminishing })
}

/// Expected approximation factor `δ^2 / M` without the LP tolerance.
pub fn theoretical_factor(mode: TreeMode) -> f64 {
    let kind = match mode {
        TreeMode::Spanning => DeltaKind::Spanning,
        TreeMode::Steiner => DeltaKind::Steiner,
    };
    delta_value(kind, 2).expect("index 2 is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spanning_two_is_three_halves() {
        assert_eq!(delta_spanning(Ratio::one(), 2).unwrap(), Ratio::new(3, 2));
        assert_eq!(theoretical_factor(TreeMode::Spanning), 1.5);
    }

    #[test]
    fn steiner_closed_forms() {
        let d2 = delta_steiner(1.0, 2).unwrap();
        assert!((d2 - (3.0 * 4f64.ln() - 2.25)).abs() < 1e-10);
        let d1 = delta_steiner(1.0, 1).unwrap();
        assert!((d1 - 2.0 * 2f64.ln()).abs() < 1e-10);
        assert!((delta_steiner(3.0, 2).unwrap() - 3.0 * d2).abs() < 1e-9);
    }

    #[test]
    fn properties_hold() {
        for kind in [DeltaKind::Spanning, DeltaKind::Steiner] {
            let r = check_delta_properties(kind, 50).unwrap();
            assert!(r.increasing && r.diminishing, "{kind:?}");
            assert_eq!(r.values.len(), 50);
        }
        let one = check_delta_properties(DeltaKind::Steiner, 1).unwrap();
        assert!(one.increasing && one.diminishing);
        assert!(check_delta_properties(DeltaKind::Steiner, 51).is_err());
    }

    #[test]
    fn harmonic_exact() {
        assert_eq!(harmonic(3).unwrap(), Ratio::new(11, 6));
        assert!(harmonic(HARMONIC_MAX).is_ok());
        assert!(harmonic(HARMONIC_MAX + 1).is_err());
        assert!(delta_spanning(Ratio::one(), 0).is_err());
    }
}
