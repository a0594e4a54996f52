//! Projection onto the cardinality set `U_kappa = {u : |supp(u)| <= kappa}`.
//!
//! Keeping the `kappa` entries of largest magnitude and zeroing the rest is a
//! global minimizer of `||u - z||^2` over `U_kappa`. Ties in magnitude are
//! resolved toward the lowest index so the result is deterministic.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// Entries with magnitude at or below this count as zero in [`supp_count`].
pub const SUPPORT_THRESHOLD: f64 = 1e-9;

/// Maximum number of tolled links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CardinalityBudget(usize);

impl CardinalityBudget {
    pub fn new(kappa: usize, m: usize) -> Result<Self> {
        if kappa > m {
            return Err(Error::domain(format!(
                "cardinality budget {kappa} exceeds link count {m}"
            )));
        }
        Ok(CardinalityBudget(kappa))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

// larger magnitude first, then lower index
fn rank(z: &[f64], i: usize, j: usize) -> Ordering {
    z[j].abs().total_cmp(&z[i].abs()).then(i.cmp(&j))
}

/// Indices of the `kappa` entries with largest `|z_i|`, ascending.
pub fn top_indices(z: &[f64], kappa: usize) -> Result<Vec<usize>> {
    if kappa > z.len() {
        return Err(Error::domain(format!(
            "cardinality budget {kappa} exceeds vector length {}",
            z.len()
        )));
    }
    if let Some(i) = z.iter().position(|x| !x.is_finite()) {
        return Err(Error::domain(format!("non-finite entry at index {i}")));
    }
    let mut idx: Vec<usize> = (0..z.len()).collect();
    if kappa == 0 {
        return Ok(Vec::new());
    }
    if kappa < z.len() {
        idx.select_nth_unstable_by(kappa - 1, |&i, &j| rank(z, i, j));
        idx.truncate(kappa);
    }
    idx.sort_unstable();
    Ok(idx)
}

/// Euclidean projection of `z` onto `U_kappa`.
pub fn project_topk(z: &[f64], kappa: usize) -> Result<Vec<f64>> {
    let keep = top_indices(z, kappa)?;
    let mut u = alloc::vec![0.0; z.len()];
    for i in keep {
        u[i] = z[i];
    }
    Ok(u)
}

/// Number of entries with `|u_i| > SUPPORT_THRESHOLD`.
pub fn supp_count(u: &[f64]) -> usize {
    u.iter().filter(|x| x.abs() > SUPPORT_THRESHOLD).count()
}

/// Indices of the support, ascending.
pub fn support(u: &[f64]) -> Vec<usize> {
    u.iter()
        .enumerate()
        .filter(|(_, x)| x.abs() > SUPPORT_THRESHOLD)
        .map(|(i, _)| i)
        .collect()
}
