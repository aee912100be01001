//! Random-direction projection depth.
//!
//! The outlyingness of a point is the largest standardized deviation
//! `|uᵀz − med(uᵀZ)| / mad(uᵀZ)` over a finite set of unit directions `u`;
//! the depth is `1 / (1 + outlyingness)`, so larger depth means more central.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numerics::{median_mad_in_place, DataMatrix};

/// Deviations at or below this are treated as zero when a direction has no
/// spread (mad = 0).
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DepthResult {
    /// Non-negative, possibly `+∞`.
    pub outlyingness: Vec<f64>,
    /// In `[0, 1]`; zero only for infinitely outlying points.
    pub depth: Vec<f64>,
    pub directions_used: usize,
}

fn check_inputs(z: &DataMatrix, directions: &DataMatrix) -> Result<()> {
    if z.nrows() < 2 {
        return Err(Error::invalid("projection depth needs at least 2 points"));
    }
    if directions.ncols() != z.ncols() {
        return Err(Error::invalid(format!(
            "directions have dimension {}, data has {}",
            directions.ncols(),
            z.ncols()
        )));
    }
    Ok(())
}

/// Standardized deviations of all points along one direction.
fn direction_outlyingness(z: &DMatrix<f64>, u: &[f64], out: &mut [f64]) {
    let (n, p) = z.shape();
    for (i, slot) in out.iter_mut().enumerate().take(n) {
        let mut acc = 0.0;
        for (j, uj) in u.iter().enumerate().take(p) {
            acc += z[(i, j)] * uj;
        }
        *slot = acc;
    }
    let mut scratch = out.to_vec();
    let (med, spread) = median_mad_in_place(&mut scratch);
    for v in out.iter_mut() {
        let dev = (*v - med).abs();
        *v = if spread > 0.0 {
            dev / spread
        } else if dev <= DEGENERATE_TOL {
            0.0
        } else {
            f64::INFINITY
        };
    }
}

pub fn projection_outlyingness(z: &DataMatrix, directions: &DataMatrix) -> Result<Vec<f64>> {
    projection_outlyingness_with(z, directions, Exec::default())
}

/// [`projection_outlyingness`] with an explicit execution strategy. The
/// result does not depend on the strategy: the per-point maximum is
/// insensitive to the order in which directions are visited.
pub fn projection_outlyingness_with(z: &DataMatrix, directions: &DataMatrix, exec: Exec) -> Result<Vec<f64>> {
    check_inputs(z, directions)?;
    let n = z.nrows();
    let zm = z.as_matrix();
    let dirs = directions.as_matrix();
    let tau = dirs.nrows();
    let outlyingness = exec.fold_range(
        tau,
        || (vec![0.0f64; n], vec![0.0f64; n], vec![0.0f64; dirs.ncols()]),
        |(mut best, mut buf, mut u), k| {
            for (j, uj) in u.iter_mut().enumerate() {
                *uj = dirs[(k, j)];
            }
            direction_outlyingness(zm, &u, &mut buf);
            for (b, v) in best.iter_mut().zip(&buf) {
                *b = b.max(*v);
            }
            (best, buf, u)
        },
        |(mut a, buf, u), (b, _, _)| {
            for (x, y) in a.iter_mut().zip(&b) {
                *x = x.max(*y);
            }
            (a, buf, u)
        },
    );
    Ok(outlyingness.0)
}

pub fn projection_depth(z: &DataMatrix, directions: &DataMatrix) -> Result<DepthResult> {
    projection_depth_with(z, directions, Exec::default())
}

pub fn projection_depth_with(z: &DataMatrix, directions: &DataMatrix, exec: Exec) -> Result<DepthResult> {
    let outlyingness = projection_outlyingness_with(z, directions, exec)?;
    let depth = outlyingness.iter().map(|o| 1.0 / (1.0 + o)).collect();
    Ok(DepthResult {
        outlyingness,
        depth,
        directions_used: directions.nrows(),
    })
}

/// Indices of the `m` largest depths, ties going to the smaller index, returned
/// in ascending index order.
pub fn select_deepest(depths: &[f64], m: usize) -> Result<Vec<usize>> {
    if m == 0 || m > depths.len() {
        return Err(Error::invalid(format!("cannot select {m} of {} points", depths.len())));
    }
    let mut order: Vec<usize> = (0..depths.len()).collect();
    order.sort_by(|&a, &b| depths[b].total_cmp(&depths[a]).then(a.cmp(&b)));
    order.truncate(m);
    order.sort_unstable();
    Ok(order)
}
