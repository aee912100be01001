//! Incremental PCA: a mean-aware thin SVD that absorbs data in batches.
//!
//! Singular values are stored normalized by `√n_seen`, i.e. they are the
//! singular values of the centered data divided by the square root of the
//! sample count (square roots of the population variances along each
//! component).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{center_rows, column_means, svd_thin};

/// Singular values at or below `RELATIVE_RANK_TOL · s₁` are dropped.
pub const RELATIVE_RANK_TOL: f64 = 1e-8;
/// Singular values at or below this are dropped regardless of scale.
pub const ABSOLUTE_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct IpcaModel {
    pub mean: DVector<f64>,
    /// Non-increasing, all above the rank thresholds.
    pub singular_values: DVector<f64>,
    /// `r × p`, orthonormal rows.
    pub components: DMatrix<f64>,
    pub n_seen: usize,
}

impl IpcaModel {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

fn numerical_rank(s: &DVector<f64>) -> usize {
    let Some(&top) = s.iter().next() else {
        return 0;
    };
    s.iter()
        .take_while(|&&v| v > RELATIVE_RANK_TOL * top && v > ABSOLUTE_RANK_TOL)
        .count()
}

/// Build a model from the thin SVD of `rows`, scaling singular values by
/// `1/√total`.
fn from_svd(rows: &DMatrix<f64>, mean: DVector<f64>, total: usize) -> Result<IpcaModel> {
    let p = mean.len();
    let svd = svd_thin(rows)?;
    let scale = (total as f64).sqrt();
    let s = svd.s.map(|v| v / scale);
    let r = numerical_rank(&s);
    Ok(IpcaModel {
        mean,
        singular_values: s.rows(0, r).into_owned(),
        components: if r == 0 {
            DMatrix::zeros(0, p)
        } else {
            svd.v.columns(0, r).transpose()
        },
        n_seen: total,
    })
}

pub fn ipca_init(batch: &DMatrix<f64>) -> Result<IpcaModel> {
    if batch.nrows() == 0 || batch.ncols() == 0 {
        return Err(Error::invalid("IPCA needs a non-empty batch"));
    }
    let mean = column_means(batch);
    let centered = center_rows(batch, &mean);
    from_svd(&centered, mean, batch.nrows())
}

/// Absorb `batch` into `model`.
///
/// The new decomposition is the thin SVD of the stacked rows
/// `[√n·diag(s)·C; batch − mean_batch; √(n·m/(n+m))·(mean_old − mean_batch)]`,
/// which has the same scatter matrix as all data seen so far.
pub fn ipca_update(model: &IpcaModel, batch: &DMatrix<f64>) -> Result<IpcaModel> {
    let p = model.dim();
    if batch.ncols() != p {
        return Err(Error::invalid(format!(
            "batch has {} columns, model has {p}",
            batch.ncols()
        )));
    }
    let m = batch.nrows();
    if m == 0 {
        return Err(Error::invalid("IPCA update needs at least one row"));
    }
    let n = model.n_seen;
    let total = n + m;
    let (nf, mf, tf) = (n as f64, m as f64, total as f64);

    let batch_mean = column_means(batch);
    let mean = (&model.mean * nf + &batch_mean * mf) / tf;

    let r = model.rank();
    let mut stacked = DMatrix::zeros(r + m + 1, p);
    let old_scale = nf.sqrt();
    for k in 0..r {
        let w = old_scale * model.singular_values[k];
        for j in 0..p {
            stacked[(k, j)] = w * model.components[(k, j)];
        }
    }
    for i in 0..m {
        for j in 0..p {
            stacked[(r + i, j)] = batch[(i, j)] - batch_mean[j];
        }
    }
    let correction = (nf * mf / tf).sqrt();
    for j in 0..p {
        stacked[(r + m, j)] = correction * (model.mean[j] - batch_mean[j]);
    }
    from_svd(&stacked, mean, total)
}

/// Coordinates of `points` in the model's component basis:
/// `(points − mean) · componentsᵀ`, a `q × r` matrix.
pub fn ipca_project(model: &IpcaModel, points: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if points.ncols() != model.dim() {
        return Err(Error::invalid(format!(
            "points have {} columns, model has {}",
            points.ncols(),
            model.dim()
        )));
    }
    Ok(center_rows(points, &model.mean) * model.components.transpose())
}

/// Sines of the principal angles between the row spaces of two matrices with
/// orthonormal rows, largest first. Computed from the residual of projecting
/// one basis onto the other, which stays accurate for tiny angles.
pub fn principal_angle_sines(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DVector<f64>> {
    if a.ncols() != b.ncols() || a.nrows() != b.nrows() {
        return Err(Error::invalid("subspaces must have equal shape"));
    }
    if a.nrows() == 0 {
        return Ok(DVector::zeros(0));
    }
    let residual = b - (b * a.transpose()) * a;
    Ok(svd_thin(&residual)?.s)
}
