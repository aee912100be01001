//! The FIR robust location and covariance estimator.
//!
//! 1. Score every point by projection depth over `τ` random directions.
//! 2. Seed the inlier set `H` with the `m` deepest points.
//! 3. Repeat `⌊h/m⌋ − 1` times: absorb the latest batch into an incremental
//!    PCA, build a selection box from that batch's scores on the two leading
//!    axes (expanded by half its range on each side), project the unselected
//!    points, and add the `m` with the smallest singular-value-scaled distance
//!    that fall inside the box.
//! 4. Return the mean and covariance of the rows in `H`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::depth::{projection_depth, select_deepest};
use crate::error::{Error, Result};
use crate::ipca::{ipca_init, ipca_project, ipca_update, IpcaModel};
use crate::numerics::{floor_fraction, sample_unit_directions, DataMatrix, RngStream};

pub const DEFAULT_DIRECTIONS: usize = 500;
pub const DEFAULT_BOX_EXPAND: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirConfig {
    /// Fraction of the data used for the inlier subset, in `(0, 1)`.
    pub alpha: f64,
    /// Points added per iteration. `None` picks `max(p + 1, ⌈n/10⌉)`.
    pub batch_m: Option<usize>,
    /// Number of random projection directions `τ`.
    pub n_directions: usize,
    pub seed: RngStream,
    /// Half-range expansion of the selection box.
    pub box_expand: f64,
}

impl Default for FirConfig {
    fn default() -> Self {
        Self {
            alpha: 0.75,
            batch_m: None,
            n_directions: DEFAULT_DIRECTIONS,
            seed: RngStream::new(0, 0),
            box_expand: DEFAULT_BOX_EXPAND,
        }
    }
}

/// Sizes derived from a [`FirConfig`] for a concrete `n × p` input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirPlan {
    pub h: usize,
    pub batch_m: usize,
    /// Number of growth iterations, `⌊h/m⌋ − 1`.
    pub iterations: usize,
}

impl FirPlan {
    pub fn n_selected(&self) -> usize {
        self.batch_m * (self.h / self.batch_m)
    }
}

pub fn default_batch(n: usize, p: usize) -> usize {
    (p + 1).max(n.div_ceil(10))
}

impl FirConfig {
    pub fn plan(&self, n: usize, p: usize) -> Result<FirPlan> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        if self.n_directions == 0 {
            return Err(Error::invalid("need at least one projection direction"));
        }
        if !(self.box_expand >= 0.0 && self.box_expand.is_finite()) {
            return Err(Error::invalid("box expansion must be finite and >= 0"));
        }
        if n < p + 2 {
            return Err(Error::invalid(format!("need n >= p + 2, got n={n}, p={p}")));
        }
        let h = floor_fraction(self.alpha, n);
        if h >= n || h <= p {
            return Err(Error::invalid(format!(
                "subset size h = floor(alpha*n) = {h} must satisfy p < h < n (p={p}, n={n})"
            )));
        }
        let m = self.batch_m.unwrap_or_else(|| default_batch(n, p));
        if m <= p || m as f64 >= self.alpha * n as f64 {
            return Err(Error::invalid(format!(
                "batch size {m} must satisfy p < batch < alpha*n ({p} < {m} < {})",
                self.alpha * n as f64
            )));
        }
        Ok(FirPlan {
            h,
            batch_m: m,
            iterations: h / m - 1,
        })
    }

    /// Non-fatal configuration remarks for an `n × p` input.
    pub fn warnings(&self, n: usize, p: usize) -> Vec<String> {
        let mut out = Vec::new();
        let Ok(plan) = self.plan(n, p) else {
            return out;
        };
        if plan.h % plan.batch_m != 0 {
            out.push(format!(
                "batch size {} does not divide h = {}; {} points will be selected",
                plan.batch_m,
                plan.h,
                plan.n_selected()
            ));
        }
        if (plan.h as f64) < 0.5 * (n + p + 1) as f64 {
            out.push(format!(
                "h = {} is below (n + p + 1)/2 = {}; breakdown point is reduced",
                plan.h,
                0.5 * (n + p + 1) as f64
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirResult {
    pub mu: DVector<f64>,
    /// Sample covariance of the selected rows, denominator `|H| − 1`.
    pub sigma: DMatrix<f64>,
    /// Strictly increasing.
    pub h_indices: Vec<usize>,
    pub n_selected: usize,
}

/// Per-axis closed intervals over the leading `min(2, r)` IPCA axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionBox {
    pub intervals: Vec<(f64, f64)>,
}

impl SelectionBox {
    pub fn contains(&self, score_row: &[f64]) -> bool {
        self.intervals
            .iter()
            .zip(score_row)
            .all(|(&(lo, hi), &v)| v >= lo && v <= hi)
    }
}

pub fn box_contains(b: &SelectionBox, score_row: &[f64]) -> bool {
    b.contains(score_row)
}

/// `d_i = Σ_j (score_ij / s_j)²` over all `r` retained axes.
pub fn scaled_distance(scores: &DMatrix<f64>, singular_values: &DVector<f64>) -> Result<Vec<f64>> {
    let r = singular_values.len();
    if r == 0 {
        return Err(Error::InvalidState(
            "scaled distance needs at least one component (rank collapse)".into(),
        ));
    }
    if scores.ncols() != r {
        return Err(Error::invalid(format!(
            "scores have {} columns, expected {r}",
            scores.ncols()
        )));
    }
    if singular_values.iter().any(|s| s.is_nan() || *s <= 0.0) {
        return Err(Error::invalid("singular values must be positive"));
    }
    Ok((0..scores.nrows())
        .map(|i| {
            (0..r)
                .map(|j| {
                    let t = scores[(i, j)] / singular_values[j];
                    t * t
                })
                .sum()
        })
        .collect())
}

/// Bounding box of `scores` on the leading `min(2, r)` axes, widened by
/// `expand · range` on each side.
pub fn selection_box(scores: &DMatrix<f64>, expand: f64) -> Result<SelectionBox> {
    if scores.nrows() == 0 || scores.ncols() == 0 {
        return Err(Error::invalid("selection box needs at least one score row and axis"));
    }
    let intervals = (0..scores.ncols().min(2))
        .map(|j| {
            let col = scores.column(j);
            let (lo, hi) = (col.min(), col.max());
            let delta = expand * (hi - lo);
            (lo - delta, hi + delta)
        })
        .collect();
    Ok(SelectionBox { intervals })
}

/// Mean and covariance (denominator `len − 1`) of the rows of `z` at
/// `indices`, accumulated in the order given.
pub fn mean_covariance(z: &DMatrix<f64>, indices: &[usize]) -> (DVector<f64>, DMatrix<f64>) {
    let p = z.ncols();
    let count = indices.len() as f64;
    let mut mu = DVector::zeros(p);
    for &i in indices {
        for j in 0..p {
            mu[j] += z[(i, j)];
        }
    }
    mu /= count;
    let mut sigma = DMatrix::zeros(p, p);
    for &i in indices {
        for a in 0..p {
            let da = z[(i, a)] - mu[a];
            for b in a..p {
                sigma[(a, b)] += da * (z[(i, b)] - mu[b]);
            }
        }
    }
    let denom = (count - 1.0).max(1.0);
    for a in 0..p {
        for b in a..p {
            let v = sigma[(a, b)] / denom;
            sigma[(a, b)] = v;
            sigma[(b, a)] = v;
        }
    }
    (mu, sigma)
}

/// Run FIR with `τ` directions drawn from `config.seed`.
pub fn fir_estimate(z: &DataMatrix, config: &FirConfig) -> Result<FirResult> {
    config.plan(z.nrows(), z.ncols())?;
    let directions = sample_unit_directions(z.ncols(), config.n_directions, &config.seed)?;
    fir_estimate_with_directions(z, config, &directions)
}

/// Run FIR with an explicit direction set (`config.n_directions` and
/// `config.seed` are ignored).
pub fn fir_estimate_with_directions(z: &DataMatrix, config: &FirConfig, directions: &DataMatrix) -> Result<FirResult> {
    let n = z.nrows();
    let plan = config.plan(n, z.ncols())?;
    let m = plan.batch_m;
    let zm = z.as_matrix();

    let depth = projection_depth(z, directions)?;
    let seed_batch = select_deepest(&depth.depth, m)?;

    let mut selected = vec![false; n];
    for &i in &seed_batch {
        selected[i] = true;
    }
    let mut last_batch = seed_batch;
    let mut model: Option<IpcaModel> = None;

    for _ in 0..plan.iterations {
        let batch_rows = z.select_rows(&last_batch);
        let updated = match model.take() {
            None => ipca_init(&batch_rows)?,
            Some(prev) => ipca_update(&prev, &batch_rows)?,
        };
        if updated.rank() == 0 {
            return Err(Error::numeric(format!(
                "incremental PCA collapsed to rank 0 after absorbing {} points (selected points are identical)",
                updated.n_seen
            )));
        }
        let sbox = selection_box(&ipca_project(&updated, &batch_rows)?, config.box_expand)?;

        let unselected: Vec<usize> = (0..n).filter(|&i| !selected[i]).collect();
        let scores = ipca_project(&updated, &z.select_rows(&unselected))?;
        let dist = scaled_distance(&scores, &updated.singular_values)?;

        let mut order: Vec<usize> = (0..unselected.len()).collect();
        order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
        let inside = |k: usize| {
            let row: Vec<f64> = scores.row(k).iter().copied().collect();
            sbox.contains(&row)
        };
        let mut chosen: Vec<usize> = order.iter().copied().filter(|&k| inside(k)).take(m).collect();
        if chosen.len() < m {
            // Not enough candidates in the box: top up by global distance.
            let mut taken = vec![false; unselected.len()];
            for &k in &chosen {
                taken[k] = true;
            }
            let short = m - chosen.len();
            chosen.extend(order.iter().copied().filter(|&k| !taken[k]).take(short));
        }
        let mut batch: Vec<usize> = chosen.into_iter().map(|k| unselected[k]).collect();
        batch.sort_unstable();
        for &i in &batch {
            selected[i] = true;
        }
        last_batch = batch;
        model = Some(updated);
    }

    let h_indices: Vec<usize> = (0..n).filter(|&i| selected[i]).collect();
    let (mu, sigma) = mean_covariance(zm, &h_indices);
    Ok(FirResult {
        mu,
        sigma,
        n_selected: h_indices.len(),
        h_indices,
    })
}
