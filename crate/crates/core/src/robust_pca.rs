//! Robust PCA built on a robust center/covariance of the rank-reduced data,
//! with score distance / orthogonal distance outlier diagnostics.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::depth::{projection_depth, select_deepest};
use crate::error::{Error, Result};
use crate::fir::{fir_estimate_with_directions, mean_covariance, FirConfig, FirResult};
use crate::numerics::{
    center_rows, chi2_quantile, column_means, floor_fraction, gaussian_quantile, sample_unit_directions, svd_thin,
    sym_eig, DataMatrix,
};

/// Relative threshold below which singular values / eigenvalues count as zero.
pub const RANK_TOL: f64 = 1e-8;
pub const CUTOFF_PROB: f64 = 0.975;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateMethod {
    #[serde(alias = "cpca")]
    Classical,
    Fdb,
    Fir,
}

impl EstimateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateMethod::Classical => "classical",
            EstimateMethod::Fdb => "fdb",
            EstimateMethod::Fir => "fir",
        }
    }
}

impl fmt::Display for EstimateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimateMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classical" | "cpca" => Ok(EstimateMethod::Classical),
            "fdb" => Ok(EstimateMethod::Fdb),
            "fir" => Ok(EstimateMethod::Fir),
            other => Err(Error::invalid(format!(
                "unknown method '{other}' (expected classical, fdb or fir)"
            ))),
        }
    }
}

/// What is reported as the component variances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceForm {
    /// Eigenvalues of the robust covariance.
    #[default]
    Eigenvalues,
    /// Squared eigenvalues.
    SquaredEigenvalues,
}

/// How the robust center is mapped back to the original coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterForm {
    /// `mu1 = mu0 + (μ − mu0·V)·Vᵀ`: replaces the in-span part of the
    /// classical mean by the robust center.
    #[default]
    Corrected,
    /// `mu1 = mu0 + μ·Vᵀ`.
    Literal,
}

/// Transform applied to orthogonal distances before the normal cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OdCutoffRule {
    /// `(mean + sd · z)^{3/2}` of `od^{2/3}`.
    #[default]
    WilsonHilferty,
    /// `mean + sd · z` of the raw distances.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PcaOptions {
    pub variance_form: VarianceForm,
    pub center_form: CenterForm,
    pub od_cutoff: OdCutoffRule,
    /// Accept `p >= n` input; the rank-reducing projection brings it down to
    /// at most `n − 1` dimensions.
    pub allow_wide: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preprocessed {
    /// `n × r0` projection of the uncentered data, `X·V`.
    pub z: DataMatrix,
    /// `p × r0`, orthonormal columns.
    pub v: DMatrix<f64>,
    pub mu0: DVector<f64>,
    pub r0: usize,
}

/// Project `X` onto the span of its nonzero centered principal directions.
/// Lossless on the centered data.
pub fn preprocess_project(x: &DataMatrix) -> Result<Preprocessed> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::invalid("need at least 2 observations"));
    }
    let xm = x.as_matrix();
    let mu0 = column_means(xm);
    let centered = center_rows(xm, &mu0) / (n as f64).sqrt();
    let svd = svd_thin(&centered)?;
    let top = svd.s.iter().copied().next().unwrap_or(0.0);
    let r0 = svd.s.iter().take_while(|&&s| s > RANK_TOL * top && s > 0.0).count();
    if r0 == 0 {
        return Err(Error::numeric("degenerate data: all rows are identical"));
    }
    let v = svd.v.columns(0, r0).into_owned();
    let z = DataMatrix::new(xm * &v)?;
    Ok(Preprocessed { z, v, mu0, r0 })
}

/// Mean and covariance of all rows.
pub fn classical_estimate(z: &DataMatrix) -> FirResult {
    let all: Vec<usize> = (0..z.nrows()).collect();
    let (mu, sigma) = mean_covariance(z.as_matrix(), &all);
    FirResult {
        mu,
        sigma,
        n_selected: all.len(),
        h_indices: all,
    }
}

/// Depth-based baseline: mean and covariance of the `⌊αn⌋` deepest points.
pub fn fdb_estimate(z: &DataMatrix, alpha: f64, directions: &DataMatrix) -> Result<FirResult> {
    let n = z.nrows();
    if !(0.5..1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha {alpha} outside [0.5, 1)")));
    }
    let h = floor_fraction(alpha, n);
    if h >= n || h < 2 {
        return Err(Error::invalid(format!(
            "subset size h = {h} must satisfy 2 <= h < n = {n}"
        )));
    }
    let depth = projection_depth(z, directions)?;
    let h_indices = select_deepest(&depth.depth, h)?;
    let (mu, sigma) = mean_covariance(z.as_matrix(), &h_indices);
    Ok(FirResult {
        mu,
        sigma,
        n_selected: h,
        h_indices,
    })
}

/// Run the chosen location/covariance estimator on (already projected) `z`.
pub fn estimate(
    z: &DataMatrix,
    method: EstimateMethod,
    config: &FirConfig,
    directions: &DataMatrix,
) -> Result<FirResult> {
    match method {
        EstimateMethod::Classical => Ok(classical_estimate(z)),
        EstimateMethod::Fdb => fdb_estimate(z, config.alpha, directions),
        EstimateMethod::Fir => fir_estimate_with_directions(z, config, directions),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustPcaModel {
    pub method: EstimateMethod,
    /// `p × r1` combined loadings `V·P`, orthonormal columns.
    pub loadings: DMatrix<f64>,
    /// `n × r1`.
    pub scores: DMatrix<f64>,
    /// Reported component variances (see [`VarianceForm`]).
    pub variances: DVector<f64>,
    /// Leading `r1` eigenvalues of the robust covariance.
    pub eigenvalues: DVector<f64>,
    pub center: DVector<f64>,
    pub mu0: DVector<f64>,
    pub r0: usize,
    pub r1: usize,
    pub sd: Vec<f64>,
    pub od: Vec<f64>,
    pub cutoff_sd: f64,
    pub cutoff_od: f64,
    pub outlier_flags: Vec<bool>,
    /// Inlier subset chosen by the estimator.
    pub h_indices: Vec<usize>,
}

impl RobustPcaModel {
    /// Scores of arbitrary points, `(x − center)·W`.
    pub fn transform(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.loadings.nrows() {
            return Err(Error::invalid(format!(
                "points have {} columns, model has {}",
                x.ncols(),
                self.loadings.nrows()
            )));
        }
        Ok(center_rows(x, &self.center) * &self.loadings)
    }
}

/// `sd_i = sqrt(Σ_j t_ij² / l_j)`.
pub fn score_distance(scores: &DMatrix<f64>, variances: &DVector<f64>) -> Result<Vec<f64>> {
    if scores.ncols() != variances.len() {
        return Err(Error::invalid("scores and variances disagree on rank"));
    }
    if variances.iter().any(|l| l.is_nan() || *l <= 0.0) {
        return Err(Error::invalid("score distance needs positive variances"));
    }
    Ok(scores
        .row_iter()
        .map(|row| {
            row.iter()
                .zip(variances.iter())
                .map(|(t, l)| t * t / l)
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

/// `od_i = ‖x_i − center − W·t_i‖` with `t_i = (x_i − center)·W`.
pub fn orthogonal_distance(x: &DMatrix<f64>, model: &RobustPcaModel) -> Result<Vec<f64>> {
    let scores = model.transform(x)?;
    let centered = center_rows(x, &model.center);
    let residual = centered - scores * model.loadings.transpose();
    Ok(residual.row_iter().map(|r| r.norm()).collect())
}

/// Score-distance and orthogonal-distance cutoffs at the 97.5% level.
pub fn outlier_cutoffs(sd: &[f64], od: &[f64], r1: usize, rule: OdCutoffRule) -> Result<(f64, f64)> {
    if sd.len() < 2 || od.len() != sd.len() {
        return Err(Error::invalid("cutoffs need at least 2 points with matching sd/od"));
    }
    let dof = u32::try_from(r1).map_err(|_| Error::invalid("rank too large"))?;
    let cutoff_sd = chi2_quantile(dof, CUTOFF_PROB)?.sqrt();
    if od.iter().all(|&d| d == 0.0) {
        return Ok((cutoff_sd, 0.0));
    }
    let z = gaussian_quantile(CUTOFF_PROB)?;
    let transformed: Vec<f64> = match rule {
        OdCutoffRule::WilsonHilferty => od.iter().map(|d| d.powf(2.0 / 3.0)).collect(),
        OdCutoffRule::Raw => od.to_vec(),
    };
    let k = transformed.len() as f64;
    let mean = transformed.iter().sum::<f64>() / k;
    let var = transformed.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let level = mean + var.sqrt() * z;
    let cutoff_od = match rule {
        OdCutoffRule::WilsonHilferty => level.max(0.0).powf(1.5),
        OdCutoffRule::Raw => level,
    };
    Ok((cutoff_sd, cutoff_od))
}

pub fn classify(model: &RobustPcaModel) -> Vec<bool> {
    model
        .sd
        .iter()
        .zip(&model.od)
        .map(|(&s, &o)| s > model.cutoff_sd || o > model.cutoff_od)
        .collect()
}

/// Fit robust PCA with default options and directions drawn from
/// `config.seed` in the original coordinates.
pub fn fit(x: &DataMatrix, method: EstimateMethod, config: &FirConfig) -> Result<RobustPcaModel> {
    fit_with(x, method, config, &PcaOptions::default(), None)
}

/// Full-control fit. `directions`, when given, are `τ × p` unit vectors in
/// the original coordinates; otherwise they are sampled from `config.seed`.
/// They are carried into the reduced space through `V`.
pub fn fit_with(
    x: &DataMatrix,
    method: EstimateMethod,
    config: &FirConfig,
    options: &PcaOptions,
    directions: Option<&DataMatrix>,
) -> Result<RobustPcaModel> {
    let (n, p) = (x.nrows(), x.ncols());
    if p >= n && !options.allow_wide {
        return Err(Error::invalid(format!(
            "p exceeds n unsupported (n={n}, p={p}); enable wide mode to reduce rank first"
        )));
    }
    let pre = preprocess_project(x)?;

    let reduced_dirs = if method == EstimateMethod::Classical {
        None
    } else {
        let sampled;
        let dirs = match directions {
            Some(d) => d,
            None => {
                sampled = sample_unit_directions(p, config.n_directions, &config.seed)?;
                &sampled
            }
        };
        if dirs.ncols() != p {
            return Err(Error::invalid(format!(
                "directions have dimension {}, data has {p}",
                dirs.ncols()
            )));
        }
        Some(reduce_directions(dirs, &pre.v)?)
    };

    let est = match (&reduced_dirs, method) {
        (_, EstimateMethod::Classical) => classical_estimate(&pre.z),
        (Some(d), m) => estimate(&pre.z, m, config, d)?,
        (None, _) => unreachable!(),
    };
    assemble(x, &pre, method, est, options)
}

/// Map ambient directions into the reduced coordinates and renormalize.
/// Directions orthogonal to the data span carry no information and are
/// dropped.
fn reduce_directions(dirs: &DataMatrix, v: &DMatrix<f64>) -> Result<DataMatrix> {
    let mapped = dirs.as_matrix() * v;
    let rows: Vec<Vec<f64>> = mapped
        .row_iter()
        .filter_map(|r| {
            let norm = r.norm();
            (norm > 1e-12).then(|| r.iter().map(|v| v / norm).collect())
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::numeric("no projection direction intersects the data span"));
    }
    DataMatrix::from_rows(&rows)
}

fn assemble(
    x: &DataMatrix,
    pre: &Preprocessed,
    method: EstimateMethod,
    est: FirResult,
    options: &PcaOptions,
) -> Result<RobustPcaModel> {
    let eig = sym_eig(&est.sigma)?;
    let top = eig.values[0];
    let r1 = if top > 0.0 {
        eig.values.iter().take_while(|&&l| l > RANK_TOL * top).count()
    } else {
        0
    };
    if r1 == 0 {
        return Err(Error::numeric("robust covariance has no positive eigenvalue"));
    }
    let mut p_cols = eig.vectors.columns(0, r1).into_owned();
    let mut loadings = &pre.v * &p_cols;
    // Make the largest-magnitude entry of each loading positive.
    for j in 0..r1 {
        let col = loadings.column(j);
        let lead = col
            .iter()
            .copied()
            .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if lead < 0.0 {
            loadings.column_mut(j).neg_mut();
            p_cols.column_mut(j).neg_mut();
        }
    }
    let eigenvalues = eig.values.rows(0, r1).into_owned();
    let variances = match options.variance_form {
        VarianceForm::Eigenvalues => eigenvalues.clone(),
        VarianceForm::SquaredEigenvalues => eigenvalues.map(|l| l * l),
    };
    let mu0_v = pre.v.transpose() * &pre.mu0;
    let center = match options.center_form {
        CenterForm::Corrected => &pre.mu0 + &pre.v * (&est.mu - mu0_v),
        CenterForm::Literal => &pre.mu0 + &pre.v * &est.mu,
    };
    let scores = center_rows(pre.z.as_matrix(), &est.mu) * &p_cols;
    let sd = score_distance(&scores, &eigenvalues)?;

    let mut model = RobustPcaModel {
        method,
        loadings,
        scores,
        variances,
        eigenvalues,
        center,
        mu0: pre.mu0.clone(),
        r0: pre.r0,
        r1,
        sd,
        od: Vec::new(),
        cutoff_sd: 0.0,
        cutoff_od: 0.0,
        outlier_flags: Vec::new(),
        h_indices: est.h_indices,
    };
    model.od = orthogonal_distance(x.as_matrix(), &model)?;
    let (cutoff_sd, cutoff_od) = outlier_cutoffs(&model.sd, &model.od, r1, options.od_cutoff)?;
    model.cutoff_sd = cutoff_sd;
    model.cutoff_od = cutoff_od;
    model.outlier_flags = classify(&model);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian(seed: u64, n: usize, p: usize) -> DMatrix<f64> {
        let mut rng = RngStream::new(seed, 31).rng();
        DMatrix::from_fn(n, p, |_, _| rng.sample(StandardNormal))
    }

    #[test]
    fn method_parsing() {
        assert_eq!("cpca".parse::<EstimateMethod>().unwrap(), EstimateMethod::Classical);
        assert_eq!("FIR".parse::<EstimateMethod>().unwrap(), EstimateMethod::Fir);
        assert!("detmcd".parse::<EstimateMethod>().is_err());
    }

    #[test]
    fn preprocess_detects_rank() {
        let low = gaussian(1, 50, 2) * gaussian(2, 2, 10);
        let pre = preprocess_project(&DataMatrix::new(low.clone()).unwrap()).unwrap();
        assert_eq!(pre.r0, 2);

        let same = DMatrix::from_fn(5, 3, |_, j| j as f64);
        let err = preprocess_project(&DataMatrix::new(same).unwrap()).unwrap_err();
        assert!(err.to_string().contains("degenerate"));

        let x = gaussian(3, 30, 6).add_scalar(4.0);
        let pre = preprocess_project(&DataMatrix::new(x.clone()).unwrap()).unwrap();
        let vvt = &pre.v * pre.v.transpose();
        let offset = (&pre.mu0.transpose() - pre.mu0.transpose() * &vvt).transpose();
        let back = pre.z.as_matrix() * pre.v.transpose();
        let rebuilt = DMatrix::from_fn(30, 6, |i, j| back[(i, j)] + offset[j]);
        assert!((rebuilt - x).amax() <= 1e-9);
    }

    #[test]
    fn score_distance_examples() {
        let l = DVector::from_vec(vec![1.0, 4.0]);
        let t = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(score_distance(&t, &l).unwrap(), vec![0.0, 1.0]);
        let l = DVector::from_vec(vec![4.0, 1.0]);
        let t = DMatrix::from_row_slice(1, 2, &[2.0, 2.0]);
        assert_abs_diff_eq!(score_distance(&t, &l).unwrap()[0], 5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn cutoff_examples() {
        let sd = vec![1.0, 2.0, 3.0];
        let (csd, cod) = outlier_cutoffs(&sd, &[2.0, 2.0, 2.0], 2, OdCutoffRule::WilsonHilferty).unwrap();
        assert_abs_diff_eq!(csd, (-2.0 * 0.025f64.ln()).sqrt(), epsilon = 1e-9);
        assert_abs_diff_eq!(csd, 2.7162, epsilon = 1e-4);
        assert_abs_diff_eq!(cod, 2.0, epsilon = 1e-12);
        let (csd2, _) = outlier_cutoffs(&[9.0, 0.0], &[0.0, 0.0], 2, OdCutoffRule::Raw).unwrap();
        assert_eq!(csd, csd2);
        let (_, zero) = outlier_cutoffs(&sd, &[0.0; 3], 2, OdCutoffRule::WilsonHilferty).unwrap();
        assert_eq!(zero, 0.0);
    }

    fn fir_config() -> FirConfig {
        FirConfig {
            batch_m: Some(20),
            n_directions: 200,
            ..FirConfig::default()
        }
    }

    #[test]
    fn full_subset_center_is_classical_mean() {
        let x = DataMatrix::new(gaussian(4, 80, 4).add_scalar(2.0)).unwrap();
        let model = fit(&x, EstimateMethod::Classical, &fir_config()).unwrap();
        assert!((&model.center - &model.mu0).amax() <= 1e-12);
        assert_eq!(model.r1, model.r0);
        assert!(model.od.iter().all(|&d| d <= 1e-8));
        assert_eq!(model.h_indices.len(), 80);
    }

    #[test]
    fn full_rank_fir_has_zero_od() {
        let x = DataMatrix::new(gaussian(5, 120, 4)).unwrap();
        let model = fit(&x, EstimateMethod::Fir, &fir_config()).unwrap();
        assert_eq!(model.r1, model.r0);
        assert!(model.od.iter().all(|&d| d <= 1e-8));
        let gram = model.loadings.transpose() * &model.loadings;
        assert!((gram - DMatrix::identity(model.r1, model.r1)).amax() <= 1e-9);
        assert!(model.variances.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn h_rows_scores_are_centered() {
        let x = DataMatrix::new(gaussian(6, 150, 3)).unwrap();
        let model = fit(&x, EstimateMethod::Fir, &fir_config()).unwrap();
        for j in 0..model.r1 {
            let mean: f64 =
                model.h_indices.iter().map(|&i| model.scores[(i, j)]).sum::<f64>() / model.h_indices.len() as f64;
            assert!(mean.abs() <= 1e-8);
        }
    }

    #[test]
    fn displaced_point_od_equals_offset() {
        // Data in a 2-D plane of R^4 plus a known orthogonal displacement.
        let basis = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let x = gaussian(7, 60, 2) * &basis;
        let x = DataMatrix::new(x).unwrap();
        let model = fit(&x, EstimateMethod::Classical, &fir_config()).unwrap();
        assert_eq!(model.r1, 2);
        let eps = 0.37;
        let mut probe = x.select_rows(&[5]);
        probe[(0, 2)] += eps;
        let od = orthogonal_distance(&probe, &model).unwrap();
        assert_abs_diff_eq!(od[0], eps, epsilon = 1e-9);
        // Moving within span(W) leaves od unchanged.
        let mut moved = probe.clone();
        for j in 0..4 {
            moved[(0, j)] += 3.0 * model.loadings[(j, 0)] - 1.5 * model.loadings[(j, 1)];
        }
        assert_abs_diff_eq!(orthogonal_distance(&moved, &model).unwrap()[0], eps, epsilon = 1e-9);
    }

    #[test]
    fn gross_outlier_is_flagged() {
        let mut x = gaussian(8, 60, 2);
        x[(10, 0)] = 40.0;
        x[(10, 1)] = -35.0;
        let model = fit(&DataMatrix::new(x).unwrap(), EstimateMethod::Fir, &fir_config()).unwrap();
        assert!(model.outlier_flags[10]);
        assert_eq!(classify(&model), model.outlier_flags);

        // Points sitting at the center are never flagged.
        let at_center = DMatrix::from_fn(3, 2, |_, j| model.center[j]);
        let mut probe = model.clone();
        probe.sd = score_distance(&model.transform(&at_center).unwrap(), &model.eigenvalues).unwrap();
        probe.od = orthogonal_distance(&at_center, &model).unwrap();
        assert!(classify(&probe).iter().all(|f| !f));
    }

    #[test]
    fn classical_scores_match_svd() {
        let x = gaussian(9, 100, 4);
        let model = fit(
            &DataMatrix::new(x.clone()).unwrap(),
            EstimateMethod::Classical,
            &fir_config(),
        )
        .unwrap();
        let centered = center_rows(&x, &column_means(&x));
        let svd = svd_thin(&centered).unwrap();
        let reference = &centered * &svd.v;
        for j in 0..model.r1 {
            let a = model.scores.column(j);
            let b = reference.column(j);
            let same = (a - b).amax();
            let flipped = (a + b).amax();
            assert!(same.min(flipped) <= 1e-8, "column {j}");
        }
    }

    #[test]
    fn wide_data_guard() {
        let x = DataMatrix::new(gaussian(10, 8, 12)).unwrap();
        let err = fit(&x, EstimateMethod::Classical, &fir_config()).unwrap_err();
        assert!(err.to_string().contains("p exceeds n"));
        let opts = PcaOptions {
            allow_wide: true,
            ..PcaOptions::default()
        };
        let model = fit_with(&x, EstimateMethod::Classical, &fir_config(), &opts, None).unwrap();
        assert!(model.r0 <= 7);
    }

    #[test]
    fn alternative_forms() {
        let x = DataMatrix::new(gaussian(11, 90, 3).add_scalar(1.0)).unwrap();
        let opts = PcaOptions {
            variance_form: VarianceForm::SquaredEigenvalues,
            center_form: CenterForm::Literal,
            od_cutoff: OdCutoffRule::Raw,
            allow_wide: false,
        };
        let model = fit_with(&x, EstimateMethod::Fir, &fir_config(), &opts, None).unwrap();
        for (v, l) in model.variances.iter().zip(model.eigenvalues.iter()) {
            assert_abs_diff_eq!(*v, l * l, epsilon = 1e-15);
        }
    }

    #[test]
    fn fdb_selects_top_depth() {
        let z = DataMatrix::new(gaussian(12, 60, 2)).unwrap();
        let dirs = sample_unit_directions(2, 100, &RngStream::new(1, 1)).unwrap();
        let res = fdb_estimate(&z, 0.75, &dirs).unwrap();
        let depth = projection_depth(&z, &dirs).unwrap();
        assert_eq!(res.h_indices, select_deepest(&depth.depth, 45).unwrap());
        assert!(fdb_estimate(&z, 0.4, &dirs).is_err());
        assert!(fdb_estimate(&z, 1.0, &dirs).is_err());
    }
}
