//! Shared numeric primitives: the validated data matrix, seeded random
//! streams, robust univariate statistics, dense decompositions and the
//! chi-squared / Gaussian quantile functions used for outlier cutoffs.

use faer::{Mat, MatRef, Side};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense `n × p` observation matrix, rows are samples. Every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix(DMatrix<f64>);

impl DataMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::invalid(format!(
                "data matrix must be non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if let Some(pos) = matrix.iter().position(|v| !v.is_finite()) {
            let (row, col) = (pos % matrix.nrows(), pos / matrix.nrows());
            return Err(Error::invalid(format!("non-finite entry at row {row}, column {col}")));
        }
        Ok(Self(matrix))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::invalid(format!(
                "row {bad} has {} columns, expected {p}",
                rows[bad].len()
            )));
        }
        Self::new(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Rows at `indices`, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> DMatrix<f64> {
        self.0.select_rows(indices)
    }
}

impl AsRef<DMatrix<f64>> for DataMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Immutable descriptor of a reproducible random stream.
///
/// Backed by ChaCha8 with a 64-bit stream selector, so `(seed, stream_id)`
/// produces the same draws on every platform and distinct stream ids give
/// independent sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Deterministic child stream, used to give each replication or
    /// sub-task its own sequence independent of scheduling order.
    pub fn child(&self, index: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(self.stream_id)),
            stream_id: index,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid("empty input"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite input"));
    }
    Ok(())
}

/// Median of a non-empty slice, reordering it in place. Even lengths average
/// the two middle order statistics.
pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    let n = values.len();
    let mid = n / 2;
    let (lower, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lower + upper) / 2.0
    }
}

/// Median absolute deviation (no consistency factor) of `values`, which are
/// overwritten with absolute deviations. Returns `(median, mad)`.
pub(crate) fn median_mad_in_place(values: &mut [f64]) -> (f64, f64) {
    let med = median_in_place(values);
    for v in values.iter_mut() {
        *v = (*v - med).abs();
    }
    (med, median_in_place(values))
}

pub fn median(values: &[f64]) -> Result<f64> {
    check_values(values)?;
    Ok(median_in_place(&mut values.to_vec()))
}

pub fn mad(values: &[f64]) -> Result<f64> {
    check_values(values)?;
    Ok(median_mad_in_place(&mut values.to_vec()).1)
}

/// `count` directions drawn uniformly from the unit sphere in `R^p`, one per
/// row, by normalizing independent standard-normal vectors.
pub fn sample_unit_directions(p: usize, count: usize, stream: &RngStream) -> Result<DataMatrix> {
    if p == 0 || count == 0 {
        return Err(Error::invalid(format!(
            "need p >= 1 and count >= 1, got p={p}, count={count}"
        )));
    }
    let mut rng = stream.rng();
    let mut out = DMatrix::zeros(count, p);
    let mut buf = vec![0.0; p];
    for i in 0..count {
        let norm = loop {
            for v in buf.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let norm = buf.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                break norm;
            }
        };
        for (j, v) in buf.iter().enumerate() {
            out[(i, j)] = v / norm;
        }
    }
    DataMatrix::new(out)
}

/// Thin singular value decomposition `M = U diag(s) Vᵀ`.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    /// Non-increasing, non-negative.
    pub s: DVector<f64>,
    /// `p × k` with orthonormal columns.
    pub v: DMatrix<f64>,
}

pub fn svd_thin(m: &DMatrix<f64>) -> Result<ThinSvd> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("svd input has non-finite entries"));
    }
    let svd = to_faer(m)
        .thin_svd()
        .map_err(|e| Error::numeric(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S().column_vector();
    Ok(ThinSvd {
        u: from_faer(svd.U()),
        s: DVector::from_fn(s.nrows(), |i, _| s[i]),
        v: from_faer(svd.V()),
    })
}

fn to_faer(m: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted non-increasing.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// Columns are the eigenvectors.
    pub vectors: DMatrix<f64>,
    pub values: DVector<f64>,
}

pub fn sym_eig(s: &DMatrix<f64>) -> Result<SymEig> {
    if !s.is_square() {
        return Err(Error::invalid(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let scale = s.amax();
    let asym = (s - s.transpose()).amax();
    if asym > 1e-10 * scale {
        return Err(Error::invalid(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let eig = to_faer(s)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::numeric(format!("symmetric eigendecomposition failed: {e:?}")))?;
    let ascending = eig.S().column_vector();
    let k = ascending.nrows();
    let values = DVector::from_fn(k, |i, _| ascending[k - 1 - i]);
    let u = eig.U();
    let vectors = DMatrix::from_fn(k, k, |i, j| u[(i, k - 1 - j)]);
    Ok(SymEig { vectors, values })
}

/// Column means of `m`.
pub fn column_means(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows() as f64;
    DVector::from_iterator(m.ncols(), m.column_iter().map(|c| c.sum() / n))
}

/// `m` with `center` subtracted from every row.
pub fn center_rows(m: &DMatrix<f64>, center: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col.add_scalar_mut(-center[j]);
    }
    out
}

/// Floor of `frac * n`, tolerant of representation error in `frac`
/// (0.7 * 10 counts as 7).
pub fn floor_fraction(frac: f64, n: usize) -> usize {
    (frac * n as f64 + 1e-9).floor() as usize
}

// Lanczos approximation, g = 7.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub(crate) fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + k as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete gamma pair `(P(a, x), Q(a, x))`.
pub(crate) fn incomplete_gamma(a: f64, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // Series for P.
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        let p = (sum.ln() + log_prefactor).exp().min(1.0);
        (p, 1.0 - p)
    } else {
        // Modified Lentz continued fraction for Q.
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-17 {
                break;
            }
        }
        let q = (h.ln() + log_prefactor).exp().min(1.0);
        (1.0 - q, q)
    }
}

pub(crate) fn chi2_cdf(dof: u32, x: f64) -> f64 {
    incomplete_gamma(dof as f64 / 2.0, x / 2.0).0
}

/// Quantile of the chi-squared distribution with `dof` degrees of freedom,
/// found by bisection on the regularized incomplete gamma function to an
/// absolute tolerance of 1e-10.
pub fn chi2_quantile(dof: u32, prob: f64) -> Result<f64> {
    if dof == 0 {
        return Err(Error::invalid("chi-squared needs dof >= 1"));
    }
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::invalid(format!("probability {prob} outside (0, 1)")));
    }
    let mut lo = 0.0;
    let mut hi = dof as f64 + 1.0;
    while chi2_cdf(dof, hi) < prob {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chi2_cdf(dof, mid) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub(crate) fn normal_cdf(x: f64) -> f64 {
    let (p, q) = incomplete_gamma(0.5, 0.5 * x * x);
    if x >= 0.0 {
        0.5 + 0.5 * p
    } else {
        0.5 * q
    }
}

/// Standard normal inverse CDF: Acklam's rational approximation followed by
/// one Newton step against the incomplete-gamma CDF.
pub fn gaussian_quantile(prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::invalid(format!("probability {prob} outside (0, 1)")));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if prob < P_LOW {
        tail((-2.0 * prob.ln()).sqrt())
    } else if prob <= 1.0 - P_LOW {
        let q = prob - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - prob).ln()).sqrt())
    };
    let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let err = normal_cdf(x) - prob;
    Ok(if density > 0.0 { x - err / density } else { x })
}
