//! Estimation error metrics against a known location and covariance.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::sym_eig;

const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub e_mu: f64,
    pub e_sigma: f64,
    pub e_kl: f64,
    pub runtime_seconds: f64,
}

/// Euclidean distance between the estimated and true centers.
pub fn location_error(mu_est: &DVector<f64>, mu_true: &DVector<f64>) -> Result<f64> {
    if mu_est.len() != mu_true.len() {
        return Err(Error::invalid(format!(
            "location lengths differ: {} vs {}",
            mu_est.len(),
            mu_true.len()
        )));
    }
    Ok((mu_est - mu_true).norm())
}

/// Gaussian KL divergence `tr(Σ̂Σ⁻¹) − log det(Σ̂Σ⁻¹) − p`.
///
/// Evaluated through the eigenvalues `λ` of `L⁻¹Σ̂L⁻ᵀ` (with `Σ = LLᵀ`) as
/// `Σ (λ − ln λ − 1)`, which never forms a determinant. A singular estimate
/// gives `+∞`.
pub fn kl_divergence(sigma_est: &DMatrix<f64>, sigma_true: &DMatrix<f64>) -> Result<f64> {
    let p = sigma_true.nrows();
    if !sigma_true.is_square() || sigma_est.shape() != sigma_true.shape() {
        return Err(Error::invalid("covariances must be square and of equal size"));
    }
    let truth = sym_eig(sigma_true)?;
    let (hi, lo) = (truth.values[0], truth.values[p - 1]);
    if lo.is_nan() || lo <= 0.0 || hi / lo >= MAX_CONDITION {
        return Err(Error::invalid(format!(
            "reference covariance is singular or ill-conditioned (eigenvalues {lo:e}..{hi:e})"
        )));
    }
    let chol = sigma_true
        .clone()
        .cholesky()
        .ok_or_else(|| Error::invalid("reference covariance is not positive definite"))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::invalid("reference covariance factor is singular"))?;
    let mut whitened = &l_inv * sigma_est * l_inv.transpose();
    whitened = (&whitened + whitened.transpose()) * 0.5;
    let eig = sym_eig(&whitened)?;
    let trace = sigma_est.trace().abs().max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    for &lambda in eig.values.iter() {
        if lambda < -1e-10 * trace * (1.0 / lo) {
            return Err(Error::numeric(format!(
                "estimated covariance is not positive semidefinite (eigenvalue {lambda:e})"
            )));
        }
        if lambda <= 0.0 {
            return Ok(f64::INFINITY);
        }
        total += lambda - lambda.ln() - 1.0;
    }
    Ok(total)
}

/// `‖Σ̂ − Σ‖_F / p²` (Frobenius norm, not squared).
pub fn cov_error(sigma_est: &DMatrix<f64>, sigma_true: &DMatrix<f64>) -> Result<f64> {
    if sigma_est.shape() != sigma_true.shape() || !sigma_true.is_square() {
        return Err(Error::invalid("covariances must be square and of equal size"));
    }
    let p = sigma_true.nrows() as f64;
    Ok((sigma_est - sigma_true).norm() / (p * p))
}
