//! Robust multivariate location/covariance estimation and robust PCA.
//!
//! The central estimator ([`fir::fir_estimate`]) seeds an inlier subset with
//! the deepest points under random-direction projection depth, then grows it
//! batch by batch using an incremental PCA of the points chosen so far: each
//! round picks the unselected points with the smallest singular-value-scaled
//! distance that fall inside an expanded bounding box of the previous batch.
//! [`robust_pca::fit`] turns the resulting center and covariance into robust
//! scores, loadings and score/orthogonal distance diagnostics.
//!
//! Supporting modules provide the contamination simulators used to study the
//! estimator ([`simdata`]), error metrics ([`metrics`]) and a Monte Carlo
//! runner ([`bench`]).
//!
//! With the default `parallel` feature, direction sweeps in the depth
//! computation and benchmark replications run on rayon. Results are identical
//! with and without the feature.

pub mod bench;
pub mod depth;
pub mod error;
mod exec;
pub mod fir;
pub mod ipca;
pub mod metrics;
pub mod numerics;
pub mod robust_pca;
pub mod simdata;

pub use error::{Error, Result};
pub use exec::Exec;
pub use fir::{fir_estimate, FirConfig, FirResult};
pub use numerics::{DataMatrix, RngStream};
pub use robust_pca::{fit, EstimateMethod, RobustPcaModel};
