//! Deterministic numerical kernels: Hermitian eigendecomposition and matrix
//! functions, the Pfaffian, special functions and quadrature.
//!
//! Everything here is a pure function of its inputs.

mod eigen;
mod matrix;
mod pfaffian;
pub mod quadrature;
mod special;

use thiserror::Error;

pub use eigen::{
    eig_hermitian, eigvals_hermitian, eigvals_spd, expm_hermitian, expm_i_hermitian,
    inv_sqrtm_spd, logm_spd, sqrtm_spd, unitary_eigen_angles, Eigen, PD_TOL,
};
pub use matrix::{HermitianMatrix, Matrix, SkewSymmetricMatrix, HERMITIAN_TOL};
pub use pfaffian::pfaffian;
pub use quadrature::{adaptive_simpson, integrate_panels};
pub use special::{
    erf, erfc, erfcx, ln_gamma_half, log_abs_sin_ratio, log_sinh_ratio, mills_ratio_complement,
    norm_cdf, norm_pdf, sinc, sinch, LogSumExp,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("Jacobi iteration did not converge within {0} sweeps")]
    ConvergenceFailure(usize),
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("Pfaffian requires an even dimension, got {0}")]
    OddDimension(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}
