//! Finite-dimensional models of free pairs: Haar-rotated spectra, a Jacobi
//! eigen-solver, Monte Carlo checks of the regression trace identities and
//! empirical spectral distances.

pub mod ensemble;
pub mod esd;
pub mod matrix;
pub mod mc;

pub use ensemble::{sample_matrix, sample_spectrum, wishart_matrix, Construction, FreePair, SpectrumMode};
pub use esd::esd_distance;
pub use matrix::{haar_orthogonal, sym_eig, Orthogonal, SymMatrix};
pub use mc::{mc_regression_check, x_spectrum, McConfig, McEntry, McReport, DEFAULT_FINITE_SIZE_ALLOWANCE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is ill conditioned: smallest relevant eigenvalue {0:e}")]
    IllConditioned(f64),
    #[error("Jacobi iteration did not converge in {0} sweeps")]
    NoConvergence(usize),
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Core(#[from] freeprob::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
