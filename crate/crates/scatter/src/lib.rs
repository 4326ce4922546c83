//! Robust scatter-matrix estimation for complex elliptically symmetric (CES) data.
//!
//! The crate provides:
//!
//! - [`numkit`]: dense complex linear algebra (Hermitian Cholesky solves,
//!   Kronecker/vec/commutation operators) and the scalar special functions
//!   (regularized incomplete gamma/beta, chi-square quantiles) everything
//!   else is built on;
//! - [`ces`]: sampling from compound-Gaussian CES models (Gaussian,
//!   Student-t, Gaussian-plus-outlier mixtures) through a shared
//!   Gaussian-core representation, so each CES draw comes paired with the
//!   fictive Gaussian draw built from the same core;
//! - [`estimators`]: the sample covariance matrix and fixed-point
//!   M-estimators (Tyler, Huber, Student-t) with the sigma
//!   consistency-factor solver;
//! - [`asymptotics`]: the closed-form and Monte Carlo coefficient algebra
//!   for the structured asymptotic covariance of an M-estimator around the
//!   coupled Wishart/SCM baseline;
//! - [`mahalanobis`]: robust Mahalanobis distances, their scaled chi-square
//!   and scaled Beta-prime reference laws, and goodness-of-fit statistics.

pub mod asymptotics;
pub mod ces;
pub mod estimators;
pub mod mahalanobis;
pub mod numkit;

use std::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument was outside its documented domain.
    Parameter(String),
    /// A matrix expected to be Hermitian deviated beyond tolerance.
    NotHermitian { max_deviation: f64 },
    /// A Cholesky pivot was not strictly positive: the matrix is not
    /// positive-definite. No silent regularization is applied.
    NotPositiveDefinite { pivot_index: usize },
    /// Operand shapes are incompatible.
    DimensionMismatch(String),
    /// Input data is degenerate for the requested operation
    /// (e.g. a zero sample handed to Tyler's weight).
    DegenerateInput(String),
    /// A root finder or iterative solver could not proceed.
    Solver(String),
    /// No closed form exists for the requested estimator/model pair.
    Unsupported(String),
    /// The generic coefficient formulas are singular at this input.
    SingularCoefficient(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NotHermitian { max_deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {max_deviation:.3e})")
            }
            Error::NotPositiveDefinite { pivot_index } => {
                write!(f, "matrix is not positive-definite (pivot {pivot_index} <= 0)")
            }
            Error::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::DegenerateInput(msg) => write!(f, "degenerate input: {msg}"),
            Error::Solver(msg) => write!(f, "solver failure: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::SingularCoefficient(msg) => write!(f, "singular coefficient: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
