//! Dense complex linear algebra and scalar numerics.
//!
//! Everything here is sized for the problems the rest of the crate poses:
//! systems of at most 12 unknowns and polynomials of degree at most 6.

mod cubic;
mod matrix;
mod roots;
mod search;

use num_complex::Complex64;
use thiserror::Error;

pub use cubic::{cubic_discriminant, real_cubic_roots};
pub use matrix::{solve_complex_linear, ComplexMatrix, MAX_SOLVE_DIM, PIVOT_REL_TOL};
pub use roots::{poly_roots, RealPolynomial, DK_MAX_ITERATIONS, MAX_POLY_DEGREE};
pub use search::{fwhm, golden_section_max, half_max_crossings};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumericsError {
    #[error("singular matrix: pivot {pivot:e} in column {column} (matrix scale {scale:e})")]
    SingularMatrix { column: usize, pivot: f64, scale: f64 },
    #[error("dimension mismatch: {rows}x{cols} matrix with right-hand side of length {rhs}")]
    DimensionMismatch { rows: usize, cols: usize, rhs: usize },
    #[error("system of size {n} exceeds the supported maximum {max}")]
    TooLarge { n: usize, max: usize },
    #[error("all polynomial coefficients are zero")]
    DegenerateAllZero,
    #[error("polynomial has degree 0")]
    DegreeTooLow,
    #[error("polynomial degree {degree} exceeds the supported maximum")]
    DegreeTooHigh { degree: usize },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("root iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        best: Vec<Complex64>,
        residual: f64,
    },
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("curve has no positive maximum")]
    NoPeak,
    #[error("half maximum not reached inside the grid (truncated width {truncated_width})")]
    HalfMaxNotBracketed {
        truncated_width: f64,
        left_truncated: bool,
        right_truncated: bool,
    },
}
