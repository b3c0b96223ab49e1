//! Dense complex linear algebra: eigentriples, singular values, exponentials.
//!
//! All routines are pure functions of their inputs and may be called
//! concurrently from many threads.

mod eig;
mod expm;
mod lu;
mod matrix;
mod svd;

pub use eig::{
    all_eigenvalues, hermitian_eigenvalues, hessenberg, rightmost_eigentriple, rightmost_index,
    spectral_abscissa, EigenTriple, DEFECTIVE_THRESHOLD, EIG_RESIDUAL_FACTOR, SEPARATION_WARNING,
};
pub use expm::expm;
pub use lu::Lu;
pub use matrix::{dot, norm, normalize, phase, scale_vec, ComplexMatrix, C64, ONE, ZERO};
pub use svd::{singular_values, smallest_singular_value, spectral_norm, svd, Svd};
