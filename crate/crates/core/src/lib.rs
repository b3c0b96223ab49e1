//! Structured epsilon-stability radii of Hurwitz matrices.
//!
//! For a Hurwitz matrix `A`, a real-linear structure space `S` and `eps > 0`,
//! the crate computes the largest `delta` such that the `eps`-pseudospectrum
//! of every `A + Delta` (`Delta` in `S`, `||Delta||_F <= delta`) stays in the
//! closed left half-plane, and the dual quantity for fixed `delta`.
//!
//! The computation is two-level: [`inner`] maximizes the real part of the
//! rightmost eigenvalue of `A + eps u v* + delta Pi_S(u v*)/||Pi_S(u v*)||_F`
//! over unit vectors `u`, `v` with a rank-1 gradient flow, and [`outer`]
//! drives the perturbation size to the zero of that real part with a
//! safeguarded Newton iteration.

// NaN-rejecting checks such as `!(x > 0.0)` are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod inner;
pub mod io;
pub mod linalg;
pub mod outer;
pub mod pseudospectra;
pub mod rng;
pub mod structures;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenTriple, C64};
pub use structures::StructureSpace;
