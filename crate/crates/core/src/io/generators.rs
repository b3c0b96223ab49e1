use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::structures::toeplitz_from;

/// `-Grcar(n) - shift I`: ones on the subdiagonal, `-1 - shift` on the
/// diagonal and `-1` on the first three superdiagonals.
pub fn grcar(n: usize, shift: f64) -> Result<ComplexMatrix> {
    if n < 5 {
        return Err(Error::InvalidArgument(format!("grcar generator needs n >= 5, got {n}")));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let d = j as isize - i as isize;
        let v = match d {
            -1 => 1.0,
            0 => -1.0 - shift,
            1..=3 => -1.0,
            _ => 0.0,
        };
        C64::new(v, 0.0)
    }))
}

/// Banded Toeplitz matrix with diagonals `-lower..=upper`; `coefficients`
/// are ordered by increasing diagonal index.
pub fn toeplitz_band(n: usize, lower: usize, upper: usize, coefficients: &[f64]) -> Result<ComplexMatrix> {
    if coefficients.len() != lower + upper + 1 {
        return Err(Error::InvalidArgument(format!(
            "band ({lower}, {upper}) needs {} coefficients, got {}",
            lower + upper + 1,
            coefficients.len()
        )));
    }
    Ok(toeplitz_from(n, lower, coefficients))
}
