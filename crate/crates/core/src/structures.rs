//! Structure spaces: real-linear subspaces `S` of complex `n x n` matrices and
//! their orthogonal projections under the real pairing `Re <X, Y>`.
//!
//! `Pi_S Z` is the unique element of `S` with `Re <Pi_S Z, W> = Re <Z, W>` for
//! every `W` in `S`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::rng::{self, StabradRng};

/// Sorted set of distinct 0-based `(row, col)` positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pattern {
    n: usize,
    entries: Vec<(usize, usize)>,
}

impl Pattern {
    /// Rejects duplicates and out-of-range positions.
    pub fn new(n: usize, mut entries: Vec<(usize, usize)>) -> Result<Pattern> {
        if let Some(&(i, j)) = entries.iter().find(|&&(i, j)| i >= n || j >= n) {
            return Err(Error::InvalidStructure(format!(
                "pattern position ({}, {}) outside a {n}x{n} matrix (1-based)",
                i + 1,
                j + 1
            )));
        }
        entries.sort_unstable();
        if let Some(w) = entries.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidStructure(format!(
                "duplicate pattern position ({}, {}) (1-based)",
                w[0].0 + 1,
                w[0].1 + 1
            )));
        }
        Ok(Pattern { n, entries })
    }

    /// Positions of the nonzero entries of `m`.
    pub fn of_nonzeros(m: &ComplexMatrix) -> Result<Pattern> {
        let n = m.ensure_square()?;
        Pattern::new(n, m.nonzero_pattern())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.entries.binary_search(&(i, j)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().copied()
    }
}

/// Explicit real basis, orthonormalized under `Re <., .>` at construction.
#[derive(Clone, Debug)]
pub struct BasisStructure {
    n: usize,
    basis: Vec<ComplexMatrix>,
}

impl BasisStructure {
    /// Gram-Schmidt (twice) on the supplied spanning set; numerically dependent
    /// members are dropped.
    pub fn new(n: usize, spanning: Vec<ComplexMatrix>) -> Result<BasisStructure> {
        let mut basis: Vec<ComplexMatrix> = Vec::with_capacity(spanning.len());
        for m in spanning {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "basis element is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
            let scale = m.frobenius_norm();
            if scale == 0.0 {
                continue;
            }
            let mut w = m;
            for _ in 0..2 {
                for b in &basis {
                    let c = b.real_inner(&w);
                    w.axpy(C64::new(-c, 0.0), b);
                }
            }
            let nrm = w.frobenius_norm();
            if nrm > 1e-12 * scale {
                basis.push(w.scale_real(1.0 / nrm));
            }
        }
        if basis.is_empty() {
            return Err(Error::InvalidStructure("basis spans the zero space".into()));
        }
        Ok(BasisStructure { n, basis })
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }
}

#[derive(Clone, Debug)]
pub enum StructureSpace {
    FullComplex { n: usize },
    FullReal { n: usize },
    SparsityComplex { pattern: Pattern },
    SparsityReal { pattern: Pattern },
    /// Real Toeplitz matrices supported on diagonals `-lower..=upper`.
    ToeplitzBandReal { n: usize, lower: usize, upper: usize },
    /// Extension point: any real-linear span given by an explicit basis.
    Basis(BasisStructure),
}

impl StructureSpace {
    pub fn full_complex(n: usize) -> Self {
        StructureSpace::FullComplex { n }
    }

    pub fn full_real(n: usize) -> Self {
        StructureSpace::FullReal { n }
    }

    pub fn sparsity_complex(pattern: Pattern) -> Self {
        StructureSpace::SparsityComplex { pattern }
    }

    pub fn sparsity_real(pattern: Pattern) -> Self {
        StructureSpace::SparsityReal { pattern }
    }

    pub fn toeplitz_band_real(n: usize, lower: usize, upper: usize) -> Result<Self> {
        if n == 0 || lower >= n || upper >= n {
            return Err(Error::InvalidStructure(format!(
                "Toeplitz band ({lower}, {upper}) does not fit a {n}x{n} matrix"
            )));
        }
        Ok(StructureSpace::ToeplitzBandReal { n, lower, upper })
    }

    pub fn dim(&self) -> usize {
        match self {
            StructureSpace::FullComplex { n }
            | StructureSpace::FullReal { n }
            | StructureSpace::ToeplitzBandReal { n, .. } => *n,
            StructureSpace::SparsityComplex { pattern } | StructureSpace::SparsityReal { pattern } => {
                pattern.dim()
            }
            StructureSpace::Basis(b) => b.n,
        }
    }

    /// Dimension of `S` as a real vector space.
    pub fn real_dimension(&self) -> usize {
        match self {
            StructureSpace::FullComplex { n } => 2 * n * n,
            StructureSpace::FullReal { n } => n * n,
            StructureSpace::SparsityComplex { pattern } => 2 * pattern.len(),
            StructureSpace::SparsityReal { pattern } => pattern.len(),
            StructureSpace::ToeplitzBandReal { lower, upper, .. } => lower + upper + 1,
            StructureSpace::Basis(b) => b.basis.len(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            StructureSpace::FullComplex { .. } => "full-complex",
            StructureSpace::FullReal { .. } => "full-real",
            StructureSpace::SparsityComplex { .. } => "sparsity-complex",
            StructureSpace::SparsityReal { .. } => "sparsity-real",
            StructureSpace::ToeplitzBandReal { .. } => "toeplitz-real",
            StructureSpace::Basis(_) => "basis",
        }
    }

    fn check(&self, z: &ComplexMatrix) -> Result<()> {
        let n = self.dim();
        if z.rows() != n || z.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "structure acts on {n}x{n} matrices, got {}x{}",
                z.rows(),
                z.cols()
            )));
        }
        Ok(())
    }

    /// Orthogonal projection `Pi_S Z`.
    pub fn project(&self, z: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check(z)?;
        let n = self.dim();
        Ok(match self {
            StructureSpace::FullComplex { .. } => z.clone(),
            StructureSpace::FullReal { .. } => z.real_part(),
            StructureSpace::SparsityComplex { pattern } => {
                let mut out = ComplexMatrix::zeros(n, n);
                for (i, j) in pattern.iter() {
                    out[(i, j)] = z[(i, j)];
                }
                out
            }
            StructureSpace::SparsityReal { pattern } => {
                let mut out = ComplexMatrix::zeros(n, n);
                for (i, j) in pattern.iter() {
                    out[(i, j)] = C64::new(z[(i, j)].re, 0.0);
                }
                out
            }
            StructureSpace::ToeplitzBandReal { lower, upper, .. } => {
                let coeffs = toeplitz_means(z, *lower, *upper);
                toeplitz_from(n, *lower, &coeffs)
            }
            StructureSpace::Basis(b) => {
                let mut out = ComplexMatrix::zeros(n, n);
                for e in &b.basis {
                    out.axpy(C64::new(e.real_inner(z), 0.0), e);
                }
                out
            }
        })
    }

    /// `||Z - Pi_S Z||_F`; zero exactly when `Z` lies in `S`.
    pub fn membership_residual(&self, z: &ComplexMatrix) -> Result<f64> {
        let p = self.project(z)?;
        Ok((z - &p).frobenius_norm())
    }

    /// Orthonormal real basis of `S` (materialized; intended for small `n`).
    pub fn real_basis(&self) -> Vec<ComplexMatrix> {
        let n = self.dim();
        let unit = |i: usize, j: usize, val: C64| {
            let mut m = ComplexMatrix::zeros(n, n);
            m[(i, j)] = val;
            m
        };
        let re = C64::new(1.0, 0.0);
        let im = C64::new(0.0, 1.0);
        match self {
            StructureSpace::FullComplex { .. } => (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .flat_map(|(i, j)| [unit(i, j, re), unit(i, j, im)])
                .collect(),
            StructureSpace::FullReal { .. } => (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| unit(i, j, re))
                .collect(),
            StructureSpace::SparsityComplex { pattern } => pattern
                .iter()
                .flat_map(|(i, j)| [unit(i, j, re), unit(i, j, im)])
                .collect(),
            StructureSpace::SparsityReal { pattern } => pattern.iter().map(|(i, j)| unit(i, j, re)).collect(),
            StructureSpace::ToeplitzBandReal { lower, upper, .. } => {
                let k = lower + upper + 1;
                (0..k)
                    .map(|d| {
                        let mut c = vec![0.0; k];
                        let len = n - (d as isize - *lower as isize).unsigned_abs();
                        c[d] = 1.0 / (len as f64).sqrt();
                        toeplitz_from(n, *lower, &c)
                    })
                    .collect()
            }
            StructureSpace::Basis(b) => b.basis.clone(),
        }
    }

    /// Random element of unit Frobenius norm, uniformly distributed on the
    /// unit sphere of `S` (Gaussian coordinates in an orthonormal basis).
    pub fn random_unit_element(&self, rng: &mut StabradRng) -> ComplexMatrix {
        let n = self.dim();
        loop {
            let mut m = match self {
                StructureSpace::FullComplex { .. } => ComplexMatrix::from_fn(n, n, |_, _| rng::complex_normal(rng)),
                StructureSpace::FullReal { .. } => ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng::normal(rng), 0.0)),
                StructureSpace::SparsityComplex { pattern } => {
                    let mut m = ComplexMatrix::zeros(n, n);
                    for (i, j) in pattern.iter() {
                        m[(i, j)] = rng::complex_normal(rng);
                    }
                    m
                }
                StructureSpace::SparsityReal { pattern } => {
                    let mut m = ComplexMatrix::zeros(n, n);
                    for (i, j) in pattern.iter() {
                        m[(i, j)] = C64::new(rng::normal(rng), 0.0);
                    }
                    m
                }
                _ => {
                    let mut m = ComplexMatrix::zeros(n, n);
                    for b in self.real_basis() {
                        m.axpy(C64::new(rng::normal(rng), 0.0), &b);
                    }
                    m
                }
            };
            let nrm = m.frobenius_norm();
            if nrm > 0.0 {
                m = m.scale_real(1.0 / nrm);
                return m;
            }
        }
    }
}

impl fmt::Display for StructureSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureSpace::SparsityComplex { pattern } | StructureSpace::SparsityReal { pattern } => {
                write!(f, "{} (n = {}, nnz = {})", self.kind_name(), pattern.dim(), pattern.len())
            }
            StructureSpace::ToeplitzBandReal { n, lower, upper } => {
                write!(f, "toeplitz-real (n = {n}, band -{lower}..{upper})")
            }
            _ => write!(f, "{} (n = {})", self.kind_name(), self.dim()),
        }
    }
}

/// Mean of the real parts along each diagonal `-lower..=upper`, ordered by
/// increasing diagonal index.
pub fn toeplitz_means(z: &ComplexMatrix, lower: usize, upper: usize) -> Vec<f64> {
    let n = z.rows();
    (-(lower as isize)..=upper as isize)
        .map(|d| {
            let (mut sum, mut cnt) = (0.0, 0usize);
            for i in 0..n {
                let j = i as isize + d;
                if j >= 0 && (j as usize) < n {
                    sum += z[(i, j as usize)].re;
                    cnt += 1;
                }
            }
            if cnt == 0 {
                0.0
            } else {
                sum / cnt as f64
            }
        })
        .collect()
}

/// Banded Toeplitz matrix with `coeffs[k]` on diagonal `k - lower`.
pub fn toeplitz_from(n: usize, lower: usize, coeffs: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for (k, &c) in coeffs.iter().enumerate() {
        let d = k as isize - lower as isize;
        for i in 0..n {
            let j = i as isize + d;
            if j >= 0 && (j as usize) < n {
                m[(i, j as usize)] = C64::new(c, 0.0);
            }
        }
    }
    m
}

/// `||Pi_S Z||_F` without materializing the projection for the cheap kinds.
pub fn projected_norm(s: &StructureSpace, z: &ComplexMatrix) -> Result<f64> {
    match s {
        StructureSpace::FullComplex { .. } => Ok(z.frobenius_norm()),
        StructureSpace::FullReal { .. } => Ok(z.as_slice().iter().map(|c| c.re * c.re).sum::<f64>().sqrt()),
        StructureSpace::SparsityReal { pattern } => {
            s.check(z)?;
            Ok(pattern.iter().map(|(i, j)| z[(i, j)].re.powi(2)).sum::<f64>().sqrt())
        }
        _ => Ok(s.project(z)?.frobenius_norm()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn full_real_takes_real_part() {
        let z = ComplexMatrix::from_row_major(1, 1, vec![c(1.0, 2.0)]).unwrap();
        let p = StructureSpace::full_real(1).project(&z).unwrap();
        assert_eq!(p[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn sparsity_masks() {
        let s = StructureSpace::sparsity_complex(Pattern::new(2, vec![(0, 0)]).unwrap());
        let z = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 1.0), c(3.0, 0.0), c(4.0, 0.0), c(5.0, 0.0)]).unwrap();
        let p = s.project(&z).unwrap();
        assert_eq!(p.as_slice(), &[c(1.0, 1.0), ZERO, ZERO, ZERO]);
    }

    #[test]
    fn toeplitz_main_diagonal_mean() {
        let s = StructureSpace::toeplitz_band_real(3, 1, 1).unwrap();
        let mut z = ComplexMatrix::zeros(3, 3);
        z[(0, 0)] = c(1.0, 1.0);
        z[(1, 1)] = c(3.0, 0.0);
        z[(2, 2)] = c(5.0, 0.0);
        let p = s.project(&z).unwrap();
        for i in 0..3 {
            assert!((p[(i, i)] - c(3.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn membership_residuals() {
        let s = StructureSpace::full_real(1);
        let z = ComplexMatrix::from_row_major(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert!((s.membership_residual(&z).unwrap() - 1.0).abs() < 1e-15);
        let r = ComplexMatrix::from_real_rows(&[&[1.0, -2.0], &[0.5, 3.0]]);
        assert_eq!(StructureSpace::full_real(2).membership_residual(&r).unwrap(), 0.0);
    }

    #[test]
    fn pattern_validation() {
        assert!(Pattern::new(2, vec![(0, 0), (0, 0)]).is_err());
        assert!(Pattern::new(2, vec![(2, 0)]).is_err());
        let p = Pattern::new(3, vec![(2, 1), (0, 0)]).unwrap();
        assert!(p.contains(2, 1) && !p.contains(1, 2));
        assert!(StructureSpace::toeplitz_band_real(3, 1, 3).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = StructureSpace::full_real(3);
        assert!(matches!(s.project(&ComplexMatrix::zeros(2, 2)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn basis_structure_reproduces_named_kind() {
        let s = StructureSpace::toeplitz_band_real(4, 1, 2).unwrap();
        let b = StructureSpace::Basis(BasisStructure::new(4, s.real_basis()).unwrap());
        let z = ComplexMatrix::from_fn(4, 4, |i, j| c((i * 3 + j) as f64 * 0.7 - 2.0, i as f64 - j as f64));
        let d = &s.project(&z).unwrap() - &b.project(&z).unwrap();
        assert!(d.frobenius_norm() < 1e-13);
    }
}
