//! Singular values by one-sided (Hestenes) Jacobi rotations.

use super::matrix::{phase, ComplexMatrix, C64, ZERO};
use crate::error::Result;

const MAX_SWEEPS: usize = 80;

/// `M = U diag(sigma) V*`, singular values in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

fn col_dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn col_norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Applies the rotation to a column pair: `p <- c p - s b`, `q <- (s p + c b) e`
/// with `b = q conj(e)`.
fn rotate(p: &mut [C64], q: &mut [C64], c: f64, s: f64, e: C64) {
    for (pi, qi) in p.iter_mut().zip(q.iter_mut()) {
        let a = *pi;
        let b = *qi * e.conj();
        *pi = a * c - b * s;
        *qi = (a * s + b * c) * e;
    }
}

fn jacobi(m: &ComplexMatrix, want_v: bool) -> (Vec<Vec<C64>>, Option<Vec<Vec<C64>>>) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<C64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Option<Vec<Vec<C64>>> = want_v.then(|| {
        (0..cols)
            .map(|j| {
                let mut e = vec![ZERO; cols];
                e[j] = C64::new(1.0, 0.0);
                e
            })
            .collect()
    });
    let tol = 4.0 * f64::EPSILON * (rows.max(1) as f64).sqrt();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = col_norm_sqr(&a[p]);
                let beta = col_norm_sqr(&a[q]);
                let g = col_dot(&a[p], &a[q]);
                let gabs = g.norm();
                if gabs == 0.0 || gabs <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let e = phase(g);
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = a.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s, e);
                if let Some(v) = v.as_mut() {
                    let (lo, hi) = v.split_at_mut(q);
                    rotate(&mut lo[p], &mut hi[0], c, s, e);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let (a, _) = jacobi(m, false);
    let mut s: Vec<f64> = a.iter().map(|c| col_norm_sqr(c).sqrt()).collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    if m.rows() < m.cols() {
        s.truncate(m.rows());
    }
    s
}

/// Full decomposition (square or tall matrices).
pub fn svd(m: &ComplexMatrix) -> Svd {
    let (a, v) = jacobi(m, true);
    let v = v.expect("requested");
    let mut order: Vec<(usize, f64)> = a.iter().map(|c| col_norm_sqr(c).sqrt()).enumerate().collect();
    order.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap());
    let rows = m.rows();
    let k = order.len();
    let mut u = ComplexMatrix::zeros(rows, k);
    let mut vm = ComplexMatrix::zeros(m.cols(), k);
    let mut sigma = Vec::with_capacity(k);
    for (dst, &(src, s)) in order.iter().enumerate() {
        sigma.push(s);
        for i in 0..rows {
            u[(i, dst)] = if s > 0.0 { a[src][i] / s } else { ZERO };
        }
        for i in 0..m.cols() {
            vm[(i, dst)] = v[src][i];
        }
    }
    Svd { u, sigma, v: vm }
}

/// `sigma_min(M)`, equal to `1 / ||M^{-1}||_2` for invertible `M`.
pub fn smallest_singular_value(m: &ComplexMatrix) -> Result<f64> {
    m.ensure_square()?;
    m.ensure_finite()?;
    Ok(singular_values(m).last().copied().unwrap_or(0.0))
}

/// Spectral norm `||M||_2`.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}
