//! Dense complex eigenvalue computations.
//!
//! Eigenvalues come from Householder reduction to Hessenberg form followed by
//! the implicitly shifted single-shift QR iteration. Eigenvectors of the
//! selected eigenvalue are then obtained by inverse iteration with an LU
//! factorization of the shifted matrix (right vectors) and its adjoint
//! (left vectors).

use serde::Serialize;

use super::lu::Lu;
use super::matrix::{dot, norm, normalize, phase, scale_vec, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

/// Below this value of `|x* y|` the rightmost eigenvalue is treated as defective.
pub const DEFECTIVE_THRESHOLD: f64 = 1e-14;

/// Separation below which the eigenvalue is flagged as possibly non-simple.
pub const SEPARATION_WARNING: f64 = 1e-8;

/// Relative residual tolerance: `tol_eig = EIG_RESIDUAL_FACTOR * ||M||_F`.
pub const EIG_RESIDUAL_FACTOR: f64 = 1e-10;

/// Rightmost eigenvalue with left/right eigenvectors.
///
/// `x` and `y` have unit norm and `x* y` is real and positive, so that
/// `kappa = 1 / (x* y)` is the eigenvalue condition number.
#[derive(Clone, Debug, Serialize)]
pub struct EigenTriple {
    pub lambda: C64,
    pub x: Vec<C64>,
    pub y: Vec<C64>,
    pub kappa: f64,
    /// `Re lambda - max Re lambda_j` over the remaining eigenvalues.
    pub gap: f64,
    /// `min |lambda - lambda_j|` over the remaining eigenvalues.
    pub separation: f64,
}

impl EigenTriple {
    /// True when another eigenvalue is close enough that simplicity is in doubt.
    pub fn near_multiple(&self) -> bool {
        self.separation < SEPARATION_WARNING
    }

    /// `x* y`, equal to `1/kappa`.
    pub fn xy(&self) -> f64 {
        1.0 / self.kappa
    }

    /// `x y*`.
    pub fn xy_outer(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.x, &self.y)
    }
}

/// Unitary reduction to upper Hessenberg form (similarity transform).
pub fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut h = m.clone();
    if n < 3 {
        return h;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let col: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = norm(&col);
        let tail: f64 = col[1..].iter().map(|z| z.norm_sqr()).sum();
        if xnorm == 0.0 || tail == 0.0 {
            continue;
        }
        let alpha = -phase(col[0]) * xnorm;
        v[..len].copy_from_slice(&col);
        v[0] -= alpha;
        let vnorm = norm(&v[..len]);
        for z in v[..len].iter_mut() {
            *z /= vnorm;
        }
        let vv = &v[..len];
        // H <- (I - 2 v v*) H on rows k+1.., then H <- H (I - 2 v v*) on cols k+1..
        for j in k..n {
            let mut s = ZERO;
            for (t, vt) in vv.iter().enumerate() {
                s += vt.conj() * h[(k + 1 + t, j)];
            }
            s *= 2.0;
            for (t, vt) in vv.iter().enumerate() {
                h[(k + 1 + t, j)] -= vt * s;
            }
        }
        for i in 0..n {
            let mut s = ZERO;
            for (t, vt) in vv.iter().enumerate() {
                s += h[(i, k + 1 + t)] * vt;
            }
            s *= 2.0;
            for (t, vt) in vv.iter().enumerate() {
                h[(i, k + 1 + t)] -= s * vt.conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

#[inline]
fn cabs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, ONE);
    }
    let r = ax.hypot(ay);
    let c = ax / r;
    let s = (x / ax) * y.conj() / r;
    (c, s)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Eigenvalues of an upper Hessenberg matrix (destroys `h`).
fn hessenberg_eigenvalues(h: &mut ComplexMatrix) -> Result<Vec<C64>> {
    let n = h.rows();
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let hnorm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let max_total = 60 * n.max(4);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = cabs1(h[(l, l - 1)]);
            let mut tst = cabs1(h[(l - 1, l - 1)]) + cabs1(h[(l, l)]);
            if tst == 0.0 {
                tst = hnorm;
            }
            if sub <= EPS * tst || sub <= f64::MIN_POSITIVE / EPS {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            its = 0;
            continue;
        }
        total += 1;
        its += 1;
        if total > max_total {
            return Err(Error::NonConvergence { iterations: total });
        }
        let mu = if its % 10 == 0 {
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].re.abs(), 0.0)
        } else if its % 10 == 5 {
            h[(l, l)] + C64::new(0.75 * h[(l + 1, l)].re.abs(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        let mut x = h[(l, l)] - mu;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            if k > l {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let (c, s) = givens(x, y);
            let jstart = if k > l { k - 1 } else { l };
            for j in jstart..=hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = ZERO;
            }
            let iend = (k + 2).min(hi);
            for i in l..=iend {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
        }
    }
    Ok(eig)
}

/// All eigenvalues of a square matrix, with multiplicity, in no particular order.
pub fn all_eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    m.ensure_square()?;
    m.ensure_finite()?;
    let mut h = hessenberg(m);
    hessenberg_eigenvalues(&mut h)
}

/// Index of the eigenvalue of maximal real part; near-ties in the real part
/// are resolved towards the larger imaginary part.
pub fn rightmost_index(eigs: &[C64], scale: f64) -> Option<usize> {
    let tie = 8.0 * EPS * scale.max(1.0);
    let mut best: Option<usize> = None;
    for (i, z) in eigs.iter().enumerate() {
        best = match best {
            None => Some(i),
            Some(b) => {
                let w = eigs[b];
                if z.re > w.re + tie || ((z.re - w.re).abs() <= tie && z.im > w.im) {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

/// Deterministic, non-structured start vector for inverse iteration.
fn start_vector(n: usize) -> Vec<C64> {
    let mut b: Vec<C64> = (0..n)
        .map(|i| {
            let t = i as f64;
            C64::new(1.0 + 0.37 * (1.3 * t).sin(), 0.29 * (0.7 * t + 0.4).cos())
        })
        .collect();
    normalize(&mut b);
    b
}

fn inverse_iteration(lu: &Lu, n: usize, adjoint: bool) -> Vec<C64> {
    let mut z = start_vector(n);
    for _ in 0..3 {
        let mut w = if adjoint { lu.solve_adjoint(&z) } else { lu.solve(&z) };
        if normalize(&mut w) == 0.0 || w.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            break;
        }
        z = w;
    }
    z
}

fn residual(m: &ComplexMatrix, lambda: C64, y: &[C64]) -> f64 {
    let my = m.mul_vec(y);
    let r: Vec<C64> = my.iter().zip(y).map(|(a, b)| a - lambda * b).collect();
    norm(&r)
}

fn left_residual(m: &ComplexMatrix, lambda: C64, x: &[C64]) -> f64 {
    let mx = m.adjoint_mul_vec(x);
    let r: Vec<C64> = mx.iter().zip(x).map(|(a, b)| a - lambda.conj() * b).collect();
    norm(&r)
}

/// Eigenvectors for a known eigenvalue, normalized as in [`EigenTriple`].
fn eigenvectors_for(m: &ComplexMatrix, lambda: C64) -> (Vec<C64>, Vec<C64>) {
    let n = m.rows();
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let shifted = m.shifted(lambda);
    let lu = Lu::factor(&shifted, EPS * scale);
    let mut y = inverse_iteration(&lu, n, false);
    let mut x = inverse_iteration(&lu, n, true);
    let tol = EIG_RESIDUAL_FACTOR * scale;
    // A second pass with a slightly moved shift rescues the rare case where the
    // start vector is deficient in the wanted direction.
    if residual(m, lambda, &y) > tol || left_residual(m, lambda, &x) > tol {
        let lu2 = Lu::factor(&m.shifted(lambda + C64::new(1e3 * EPS * scale, 0.0)), EPS * scale);
        if residual(m, lambda, &y) > tol {
            y = inverse_iteration(&lu2, n, false);
        }
        if left_residual(m, lambda, &x) > tol {
            x = inverse_iteration(&lu2, n, true);
        }
    }
    (x, y)
}

/// Applies the phase conventions: `x* anchor > 0` when an anchor is supplied
/// (otherwise the largest entry of `x` is made real positive), then `x* y > 0`.
fn normalize_phases(x: &mut [C64], y: &mut [C64], anchor: Option<&[C64]>) {
    let anchored = match anchor {
        Some(u) => {
            let xu = dot(x, u);
            if xu.norm() > DEFECTIVE_THRESHOLD {
                scale_vec(x, phase(xu));
                true
            } else {
                false
            }
        }
        None => false,
    };
    if !anchored {
        let (imax, _) = x
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bv), (i, z)| if z.norm() > bv { (i, z.norm()) } else { (bi, bv) });
        let ph = phase(x[imax]).conj();
        scale_vec(x, ph);
    }
    let xy = dot(x, y);
    scale_vec(y, phase(xy).conj());
}

/// Rightmost eigenvalue of `m` (ties broken by maximal imaginary part) with
/// unit left/right eigenvectors `x`, `y` such that `x* y > 0`. With a phase
/// anchor `u`, `x` is additionally rotated so that `x* u > 0`.
pub fn rightmost_eigentriple(m: &ComplexMatrix, phase_anchor: Option<&[C64]>) -> Result<EigenTriple> {
    let n = m.ensure_square()?;
    m.ensure_finite()?;
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if let Some(u) = phase_anchor {
        if u.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "phase anchor has length {}, matrix has dimension {}",
                u.len(),
                n
            )));
        }
    }
    let eigs = all_eigenvalues(m)?;
    let scale = m.frobenius_norm();
    let idx = rightmost_index(&eigs, scale).expect("nonempty spectrum");
    let lambda = eigs[idx];
    let (mut x, mut y) = eigenvectors_for(m, lambda);
    normalize_phases(&mut x, &mut y, phase_anchor);
    let xy = dot(&x, &y);
    if xy.norm() < DEFECTIVE_THRESHOLD {
        return Err(Error::DegenerateEigenvalue {
            re: lambda.re,
            im: lambda.im,
            inner_product: xy.norm(),
        });
    }
    let mut gap = f64::INFINITY;
    let mut separation = f64::INFINITY;
    for (j, z) in eigs.iter().enumerate() {
        if j == idx {
            continue;
        }
        gap = gap.min(lambda.re - z.re);
        separation = separation.min((lambda - z).norm());
    }
    Ok(EigenTriple {
        lambda,
        x,
        y,
        kappa: 1.0 / xy.re,
        gap: gap.max(0.0),
        separation,
    })
}

/// Spectral abscissa `max Re lambda`.
pub fn spectral_abscissa(m: &ComplexMatrix) -> Result<f64> {
    Ok(all_eigenvalues(m)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Eigenvalues of a Hermitian matrix (real parts of the computed spectrum), ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut ev: Vec<f64> = all_eigenvalues(m)?.iter().map(|z| z.re).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ev)
}
