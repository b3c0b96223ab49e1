//! Resolvent-norm grids, level-set extraction, imaginary-axis sweeps and
//! random sampling of the joint structured/unstructured pseudospectrum.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::export::{csv_string, fmt_num};
use crate::linalg::{all_eigenvalues, hermitian_eigenvalues, smallest_singular_value, ComplexMatrix, C64};
use crate::rng;
use crate::structures::StructureSpace;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let g = GridSpec { re_min, re_max, im_min, im_max, nx, ny };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|x| x.is_finite());
        if !finite || !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(Error::InvalidArgument(format!("invalid grid window {self:?}")));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidArgument(format!("grid needs at least 2x2 nodes, got {}x{}", self.nx, self.ny)));
        }
        Ok(())
    }

    pub fn re(&self, ix: usize) -> f64 {
        self.re_min + (self.re_max - self.re_min) * ix as f64 / (self.nx - 1) as f64
    }

    pub fn im(&self, iy: usize) -> f64 {
        self.im_min + (self.im_max - self.im_min) * iy as f64 / (self.ny - 1) as f64
    }

    pub fn node(&self, ix: usize, iy: usize) -> C64 {
        C64::new(self.re(ix), self.im(iy))
    }

    /// Bounding box of the spectrum enlarged by `margin` times its size
    /// (at least `margin` in absolute terms).
    pub fn around_spectrum(a: &ComplexMatrix, margin: f64, nx: usize, ny: usize) -> Result<Self> {
        let eigs = all_eigenvalues(a)?;
        let (mut r0, mut r1, mut i0, mut i1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for z in &eigs {
            r0 = r0.min(z.re);
            r1 = r1.max(z.re);
            i0 = i0.min(z.im);
            i1 = i1.max(z.im);
        }
        let pad = margin * (r1 - r0).max(i1 - i0).max(1.0);
        GridSpec::new(r0 - pad, r1 + pad, i0 - pad, i1 + pad, nx, ny)
    }

    /// Window containing the `r`-pseudospectrum: the numerical-range box
    /// enlarged by `r (1 + margin)`.
    pub fn enclosing_pseudospectrum(a: &ComplexMatrix, r: f64, margin: f64, nx: usize, ny: usize) -> Result<Self> {
        a.ensure_square()?;
        let ah = a.adjoint();
        let h = (a + &ah).scale_real(0.5);
        let k = (a - &ah).scale(C64::new(0.0, -0.5));
        let he = hermitian_eigenvalues(&h)?;
        let ke = hermitian_eigenvalues(&k)?;
        let pad = r * (1.0 + margin) + 1e-3;
        GridSpec::new(
            he.iter().cloned().fold(f64::INFINITY, f64::min) - pad,
            he.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + pad,
            ke.iter().cloned().fold(f64::INFINITY, f64::min) - pad,
            ke.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + pad,
            nx,
            ny,
        )
    }
}

/// `sigma_min(A - lambda I)` on the nodes of a grid, stored row by row
/// (`values[iy * nx + ix]`).
#[derive(Clone, Debug, Serialize)]
pub struct ResolventField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ResolventField {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }

    /// Smallest value on the outer ring of nodes.
    pub fn boundary_min(&self) -> f64 {
        let g = &self.grid;
        let mut m = f64::INFINITY;
        for ix in 0..g.nx {
            m = m.min(self.value(ix, 0)).min(self.value(ix, g.ny - 1));
        }
        for iy in 0..g.ny {
            m = m.min(self.value(0, iy)).min(self.value(g.nx - 1, iy));
        }
        m
    }

    /// CSV with header `re,im,sigma_min`.
    pub fn to_csv(&self) -> String {
        let g = self.grid;
        let recs = (0..g.ny).flat_map(move |iy| {
            (0..g.nx).map(move |ix| (ix, iy))
        });
        csv_string(
            "re,im,sigma_min",
            recs.map(|(ix, iy)| vec![fmt_num(g.re(ix)), fmt_num(g.im(iy)), fmt_num(self.value(ix, iy))]),
        )
    }
}

/// `sigma_min(A - z I)`.
pub fn resolvent_sigma(a: &ComplexMatrix, z: C64) -> Result<f64> {
    smallest_singular_value(&a.shifted(z))
}

/// Evaluates `sigma_min(A - lambda I)` at every node, in parallel.
pub fn resolvent_field(a: &ComplexMatrix, grid: &GridSpec) -> Result<ResolventField> {
    a.ensure_square()?;
    a.ensure_finite()?;
    grid.validate()?;
    let nodes: Vec<(usize, usize)> = (0..grid.ny).flat_map(|iy| (0..grid.nx).map(move |ix| (ix, iy))).collect();
    let values = nodes
        .par_iter()
        .map(|&(ix, iy)| resolvent_sigma(a, grid.node(ix, iy)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ResolventField { grid: *grid, values })
}

/// Polyline of a level set; closed curves repeat their first point at the end.
#[derive(Clone, Debug, Serialize)]
pub struct Contour {
    pub level: f64,
    pub points: Vec<C64>,
    pub closed: bool,
}

impl Contour {
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum EdgeKey {
    /// Between nodes `(ix, iy)` and `(ix + 1, iy)`.
    H(usize, usize),
    /// Between nodes `(ix, iy)` and `(ix, iy + 1)`.
    V(usize, usize),
}

/// Marching squares on `ln(sigma_min / level)`; segments are chained through
/// shared cell edges into polylines.
pub fn level_sets(field: &ResolventField, level: f64) -> Result<Vec<Contour>> {
    if !(level > 0.0 && level.is_finite()) {
        return Err(Error::InvalidArgument(format!("level must be positive, got {level}")));
    }
    let g = field.grid;
    let f = |ix: usize, iy: usize| field.value(ix, iy).max(1e-300).ln() - level.ln();
    let mut points: HashMap<EdgeKey, C64> = HashMap::new();
    let mut crossing = |key: EdgeKey| -> EdgeKey {
        points.entry(key).or_insert_with(|| {
            let ((ax, ay), (bx, by)) = match key {
                EdgeKey::H(ix, iy) => ((ix, iy), (ix + 1, iy)),
                EdgeKey::V(ix, iy) => ((ix, iy), (ix, iy + 1)),
            };
            let (fa, fb) = (f(ax, ay), f(bx, by));
            let t = if fa == fb { 0.5 } else { (fa / (fa - fb)).clamp(0.0, 1.0) };
            let (pa, pb) = (g.node(ax, ay), g.node(bx, by));
            pa + (pb - pa) * t
        });
        key
    };
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for iy in 0..g.ny - 1 {
        for ix in 0..g.nx - 1 {
            let c = [f(ix, iy), f(ix + 1, iy), f(ix + 1, iy + 1), f(ix, iy + 1)];
            let inside: Vec<bool> = c.iter().map(|&v| v < 0.0).collect();
            let bottom = EdgeKey::H(ix, iy);
            let right = EdgeKey::V(ix + 1, iy);
            let top = EdgeKey::H(ix, iy + 1);
            let left = EdgeKey::V(ix, iy);
            let edges = [(bottom, 0, 1), (right, 1, 2), (top, 3, 2), (left, 0, 3)];
            let crossed: Vec<EdgeKey> = edges
                .iter()
                .filter(|(_, a, b)| inside[*a] != inside[*b])
                .map(|(k, _, _)| *k)
                .collect();
            match crossed.len() {
                0 => {}
                2 => segments.push((crossing(crossed[0]), crossing(crossed[1]))),
                4 => {
                    let center_inside = (c.iter().sum::<f64>() / 4.0) < 0.0;
                    if center_inside == inside[0] {
                        segments.push((crossing(bottom), crossing(right)));
                        segments.push((crossing(top), crossing(left)));
                    } else {
                        segments.push((crossing(left), crossing(bottom)));
                        segments.push((crossing(right), crossing(top)));
                    }
                }
                _ => unreachable!("a cell has an even number of sign changes"),
            }
        }
    }
    let mut adj: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (i, (a, b)) in segments.iter().enumerate() {
        adj.entry(*a).or_default().push(i);
        adj.entry(*b).or_default().push(i);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start_seg: usize, start_key: EdgeKey, used: &mut Vec<bool>| -> (Vec<EdgeKey>, bool) {
        let mut keys = vec![start_key];
        let mut seg = start_seg;
        let mut key = start_key;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let other = if a == key { b } else { a };
            keys.push(other);
            key = other;
            match adj[&key].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        let closed = keys.len() > 2 && keys.first() == keys.last();
        (keys, closed)
    };
    // Open chains start at edges used by a single segment (window boundary).
    let mut ends: Vec<(EdgeKey, usize)> = adj
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(k, v)| (*k, v[0]))
        .collect();
    ends.sort_by_key(|(k, _)| match *k {
        EdgeKey::H(x, y) => (0, y, x),
        EdgeKey::V(x, y) => (1, y, x),
    });
    for (key, seg) in ends {
        if used[seg] {
            continue;
        }
        let (keys, closed) = walk(seg, key, &mut used);
        out.push(Contour { level, points: keys.iter().map(|k| points[k]).collect(), closed });
    }
    for seg in 0..segments.len() {
        if used[seg] {
            continue;
        }
        let (keys, closed) = walk(seg, segments[seg].0, &mut used);
        out.push(Contour { level, points: keys.iter().map(|k| points[k]).collect(), closed });
    }
    Ok(out)
}

/// CSV with header `level,segment_id,re,im`.
pub fn contours_csv(contours: &[Contour]) -> String {
    csv_string(
        "level,segment_id,re,im",
        contours.iter().enumerate().flat_map(|(id, c)| {
            c.points
                .iter()
                .map(move |p| vec![fmt_num(c.level), id.to_string(), fmt_num(p.re), fmt_num(p.im)])
        }),
    )
}

/// Bound on the frequencies worth sweeping: beyond `2 ||A||_F` the smallest
/// singular value of `A - i omega I` exceeds `||A||_2 >= sigma_min(A)`.
pub fn axis_half_width(a: &ComplexMatrix) -> f64 {
    2.0 * a.frobenius_norm().max(f64::MIN_POSITIVE)
}

fn golden_min(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Minimizes `sigma_min(A - i omega I)` over `[omega_lo, omega_hi]`: uniform
/// grid, then golden-section refinement around the best node. Returns
/// `(omega*, sigma*)`.
pub fn axis_sweep(a: &ComplexMatrix, omega_lo: f64, omega_hi: f64, n_points: usize) -> Result<(f64, f64)> {
    a.ensure_square()?;
    a.ensure_finite()?;
    if !(omega_lo < omega_hi) || n_points < 2 {
        return Err(Error::InvalidArgument(format!(
            "axis sweep needs omega_lo < omega_hi and at least 2 points, got [{omega_lo}, {omega_hi}] with {n_points}"
        )));
    }
    let step = (omega_hi - omega_lo) / (n_points - 1) as f64;
    let sig = |w: f64| resolvent_sigma(a, C64::new(0.0, w));
    let vals = (0..n_points)
        .into_par_iter()
        .map(|i| sig(omega_lo + step * i as f64))
        .collect::<Result<Vec<f64>>>()?;
    let (best, _) = vals
        .iter()
        .enumerate()
        .fold((0usize, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let lo = omega_lo + step * best.saturating_sub(1) as f64;
    let hi = omega_lo + step * (best + 1).min(n_points - 1) as f64;
    let tol = 1e-12 * (omega_hi - omega_lo).abs().max(1.0);
    let (w, s) = golden_min(sig, lo, hi, tol)?;
    if vals[best] < s {
        return Ok((omega_lo + step * best as f64, vals[best]));
    }
    Ok((w, s))
}

/// How the norm of each sampled perturbation is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusMode {
    /// Uniform in the ball: radius `r u^(1/dim)`.
    Ball,
    /// On the sphere of radius `r`.
    Sphere,
}

/// One draw `A + Delta + Theta` of the joint pseudospectrum.
#[derive(Clone, Debug, Serialize)]
pub struct JointSample {
    pub sample_id: usize,
    pub delta_norm: f64,
    pub theta_norm: f64,
    pub eigenvalues: Vec<C64>,
}

/// Structured `Delta` with `||Delta||_F <= radius` drawn from sample stream `index`.
pub fn random_structured(s: &StructureSpace, radius: f64, mode: RadiusMode, g: &mut rng::StabradRng) -> ComplexMatrix {
    let dir = s.random_unit_element(g);
    let r = match mode {
        RadiusMode::Sphere => radius,
        RadiusMode::Ball => radius * rng::uniform(g).powf(1.0 / s.real_dimension().max(1) as f64),
    };
    dir.scale_real(r)
}

/// Eigenvalues of `A + Delta + Theta` for random `Delta in S` with
/// `||Delta||_F <= delta` and complex `Theta` with `||Theta||_F <= eps`.
/// Sample `i` uses its own seeded stream, so results do not depend on
/// scheduling.
pub fn joint_pseudospectrum_sample(
    a: &ComplexMatrix,
    s: &StructureSpace,
    eps: f64,
    delta: f64,
    n_samples: usize,
    rng_seed: u64,
    mode: RadiusMode,
) -> Result<Vec<JointSample>> {
    let n = a.ensure_square()?;
    a.ensure_finite()?;
    if s.dim() != n {
        return Err(Error::DimensionMismatch(format!("structure of dimension {} for n = {n}", s.dim())));
    }
    if n_samples == 0 || !(eps >= 0.0) || !(delta >= 0.0) {
        return Err(Error::InvalidArgument("need n_samples >= 1 and nonnegative eps, delta".into()));
    }
    let full = StructureSpace::full_complex(n);
    (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut g = rng::substream(rng_seed, i as u64);
            let mut m = a.clone();
            let mut dn = 0.0;
            let mut tn = 0.0;
            if delta > 0.0 {
                let d = random_structured(s, delta, mode, &mut g);
                dn = d.frobenius_norm();
                m = &m + &d;
            }
            if eps > 0.0 {
                let t = random_structured(&full, eps, mode, &mut g);
                tn = t.frobenius_norm();
                m = &m + &t;
            }
            Ok(JointSample { sample_id: i, delta_norm: dn, theta_norm: tn, eigenvalues: all_eigenvalues(&m)? })
        })
        .collect()
}

/// CSV with header `sample_id,re,im`.
pub fn cloud_csv(samples: &[JointSample]) -> String {
    csv_string(
        "sample_id,re,im",
        samples.iter().flat_map(|s| {
            s.eigenvalues
                .iter()
                .map(move |z| vec![s.sample_id.to_string(), fmt_num(z.re), fmt_num(z.im)])
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_field() {
        let a = ComplexMatrix::from_real_diag(&[-1.0]);
        let g = GridSpec::new(-2.0, 0.0, -1.0, 1.0, 3, 3).unwrap();
        let f = resolvent_field(&a, &g).unwrap();
        assert!((f.value(2, 1) - 1.0).abs() < 1e-15);
        assert!(f.value(1, 1) < 1e-15);
    }

    #[test]
    fn circle_level_set() {
        let a = ComplexMatrix::from_real_diag(&[-3.0]);
        let g = GridSpec::new(-5.0, -1.0, -2.0, 2.0, 201, 201).unwrap();
        let f = resolvent_field(&a, &g).unwrap();
        let cs = level_sets(&f, 1.0).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(cs[0].closed);
        assert!((cs[0].length() - 2.0 * std::f64::consts::PI).abs() < 1e-3);
        for p in &cs[0].points {
            assert!(((p - C64::new(-3.0, 0.0)).norm() - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn open_curve_at_window_edge() {
        let a = ComplexMatrix::from_real_diag(&[-3.0]);
        let g = GridSpec::new(-3.0, -1.0, -2.0, 2.0, 101, 101).unwrap();
        let f = resolvent_field(&a, &g).unwrap();
        let cs = level_sets(&f, 1.0).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(!cs[0].closed);
    }

    #[test]
    fn diagonal_axis_sweep() {
        let a = ComplexMatrix::from_real_diag(&[-1.0, -2.0]);
        let (w, s) = axis_sweep(&a, -3.0, 3.0, 61).unwrap();
        assert!(w.abs() < 1e-6);
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_radius_samples_are_the_spectrum() {
        let a = ComplexMatrix::from_real_diag(&[-1.0, -2.0]);
        let s = StructureSpace::full_real(2);
        let cl = joint_pseudospectrum_sample(&a, &s, 0.0, 0.0, 3, 7, RadiusMode::Ball).unwrap();
        assert_eq!(cl.len(), 3);
        for c in cl {
            let mut re: Vec<f64> = c.eigenvalues.iter().map(|z| z.re).collect();
            re.sort_by(|x, y| x.partial_cmp(y).unwrap());
            assert!((re[0] + 2.0).abs() < 1e-14 && (re[1] + 1.0).abs() < 1e-14);
        }
    }
}
