//! Sampled certification of transient bounds: the contour bound on
//! `||exp(t (A + Delta))||_2` and the L2 input-output bound for
//! `y' = (A + Delta) y + f`, `y(0) = 0`.
//!
//! These are checks on samples, not proofs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{expm, spectral_norm, svd, ComplexMatrix, C64};
use crate::pseudospectra::{level_sets, random_structured, resolvent_sigma, Contour, RadiusMode, ResolventField};
use crate::rng;
use crate::structures::StructureSpace;

pub const CERTIFICATION_LABEL: &str = "sampled certification";

#[derive(Clone, Debug, Serialize)]
pub struct ContourBound {
    /// `|Gamma|`: level-curve length in the closed left half-plane plus the
    /// imaginary-axis intervals that close it.
    pub gamma_length: f64,
    pub eps: f64,
    pub delta: f64,
    /// `|Gamma| / (2 pi eps)`.
    pub bound: f64,
    /// Closed polylines clipped to `Re <= 0`, one per component.
    pub contours: Vec<Vec<C64>>,
}

impl ContourBound {
    /// All components concatenated into one point list.
    pub fn contour(&self) -> Vec<C64> {
        self.contours.concat()
    }
}

/// Clips a closed polygon to `Re <= 0` (Sutherland-Hodgman); the result is
/// closed again by repeating the first point.
fn clip_left(poly: &[C64]) -> Vec<C64> {
    let pts = if poly.len() > 1 && poly.first() == poly.last() { &poly[..poly.len() - 1] } else { poly };
    let mut out = Vec::new();
    for i in 0..pts.len() {
        let p = pts[i];
        let q = pts[(i + 1) % pts.len()];
        let pin = p.re <= 0.0;
        let qin = q.re <= 0.0;
        if pin {
            out.push(p);
        }
        if pin != qin {
            let t = p.re / (p.re - q.re);
            out.push(C64::new(0.0, p.im + t * (q.im - p.im)));
        }
    }
    if let Some(&f) = out.first() {
        out.push(f);
    }
    out
}

/// Length of the part of a polyline with `Re <= 0`, plus the crossing ordinates.
fn left_length(poly: &[C64], crossings: &mut Vec<f64>) -> f64 {
    let mut len = 0.0;
    for w in poly.windows(2) {
        let (p, q) = (w[0], w[1]);
        match (p.re <= 0.0, q.re <= 0.0) {
            (true, true) => len += (q - p).norm(),
            (false, false) => {}
            (pin, _) => {
                let t = p.re / (p.re - q.re);
                let c = C64::new(0.0, p.im + t * (q.im - p.im));
                crossings.push(c.im);
                len += if pin { (c - p).norm() } else { (q - c).norm() };
            }
        }
    }
    len
}

/// Contour bound from the `(eps + delta)`-level set of `field`: the level
/// curve is clipped to the closed left half-plane and closed by the
/// imaginary-axis intervals inside the pseudospectrum. Valid for
/// `||Delta||_F <= delta` when `delta` does not exceed the structured
/// stability radius (not checked).
pub fn contour_bound(a: &ComplexMatrix, eps: f64, delta: f64, field: &ResolventField) -> Result<ContourBound> {
    if !(eps > 0.0) || !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("need eps > 0 and delta >= 0, got {eps}, {delta}")));
    }
    let level = eps + delta;
    if field.boundary_min() <= level {
        return Err(Error::ContourEscapesWindow);
    }
    let curves: Vec<Contour> = level_sets(field, level)?;
    if curves.iter().any(|c| !c.closed) {
        return Err(Error::OpenContour);
    }
    let mut crossings = Vec::new();
    let mut length = 0.0;
    let mut contours = Vec::new();
    for c in &curves {
        length += left_length(&c.points, &mut crossings);
        let clipped = clip_left(&c.points);
        if clipped.len() >= 3 {
            contours.push(clipped);
        }
    }
    if crossings.len() % 2 != 0 {
        return Err(Error::OpenContour);
    }
    crossings.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for w in crossings.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if w[1] > w[0] && resolvent_sigma(a, C64::new(0.0, mid))? < level {
            length += w[1] - w[0];
        }
    }
    Ok(ContourBound {
        gamma_length: length,
        eps,
        delta,
        bound: length / (2.0 * std::f64::consts::PI * eps),
        contours,
    })
}

/// `||exp(t M)||_2` for each `t`.
pub fn transient_norms(m: &ComplexMatrix, times: &[f64]) -> Vec<f64> {
    times.par_iter().map(|&t| spectral_norm(&expm(&m.scale_real(t)))).collect()
}

/// Forcing term `f(t)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Forcing {
    /// Independent complex Gaussian vectors held constant on `pieces` equal
    /// subintervals, drawn from the sample's stream.
    PiecewiseConstant { pieces: usize },
    /// `exp(i omega t) w`.
    Harmonic { omega: f64, w: Vec<C64> },
    /// Values on the uniform time grid (`n_steps + 1` vectors), linearly interpolated.
    Custom { samples: Vec<Vec<C64>> },
}

enum Source {
    Pieces(Vec<Vec<C64>>, f64),
    Harmonic(f64, Vec<C64>),
    Samples(Vec<Vec<C64>>, f64),
}

impl Source {
    fn eval(&self, t: f64, out: &mut [C64]) {
        match self {
            Source::Pieces(p, width) => {
                let k = ((t / width).floor() as usize).min(p.len() - 1);
                out.copy_from_slice(&p[k]);
            }
            Source::Harmonic(om, w) => {
                let e = C64::from_polar(1.0, om * t);
                for (o, wi) in out.iter_mut().zip(w) {
                    *o = wi * e;
                }
            }
            Source::Samples(s, h) => {
                let x = (t / h).max(0.0);
                let k = (x.floor() as usize).min(s.len() - 2);
                let th = (x - k as f64).clamp(0.0, 1.0);
                for (i, o) in out.iter_mut().enumerate() {
                    *o = s[k][i] * (1.0 - th) + s[k + 1][i] * th;
                }
            }
        }
    }
}

fn build_source(f: &Forcing, n: usize, t_end: f64, n_steps: usize, g: &mut rng::StabradRng) -> Result<Source> {
    match f {
        Forcing::PiecewiseConstant { pieces } => {
            if *pieces == 0 {
                return Err(Error::InvalidArgument("piecewise-constant forcing needs at least one piece".into()));
            }
            let p = (0..*pieces).map(|_| (0..n).map(|_| rng::complex_normal(g)).collect()).collect();
            Ok(Source::Pieces(p, t_end / *pieces as f64))
        }
        Forcing::Harmonic { omega, w } => {
            if w.len() != n {
                return Err(Error::DimensionMismatch(format!("harmonic direction of length {} for n = {n}", w.len())));
            }
            Ok(Source::Harmonic(*omega, w.clone()))
        }
        Forcing::Custom { samples } => {
            if samples.len() != n_steps + 1 || samples.iter().any(|s| s.len() != n) {
                return Err(Error::DimensionMismatch(format!(
                    "custom forcing needs {} samples of length {n}",
                    n_steps + 1
                )));
            }
            Ok(Source::Samples(samples.clone(), t_end / n_steps as f64))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransientSimulation {
    pub time_grid: Vec<f64>,
    pub forcing: Vec<Vec<C64>>,
    pub solution: Vec<Vec<C64>>,
    pub l2_input: f64,
    pub l2_output: f64,
}

fn trapezoid(h: f64, v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]))
}

fn simulate_source(m: &ComplexMatrix, src: &Source, t_end: f64, n_steps: usize, keep: bool) -> Result<TransientSimulation> {
    let n = m.rows();
    let h = t_end / n_steps as f64;
    let mut y = vec![C64::new(0.0, 0.0); n];
    let mut fbuf = vec![C64::new(0.0, 0.0); n];
    let mut in_sq = Vec::with_capacity(n_steps + 1);
    let mut out_sq = Vec::with_capacity(n_steps + 1);
    let (mut tg, mut fs, mut ys) = (Vec::new(), Vec::new(), Vec::new());
    let rhs = |t: f64, y: &[C64], fbuf: &mut [C64]| -> Vec<C64> {
        src.eval(t, fbuf);
        m.mul_vec(y).iter().zip(fbuf.iter()).map(|(a, b)| a + b).collect()
    };
    for k in 0..=n_steps {
        let t = k as f64 * h;
        src.eval(t, &mut fbuf);
        in_sq.push(fbuf.iter().map(|z| z.norm_sqr()).sum::<f64>());
        let yn: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        if !yn.is_finite() || yn > 1e300 {
            return Err(Error::StepSizeUnstable { t });
        }
        out_sq.push(yn);
        if keep {
            tg.push(t);
            fs.push(fbuf.clone());
            ys.push(y.clone());
        }
        if k == n_steps {
            break;
        }
        let k1 = rhs(t, &y, &mut fbuf);
        let y2: Vec<C64> = y.iter().zip(&k1).map(|(a, b)| a + b * (0.5 * h)).collect();
        let k2 = rhs(t + 0.5 * h, &y2, &mut fbuf);
        let y3: Vec<C64> = y.iter().zip(&k2).map(|(a, b)| a + b * (0.5 * h)).collect();
        let k3 = rhs(t + 0.5 * h, &y3, &mut fbuf);
        let y4: Vec<C64> = y.iter().zip(&k3).map(|(a, b)| a + b * h).collect();
        let k4 = rhs(t + h, &y4, &mut fbuf);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    Ok(TransientSimulation {
        time_grid: tg,
        forcing: fs,
        solution: ys,
        l2_input: trapezoid(h, &in_sq).sqrt(),
        l2_output: trapezoid(h, &out_sq).sqrt(),
    })
}

/// Integrates `y' = M y + f`, `y(0) = 0`, on `[0, t_end]` with `n_steps`
/// classical Runge-Kutta steps and trapezoidal L2 norms.
pub fn simulate(m: &ComplexMatrix, forcing: &Forcing, t_end: f64, n_steps: usize, seed: u64) -> Result<TransientSimulation> {
    let n = m.ensure_square()?;
    if !(t_end > 0.0) || n_steps == 0 {
        return Err(Error::InvalidArgument("need T > 0 and n_steps >= 1".into()));
    }
    let src = build_source(forcing, n, t_end, n_steps, &mut rng::seeded(seed))?;
    simulate_source(m, &src, t_end, n_steps, true)
}

/// Worst input direction for a harmonic forcing at `omega`: the right singular
/// vector of `M - i omega I` for its smallest singular value.
pub fn worst_harmonic_direction(m: &ComplexMatrix, omega: f64) -> Vec<C64> {
    let d = svd(&m.shifted(C64::new(0.0, omega)));
    let k = d.sigma.len() - 1;
    d.v.column(k)
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub sample: String,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleRatio {
    pub sample: String,
    pub delta_norm: f64,
    pub l2_input: f64,
    pub l2_output: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct L2Report {
    pub label: &'static str,
    pub eps: f64,
    pub delta: f64,
    pub n_samples: usize,
    pub max_ratio: f64,
    /// `1 / eps`.
    pub bound: f64,
    pub tol_quad: f64,
    pub violations: Vec<Violation>,
    pub samples: Vec<SampleRatio>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct L2Options {
    pub n_perturbations: usize,
    pub forcing: Forcing,
    pub t_end: f64,
    pub n_steps: usize,
    pub seed: u64,
    pub tol_quad: f64,
    pub radius: RadiusMode,
}

/// For seeded random `Delta in S` with `||Delta||_F <= delta` (and the given
/// extremal perturbation, if any) simulates the forced system and compares the
/// L2 gain with `1 / eps_used`.
pub fn verify_l2_bound(
    a: &ComplexMatrix,
    s: &StructureSpace,
    eps_used: f64,
    delta: f64,
    opts: &L2Options,
    extremal: Option<&ComplexMatrix>,
) -> Result<L2Report> {
    let n = a.ensure_square()?;
    if s.dim() != n {
        return Err(Error::DimensionMismatch(format!("structure of dimension {} for n = {n}", s.dim())));
    }
    if !(eps_used > 0.0) || !(delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("need eps > 0 and delta >= 0, got {eps_used}, {delta}")));
    }
    if !(opts.t_end > 0.0) || opts.n_steps == 0 {
        return Err(Error::InvalidArgument("need T > 0 and n_steps >= 1".into()));
    }
    let mut jobs: Vec<(String, Option<ComplexMatrix>, u64)> =
        (0..opts.n_perturbations).map(|i| (i.to_string(), None, i as u64)).collect();
    if let Some(e) = extremal {
        if e.rows() != n || e.cols() != n {
            return Err(Error::DimensionMismatch("extremal perturbation has the wrong size".into()));
        }
        jobs.push(("extremal".into(), Some(e.clone()), opts.n_perturbations as u64));
    }
    let samples = jobs
        .par_iter()
        .map(|(name, fixed, idx)| {
            let mut g = rng::substream(opts.seed, *idx);
            let d = match fixed {
                Some(d) => d.clone(),
                None => random_structured(s, delta, opts.radius, &mut g),
            };
            let src = build_source(&opts.forcing, n, opts.t_end, opts.n_steps, &mut g)?;
            let sim = simulate_source(&(a + &d), &src, opts.t_end, opts.n_steps, false)?;
            let ratio = if sim.l2_input > 0.0 { sim.l2_output / sim.l2_input } else { 0.0 };
            Ok(SampleRatio {
                sample: name.clone(),
                delta_norm: d.frobenius_norm(),
                l2_input: sim.l2_input,
                l2_output: sim.l2_output,
                ratio,
            })
        })
        .collect::<Result<Vec<SampleRatio>>>()?;
    let bound = 1.0 / eps_used;
    let violations = samples
        .iter()
        .filter(|r| r.ratio > bound * (1.0 + opts.tol_quad))
        .map(|r| Violation { sample: r.sample.clone(), ratio: r.ratio })
        .collect();
    Ok(L2Report {
        label: CERTIFICATION_LABEL,
        eps: eps_used,
        delta,
        n_samples: samples.len(),
        max_ratio: samples.iter().map(|r| r.ratio).fold(0.0, f64::max),
        bound,
        tol_quad: opts.tol_quad,
        violations,
        samples,
    })
}
