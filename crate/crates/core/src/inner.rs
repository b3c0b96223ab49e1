//! Inner iteration: maximize the real part of the rightmost eigenvalue of
//! `A + eps E + delta E_S` for fixed `(eps, delta)`.
//!
//! The unstructured part is kept as `E = u v*` with unit vectors, and the
//! structured part is tied to it as `E_S = sign * eta * Pi_S(E)` with
//! `eta = 1 / ||Pi_S(E)||_F`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, normalize, rightmost_eigentriple, ComplexMatrix, EigenTriple, C64};
use crate::rng;
use crate::structures::StructureSpace;

/// Below this Frobenius norm the structured part `Pi_S(u v*)` counts as zero.
pub const ZERO_STRUCTURED_NORM: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Rank-1 two-vector flow integrated by the Euler/rotation splitting.
    Splitting,
    /// Normalized Euler method on the full two-matrix flow.
    FullEuler,
}

impl std::str::FromStr for Integrator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "splitting" => Ok(Integrator::Splitting),
            "full-euler" => Ok(Integrator::FullEuler),
            other => Err(Error::InvalidArgument(format!(
                "unknown integrator '{other}' (expected splitting or full-euler)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InnerOptions {
    /// Stop after `patience` consecutive accepted steps changing `Re lambda` by less than this.
    pub tol_inner: f64,
    pub patience: usize,
    /// Stationarity tolerance relative to `eps`: the residual must fall below `tol_stat_rel * eps`.
    pub tol_stat_rel: f64,
    /// Budget of eigentriple evaluations per trajectory.
    pub max_steps: usize,
    /// Roundoff allowance in the acceptance test, in units of `f64::EPSILON * max(1, |lambda|)`.
    pub accept_slack: f64,
    pub h0: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub grow: f64,
    pub shrink: f64,
    pub try_both_signs: bool,
    /// Number of trajectories; the extra ones start from random unit vectors.
    pub restarts: usize,
    pub seed: u64,
    pub integrator: Integrator,
    pub record_history: bool,
}

impl Default for InnerOptions {
    fn default() -> Self {
        InnerOptions {
            tol_inner: 1e-15,
            patience: 5,
            tol_stat_rel: 1e-8,
            max_steps: 20_000,
            accept_slack: 4.0,
            h0: 0.1,
            h_min: 1e-8,
            h_max: 1.0,
            grow: 1.2,
            shrink: 0.5,
            try_both_signs: false,
            restarts: 1,
            seed: 0,
            integrator: Integrator::Splitting,
            record_history: true,
        }
    }
}

/// Unit vectors `u`, `v` with the eigentriple of the matrix they perturb.
#[derive(Clone, Debug, Serialize)]
pub struct RankOneState {
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub triple: EigenTriple,
    /// `1 / ||Pi_S(u v*)||_F`; zero when `delta = 0` and the projection vanishes.
    pub eta: f64,
    /// Branch `+1` or `-1` of the structured term.
    pub sign: f64,
}

fn check_params(a: &ComplexMatrix, s: &StructureSpace, eps: f64, delta: f64) -> Result<usize> {
    let n = a.ensure_square()?;
    if s.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "structure of dimension {} for a {n}x{n} matrix",
            s.dim()
        )));
    }
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be finite and nonnegative, got {eps}")));
    }
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be finite and nonnegative, got {delta}")));
    }
    Ok(n)
}

/// `A + eps u v* + sign delta eta Pi_S(u v*)` together with `eta`.
pub fn perturbed_matrix(
    a: &ComplexMatrix,
    s: &StructureSpace,
    eps: f64,
    delta: f64,
    sign: f64,
    u: &[C64],
    v: &[C64],
) -> Result<(ComplexMatrix, f64)> {
    let mut m = a.clone();
    m.add_outer(C64::new(eps, 0.0), u, v);
    let pe = s.project(&ComplexMatrix::outer(u, v))?;
    let pn = pe.frobenius_norm();
    let eta = if pn < ZERO_STRUCTURED_NORM {
        if delta > 0.0 {
            return Err(Error::ZeroStructuredPart { norm: pn });
        }
        0.0
    } else {
        1.0 / pn
    };
    if delta > 0.0 {
        m.axpy(C64::new(sign * delta * eta, 0.0), &pe);
    }
    Ok((m, eta))
}

impl RankOneState {
    /// Normalizes `u`, `v` and evaluates the rightmost eigentriple with `u` as phase anchor.
    pub fn new(
        a: &ComplexMatrix,
        s: &StructureSpace,
        eps: f64,
        delta: f64,
        sign: f64,
        mut u: Vec<C64>,
        mut v: Vec<C64>,
    ) -> Result<Self> {
        let n = check_params(a, s, eps, delta)?;
        if u.len() != n || v.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "vectors of length {} and {} for n = {n}",
                u.len(),
                v.len()
            )));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidArgument(format!("sign must be +1 or -1, got {sign}")));
        }
        if normalize(&mut u) == 0.0 || normalize(&mut v) == 0.0 {
            return Err(Error::InvalidArgument("zero vector in rank-1 state".into()));
        }
        let (m, eta) = perturbed_matrix(a, s, eps, delta, sign, &u, &v)?;
        let triple = rightmost_eigentriple(&m, Some(&u))?;
        Ok(RankOneState { u, v, triple, eta, sign })
    }

    /// `E(0) = x y*` from the rightmost eigentriple of `A` itself.
    pub fn cold_start(a: &ComplexMatrix, s: &StructureSpace, eps: f64, delta: f64, sign: f64) -> Result<Self> {
        let t = rightmost_eigentriple(a, None)?;
        RankOneState::new(a, s, eps, delta, sign, t.x, t.y)
    }

    /// Same vectors re-evaluated for new parameters (warm start).
    pub fn rebind(&self, a: &ComplexMatrix, s: &StructureSpace, eps: f64, delta: f64, sign: f64) -> Result<Self> {
        RankOneState::new(a, s, eps, delta, sign, self.u.clone(), self.v.clone())
    }

    pub fn re_lambda(&self) -> f64 {
        self.triple.lambda.re
    }

    /// `E = u v*`.
    pub fn e(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.u, &self.v)
    }

    /// `eta Pi_S(u v*)`, the unit-norm structured direction (without the sign).
    pub fn structured_direction(&self, s: &StructureSpace) -> Result<ComplexMatrix> {
        Ok(s.project(&self.e())?.scale_real(self.eta))
    }

    /// The structured perturbation `Delta = sign delta eta Pi_S(u v*)`.
    pub fn delta_matrix(&self, s: &StructureSpace, delta: f64) -> Result<ComplexMatrix> {
        if delta == 0.0 {
            return Ok(ComplexMatrix::zeros(self.u.len(), self.u.len()));
        }
        Ok(self.structured_direction(s)?.scale_real(self.sign * delta))
    }

    /// The unstructured perturbation `Theta = eps u v*`.
    pub fn theta_matrix(&self, eps: f64) -> ComplexMatrix {
        self.e().scale_real(eps)
    }
}

/// `-Re lambda(A + eps u v* + sign delta eta Pi_S(u v*))`, recomputing the eigentriple.
pub fn functional(a: &ComplexMatrix, s: &StructureSpace, eps: f64, delta: f64, state: &RankOneState) -> Result<f64> {
    check_params(a, s, eps, delta)?;
    let (m, _) = perturbed_matrix(a, s, eps, delta, state.sign, &state.u, &state.v)?;
    Ok(-rightmost_eigentriple(&m, Some(&state.u))?.lambda.re)
}

#[derive(Clone, Debug)]
pub struct GradientPair {
    /// Free gradient `-x y*`.
    pub g: ComplexMatrix,
    /// Reduced gradient.
    pub gtilde: ComplexMatrix,
    /// `u* Gtilde v`.
    pub gamma: C64,
}

/// Reduced gradient at `state` for the given `(eps, delta)`; with `delta = 0`
/// it is exactly `eps G`.
pub fn reduced_gradient(s: &StructureSpace, eps: f64, delta: f64, state: &RankOneState) -> Result<GradientPair> {
    let t = &state.triple;
    let g = ComplexMatrix::outer(&t.x, &t.y).scale_real(-1.0);
    let mut gtilde = g.scale_real(eps);
    if delta > 0.0 {
        if state.eta == 0.0 {
            return Err(Error::ZeroStructuredPart { norm: 0.0 });
        }
        let sd = state.sign * delta * state.eta;
        let pes = state.structured_direction(s)?;
        let pg = s.project(&g)?;
        let c = g.real_inner(&pes);
        gtilde.axpy(C64::new(sd, 0.0), &pg);
        gtilde.axpy(C64::new(-sd * c, 0.0), &pes);
    }
    let gamma = dot(&state.u, &gtilde.mul_vec(&state.v));
    Ok(GradientPair { g, gtilde, gamma })
}

/// `||Gtilde - Re<Gtilde, E> E||_F` with `E = u v*`.
pub fn stationarity_residual(state: &RankOneState, grad: &GradientPair) -> f64 {
    let e = state.e();
    let c = grad.gtilde.real_inner(&e);
    let mut r = grad.gtilde.clone();
    r.axpy(C64::new(-c, 0.0), &e);
    r.frobenius_norm()
}

/// Rank-1 exceptional case: `Gtilde v = 0` and `u* Gtilde = 0` while `Gtilde` is not zero.
fn is_exceptional(state: &RankOneState, grad: &GradientPair) -> bool {
    let gn = grad.gtilde.frobenius_norm();
    if gn == 0.0 {
        return false;
    }
    let gv = norm(&grad.gtilde.mul_vec(&state.v));
    let gu = norm(&grad.gtilde.adjoint_mul_vec(&state.u));
    gv <= 1e-14 * gn && gu <= 1e-14 * gn
}

fn rotation_negligible(a: &ComplexMatrix, t: &EigenTriple) -> bool {
    a.is_real() && t.lambda.im.abs() <= 1e-14 * t.lambda.norm().max(1.0)
}

fn split_vectors(a: &ComplexMatrix, state: &RankOneState, grad: &GradientPair, h: f64) -> (Vec<C64>, Vec<C64>) {
    let gr = grad.gamma.re;
    let gv = grad.gtilde.mul_vec(&state.v);
    let gu = grad.gtilde.adjoint_mul_vec(&state.u);
    let mut u: Vec<C64> = state.u.iter().zip(&gv).map(|(ui, gi)| ui + (ui * gr - gi) * h).collect();
    let mut v: Vec<C64> = state.v.iter().zip(&gu).map(|(vi, gi)| vi + (vi * gr - gi) * h).collect();
    normalize(&mut u);
    normalize(&mut v);
    if !rotation_negligible(a, &state.triple) {
        let gamma_check = dot(&u, &grad.gtilde.mul_vec(&v));
        let theta = 0.5 * gamma_check.im;
        let ru = C64::from_polar(1.0, theta * h);
        for z in u.iter_mut() {
            *z *= ru;
        }
        let rv = ru.conj();
        for z in v.iter_mut() {
            *z *= rv;
        }
    }
    (u, v)
}

/// One step of the splitting integrator: Euler step on the horizontal part,
/// normalization, then the exact phase rotation.
pub fn splitting_step(
    a: &ComplexMatrix,
    s: &StructureSpace,
    eps: f64,
    delta: f64,
    state: &RankOneState,
    h: f64,
) -> Result<RankOneState> {
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step size must be nonnegative, got {h}")));
    }
    if h == 0.0 {
        return Ok(state.clone());
    }
    let grad = reduced_gradient(s, eps, delta, state)?;
    let (u, v) = split_vectors(a, state, &grad, h);
    RankOneState::new(a, s, eps, delta, state.sign, u, v)
}

/// One normalized Euler step of the full two-matrix flow for `(E, E_S)`,
/// each of unit Frobenius norm.
pub fn full_flow_step(
    a: &ComplexMatrix,
    s: &StructureSpace,
    eps: f64,
    delta: f64,
    e: &ComplexMatrix,
    es: &ComplexMatrix,
    h: f64,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_params(a, s, eps, delta)?;
    let t = full_triple(a, eps, delta, e, es)?;
    full_update(s, eps, delta, e, es, &t, h)
}

fn full_triple(a: &ComplexMatrix, eps: f64, delta: f64, e: &ComplexMatrix, es: &ComplexMatrix) -> Result<EigenTriple> {
    let mut m = a.clone();
    m.axpy(C64::new(eps, 0.0), e);
    if delta > 0.0 {
        m.axpy(C64::new(delta, 0.0), es);
    }
    rightmost_eigentriple(&m, None)
}

fn unit(mut m: ComplexMatrix) -> Result<ComplexMatrix> {
    let nrm = m.frobenius_norm();
    if nrm == 0.0 || !nrm.is_finite() {
        return Err(Error::NonFinite);
    }
    m = m.scale_real(1.0 / nrm);
    Ok(m)
}

fn full_update(
    s: &StructureSpace,
    eps: f64,
    delta: f64,
    e: &ComplexMatrix,
    es: &ComplexMatrix,
    t: &EigenTriple,
    h: f64,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let g = ComplexMatrix::outer(&t.x, &t.y).scale_real(-1.0);
    let mut de = g.scale_real(-1.0);
    de.axpy(C64::new(g.real_inner(e), 0.0), e);
    let mut ne = e.clone();
    ne.axpy(C64::new(h / eps, 0.0), &de);
    let ne = unit(ne)?;
    let nes = if delta > 0.0 {
        let pg = s.project(&g)?;
        let mut des = pg.scale_real(-1.0);
        des.axpy(C64::new(pg.real_inner(es), 0.0), es);
        let mut nes = es.clone();
        nes.axpy(C64::new(h / delta, 0.0), &des);
        unit(nes)?
    } else {
        es.clone()
    };
    Ok((ne, nes))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Stationarity residual below tolerance.
    Stationary,
    /// `Re lambda` stopped changing by more than `tol_inner`.
    Stagnated,
    /// Step size fell below `h_min` without an acceptable step.
    StepSizeFloor,
    /// Evaluation budget exhausted.
    Budget,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HistoryPoint {
    pub step: usize,
    pub re_lambda: f64,
    pub h: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InnerResult {
    pub state: RankOneState,
    pub re_lambda: f64,
    /// Eigentriple evaluations of the selected trajectory.
    pub steps: usize,
    /// Eigentriple evaluations over all trajectories.
    pub total_steps: usize,
    pub converged: bool,
    pub stop: StopReason,
    pub residual: f64,
    pub decay_history: Vec<HistoryPoint>,
}

fn slack(opts: &InnerOptions, lambda: C64) -> f64 {
    opts.accept_slack * f64::EPSILON * lambda.norm().max(1.0)
}

fn run_splitting(
    a: &ComplexMatrix,
    s: &StructureSpace,
    eps: f64,
    delta: f64,
    start: RankOneState,
    opts: &InnerOptions,
) -> Result<InnerResult> {
    let tol_stat = opts.tol_stat_rel * eps.max(f64::MIN_POSITIVE);
    let mut state = start;
    let mut steps = 1usize;
    let mut h = opts.h0.clamp(opts.h_min, opts.h_max);
    let mut streak = 0usize;
    let mut quiet = 0usize;
    let mut history = Vec::new();
    if opts.record_history {
        history.push(HistoryPoint { step: 0, re_lambda: state.re_lambda(), h: 0.0 });
    }
    let mut last_change: Option<f64> = None;
    let mut best_residual = f64::INFINITY;
    let (stop, residual) = loop {
        let grad = reduced_gradient(s, eps, delta, &state)?;
        let residual = stationarity_residual(&state, &grad);
        if residual <= tol_stat {
            break (StopReason::Stationary, residual);
        }
        // Stagnation needs Re lambda to stall and the residual to stop reaching
        // new minima: near stationarity Re lambda moves by about residual^2,
        // which is below roundoff.
        if let Some(change) = last_change {
            if change.abs() < opts.tol_inner && residual >= best_residual {
                quiet += 1;
                if quiet >= opts.patience {
                    break (StopReason::Stagnated, residual);
                }
            } else {
                quiet = 0;
            }
        }
        best_residual = best_residual.min(residual);
        if is_exceptional(&state, &grad) {
            return Err(Error::ExceptionalStationaryPoint);
        }
        if steps >= opts.max_steps {
            break (StopReason::Budget, residual);
        }
        let accepted = loop {
            let (u, v) = split_vectors(a, &state, &grad, h);
            let cand = RankOneState::new(a, s, eps, delta, state.sign, u, v)?;
            steps += 1;
            if cand.re_lambda() >= state.re_lambda() - slack(opts, state.triple.lambda) {
                break Some(cand);
            }
            h *= opts.shrink;
            streak = 0;
            if h < opts.h_min || steps >= opts.max_steps {
                break None;
            }
        };
        let Some(cand) = accepted else {
            let reason = if steps >= opts.max_steps { StopReason::Budget } else { StopReason::StepSizeFloor };
            break (reason, residual);
        };
        let change = cand.re_lambda() - state.re_lambda();
        state = cand;
        if opts.record_history {
            history.push(HistoryPoint { step: steps - 1, re_lambda: state.re_lambda(), h });
        }
        streak += 1;
        if streak >= 2 {
            h = (h * opts.grow).min(opts.h_max);
            streak = 0;
        }
        last_change = Some(change);
    };
    Ok(InnerResult {
        re_lambda: state.re_lambda(),
        state,
        steps,
        total_steps: steps,
        converged: residual <= tol_stat,
        stop,
        residual,
        decay_history: history,
    })
}

fn run_full_euler(
    a: &ComplexMatrix,
    s: &StructureSpace,
    eps: f64,
    delta: f64,
    start: RankOneState,
    opts: &InnerOptions,
) -> Result<InnerResult> {
    let tol_stat = opts.tol_stat_rel * eps.max(f64::MIN_POSITIVE);
    let mut e = start.e();
    let mut es = if delta > 0.0 { start.delta_matrix(s, 1.0)? } else { ComplexMatrix::zeros(e.rows(), e.cols()) };
    let mut t = full_triple(a, eps, delta, &e, &es)?;
    let mut steps = 1usize;
    let mut h = opts.h0.clamp(opts.h_min, opts.h_max);
    let mut streak = 0usize;
    let mut quiet = 0usize;
    let mut history = Vec::new();
    if opts.record_history {
        history.push(HistoryPoint { step: 0, re_lambda: t.lambda.re, h: 0.0 });
    }
    let full_residual = |e: &ComplexMatrix, es: &ComplexMatrix, t: &EigenTriple| -> Result<f64> {
        let g = ComplexMatrix::outer(&t.x, &t.y).scale_real(-1.0);
        let mut r = g.clone();
        r.axpy(C64::new(-g.real_inner(e), 0.0), e);
        let mut res = eps * r.frobenius_norm();
        if delta > 0.0 {
            let pg = s.project(&g)?;
            let mut rs = pg.clone();
            rs.axpy(C64::new(-pg.real_inner(es), 0.0), es);
            res = res.max(delta * rs.frobenius_norm());
        }
        Ok(res)
    };
    let stop = loop {
        if full_residual(&e, &es, &t)? <= tol_stat {
            break StopReason::Stationary;
        }
        if steps >= opts.max_steps {
            break StopReason::Budget;
        }
        let accepted = loop {
            let (ne, nes) = full_update(s, eps, delta, &e, &es, &t, h)?;
            let nt = full_triple(a, eps, delta, &ne, &nes)?;
            steps += 1;
            if nt.lambda.re >= t.lambda.re - slack(opts, t.lambda) {
                break Some((ne, nes, nt));
            }
            h *= opts.shrink;
            streak = 0;
            if h < opts.h_min || steps >= opts.max_steps {
                break None;
            }
        };
        let Some((ne, nes, nt)) = accepted else {
            break if steps >= opts.max_steps { StopReason::Budget } else { StopReason::StepSizeFloor };
        };
        let change = nt.lambda.re - t.lambda.re;
        e = ne;
        es = nes;
        t = nt;
        if opts.record_history {
            history.push(HistoryPoint { step: steps - 1, re_lambda: t.lambda.re, h });
        }
        streak += 1;
        if streak >= 2 {
            h = (h * opts.grow).min(opts.h_max);
            streak = 0;
        }
        if change.abs() < opts.tol_inner {
            quiet += 1;
            if quiet >= opts.patience {
                break StopReason::Stagnated;
            }
        } else {
            quiet = 0;
        }
    };
    // At a stationary point E is a positive multiple of x y*, and E_S is
    // +-eta Pi_S(E); convert to the rank-1 representation.
    let sign = if delta > 0.0 {
        let pe = s.project(&ComplexMatrix::outer(&t.x, &t.y))?;
        if es.real_inner(&pe) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    } else {
        start.sign
    };
    let state = RankOneState::new(a, s, eps, delta, sign, t.x.clone(), t.y.clone())?;
    let grad = reduced_gradient(s, eps, delta, &state)?;
    let residual = stationarity_residual(&state, &grad);
    Ok(InnerResult {
        re_lambda: state.re_lambda(),
        state,
        steps,
        total_steps: steps,
        converged: residual <= tol_stat,
        stop,
        residual,
        decay_history: history,
    })
}

/// Integrates the flow to a stationary point from `init` (warm start) or from
/// `x y*` of `A`. With `delta > 0` and `try_both_signs`, both branches are run;
/// with `restarts > 1`, extra trajectories start from seeded random vectors.
/// The trajectory with the largest `Re lambda` is returned.
pub fn solve_inner(
    a: &ComplexMatrix,
    s: &StructureSpace,
    eps: f64,
    delta: f64,
    init: Option<&RankOneState>,
    opts: &InnerOptions,
) -> Result<InnerResult> {
    let n = check_params(a, s, eps, delta)?;
    if eps <= 0.0 && delta <= 0.0 {
        return Err(Error::InvalidArgument("eps and delta cannot both be zero".into()));
    }
    let base_sign = init.map_or(1.0, |st| st.sign);
    let signs: Vec<f64> = if delta > 0.0 && opts.try_both_signs {
        vec![base_sign, -base_sign]
    } else {
        vec![base_sign]
    };
    let restarts = opts.restarts.max(1);
    let mut jobs = Vec::new();
    for &sign in &signs {
        for r in 0..restarts {
            jobs.push((sign, r));
        }
    }
    let results: Vec<Result<InnerResult>> = jobs
        .par_iter()
        .map(|&(sign, r)| {
            let start = if r == 0 {
                match init {
                    Some(st) => st.rebind(a, s, eps, delta, sign)?,
                    None => RankOneState::cold_start(a, s, eps, delta, sign)?,
                }
            } else {
                let mut g = rng::substream(opts.seed, r as u64);
                let u = rng::unit_vector(&mut g, n);
                let v = rng::unit_vector(&mut g, n);
                RankOneState::new(a, s, eps, delta, sign, u, v)?
            };
            match opts.integrator {
                Integrator::Splitting => run_splitting(a, s, eps, delta, start, opts),
                Integrator::FullEuler => run_full_euler(a, s, eps, delta, start, opts),
            }
        })
        .collect();
    let total: usize = results.iter().filter_map(|r| r.as_ref().ok()).map(|r| r.steps).sum();
    let mut best: Option<InnerResult> = None;
    let mut first_err = None;
    for r in results {
        match r {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.re_lambda > b.re_lambda) {
                    best = Some(r);
                }
            }
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    match best {
        Some(mut b) => {
            b.total_steps = total;
            Ok(b)
        }
        None => Err(first_err.expect("at least one trajectory")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::grcar;
    use crate::structures::Pattern;

    fn grcar_sparsity() -> (ComplexMatrix, StructureSpace) {
        let a = grcar(10, 1.0).unwrap();
        let s = StructureSpace::sparsity_real(Pattern::of_nonzeros(&a).unwrap());
        (a, s)
    }

    #[test]
    fn delta_zero_gradient_is_eps_g() {
        let (a, s) = grcar_sparsity();
        let st = RankOneState::cold_start(&a, &s, 0.5, 0.0, 1.0).unwrap();
        let g = reduced_gradient(&s, 0.5, 0.0, &st).unwrap();
        assert_eq!(g.gtilde, g.g.scale_real(0.5));
        assert!((g.g.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_step_is_identity() {
        let (a, s) = grcar_sparsity();
        let st = RankOneState::cold_start(&a, &s, 0.5, 0.8, 1.0).unwrap();
        let nx = splitting_step(&a, &s, 0.5, 0.8, &st, 0.0).unwrap();
        assert_eq!(nx.u, st.u);
        assert_eq!(nx.v, st.v);
    }

    #[test]
    fn one_step_increases_re_lambda() {
        let (a, s) = grcar_sparsity();
        let st = RankOneState::cold_start(&a, &s, 0.5, 0.8, 1.0).unwrap();
        let nx = splitting_step(&a, &s, 0.5, 0.8, &st, 0.1).unwrap();
        assert!(nx.re_lambda() > st.re_lambda());
        assert!((norm(&nx.u) - 1.0).abs() < 1e-12 && (norm(&nx.v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_functional() {
        let a = ComplexMatrix::from_real_diag(&[-1.0, -2.0]);
        let s = StructureSpace::full_complex(2);
        let st = RankOneState::cold_start(&a, &s, 1e-300, 0.0, 1.0).unwrap();
        assert!((functional(&a, &s, 0.0, 0.0, &st).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_structured_part_is_reported() {
        let a = ComplexMatrix::from_real_diag(&[-1.0, -2.0]);
        let s = StructureSpace::sparsity_real(Pattern::new(2, vec![(0, 0)]).unwrap());
        let e2 = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let r = RankOneState::new(&a, &s, 0.1, 0.1, 1.0, e2.clone(), e2);
        assert!(matches!(r, Err(Error::ZeroStructuredPart { .. })));
    }
}
