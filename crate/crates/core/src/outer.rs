//! Outer iteration: hybrid Newton/bisection on the perturbation size.
//!
//! In `SolveDelta` mode `eps` is fixed and the zero of
//! `delta -> Re lambda(delta)` is sought; in `SolveEps` mode `delta` is fixed
//! and the unknown is `eps`.

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner::{solve_inner, InnerOptions, InnerResult, RankOneState, ZERO_STRUCTURED_NORM};
use crate::linalg::{spectral_abscissa, ComplexMatrix, EigenTriple};
use crate::structures::{projected_norm, StructureSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SolveDelta,
    SolveEps,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OuterConfig {
    pub mode: Mode,
    /// `eps` in `SolveDelta` mode, `delta` in `SolveEps` mode.
    pub fixed: f64,
    /// First iterate: `0` for `delta`, `1e-2` for `eps` unless given.
    pub start: Option<f64>,
    /// Initial tolerance; by default a tenth of the change between the first two iterates.
    pub tol0: Option<f64>,
    pub tol_factor: f64,
    pub tol_floor: f64,
    pub k_max: usize,
    pub lb: f64,
    pub ub: f64,
    /// Factor for enlarging the iterate while no upper bound is known.
    pub growth: f64,
    pub inner: InnerOptions,
}

impl OuterConfig {
    pub fn solve_delta(eps: f64) -> Self {
        OuterConfig {
            mode: Mode::SolveDelta,
            fixed: eps,
            start: None,
            tol0: None,
            tol_factor: 1e-2,
            tol_floor: 1e-8,
            k_max: 30,
            lb: 0.0,
            ub: f64::INFINITY,
            growth: 2.0,
            inner: InnerOptions::default(),
        }
    }

    pub fn solve_eps(delta: f64) -> Self {
        OuterConfig {
            mode: Mode::SolveEps,
            fixed: delta,
            ..OuterConfig::solve_delta(0.0)
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match self.mode {
            Mode::SolveDelta if !(self.fixed > 0.0 && self.fixed.is_finite()) => {
                return bad(format!("eps must be positive, got {}", self.fixed))
            }
            Mode::SolveEps if !(self.fixed >= 0.0 && self.fixed.is_finite()) => {
                return bad(format!("delta must be nonnegative, got {}", self.fixed))
            }
            _ => {}
        }
        if let Some(t) = self.tol0 {
            if !(t > 0.0) {
                return bad(format!("tol0 must be positive, got {t}"));
            }
        }
        if !(self.lb >= 0.0) || !(self.lb < self.ub) {
            return bad(format!("invalid bracket [{}, {}]", self.lb, self.ub));
        }
        if self.k_max == 0 {
            return bad("k_max must be positive".into());
        }
        if !(self.growth > 1.0) {
            return bad(format!("growth factor must exceed 1, got {}", self.growth));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Start,
    Newton,
    Bisection,
    Growth,
}

#[derive(Clone, Debug, Serialize)]
pub struct OuterRow {
    pub k: usize,
    /// `delta_k` or `eps_k`.
    pub value: f64,
    pub re_lambda: f64,
    pub steps: usize,
    pub kind: StepKind,
    pub inner_converged: bool,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OuterStatus {
    Converged,
    MaxIterations,
    /// `Re lambda >= 0` already at `delta = 0`: `eps` is not below the stability radius.
    AlreadyUnstable,
}

#[derive(Clone, Debug, Serialize)]
pub struct OuterTrace {
    pub mode: Mode,
    pub fixed: f64,
    pub rows: Vec<OuterRow>,
    pub final_value: f64,
    pub bracket: (f64, f64),
    pub status: OuterStatus,
    pub warnings: Vec<String>,
    /// Stationary state of the last inner solve.
    pub state: RankOneState,
}

impl OuterTrace {
    pub fn eps(&self) -> f64 {
        match self.mode {
            Mode::SolveDelta => self.fixed,
            Mode::SolveEps => self.final_value,
        }
    }

    pub fn delta(&self) -> f64 {
        match self.mode {
            Mode::SolveDelta => self.final_value,
            Mode::SolveEps => self.fixed,
        }
    }
}

/// `phi'(delta) = -kappa ||Pi_S(x y*)||_F`.
pub fn phi_derivative(triple: &EigenTriple, s: &StructureSpace) -> Result<f64> {
    let pn = projected_norm(s, &triple.xy_outer())?;
    if pn < ZERO_STRUCTURED_NORM {
        return Err(Error::ZeroStructuredGradient { norm: pn });
    }
    Ok(-triple.kappa * pn)
}

/// `psi'(eps) = -kappa`.
pub fn psi_derivative(triple: &EigenTriple) -> f64 {
    -triple.kappa
}

/// Fails with `NotHurwitz` unless every eigenvalue has negative real part.
pub fn check_hurwitz(a: &ComplexMatrix) -> Result<f64> {
    a.ensure_square()?;
    a.ensure_finite()?;
    let alpha = spectral_abscissa(a)?;
    if alpha >= 0.0 {
        return Err(Error::NotHurwitz { abscissa: alpha });
    }
    if alpha > -1e-10 {
        warn!("spectral abscissa {alpha:e} is within 1e-10 of the imaginary axis");
    }
    Ok(alpha)
}

fn inner_at(
    a: &ComplexMatrix,
    s: &StructureSpace,
    cfg: &OuterConfig,
    value: f64,
    init: Option<&RankOneState>,
) -> Result<InnerResult> {
    let (eps, delta) = match cfg.mode {
        Mode::SolveDelta => (cfg.fixed, value),
        Mode::SolveEps => (value, cfg.fixed),
    };
    solve_inner(a, s, eps, delta, init, &cfg.inner)
}

/// Newton/bisection iteration for the zero of `Re lambda` as a function of the
/// free parameter, warm-starting each inner solve from the previous one.
pub fn solve_radius(a: &ComplexMatrix, s: &StructureSpace, cfg: &OuterConfig) -> Result<OuterTrace> {
    cfg.validate()?;
    check_hurwitz(a)?;
    let mut warnings = Vec::new();
    let mut lb = cfg.lb;
    let mut ub = cfg.ub;
    let mut value = cfg.start.unwrap_or(match cfg.mode {
        Mode::SolveDelta => 0.0,
        Mode::SolveEps => 1e-2,
    });
    if !(value >= 0.0 && value.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid starting value {value}")));
    }
    let mut kind = StepKind::Start;
    let mut rows: Vec<OuterRow> = Vec::new();
    let mut state: Option<RankOneState> = None;
    let mut prev_re: Option<f64> = None;
    let mut tol: Option<f64> = None;
    let mut k = 0usize;
    let status = loop {
        let res = inner_at(a, s, cfg, value, state.as_ref())?;
        let re = res.re_lambda;
        if !res.converged {
            warnings.push(format!(
                "inner iteration at k = {k} stopped ({:?}) with residual {:.3e}",
                res.stop, res.residual
            ));
        }
        if res.state.triple.near_multiple() {
            warnings.push(format!(
                "rightmost eigenvalue at k = {k} is nearly multiple (separation {:.3e})",
                res.state.triple.separation
            ));
        }
        if re > 0.0 {
            ub = ub.min(value);
        } else {
            lb = lb.max(value);
        }
        info!("k = {k}: value = {value:.15e}, Re lambda = {re:.8e}, steps = {}", res.steps);
        rows.push(OuterRow {
            k: k + 1,
            value,
            re_lambda: re,
            steps: res.steps,
            kind,
            inner_converged: res.converged,
            lb,
            ub,
        });
        let triple = res.state.triple.clone();
        state = Some(res.state);

        if k == 0 && cfg.mode == Mode::SolveDelta && value == 0.0 && re >= 0.0 {
            warnings.push(format!(
                "Re lambda = {re:e} >= 0 at delta = 0: eps = {} is not below the stability radius",
                cfg.fixed
            ));
            break OuterStatus::AlreadyUnstable;
        }
        if let Some(prev) = prev_re {
            let t = match tol {
                None => cfg.tol0.unwrap_or((re - prev).abs() / 10.0),
                Some(t) => (cfg.tol_factor * t).max(cfg.tol_floor),
            };
            tol = Some(t);
            if (re - prev).abs() < t {
                break OuterStatus::Converged;
            }
        }
        if re == 0.0 {
            break OuterStatus::Converged;
        }
        if k + 1 >= cfg.k_max {
            warnings.push("maximum number of outer iterations reached".into());
            break OuterStatus::MaxIterations;
        }

        // Re lambda increases with the parameter; its slope is -phi' or -psi'.
        let slope = match cfg.mode {
            Mode::SolveDelta => phi_derivative(&triple, s).map(|d| -d),
            Mode::SolveEps => Ok(-psi_derivative(&triple)),
        };
        let newton = match slope {
            Ok(sl) if sl > 0.0 && sl.is_finite() => Some(value - re / sl),
            Ok(_) => None,
            Err(e) => {
                warnings.push(format!("k = {k}: {e}; bisecting"));
                None
            }
        };
        let (next, next_kind) = match newton {
            Some(nv) if nv.is_finite() && nv >= lb && nv <= ub && nv > 0.0 => (nv, StepKind::Newton),
            _ if ub.is_finite() => (0.5 * (lb + ub), StepKind::Bisection),
            Some(nv) if nv.is_finite() && nv > lb => (nv, StepKind::Newton),
            _ => {
                let base = if lb > 0.0 { lb } else { value.max(1e-2) };
                (base * cfg.growth, StepKind::Growth)
            }
        };
        prev_re = Some(re);
        value = next;
        kind = next_kind;
        k += 1;
    };
    let final_value = rows.last().map(|r| r.value).expect("at least one row");
    Ok(OuterTrace {
        mode: cfg.mode,
        fixed: cfg.fixed,
        rows,
        final_value,
        bracket: (lb, ub),
        status,
        warnings,
        state: state.expect("at least one inner solve"),
    })
}

/// Unstructured stability radius `eps*`: the zero of `eps -> alpha_eps(A)`,
/// computed by the dual iteration with `delta = 0`.
pub fn stability_radius(a: &ComplexMatrix, inner: &InnerOptions) -> Result<OuterTrace> {
    let n = a.ensure_square()?;
    let s = StructureSpace::full_complex(n);
    let mut cfg = OuterConfig::solve_eps(0.0);
    cfg.inner = inner.clone();
    solve_radius(a, &s, &cfg)
}
