//! C ABI for `stabrad`.
//!
//! Objects are opaque handles created by `stabrad_*_new`-style functions and
//! released with the matching `*_free`. Fallible calls return a
//! [`StabradStatus`]; the message of the most recent failure on the calling
//! thread is available from [`stabrad_last_error_message`]. Matrices cross the
//! boundary as separate row-major real and imaginary arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stabrad::inner::{InnerOptions, Integrator};
use stabrad::outer::{self, Mode, OuterConfig, OuterStatus, OuterTrace};
use stabrad::structures::Pattern;
use stabrad::{io, ComplexMatrix, Error, StructureSpace};

/// Dense square complex matrix together with its declared sparsity pattern.
pub struct StabradMatrix {
    a: ComplexMatrix,
    pattern: Pattern,
}

/// Structure space for the perturbation.
pub struct StabradStructure {
    s: StructureSpace,
}

/// Outcome of an outer iteration, with the extremal perturbation.
pub struct StabradRadiusResult {
    trace: OuterTrace,
    e: ComplexMatrix,
    delta: ComplexMatrix,
    theta: ComplexMatrix,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabradStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 3,
    Parse = 4,
    UnsupportedField = 5,
    Io = 6,
    DimensionMismatch = 7,
    NonFinite = 8,
    NotHurwitz = 9,
    TooLarge = 10,
    NonConvergence = 11,
    DegenerateEigenvalue = 12,
    ZeroStructuredPart = 13,
    ZeroStructuredGradient = 14,
    ExceptionalStationaryPoint = 15,
    InvalidStructure = 16,
    ContourEscapesWindow = 17,
    OpenContour = 18,
    StepSizeUnstable = 19,
    Serialization = 20,
    Panic = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabradIntegrator {
    Splitting = 0,
    FullEuler = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabradOuterStatus {
    Converged = 0,
    MaxIterations = 1,
    AlreadyUnstable = 2,
}

/// Which extremal matrix to copy out of a result.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabradPerturbation {
    /// Unit rank-1 direction `E = u v*`.
    E = 0,
    /// Structured perturbation `Delta`.
    Delta = 1,
    /// Unstructured perturbation `Theta = eps E`.
    Theta = 2,
}

/// Solver options; obtain defaults from [`stabrad_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct StabradOptions {
    pub restarts: usize,
    pub both_signs: bool,
    pub seed: u64,
    pub max_inner_steps: usize,
    pub max_outer_iterations: usize,
    pub integrator: StabradIntegrator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> StabradStatus {
    use StabradStatus as S;
    match e {
        Error::InvalidArgument(_) => S::InvalidArgument,
        Error::Parse { .. } => S::Parse,
        Error::UnsupportedField(_) => S::UnsupportedField,
        Error::Io(_) => S::Io,
        Error::DimensionMismatch(_) => S::DimensionMismatch,
        Error::NonFinite => S::NonFinite,
        Error::NotHurwitz { .. } => S::NotHurwitz,
        Error::TooLarge { .. } => S::TooLarge,
        Error::NonConvergence { .. } => S::NonConvergence,
        Error::DegenerateEigenvalue { .. } => S::DegenerateEigenvalue,
        Error::ZeroStructuredPart { .. } => S::ZeroStructuredPart,
        Error::ZeroStructuredGradient { .. } => S::ZeroStructuredGradient,
        Error::ExceptionalStationaryPoint => S::ExceptionalStationaryPoint,
        Error::InvalidStructure(_) => S::InvalidStructure,
        Error::ContourEscapesWindow => S::ContourEscapesWindow,
        Error::OpenContour => S::OpenContour,
        Error::StepSizeUnstable { .. } => S::StepSizeUnstable,
        Error::Json(_) => S::Serialization,
    }
}

/// Runs `f`, recording any error or panic; `Err` carries the status to return.
fn guarded<T>(f: impl FnOnce() -> Result<T, StabradStatus>) -> Result<T, StabradStatus> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(_) => {
            set_error("internal panic".into());
            Err(StabradStatus::Panic)
        }
    }
}

fn fail(e: Error) -> StabradStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn lift<T>(r: stabrad::Result<T>) -> Result<T, StabradStatus> {
    r.map_err(fail)
}

fn null_error() -> StabradStatus {
    set_error("null pointer argument".into());
    StabradStatus::NullPointer
}

fn into_handle<T>(r: Result<T, StabradStatus>) -> *mut T {
    match r {
        Ok(v) => Box::into_raw(Box::new(v)),
        Err(_) => ptr::null_mut(),
    }
}

fn status(r: Result<(), StabradStatus>) -> StabradStatus {
    match r {
        Ok(()) => StabradStatus::Ok,
        Err(s) => s,
    }
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, StabradStatus> {
    p.as_ref().ok_or_else(null_error)
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn stabrad_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn stabrad_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds an `n x n` matrix from row-major arrays; `im` may be NULL for a
/// real matrix. The pattern is the set of nonzero entries.
///
/// # Safety
/// `re` (and `im` when not NULL) must point to `n * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn stabrad_matrix_new(n: usize, re: *const f64, im: *const f64) -> *mut StabradMatrix {
    into_handle(guarded(|| {
        if re.is_null() {
            return Err(null_error());
        }
        if n == 0 {
            return Err(fail(Error::InvalidArgument("n must be positive".into())));
        }
        let re = std::slice::from_raw_parts(re, n * n);
        let im = if im.is_null() { None } else { Some(std::slice::from_raw_parts(im, n * n)) };
        let data = (0..n * n).map(|k| stabrad::C64::new(re[k], im.map_or(0.0, |v| v[k]))).collect();
        let a = lift(ComplexMatrix::from_row_major(n, n, data))?;
        lift(a.ensure_finite())?;
        let pattern = lift(Pattern::of_nonzeros(&a))?;
        Ok(StabradMatrix { a, pattern })
    }))
}

/// `-Grcar(n) - shift I`.
#[no_mangle]
pub extern "C" fn stabrad_matrix_grcar(n: usize, shift: f64) -> *mut StabradMatrix {
    into_handle(guarded(|| {
        let a = lift(io::grcar(n, shift))?;
        let pattern = lift(Pattern::of_nonzeros(&a))?;
        Ok(StabradMatrix { a, pattern })
    }))
}

/// Reads a square Matrix Market file; stored entries, including explicit
/// zeros, form the pattern.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn stabrad_matrix_read_mm(path: *const c_char) -> *mut StabradMatrix {
    into_handle(guarded(|| {
        if path.is_null() {
            return Err(null_error());
        }
        let p = CStr::from_ptr(path).to_string_lossy().into_owned();
        let d = lift(io::read_matrix_market(&p))?;
        let pattern = lift(d.square_pattern())?;
        Ok(StabradMatrix { a: d.matrix, pattern })
    }))
}

/// Dimension `n`, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stabrad_matrix_dim(m: *const StabradMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.a.rows())
}

/// # Safety
/// `m` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stabrad_matrix_free(m: *mut StabradMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Real perturbations on the pattern of `m`.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stabrad_structure_sparsity_real(m: *const StabradMatrix) -> *mut StabradStructure {
    into_handle(guarded(|| Ok(StabradStructure { s: StructureSpace::sparsity_real(borrow(m)?.pattern.clone()) })))
}

/// Complex perturbations on the pattern of `m`.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stabrad_structure_sparsity_complex(m: *const StabradMatrix) -> *mut StabradStructure {
    into_handle(guarded(|| Ok(StabradStructure { s: StructureSpace::sparsity_complex(borrow(m)?.pattern.clone()) })))
}

#[no_mangle]
pub extern "C" fn stabrad_structure_full_real(n: usize) -> *mut StabradStructure {
    Box::into_raw(Box::new(StabradStructure { s: StructureSpace::full_real(n) }))
}

#[no_mangle]
pub extern "C" fn stabrad_structure_full_complex(n: usize) -> *mut StabradStructure {
    Box::into_raw(Box::new(StabradStructure { s: StructureSpace::full_complex(n) }))
}

/// Real Toeplitz matrices with diagonals `-lower..=upper`.
#[no_mangle]
pub extern "C" fn stabrad_structure_toeplitz_real(n: usize, lower: usize, upper: usize) -> *mut StabradStructure {
    into_handle(guarded(|| Ok(StabradStructure { s: lift(StructureSpace::toeplitz_band_real(n, lower, upper))? })))
}

/// # Safety
/// `s` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stabrad_structure_free(s: *mut StabradStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn stabrad_options_default() -> StabradOptions {
    let d = InnerOptions::default();
    StabradOptions {
        restarts: d.restarts,
        both_signs: d.try_both_signs,
        seed: d.seed,
        max_inner_steps: d.max_steps,
        max_outer_iterations: OuterConfig::solve_delta(1.0).k_max,
        integrator: StabradIntegrator::Splitting,
    }
}

unsafe fn configure(mut cfg: OuterConfig, opts: *const StabradOptions) -> OuterConfig {
    let o = opts.as_ref().copied().unwrap_or_else(|| stabrad_options_default());
    cfg.inner.restarts = o.restarts;
    cfg.inner.try_both_signs = o.both_signs;
    cfg.inner.seed = o.seed;
    cfg.inner.max_steps = o.max_inner_steps;
    cfg.inner.integrator = match o.integrator {
        StabradIntegrator::Splitting => Integrator::Splitting,
        StabradIntegrator::FullEuler => Integrator::FullEuler,
    };
    cfg.k_max = o.max_outer_iterations;
    cfg
}

fn finish(trace: OuterTrace, s: &StructureSpace) -> Result<StabradRadiusResult, StabradStatus> {
    let e = trace.state.e();
    let delta = lift(trace.state.delta_matrix(s, trace.delta()))?;
    let theta = trace.state.theta_matrix(trace.eps());
    Ok(StabradRadiusResult { trace, e, delta, theta })
}

unsafe fn solve(
    a: *const StabradMatrix,
    s: *const StabradStructure,
    cfg: OuterConfig,
    opts: *const StabradOptions,
    out: *mut *mut StabradRadiusResult,
) -> StabradStatus {
    status(guarded(|| {
        if out.is_null() {
            return Err(null_error());
        }
        *out = ptr::null_mut();
        let (a, s) = (borrow(a)?, borrow(s)?);
        let cfg = configure(cfg, opts);
        let trace = lift(outer::solve_radius(&a.a, &s.s, &cfg))?;
        *out = Box::into_raw(Box::new(finish(trace, &s.s)?));
        Ok(())
    }))
}

/// Structured radius `delta` for fixed `eps`. `opts` may be NULL for defaults.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stabrad_solve_delta(
    a: *const StabradMatrix,
    s: *const StabradStructure,
    eps: f64,
    opts: *const StabradOptions,
    out: *mut *mut StabradRadiusResult,
) -> StabradStatus {
    solve(a, s, OuterConfig::solve_delta(eps), opts, out)
}

/// Largest `eps` for fixed `delta`. `opts` may be NULL for defaults.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stabrad_solve_eps(
    a: *const StabradMatrix,
    s: *const StabradStructure,
    delta: f64,
    opts: *const StabradOptions,
    out: *mut *mut StabradRadiusResult,
) -> StabradStatus {
    solve(a, s, OuterConfig::solve_eps(delta), opts, out)
}

/// Unstructured stability radius `eps*`.
///
/// # Safety
/// `a` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stabrad_stability_radius(
    a: *const StabradMatrix,
    opts: *const StabradOptions,
    out: *mut *mut StabradRadiusResult,
) -> StabradStatus {
    let n = match a.as_ref() {
        Some(m) => m.a.rows(),
        None => return null_error(),
    };
    let s = StabradStructure { s: StructureSpace::full_complex(n) };
    solve(a, &s, OuterConfig::solve_eps(0.0), opts, out)
}

/// Final `delta` (delta mode) or `eps` (eps mode); NaN for NULL.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stabrad_result_value(r: *const StabradRadiusResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.trace.final_value)
}

/// `eps` of the final state; NaN for NULL.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stabrad_result_eps(r: *const StabradRadiusResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.trace.eps())
}

/// `delta` of the final state; NaN for NULL.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stabrad_result_delta(r: *const StabradRadiusResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.trace.delta())
}

/// True when the result solved for `eps` rather than `delta`.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stabrad_result_is_eps_mode(r: *const StabradRadiusResult) -> bool {
    r.as_ref().is_some_and(|r| r.trace.mode == Mode::SolveEps)
}

/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stabrad_result_status(r: *const StabradRadiusResult) -> StabradOuterStatus {
    match r.as_ref().map(|r| r.trace.status) {
        Some(OuterStatus::MaxIterations) => StabradOuterStatus::MaxIterations,
        Some(OuterStatus::AlreadyUnstable) => StabradOuterStatus::AlreadyUnstable,
        _ => StabradOuterStatus::Converged,
    }
}

/// Number of outer iterations; 0 for NULL.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stabrad_result_iterations(r: *const StabradRadiusResult) -> usize {
    r.as_ref().map_or(0, |r| r.trace.rows.len())
}

/// Row `k` (0-based) of the outer trace. Output pointers may be NULL.
///
/// # Safety
/// `r` must be live; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn stabrad_result_row(
    r: *const StabradRadiusResult,
    k: usize,
    value: *mut f64,
    re_lambda: *mut f64,
    steps: *mut usize,
) -> StabradStatus {
    status(guarded(|| {
        let r = borrow(r)?;
        let row = r
            .trace
            .rows
            .get(k)
            .ok_or_else(|| fail(Error::InvalidArgument(format!("row {k} out of range ({} rows)", r.trace.rows.len()))))?;
        if let Some(p) = value.as_mut() {
            *p = row.value;
        }
        if let Some(p) = re_lambda.as_mut() {
            *p = row.re_lambda;
        }
        if let Some(p) = steps.as_mut() {
            *p = row.steps;
        }
        Ok(())
    }))
}

/// Rightmost eigenvalue of the final perturbed matrix.
///
/// # Safety
/// `r` must be live; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn stabrad_result_eigenvalue(r: *const StabradRadiusResult, re: *mut f64, im: *mut f64) -> StabradStatus {
    status(guarded(|| {
        let r = borrow(r)?;
        if re.is_null() || im.is_null() {
            return Err(null_error());
        }
        *re = r.trace.state.triple.lambda.re;
        *im = r.trace.state.triple.lambda.im;
        Ok(())
    }))
}

/// Copies an extremal matrix into row-major `re` and `im` arrays of `n * n` doubles.
///
/// # Safety
/// `r` must be live; `re` and `im` must hold `n * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn stabrad_result_perturbation(
    r: *const StabradRadiusResult,
    which: StabradPerturbation,
    re: *mut f64,
    im: *mut f64,
) -> StabradStatus {
    status(guarded(|| {
        let r = borrow(r)?;
        if re.is_null() || im.is_null() {
            return Err(null_error());
        }
        let m = match which {
            StabradPerturbation::E => &r.e,
            StabradPerturbation::Delta => &r.delta,
            StabradPerturbation::Theta => &r.theta,
        };
        for (k, z) in m.as_slice().iter().enumerate() {
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
        Ok(())
    }))
}

/// JSON report of the result; release with [`stabrad_string_free`]. NULL on failure.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stabrad_result_to_json(r: *const StabradRadiusResult) -> *mut c_char {
    let r = guarded(|| {
        let r = borrow(r)?;
        let v = lift(io::trace_to_json(&r.trace, serde_json::json!({})))?;
        let s = lift(serde_json::to_string(&v).map_err(Error::from))?;
        Ok(CString::new(s).unwrap_or_default())
    });
    match r {
        Ok(c) => c.into_raw(),
        Err(_) => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stabrad_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `r` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stabrad_result_free(r: *mut StabradRadiusResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
