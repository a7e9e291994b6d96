//! C interface to `cbound`.
//!
//! Every function returns a [`CbStatus`]; results come back through out
//! pointers. Potentials and results are opaque handles owned by the caller
//! and released with the matching `*_free` function. After a failure,
//! [`cb_last_error`] describes what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cbound::analysis::zero_report;
use cbound::darboux::{build_family, DarbouxParams, SeedSpec};
use cbound::io::{to_json_string, ResultDocument};
use cbound::solver::{solve, BoundStateResult, Method, PhaseRule, RealityTolerance, SolveOptions, DEFAULT_STEP};
use cbound::{Error, Grid, PotentialSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbStatus {
    Ok = 0,
    /// A null pointer, bad UTF-8 or out-of-range index.
    InvalidArgument = 1,
    /// Rejected parameters or configuration.
    Config = 2,
    /// The computation failed numerically.
    Numerical = 3,
    /// A Rust panic was caught at the boundary.
    Internal = 4,
}

/// Solver method selector for [`CbSolveOptions`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CbMethod {
    Auto = 0,
    Transfer = 1,
    Shooting = 2,
}

/// Options for [`cb_solve`]. NaN fields mean "use the default".
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CbSolveOptions {
    pub method: CbMethod,
    pub window_lo: f64,
    pub window_hi: f64,
    pub x_trunc: f64,
    pub step: f64,
    pub reality_accept: f64,
    pub reality_warn: f64,
    pub residual_tol: f64,
    /// Global phase applied to every state (radians).
    pub phase: f64,
}

pub struct CbPotential(PotentialSpec);

pub struct CbResult {
    spec: PotentialSpec,
    result: BoundStateResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: CbStatus, msg: impl Into<String>) -> CbStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> CbStatus {
    let status = if e.exit_code() == 3 { CbStatus::Numerical } else { CbStatus::Config };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> CbStatus) -> CbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(CbStatus::Internal, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, CbStatus> {
    if p.is_null() {
        return Err(fail(CbStatus::InvalidArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(CbStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

macro_rules! non_null {
    ($p:expr, $what:literal) => {
        if $p.is_null() {
            return fail(CbStatus::InvalidArgument, concat!($what, " is null"));
        }
    };
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn cb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Potential from a JSON spec document (`{"family": ..., "params": {...}}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_potential_from_json(json: *const c_char, out: *mut *mut CbPotential) -> CbStatus {
    guard(|| {
        non_null!(out, "out");
        let text = match str_arg(json, "json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match serde_json::from_str::<PotentialSpec>(text) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(CbPotential(spec)));
                CbStatus::Ok
            }
            Err(e) => fail(CbStatus::Config, e.to_string()),
        }
    })
}

/// Potential from a catalog preset name such as `"sinusoidal-paper"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_potential_preset(name: *const c_char, out: *mut *mut CbPotential) -> CbStatus {
    guard(|| {
        non_null!(out, "out");
        let name = match str_arg(name, "name") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cbound::potentials::preset(name) {
            Some(p) => {
                *out = Box::into_raw(Box::new(CbPotential(p.spec)));
                CbStatus::Ok
            }
            None => fail(CbStatus::Config, format!("unknown preset `{name}`")),
        }
    })
}

/// `V(x)`.
///
/// # Safety
/// `p` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_potential_eval(p: *const CbPotential, x: f64, re: *mut f64, im: *mut f64) -> CbStatus {
    guard(|| {
        non_null!(p, "potential");
        non_null!(re, "re");
        non_null!(im, "im");
        match (*p).0.eval(x) {
            Ok(v) => {
                *re = v.re;
                *im = v.im;
                CbStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `p` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn cb_potential_free(p: *mut CbPotential) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

#[no_mangle]
pub extern "C" fn cb_solve_options_default() -> CbSolveOptions {
    let r = RealityTolerance::default();
    CbSolveOptions {
        method: CbMethod::Auto,
        window_lo: f64::NAN,
        window_hi: f64::NAN,
        x_trunc: f64::NAN,
        step: DEFAULT_STEP,
        reality_accept: r.accept,
        reality_warn: r.warn,
        residual_tol: 1e-4,
        phase: 0.0,
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Bound states of `p`. `opts` may be null for defaults.
///
/// # Safety
/// `p` must be a live handle, `opts` null or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cb_solve(p: *const CbPotential, opts: *const CbSolveOptions, out: *mut *mut CbResult) -> CbStatus {
    guard(|| {
        non_null!(p, "potential");
        non_null!(out, "out");
        let o = if opts.is_null() { cb_solve_options_default() } else { *opts };
        let window = match (finite(o.window_lo), finite(o.window_hi)) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        };
        let options = SolveOptions {
            method: match o.method {
                CbMethod::Auto => None,
                CbMethod::Transfer => Some(Method::Transfer),
                CbMethod::Shooting => Some(Method::Shooting),
            },
            window,
            region: None,
            x_trunc: finite(o.x_trunc),
            h: o.step,
            reality: RealityTolerance { accept: o.reality_accept, warn: o.reality_warn },
            residual_tol: o.residual_tol,
            phase: PhaseRule::Raw(o.phase),
        };
        let spec = (*p).0.clone();
        match solve(&spec, &options) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(CbResult { spec, result }));
                CbStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Darboux partner of the oscillator with states `ψ₀..=ψ_levels` on a
/// symmetric grid of the given half-width and spacing.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_darboux(
    c0: f64,
    c1: f64,
    lambda: f64,
    levels: usize,
    half_width: f64,
    step: f64,
    out: *mut *mut CbResult,
) -> CbStatus {
    guard(|| {
        non_null!(out, "out");
        let grid = match Grid::symmetric(half_width, step) {
            Ok(g) => g,
            Err(e) => return from_error(e),
        };
        match build_family(&SeedSpec::HarmonicOscillator, DarbouxParams::new(c0, c1, lambda), &grid, levels) {
            Ok(fam) => {
                let mut result = BoundStateResult::empty(Method::Analytic);
                for s in &fam.states {
                    result.energies.push(s.energy);
                    result.residuals.push(cbound::analysis::residual_oracle(&fam.potential, s, s.energy).value);
                    result.diagnostics.imag_energies.push(0.0);
                }
                result.states = fam.states;
                *out = Box::into_raw(Box::new(CbResult { spec: fam.potential, result }));
                CbStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Number of bound states in `r`, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cb_result_len(r: *const CbResult) -> usize {
    if r.is_null() {
        0
    } else {
        (*r).result.len()
    }
}

unsafe fn state<'a>(r: *const CbResult, i: usize) -> Result<&'a cbound::solver::WaveFunction, CbStatus> {
    if r.is_null() {
        return Err(fail(CbStatus::InvalidArgument, "result is null"));
    }
    let r = &*r;
    r.result.states.get(i).ok_or_else(|| fail(CbStatus::InvalidArgument, format!("state index {i} out of range")))
}

/// Energy and residual of state `i`.
///
/// # Safety
/// `r` must be a live handle; `energy` writable; `residual` null or writable.
#[no_mangle]
pub unsafe extern "C" fn cb_result_energy(r: *const CbResult, i: usize, energy: *mut f64, residual: *mut f64) -> CbStatus {
    guard(|| {
        non_null!(energy, "energy");
        if let Err(s) = state(r, i) {
            return s;
        }
        let res = &(*r).result;
        *energy = res.energies[i];
        if !residual.is_null() {
            *residual = res.residuals[i];
        }
        CbStatus::Ok
    })
}

/// Number of grid points of state `i`.
///
/// # Safety
/// `r` must be a live handle; `n` writable.
#[no_mangle]
pub unsafe extern "C" fn cb_result_state_len(r: *const CbResult, i: usize, n: *mut usize) -> CbStatus {
    guard(|| {
        non_null!(n, "n");
        match state(r, i) {
            Ok(wf) => {
                *n = wf.grid.len();
                CbStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Copies the samples of state `i` into caller buffers of length `n`, which
/// must equal [`cb_result_state_len`]. Any buffer may be null to skip it.
///
/// # Safety
/// Non-null buffers must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn cb_result_state_copy(
    r: *const CbResult,
    i: usize,
    x: *mut f64,
    re: *mut f64,
    im: *mut f64,
    n: usize,
) -> CbStatus {
    guard(|| {
        let wf = match state(r, i) {
            Ok(w) => w,
            Err(s) => return s,
        };
        if n != wf.grid.len() {
            return fail(CbStatus::InvalidArgument, format!("buffer length {n}, state has {} points", wf.grid.len()));
        }
        for (k, xk) in wf.grid.points().enumerate() {
            if !x.is_null() {
                *x.add(k) = xk;
            }
            if !re.is_null() {
                *re.add(k) = wf.psi[k].re;
            }
            if !im.is_null() {
                *im.add(k) = wf.psi[k].im;
            }
        }
        CbStatus::Ok
    })
}

/// Zero counts of `e^{iθ}ψ_i` and whether its zeros interlace.
///
/// # Safety
/// `r` must be a live handle; out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn cb_result_zero_counts(
    r: *const CbResult,
    i: usize,
    theta: f64,
    n_r: *mut usize,
    n_i: *mut usize,
    interlaced: *mut c_int,
) -> CbStatus {
    guard(|| {
        non_null!(n_r, "n_r");
        non_null!(n_i, "n_i");
        non_null!(interlaced, "interlaced");
        let wf = match state(r, i) {
            Ok(w) => w,
            Err(s) => return s,
        };
        let z = zero_report(&wf.rotated(theta));
        *n_r = z.n_r;
        *n_i = z.n_i;
        *interlaced = c_int::from(z.interlaced);
        CbStatus::Ok
    })
}

/// The result as a versioned JSON document; free with [`cb_string_free`].
///
/// # Safety
/// `r` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cb_result_to_json(r: *const CbResult, out: *mut *mut c_char) -> CbStatus {
    guard(|| {
        non_null!(r, "result");
        non_null!(out, "out");
        let doc = ResultDocument::new((*r).spec.clone(), (*r).result.clone());
        match to_json_string(&doc) {
            Ok(s) => {
                *out = CString::new(s).expect("JSON has no NUL").into_raw();
                CbStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `r` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn cb_result_free(r: *mut CbResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
