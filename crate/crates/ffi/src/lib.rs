//! C ABI over `mtkcs`.
//!
//! Every entry point returns an [`MtkcsStatus`]; results go through out
//! pointers. Grids, Riesz operators, problems and solutions are opaque heap
//! handles released by their `_free` function. The message of the last
//! failure on the calling thread is available from
//! [`mtkcs_last_error_message`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::sync::Arc;

use mtkcs::choquard::{
    build_riesz, riesz_form, KirchhoffModel, NonlinearityModel, RieszOperator, DEFAULT_ANGULAR_ORDER,
};
use mtkcs::functionals::{blowup_sweep, threshold};
use mtkcs::kcs::{level_bound, solve, KCSProblem, SolverOptions, SolverState};
use mtkcs::radial::{RadialGrid, Space};
use mtkcs::special::{DimensionParams, SharpConstants};
use mtkcs::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtkcsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    UnsupportedOrder = 4,
    Overflow = 5,
    Normalization = 6,
    Degenerate = 7,
    GridMismatch = 8,
    NoNehariRoot = 9,
    DegenerateRay = 10,
    MaxIterations = 11,
    LineSearchFailure = 12,
    FitFailure = 13,
    Io = 14,
    Panic = 15,
}

impl From<&Error> for MtkcsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => Self::Domain,
            Error::InvalidParameter(_) => Self::InvalidParameter,
            Error::UnsupportedOrder(_) => Self::UnsupportedOrder,
            Error::QuadratureOverflow { .. } => Self::Overflow,
            Error::Normalization { .. } => Self::Normalization,
            Error::Degenerate(_) => Self::Degenerate,
            Error::GridMismatch { .. } => Self::GridMismatch,
            Error::NoNehariRoot { .. } => Self::NoNehariRoot,
            Error::DegenerateRay => Self::DegenerateRay,
            Error::MaxIterations(_) => Self::MaxIterations,
            Error::LineSearchFailure(_) => Self::LineSearchFailure,
            Error::FitFailure(_) => Self::FitFailure,
            Error::Io(_) => Self::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Runs `f`, recording failures and converting panics.
fn guard(f: impl FnOnce() -> Result<(), MtkcsStatus>) -> MtkcsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MtkcsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            MtkcsStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, MtkcsStatus>;
}

impl<T> OrStatus<T> for mtkcs::Result<T> {
    fn or_status(self) -> Result<T, MtkcsStatus> {
        self.map_err(|e| {
            set_error(e.to_string());
            MtkcsStatus::from(&e)
        })
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), MtkcsStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(MtkcsStatus::NullPointer);
    }
    Ok(())
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], MtkcsStatus> {
    non_null(p, what)?;
    Ok(slice::from_raw_parts(p, len))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MtkcsConstants {
    pub omega: f64,
    pub alpha_n: f64,
    pub zeta: f64,
    pub two_nm: f64,
    pub kappa: f64,
    /// NaN unless a Riesz exponent was given.
    pub hls_constant: f64,
}

/// Sharp constants for `(n, m)` with singular exponent `lambda`; pass NaN for
/// `mu` to skip the HLS constant.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_sharp_constants(
    n: u32,
    m: u32,
    lambda: f64,
    mu: f64,
    out: *mut MtkcsConstants,
) -> MtkcsStatus {
    guard(|| {
        non_null(out, "out")?;
        let dims = DimensionParams::new(n, m).or_status()?;
        let c = SharpConstants::compute(dims, lambda, (!mu.is_nan()).then_some(mu)).or_status()?;
        *out = MtkcsConstants {
            omega: c.omega,
            alpha_n: c.alpha_n,
            zeta: c.zeta_nm,
            two_nm: c.two_nm,
            kappa: c.kappa,
            hls_constant: c.hls_c.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Critical coefficient; `full_norm` selects the full-norm space.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_threshold(n: u32, m: u32, lambda: f64, full_norm: bool, out: *mut f64) -> MtkcsStatus {
    guard(|| {
        non_null(out, "out")?;
        let space = if full_norm { Space::Z } else { Space::Y };
        *out = threshold(n, m, lambda, space).or_status()?;
        Ok(())
    })
}

pub struct MtkcsGrid(RadialGrid);

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_grid_new(
    radius: f64,
    points: usize,
    grading: f64,
    out: *mut *mut MtkcsGrid,
) -> MtkcsStatus {
    guard(|| {
        non_null(out, "out")?;
        let grid = RadialGrid::new(radius, points, grading).or_status()?;
        *out = Box::into_raw(Box::new(MtkcsGrid(grid)));
        Ok(())
    })
}

/// # Safety
/// `grid` must be null or come from [`mtkcs_grid_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_grid_free(grid: *mut MtkcsGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of nodes, 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_grid_len(grid: *const MtkcsGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// Copies the nodes into `out`, which must hold `len == mtkcs_grid_len(grid)` values.
///
/// # Safety
/// `grid` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_grid_nodes(grid: *const MtkcsGrid, out: *mut f64, len: usize) -> MtkcsStatus {
    guard(|| {
        non_null(grid, "grid")?;
        non_null(out, "out")?;
        let nodes = (*grid).0.nodes();
        if len != nodes.len() {
            return Err(Error::GridMismatch { expected: nodes.len(), got: len }).or_status();
        }
        ptr::copy_nonoverlapping(nodes.as_ptr(), out, len);
        Ok(())
    })
}

pub struct MtkcsRiesz(Arc<RieszOperator>);

/// Assembles the radial Riesz matrix of order `mu` in dimension `n` on `grid`.
///
/// # Safety
/// `grid` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_riesz_new(
    grid: *const MtkcsGrid,
    mu: f64,
    n: u32,
    out: *mut *mut MtkcsRiesz,
) -> MtkcsStatus {
    guard(|| {
        non_null(grid, "grid")?;
        non_null(out, "out")?;
        let op = build_riesz(mu, n, &(*grid).0, DEFAULT_ANGULAR_ORDER).or_status()?;
        *out = Box::into_raw(Box::new(MtkcsRiesz(Arc::new(op))));
        Ok(())
    })
}

/// # Safety
/// `op` must be null or come from [`mtkcs_riesz_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_riesz_free(op: *mut MtkcsRiesz) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// `D(f, g)` for nodal values `f`, `g` of length `len`.
///
/// # Safety
/// `op` must be a live handle, `f` and `g` valid for `len` reads, `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_riesz_form(
    op: *const MtkcsRiesz,
    f: *const f64,
    g: *const f64,
    len: usize,
    out: *mut f64,
) -> MtkcsStatus {
    guard(|| {
        non_null(op, "op")?;
        non_null(out, "out")?;
        let (f, g) = (input(f, len, "f")?, input(g, len, "g")?);
        *out = riesz_form(&(*op).0, f, g).or_status()?;
        Ok(())
    })
}

pub struct MtkcsProblem(KCSProblem);

/// Kirchhoff-Choquard problem with `m(t) = d0 + d1 t^beta` and power `a`
/// (NaN picks the default for the Kirchhoff model). The operator handle may
/// be freed afterwards.
///
/// # Safety
/// `op` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_problem_new(
    op: *const MtkcsRiesz,
    d0: f64,
    d1: f64,
    beta: f64,
    a: f64,
    out: *mut *mut MtkcsProblem,
) -> MtkcsStatus {
    guard(|| {
        non_null(op, "op")?;
        non_null(out, "out")?;
        let riesz = (*op).0.clone();
        let kirchhoff = KirchhoffModel::new(d0, d1, beta).or_status()?;
        let nonlinearity = if a.is_nan() {
            NonlinearityModel::default_for(riesz.n(), &kirchhoff)
        } else {
            NonlinearityModel::new(a, riesz.n()).or_status()?
        };
        let prob = KCSProblem::new(kirchhoff, nonlinearity, riesz).or_status()?;
        *out = Box::into_raw(Box::new(MtkcsProblem(prob)));
        Ok(())
    })
}

/// # Safety
/// `prob` must be null or come from [`mtkcs_problem_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_problem_free(prob: *mut MtkcsProblem) {
    if !prob.is_null() {
        drop(Box::from_raw(prob));
    }
}

/// Nodal values per component, 0 for a null handle.
///
/// # Safety
/// `prob` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_problem_len(prob: *const MtkcsProblem) -> usize {
    prob.as_ref().map_or(0, |p| p.0.len())
}

/// Discrete energy of the nodal pair `(u, v)`.
///
/// # Safety
/// `prob` must be a live handle, `u` and `v` valid for `len` reads, `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_problem_energy(
    prob: *const MtkcsProblem,
    u: *const f64,
    v: *const f64,
    len: usize,
    out: *mut f64,
) -> MtkcsStatus {
    guard(|| {
        non_null(prob, "prob")?;
        non_null(out, "out")?;
        let (u, v) = (input(u, len, "u")?, input(v, len, "v")?);
        *out = (*prob).0.energy(u, v).or_status()?;
        Ok(())
    })
}

/// Upper bound for the ground-state level.
///
/// # Safety
/// `prob` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_problem_level_bound(prob: *const MtkcsProblem, out: *mut f64) -> MtkcsStatus {
    guard(|| {
        non_null(prob, "prob")?;
        non_null(out, "out")?;
        *out = level_bound(&(*prob).0).or_status()?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MtkcsSolveOptions {
    pub grad_tol: f64,
    pub nehari_tol: f64,
    pub max_iter: usize,
}

/// Defaults used when [`mtkcs_solve`] receives a null options pointer.
#[no_mangle]
pub extern "C" fn mtkcs_solve_options_default() -> MtkcsSolveOptions {
    let d = SolverOptions::default();
    MtkcsSolveOptions { grad_tol: d.grad_tol, nehari_tol: d.nehari.tol, max_iter: d.max_iter }
}

pub struct MtkcsSolution(SolverState);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MtkcsSolveSummary {
    pub energy: f64,
    pub relative_gradient_norm: f64,
    pub nehari_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub positive: bool,
}

/// Ground state from the initial pair `(u, v)` (both of length
/// `mtkcs_problem_len(prob)`).
///
/// # Safety
/// `prob` must be a live handle, `u` and `v` valid for `len` reads, `options`
/// null or valid, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_solve(
    prob: *const MtkcsProblem,
    u: *const f64,
    v: *const f64,
    len: usize,
    options: *const MtkcsSolveOptions,
    out: *mut *mut MtkcsSolution,
) -> MtkcsStatus {
    guard(|| {
        non_null(prob, "prob")?;
        non_null(out, "out")?;
        let (u, v) = (input(u, len, "u")?, input(v, len, "v")?);
        let o = options.as_ref().copied().unwrap_or_else(|| mtkcs_solve_options_default());
        let mut opts = SolverOptions { grad_tol: o.grad_tol, max_iter: o.max_iter, ..SolverOptions::default() };
        opts.nehari.tol = o.nehari_tol;
        let state = solve(&(*prob).0, (u, v), &opts).or_status()?;
        *out = Box::into_raw(Box::new(MtkcsSolution(state)));
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or come from [`mtkcs_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_solution_free(sol: *mut MtkcsSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `sol` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_solution_summary(sol: *const MtkcsSolution, out: *mut MtkcsSolveSummary) -> MtkcsStatus {
    guard(|| {
        non_null(sol, "sol")?;
        non_null(out, "out")?;
        let s = &(*sol).0;
        *out = MtkcsSolveSummary {
            energy: s.energy,
            relative_gradient_norm: s.gradient_norm / s.initial_gradient_norm,
            nehari_residual: s.nehari_residual,
            iterations: s.iterations,
            converged: s.converged,
            positive: s.is_positive(),
        };
        Ok(())
    })
}

/// Copies the nodal solution into `u` and `v`, each of length `len`.
///
/// # Safety
/// `sol` must be a live handle, `u` and `v` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_solution_values(
    sol: *const MtkcsSolution,
    u: *mut f64,
    v: *mut f64,
    len: usize,
) -> MtkcsStatus {
    guard(|| {
        non_null(sol, "sol")?;
        non_null(u, "u")?;
        non_null(v, "v")?;
        let s = &(*sol).0;
        if len != s.u.len() {
            return Err(Error::GridMismatch { expected: s.u.len(), got: len }).or_status();
        }
        ptr::copy_nonoverlapping(s.u.as_ptr(), u, len);
        ptr::copy_nonoverlapping(s.v.as_ptr(), v, len);
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MtkcsBlowupSummary {
    pub theta: f64,
    pub fitted_slope: f64,
    pub expected_lower_bound: f64,
    pub max_min_ratio: f64,
    pub bounded: bool,
    pub pass: bool,
}

/// Functional along the Moser pair sequence at `(1 + epsilon)` times the threshold.
///
/// # Safety
/// `grid` must be a live handle, `ks` valid for `len` reads, `out` for a write.
#[no_mangle]
pub unsafe extern "C" fn mtkcs_blowup_sweep(
    epsilon: f64,
    lambda: f64,
    n: u32,
    grid: *const MtkcsGrid,
    ks: *const u64,
    len: usize,
    out: *mut MtkcsBlowupSummary,
) -> MtkcsStatus {
    guard(|| {
        non_null(grid, "grid")?;
        non_null(ks, "ks")?;
        non_null(out, "out")?;
        let ks = slice::from_raw_parts(ks, len);
        let s = blowup_sweep(epsilon, lambda, n, ks, &(*grid).0).or_status()?;
        *out = MtkcsBlowupSummary {
            theta: s.theta,
            fitted_slope: s.fitted_slope,
            expected_lower_bound: s.expected_lower_bound,
            max_min_ratio: s.max_min_ratio,
            bounded: s.bounded,
            pass: s.pass,
        };
        Ok(())
    })
}
