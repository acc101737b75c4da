//! C ABI for `subfrac`.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`SubfracStatus`] and writes its result
//!   through an out-pointer. On failure the out-pointer is left untouched and a
//!   message is available from [`subfrac_last_error_message`] on the same thread.
//! * Objects are opaque handles created by `*_new`-style functions or as outputs
//!   and released with the matching `*_free`. Freeing `NULL` is a no-op.
//! * Panics never cross the boundary; they are reported as `SUBFRAC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::str::FromStr;
use std::sync::Arc;

use subfrac::operators::{
    substantial_caputo_derivative, substantial_integral, substantial_rl_derivative,
};
use subfrac::special::{gamma, mittag_leffler, MlSeriesConfig};
use subfrac::volterra::{
    existence_h, solve, HorizonPolicy, Hypotheses, IvpProblem, Method, Rhs, Solution, SolverConfig,
};
use subfrac::{
    Error, Grid, GridFunction, InitialData, OperatorParams, PowerExpSpec, QuadratureConfig, Scheme,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubfracStatus {
    Ok = 0,
    /// A parameter, grid or data value was rejected.
    InvalidArgument = 1,
    /// The argument lies outside the domain of the function (poles, t below a, ...).
    Domain = 2,
    /// A numerical procedure failed (overflow, non-convergence, non-finite values).
    Numerical = 3,
    /// The requested horizon exceeds the guaranteed existence interval.
    OutsideExistence = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Operator parameters: tempering `sigma`, power `rho > 0`, order `alpha > 0`, lower limit `a >= 0`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SubfracParams {
    pub sigma: f64,
    pub rho: f64,
    pub alpha: f64,
    pub a: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubfracScheme {
    ProductTrapezoid = 0,
    ProductRectangle = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubfracMethod {
    Picard = 0,
    ProductStep = 1,
}

/// Tube radius `K`, existence bound `h*`, bound `M` on |f| in the tube, Lipschitz constant `L`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SubfracHypotheses {
    pub tube_radius: f64,
    pub h_star: f64,
    pub rhs_bound: f64,
    pub lipschitz: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SubfracSolverOptions {
    /// Number of grid intervals.
    pub n: usize,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub corrector_iters: usize,
    pub method: SubfracMethod,
    /// Nonzero to solve even when `h` exceeds the guaranteed existence interval.
    pub allow_outside_existence: u8,
}

/// Right-hand side `f(t, y)` supplied by the caller; `user_data` is passed through unchanged.
pub type SubfracRhsFn = Option<unsafe extern "C" fn(t: f64, y: f64, user_data: *mut c_void) -> f64>;

/// Values of a function on a grid uniform in `u = t^rho`.
pub struct SubfracGridFunction(GridFunction);

/// Result of an initial value problem solve.
pub struct SubfracSolution(Solution, SubfracGridFunction);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> SubfracStatus {
    match err {
        Error::Pole(_) | Error::Domain(_) => SubfracStatus::Domain,
        Error::OutsideExistence { .. } => SubfracStatus::OutsideExistence,
        e if e.is_numerical() => SubfracStatus::Numerical,
        _ => SubfracStatus::InvalidArgument,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `body`, translating errors and panics into a status and the thread-local message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SubfracStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SubfracStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} must not be NULL"));
            SubfracStatus::NullPointer
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SubfracStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn to_params(p: &SubfracParams) -> Result<OperatorParams, Failure> {
    Ok(OperatorParams::new(p.sigma, p.rho, p.alpha, p.a)?)
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Copies the calling thread's last error message (NUL-terminated, truncated to `capacity`).
///
/// Returns the full message length in bytes excluding the terminator, so a
/// caller can retry with a larger buffer. `buffer` may be NULL when `capacity` is 0.
///
/// # Safety
/// `buffer` must point to at least `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn subfrac_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buffer.is_null() && capacity > 0 {
            let n = msg.len().min(capacity - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buffer, n);
            *buffer.add(n) = 0;
        }
        msg.len()
    })
}

/// Gamma function.
///
/// # Safety
/// `out` must be a valid pointer to a `double`.
#[no_mangle]
pub unsafe extern "C" fn subfrac_gamma(x: f64, out: *mut f64) -> SubfracStatus {
    guard(|| write(out, gamma(x)?, "out"))
}

/// One-parameter Mittag-Leffler function `E_alpha(z)` with the default series settings.
///
/// # Safety
/// `out` must be a valid pointer to a `double`.
#[no_mangle]
pub unsafe extern "C" fn subfrac_mittag_leffler(
    alpha: f64,
    z: f64,
    out: *mut f64,
) -> SubfracStatus {
    guard(|| {
        write(
            out,
            mittag_leffler(alpha, z, &MlSeriesConfig::default())?,
            "out",
        )
    })
}

/// Samples `e^{-sigma t^rho} (t^rho - a^rho)^beta` on `n` intervals of `[a, t_end]`.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn subfrac_power_exp_new(
    params: *const SubfracParams,
    beta: f64,
    t_end: f64,
    n: usize,
    out: *mut *mut SubfracGridFunction,
) -> SubfracStatus {
    guard(|| {
        let p = to_params(deref(params, "params")?)?;
        let grid = Arc::new(Grid::for_params(&p, t_end, n)?);
        let f = PowerExpSpec::new(beta, p)?.sample(grid)?;
        write(out, boxed(SubfracGridFunction(f)), "out")
    })
}

/// Wraps `len = n + 1` values given at the nodes of the `n`-interval grid on `[a, t_end]`.
///
/// # Safety
/// `params` and `out` must be valid; `values` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn subfrac_grid_function_new(
    params: *const SubfracParams,
    t_end: f64,
    values: *const f64,
    len: usize,
    out: *mut *mut SubfracGridFunction,
) -> SubfracStatus {
    guard(|| {
        let p = to_params(deref(params, "params")?)?;
        let v = slice(values, len, "values")?;
        if len < 2 {
            return Err(Error::InvalidData(format!("need at least 2 values, got {len}")).into());
        }
        let grid = Arc::new(Grid::for_params(&p, t_end, len - 1)?);
        let f = GridFunction::new(grid, v.to_vec())?;
        write(out, boxed(SubfracGridFunction(f)), "out")
    })
}

/// Number of nodes (`n + 1`); 0 for NULL.
///
/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subfrac_grid_function_len(f: *const SubfracGridFunction) -> usize {
    f.as_ref().map_or(0, |f| f.0.values().len())
}

/// Copies nodes and values into caller buffers of length `len`, which must equal the node count.
/// Either buffer may be NULL to skip it.
///
/// # Safety
/// `f` must be a live handle; non-NULL buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn subfrac_grid_function_copy(
    f: *const SubfracGridFunction,
    t_out: *mut f64,
    values_out: *mut f64,
    len: usize,
) -> SubfracStatus {
    guard(|| {
        let f = &deref(f, "f")?.0;
        if len != f.values().len() {
            return Err(Error::InvalidData(format!(
                "buffer length {len} does not match {} nodes",
                f.values().len()
            ))
            .into());
        }
        if !t_out.is_null() {
            ptr::copy_nonoverlapping(f.grid().nodes().as_ptr(), t_out, len);
        }
        if !values_out.is_null() {
            ptr::copy_nonoverlapping(f.values().as_ptr(), values_out, len);
        }
        Ok(())
    })
}

/// # Safety
/// `f` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn subfrac_grid_function_free(f: *mut SubfracGridFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

type OperatorFn =
    fn(&OperatorParams, &GridFunction, &QuadratureConfig) -> subfrac::Result<GridFunction>;

unsafe fn apply(
    op: OperatorFn,
    params: *const SubfracParams,
    f: *const SubfracGridFunction,
    scheme: SubfracScheme,
    out: *mut *mut SubfracGridFunction,
) -> SubfracStatus {
    guard(|| {
        let p = to_params(deref(params, "params")?)?;
        let f = &deref(f, "f")?.0;
        let scheme = match scheme {
            SubfracScheme::ProductTrapezoid => Scheme::ProductTrapezoid,
            SubfracScheme::ProductRectangle => Scheme::ProductRectangle,
        };
        let cfg = QuadratureConfig::new(scheme, 2)?;
        let result = op(&p, f, &cfg)?;
        write(out, boxed(SubfracGridFunction(result)), "out")
    })
}

/// Generalized substantial integral of order `params->alpha`.
///
/// # Safety
/// `params`, `f` and `out` must be valid; `f` must live on the grid of `params`.
#[no_mangle]
pub unsafe extern "C" fn subfrac_integral(
    params: *const SubfracParams,
    f: *const SubfracGridFunction,
    scheme: SubfracScheme,
    out: *mut *mut SubfracGridFunction,
) -> SubfracStatus {
    apply(substantial_integral, params, f, scheme, out)
}

/// Riemann-Liouville type derivative.
///
/// # Safety
/// As for [`subfrac_integral`].
#[no_mangle]
pub unsafe extern "C" fn subfrac_rl_derivative(
    params: *const SubfracParams,
    f: *const SubfracGridFunction,
    scheme: SubfracScheme,
    out: *mut *mut SubfracGridFunction,
) -> SubfracStatus {
    apply(substantial_rl_derivative, params, f, scheme, out)
}

/// Caputo type derivative.
///
/// # Safety
/// As for [`subfrac_integral`].
#[no_mangle]
pub unsafe extern "C" fn subfrac_caputo_derivative(
    params: *const SubfracParams,
    f: *const SubfracGridFunction,
    scheme: SubfracScheme,
    out: *mut *mut SubfracGridFunction,
) -> SubfracStatus {
    apply(substantial_caputo_derivative, params, f, scheme, out)
}

fn to_hypotheses(h: &SubfracHypotheses) -> Hypotheses {
    Hypotheses {
        tube_radius: h.tube_radius,
        h_star: h.h_star,
        rhs_bound: h.rhs_bound,
        lipschitz: h.lipschitz,
    }
}

/// Guaranteed existence horizon `min{h*, h~, (Gamma(alpha+1) K / M)^{1/(rho alpha)}}`.
///
/// `h_tilde` must lie strictly below `(Gamma(alpha+1)/L)^{1/(rho alpha)}`;
/// `params->a` must be 0.
///
/// # Safety
/// `params`, `hyp` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn subfrac_existence_h(
    params: *const SubfracParams,
    hyp: *const SubfracHypotheses,
    h_tilde: f64,
    out: *mut f64,
) -> SubfracStatus {
    guard(|| {
        let p = to_params(deref(params, "params")?)?;
        let hyp = to_hypotheses(deref(hyp, "hyp")?);
        let initial = InitialData::new(vec![0.0; p.m()])?;
        let problem = IvpProblem::new(p, Rhs::Zero, initial, hyp)?;
        write(out, existence_h(&problem, h_tilde)?, "out")
    })
}

struct Callback {
    f: unsafe extern "C" fn(f64, f64, *mut c_void) -> f64,
    user_data: *mut c_void,
}

impl Callback {
    fn call(&self, t: f64, y: f64) -> f64 {
        // SAFETY: the caller of `subfrac_solve` guarantees `f` and `user_data` stay valid
        unsafe { (self.f)(t, y, self.user_data) }
    }
}

// SAFETY: the solver calls the callback only from the thread that called
// `subfrac_solve` and only while that call runs; the caller owns `user_data`.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

#[allow(clippy::too_many_arguments)]
unsafe fn solve_with(
    params: *const SubfracParams,
    rhs: Rhs,
    b: *const f64,
    b_len: usize,
    hyp: *const SubfracHypotheses,
    h: f64,
    options: *const SubfracSolverOptions,
    out: *mut *mut SubfracSolution,
) -> Result<(), Failure> {
    let p = to_params(deref(params, "params")?)?;
    let hyp = to_hypotheses(deref(hyp, "hyp")?);
    let opts = deref(options, "options")?;
    let initial = InitialData::new(slice(b, b_len, "b")?.to_vec())?;
    let problem = IvpProblem::new(p, rhs, initial, hyp)?;
    let cfg = SolverConfig {
        n: opts.n,
        picard_tol: opts.picard_tol,
        picard_max_iters: opts.picard_max_iters,
        corrector_iters: opts.corrector_iters,
        horizon: if opts.allow_outside_existence != 0 {
            HorizonPolicy::Allow
        } else {
            HorizonPolicy::Enforce
        },
        estimate_error: true,
    };
    let method = match opts.method {
        SubfracMethod::Picard => Method::Picard,
        SubfracMethod::ProductStep => Method::ProductStep,
    };
    let sol = solve(&problem, h, &cfg, method)?;
    let values = SubfracGridFunction(sol.grid_fn.clone());
    write(out, boxed(SubfracSolution(sol, values)), "out")
}

/// Default solver options: 256 intervals, Picard with tolerance 1e-10 and 100 sweeps, 2 corrector passes.
#[no_mangle]
pub extern "C" fn subfrac_solver_options_default() -> SubfracSolverOptions {
    let d = SolverConfig::default();
    SubfracSolverOptions {
        n: d.n,
        picard_tol: d.picard_tol,
        picard_max_iters: d.picard_max_iters,
        corrector_iters: d.corrector_iters,
        method: SubfracMethod::Picard,
        allow_outside_existence: 0,
    }
}

/// Solves the Caputo-type problem `D y = f(t, y)`, `y^(k)(0) = b[k]`, on `[0, h]`
/// with a caller-supplied right-hand side. `b_len` must equal `ceil(alpha)`.
///
/// # Safety
/// All pointers must be valid; `b` must hold `b_len` doubles. `f` is invoked on the
/// calling thread during this call only.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn subfrac_solve(
    params: *const SubfracParams,
    f: SubfracRhsFn,
    user_data: *mut c_void,
    b: *const f64,
    b_len: usize,
    hyp: *const SubfracHypotheses,
    h: f64,
    options: *const SubfracSolverOptions,
    out: *mut *mut SubfracSolution,
) -> SubfracStatus {
    guard(|| {
        let f = f.ok_or(Failure::Null("f"))?;
        let cb = Callback { f, user_data };
        let rhs = Rhs::custom(move |t, y| cb.call(t, y));
        solve_with(params, rhs, b, b_len, hyp, h, options, out)
    })
}

/// As [`subfrac_solve`] with a built-in right-hand side:
/// `"zero"`, `"linear:<l>"`, `"example2"` or `"shifted:<l>:<c>"`.
///
/// # Safety
/// `rhs` must be a NUL-terminated string; other pointers as for [`subfrac_solve`].
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn subfrac_solve_builtin(
    params: *const SubfracParams,
    rhs: *const c_char,
    b: *const f64,
    b_len: usize,
    hyp: *const SubfracHypotheses,
    h: f64,
    options: *const SubfracSolverOptions,
    out: *mut *mut SubfracSolution,
) -> SubfracStatus {
    guard(|| {
        if rhs.is_null() {
            return Err(Failure::Null("rhs"));
        }
        let text = CStr::from_ptr(rhs)
            .to_str()
            .map_err(|_| Error::InvalidParams("rhs is not valid UTF-8".into()))?;
        solve_with(params, Rhs::from_str(text)?, b, b_len, hyp, h, options, out)
    })
}

/// Borrowed view of the solution values; valid until the solution is freed.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subfrac_solution_values(
    s: *const SubfracSolution,
) -> *const SubfracGridFunction {
    s.as_ref().map_or(ptr::null(), |s| &s.1 as *const _)
}

/// Picard sweeps, or corrector passes per node for the marching scheme; 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subfrac_solution_iterations(s: *const SubfracSolution) -> usize {
    s.as_ref().map_or(0, |s| s.0.iterations_used)
}

/// Largest observed ratio of successive fixed-point updates; NaN for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subfrac_solution_contraction_estimate(s: *const SubfracSolution) -> f64 {
    s.as_ref().map_or(f64::NAN, |s| s.0.contraction_estimate)
}

/// Max difference to the half-grid solution at shared nodes; NaN for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn subfrac_solution_error_estimate(s: *const SubfracSolution) -> f64 {
    s.as_ref().map_or(f64::NAN, |s| s.0.error_estimate)
}

/// # Safety
/// `s` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn subfrac_solution_free(s: *mut SubfracSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
