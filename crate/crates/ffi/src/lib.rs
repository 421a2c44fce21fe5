//! C interface to `relstandby-core`.
//!
//! A system is built from the same JSON run configuration the command-line
//! tool reads and is referred to through an opaque handle. Every call
//! returns a [`RelstandbyStatus`]; on failure the message is available from
//! [`relstandby_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use relstandby_core::config::RunConfig;
use relstandby_core::engine::{EvalConfig, EvalPath, Estimate};
use relstandby_core::mrl::{psi1, psi2, psi3};
use relstandby_core::reliability::{cost_rates, mttf, survival_kn, survival_t, Lifetime};
use relstandby_core::simulate::{simulate_metrics_with, Target};
use relstandby_core::{Error, SystemSpec};

/// Opaque system handle.
pub struct RelstandbySystem {
    spec: SystemSpec,
    eval: EvalConfig,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelstandbyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Domain = 4,
    Unsupported = 5,
    NonConvergence = 6,
    Validity = 7,
    NullConditioning = 8,
    Simulation = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelstandbyPath {
    ClosedForm = 0,
    Quadrature = 1,
    FactoredQuadrature = 2,
    MonteCarlo = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelstandbyEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub path: RelstandbyPath,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelstandbyCostRates {
    pub unit_cost: f64,
    pub mttf_bare: RelstandbyEstimate,
    pub mttf_standby: RelstandbyEstimate,
    pub cost_rate_bare: f64,
    pub cost_rate_standby: f64,
}

impl From<Estimate> for RelstandbyEstimate {
    fn from(e: Estimate) -> Self {
        let path = match e.path {
            EvalPath::ClosedForm => RelstandbyPath::ClosedForm,
            EvalPath::Quadrature => RelstandbyPath::Quadrature,
            EvalPath::FactoredQuadrature => RelstandbyPath::FactoredQuadrature,
            EvalPath::MonteCarlo => RelstandbyPath::MonteCarlo,
        };
        Self { value: e.value, error_bound: e.error_bound, path }
    }
}

fn status_of(e: &Error) -> RelstandbyStatus {
    match e {
        Error::Domain(_) | Error::Dimension { .. } => RelstandbyStatus::Domain,
        Error::Unsupported(_) => RelstandbyStatus::Unsupported,
        Error::InvalidParameter(_) => RelstandbyStatus::InvalidArgument,
        Error::NonConvergence { .. } | Error::NanIntegrand { .. } => RelstandbyStatus::NonConvergence,
        Error::Validation(_) | Error::ImproperDensity { .. } => RelstandbyStatus::Validity,
        Error::NullConditioning { .. } => RelstandbyStatus::NullConditioning,
        Error::Efficiency { .. } | Error::InsufficientConditioning { .. } => RelstandbyStatus::Simulation,
        Error::Config(_) => RelstandbyStatus::Config,
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(RelstandbyStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RelstandbyStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard<F>(body: F) -> RelstandbyStatus
where
    F: FnOnce() -> Result<(), Fail>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RelstandbyStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            RelstandbyStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(RelstandbyStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const RelstandbySystem) -> Result<&'a RelstandbySystem, Fail> {
    p.as_ref().ok_or_else(|| null("system handle"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs removed").into_raw()
}

/// Builds a system from a JSON run configuration. On success `*out` holds
/// a handle to release with [`relstandby_system_free`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relstandby_system_from_json(json: *const c_char, out: *mut *mut RelstandbySystem) -> RelstandbyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        out.write(ptr::null_mut());
        let text = read_str(json, "config")?;
        let cfg = RunConfig::from_json(text)?;
        let spec = cfg.spec().map_err(|e| Fail(RelstandbyStatus::Config, e.to_string()))?;
        out.write(Box::into_raw(Box::new(RelstandbySystem { spec, eval: cfg.eval })));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `system` must come from [`relstandby_system_from_json`] and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn relstandby_system_free(system: *mut RelstandbySystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// `P(Z_{n-k+1:n} > s)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn relstandby_survival_bare(
    system: *const RelstandbySystem,
    s: f64,
    out: *mut RelstandbyEstimate,
) -> RelstandbyStatus {
    guard(|| {
        let sys = handle(system)?;
        write(out, survival_kn(&sys.spec, s)?.into())
    })
}

/// `P(T > s)`, raw (unclamped).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn relstandby_survival_standby(
    system: *const RelstandbySystem,
    s: f64,
    out: *mut RelstandbyEstimate,
) -> RelstandbyStatus {
    guard(|| {
        let sys = handle(system)?;
        write(out, survival_t(&sys.spec, s, &sys.eval)?.into())
    })
}

/// Mean time to failure; `with_standby` selects `T` over the bare system.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn relstandby_mttf(
    system: *const RelstandbySystem,
    with_standby: bool,
    out: *mut RelstandbyEstimate,
) -> RelstandbyStatus {
    guard(|| {
        let sys = handle(system)?;
        let which = if with_standby { Lifetime::Standby } else { Lifetime::Bare };
        write(out, mttf(&sys.spec, &sys.eval, which)?.into())
    })
}

/// Mean residual life at `t`. `kind` 1 conditions on the system being
/// alive, 2 on the k-out-of-n part, 3 on every component.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn relstandby_psi(
    system: *const RelstandbySystem,
    kind: u32,
    t: f64,
    out: *mut RelstandbyEstimate,
) -> RelstandbyStatus {
    guard(|| {
        let sys = handle(system)?;
        let e = match kind {
            1 => psi1(&sys.spec, t, &sys.eval)?,
            2 => psi2(&sys.spec, t, &sys.eval)?,
            3 => psi3(&sys.spec, t, &sys.eval)?,
            _ => return Err(Fail(RelstandbyStatus::InvalidArgument, format!("psi kind {kind} is not 1, 2 or 3"))),
        };
        write(out, e.into())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn relstandby_cost_rates(
    system: *const RelstandbySystem,
    unit_cost: f64,
    out: *mut RelstandbyCostRates,
) -> RelstandbyStatus {
    guard(|| {
        let sys = handle(system)?;
        let r = cost_rates(&sys.spec, unit_cost, &sys.eval)?;
        write(
            out,
            RelstandbyCostRates {
                unit_cost: r.unit_cost,
                mttf_bare: r.mttf_bare.into(),
                mttf_standby: r.mttf_standby.into(),
                cost_rate_bare: r.cost_rate_bare,
                cost_rate_standby: r.cost_rate_standby,
            },
        )
    })
}

/// Copula validity report as a JSON object. Free the string with
/// [`relstandby_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn relstandby_validate_json(system: *const RelstandbySystem, out: *mut *mut c_char) -> RelstandbyStatus {
    guard(|| {
        let sys = handle(system)?;
        let r = sys.spec.report();
        let json = serde_json::json!({
            "n": r.n,
            "k": r.k,
            "min_corner_density": r.copula.min_corner_density,
            "max_corner_density": r.copula.max_corner_density,
            "argmin_corner": r.copula.argmin_corner,
            "is_proper_density": r.copula.is_proper_density,
        });
        write(out, to_c_string(json.to_string()))
    })
}

/// Monte Carlo estimates for the JSON array of targets `targets_json`
/// (for example `[{"kind":"mttf"},{"kind":"psi3_at","at":[0.5]}]`),
/// returned as JSON. Free the string with [`relstandby_string_free`].
///
/// # Safety
/// Pointers must be valid; `targets_json` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn relstandby_simulate_json(
    system: *const RelstandbySystem,
    targets_json: *const c_char,
    count: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> RelstandbyStatus {
    guard(|| {
        let sys = handle(system)?;
        let text = read_str(targets_json, "targets")?;
        let targets: Vec<Target> = serde_json::from_str(text)
            .map_err(|e| Fail(RelstandbyStatus::InvalidArgument, format!("targets: {e}")))?;
        let r = simulate_metrics_with(&sys.spec, &targets, count as usize, seed, sys.eval.substreams)?;
        write(out, to_c_string(serde_json::to_string(&r).expect("result serializes")))
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn relstandby_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn relstandby_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn relstandby_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
