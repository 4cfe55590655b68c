//! C interface to quadriclab.
//!
//! Every fallible call returns a `QlStatus`; on failure the message is
//! available from `ql_last_error_message` on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quadriclab::catalog::{cartan_tube, product_spheres, round_sphere, HypersurfaceChart};
use quadriclab::cli::{config_from_argv, verify_json, UsageError};
use quadriclab::error::Error;
use quadriclab::gauss::{angle_spectrum, gauss_map};
use quadriclab::rotational::{integrate_alpha, StopReason, Trajectory};
use quadriclab::verify::GaugeChoice;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    NotConverged = 3,
    RankDeficient = 4,
    NonFinite = 5,
    Degenerate = 6,
    FocalRadius = 7,
    NotLagrangian = 8,
    NotIsoparametric = 9,
    BufferTooSmall = 10,
    CheckFailed = 11,
    Internal = 12,
}

impl From<&Error> for QlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NotConverged { .. } => QlStatus::NotConverged,
            Error::RankDeficient { .. } => QlStatus::RankDeficient,
            Error::NonFinite { .. } => QlStatus::NonFinite,
            Error::InvalidParameter(_) => QlStatus::InvalidParameter,
            Error::Degenerate { .. } | Error::DegenerateImmersion { .. } => QlStatus::Degenerate,
            Error::FocalRadius { .. } => QlStatus::FocalRadius,
            Error::NotLagrangian { .. } => QlStatus::NotLagrangian,
            Error::NotIsoparametric { .. } => QlStatus::NotIsoparametric,
            Error::BaseMismatch | Error::Diagnostic(_) => QlStatus::Internal,
        }
    }
}

/// Gauge used for angle functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QlGauge {
    Canonical = 0,
    Normalized = 1,
    Fixed = 2,
}

/// Opaque hypersurface chart.
pub struct QlChart(HypersurfaceChart);

/// Opaque profile trajectory.
pub struct QlTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: QlStatus, msg: impl Into<String>) -> QlStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> QlStatus {
    fail(QlStatus::from(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> QlStatus) -> QlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(QlStatus::Internal, "panic inside quadriclab"),
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize) -> Option<&'a [f64]> {
    if p.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn put_chart(out: *mut *mut QlChart, r: Result<HypersurfaceChart, Error>) -> QlStatus {
    if out.is_null() {
        return fail(QlStatus::NullPointer, "out is null");
    }
    match r {
        Ok(c) => {
            *out = Box::into_raw(Box::new(QlChart(c)));
            QlStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ql_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ql_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Round sphere of radius `r` in `S^{n+1}`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_chart_sphere(n: usize, r: f64, out: *mut *mut QlChart) -> QlStatus {
    guard(|| put_chart(out, round_sphere(n, r)))
}

/// Product `S^k(r1) x S^{n-k}(r2)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_chart_product(k: usize, n: usize, r1: f64, r2: f64, out: *mut *mut QlChart) -> QlStatus {
    guard(|| put_chart(out, product_spheres(k, n, r1, r2)))
}

/// Tube of radius `r` over the Veronese surface in `S^4`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_chart_cartan(r: f64, out: *mut *mut QlChart) -> QlStatus {
    guard(|| put_chart(out, cartan_tube(r)))
}

/// # Safety
/// `chart` must come from a `ql_chart_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn ql_chart_free(chart: *mut QlChart) {
    if !chart.is_null() {
        drop(Box::from_raw(chart));
    }
}

/// Hypersurface dimension, 0 for a null handle.
///
/// # Safety
/// `chart` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ql_chart_dim(chart: *const QlChart) -> usize {
    chart.as_ref().map_or(0, |c| c.0.dim())
}

/// Writes the chart centre (`dim` values) into `out`.
///
/// # Safety
/// `chart` must be a live handle and `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ql_chart_center(chart: *const QlChart, out: *mut f64, out_len: usize) -> QlStatus {
    guard(|| {
        let Some(c) = chart.as_ref() else {
            return fail(QlStatus::NullPointer, "chart is null");
        };
        if out.is_null() {
            return fail(QlStatus::NullPointer, "out is null");
        }
        let p = c.0.center();
        if out_len < p.len() {
            return fail(QlStatus::BufferTooSmall, format!("need {} values", p.len()));
        }
        std::slice::from_raw_parts_mut(out, p.len()).copy_from_slice(&p);
        QlStatus::Ok
    })
}

/// Angle functions of the Gauss map at `p` (length `dim`), written to
/// `thetas` (length `dim`). `phi` is the fixed gauge for `QlGauge::Fixed`;
/// the gauge actually used is written to `out_phi` when non-null.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn ql_angles(
    chart: *const QlChart,
    p: *const f64,
    p_len: usize,
    h: f64,
    gauge: QlGauge,
    phi: f64,
    thetas: *mut f64,
    thetas_len: usize,
    out_phi: *mut f64,
) -> QlStatus {
    guard(|| {
        let (Some(c), Some(p)) = (chart.as_ref(), slice(p, p_len)) else {
            return fail(QlStatus::NullPointer, "chart or point is null");
        };
        if thetas.is_null() {
            return fail(QlStatus::NullPointer, "thetas is null");
        }
        if p_len != c.0.dim() {
            return fail(
                QlStatus::InvalidParameter,
                format!("point has {p_len} coordinates, chart has {}", c.0.dim()),
            );
        }
        if thetas_len < p_len {
            return fail(QlStatus::BufferTooSmall, format!("need {p_len} values"));
        }
        let choice = match gauge {
            QlGauge::Canonical => GaugeChoice::CANONICAL,
            QlGauge::Normalized => GaugeChoice::Normalized,
            QlGauge::Fixed => GaugeChoice::Fixed(phi),
        };
        let r = gauss_map(&c.0, p, h).and_then(|j| {
            let g = choice.resolve(&j, None)?;
            angle_spectrum(&j, g)
        });
        match r {
            Ok(s) => {
                std::slice::from_raw_parts_mut(thetas, p_len).copy_from_slice(&s.thetas);
                if !out_phi.is_null() {
                    *out_phi = s.gauge.phi;
                }
                QlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Integrates the profile equation with fixed-step RK4 over `[t0, t1]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_trajectory_integrate(
    n: usize,
    alpha0: f64,
    dalpha0: f64,
    t0: f64,
    t1: f64,
    steps: usize,
    out: *mut *mut QlTrajectory,
) -> QlStatus {
    guard(|| {
        if out.is_null() {
            return fail(QlStatus::NullPointer, "out is null");
        }
        match integrate_alpha(n, alpha0, dalpha0, (t0, t1), steps) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(QlTrajectory(t)));
                QlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `traj` must come from `ql_trajectory_integrate`, or be null.
#[no_mangle]
pub unsafe extern "C" fn ql_trajectory_free(traj: *mut QlTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of stored states, 0 for a null handle.
///
/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ql_trajectory_len(traj: *const QlTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.states.len())
}

/// 0 if the run completed, 1 if stopped at the slope guard, 2 at the sine guard.
///
/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ql_trajectory_stop_reason(traj: *const QlTrajectory) -> i32 {
    match traj.as_ref().and_then(|t| t.0.stopped) {
        None => 0,
        Some(StopReason::Slope) => 1,
        Some(StopReason::Sine) => 2,
    }
}

/// State `i` as `[theta, alpha, dalpha]`.
///
/// # Safety
/// `traj` must be a live handle and `out` must hold three doubles.
#[no_mangle]
pub unsafe extern "C" fn ql_trajectory_state(traj: *const QlTrajectory, i: usize, out: *mut f64) -> QlStatus {
    guard(|| {
        let Some(t) = traj.as_ref() else {
            return fail(QlStatus::NullPointer, "trajectory is null");
        };
        if out.is_null() {
            return fail(QlStatus::NullPointer, "out is null");
        }
        let Some(s) = t.0.states.get(i) else {
            return fail(QlStatus::InvalidParameter, format!("index {i} out of range"));
        };
        std::slice::from_raw_parts_mut(out, 3).copy_from_slice(&[s.theta, s.alpha, s.dalpha]);
        QlStatus::Ok
    })
}

/// Runs the `verify` command line given as a space-separated argument string
/// (for example `"--example cartan --grid 2"`) and returns the JSON report
/// in `out_json`, to be released with `ql_string_free`. Returns
/// `CheckFailed` when the report contains failures; the report is still
/// written.
///
/// # Safety
/// `args` must be a NUL-terminated string and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ql_verify_json(args: *const c_char, out_json: *mut *mut c_char) -> QlStatus {
    guard(|| {
        if args.is_null() || out_json.is_null() {
            return fail(QlStatus::NullPointer, "args or out_json is null");
        }
        let Ok(args) = CStr::from_ptr(args).to_str() else {
            return fail(QlStatus::InvalidParameter, "args is not UTF-8");
        };
        let argv: Vec<&str> = args.split_whitespace().collect();
        let r = config_from_argv("verify", &argv).and_then(|c| verify_json(&c, None));
        match r {
            Ok((json, summary)) => {
                *out_json = CString::new(json).expect("JSON has no NUL").into_raw();
                if summary.pass {
                    QlStatus::Ok
                } else {
                    fail(
                        QlStatus::CheckFailed,
                        format!("{} of {} checks failed", summary.failures, summary.checks),
                    )
                }
            }
            Err(e) => {
                let status = if e.downcast_ref::<UsageError>().is_some() {
                    QlStatus::InvalidParameter
                } else if let Some(err) = e.downcast_ref::<Error>() {
                    QlStatus::from(err)
                } else {
                    QlStatus::Internal
                };
                fail(status, format!("{e:#}"))
            }
        }
    })
}
