//! C ABI over the `resune` library.
//!
//! Every fallible function returns a [`ResuneStatus`] and writes its result
//! through an out pointer. On failure a message for the calling thread is
//! available from [`resune_last_error`]. Handles returned by `*_new` or
//! `resune_find_equilibria` must be released with the matching `*_free`.
//! Panics never cross the boundary; they surface as `RESUNE_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use resune::equilibrium::{self, Equilibrium, ScanConfig, Stability};
use resune::scenarios::{self, HalvingPrediction};
use resune::{Economy, EconomyParams, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResuneStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Domain = 5,
    Solver = 6,
    Scenario = 7,
    OutOfRange = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResuneStability {
    Stable = 0,
    Unstable = 1,
    Marginal = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResunePrediction {
    Confirmed = 0,
    Violated = 1,
    NotApplicable = 2,
}

/// Price window and grid for the equilibrium scan.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResuneScan {
    pub p_min: f64,
    pub p_max: f64,
    pub n_grid: usize,
    pub log_spaced: bool,
    pub refine_tol: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResuneEquilibrium {
    pub p_star: f64,
    pub h_star: f64,
    pub sigma_star: f64,
    pub excess_residual: f64,
    pub slope_direct: f64,
    pub slope_indirect: f64,
    pub slope_total: f64,
    pub stability: ResuneStability,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResuneHalving {
    pub pre: ResuneEquilibrium,
    pub post: ResuneEquilibrium,
    pub delta_p: f64,
    pub delta_h: f64,
    pub delta_sigma: f64,
    pub uniqueness_pre: bool,
    pub uniqueness_post: bool,
    pub prediction: ResunePrediction,
}

/// A validated economy.
pub struct ResuneEconomy {
    inner: Economy,
}

/// Equilibria found by one scan, ordered by price.
pub struct ResuneEquilibriumList {
    items: Vec<ResuneEquilibrium>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(ResuneStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let status = match err {
            Error::Validation(_) => ResuneStatus::Validation,
            Error::Domain(_) => ResuneStatus::Domain,
            Error::Solver { .. } => ResuneStatus::Solver,
            Error::Scenario(_) => ResuneStatus::Scenario,
            _ => ResuneStatus::Internal,
        };
        Failure(status, err.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(ResuneStatus::NullArgument, format!("{name} is null"))
}

/// Runs `body`, records any failure or panic, and returns the status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ResuneStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ResuneStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal error: {message}"));
            ResuneStatus::Internal
        }
    }
}

unsafe fn economy<'a>(handle: *const ResuneEconomy) -> Result<&'a Economy, Failure> {
    handle.as_ref().map(|h| &h.inner).ok_or_else(|| null("economy"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

fn scan_from(scan: *const ResuneScan) -> Result<ScanConfig, Failure> {
    let cfg = match unsafe { scan.as_ref() } {
        None => ScanConfig::default(),
        Some(s) => ScanConfig {
            p_min: s.p_min,
            p_max: s.p_max,
            n_grid: s.n_grid,
            log_spaced: s.log_spaced,
            refine_tol: s.refine_tol,
        },
    };
    cfg.check()?;
    Ok(cfg)
}

fn to_c(e: &Equilibrium) -> ResuneEquilibrium {
    ResuneEquilibrium {
        p_star: e.p_star,
        h_star: e.h_star,
        sigma_star: e.sigma_star,
        excess_residual: e.excess_residual,
        slope_direct: e.slope.direct,
        slope_indirect: e.slope.indirect,
        slope_total: e.slope.total,
        stability: match e.stability {
            Stability::Stable => ResuneStability::Stable,
            Stability::Unstable => ResuneStability::Unstable,
            Stability::Marginal => ResuneStability::Marginal,
        },
    }
}

/// Message for the last failure on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn resune_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn resune_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn resune_std_normal_cdf(x: f64) -> f64 {
    resune::normal::std_normal_cdf(x)
}

/// Fills `out` with the default scan window.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn resune_scan_default(out: *mut ResuneScan) -> ResuneStatus {
    guard(|| {
        let d = ScanConfig::default();
        write(out, ResuneScan { p_min: d.p_min, p_max: d.p_max, n_grid: d.n_grid, log_spaced: d.log_spaced, refine_tol: d.refine_tol })
    })
}

/// Parses and validates an economy from its JSON description.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn resune_economy_new(json: *const c_char, out: *mut *mut ResuneEconomy) -> ResuneStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(ResuneStatus::InvalidUtf8, e.to_string()))?;
        let params = EconomyParams::from_json(text).map_err(|e| Failure(ResuneStatus::Parse, e.to_string()))?;
        let inner = resune::validate(params).map_err(Error::from)?;
        write(out, Box::into_raw(Box::new(ResuneEconomy { inner })))
    })
}

/// # Safety
/// `economy` must be null or a handle from `resune_economy_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn resune_economy_free(economy: *mut ResuneEconomy) {
    if !economy.is_null() {
        drop(Box::from_raw(economy));
    }
}

/// Excess demand `Z(P)` along the free-entry hash supply.
///
/// # Safety
/// `economy` must be a live handle or null; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn resune_excess_demand(economy: *const ResuneEconomy, p: f64, out: *mut f64) -> ResuneStatus {
    guard(|| write(out, equilibrium::excess_demand(self::economy(economy)?, p)?))
}

/// Free-entry hash rate at price `p`.
///
/// # Safety
/// As for `resune_excess_demand`.
#[no_mangle]
pub unsafe extern "C" fn resune_hash_supply(economy: *const ResuneEconomy, p: f64, out: *mut f64) -> ResuneStatus {
    guard(|| write(out, resune::hash_supply::solve_hash_supply(self::economy(economy)?, p)?.h))
}

/// Perceived safety at price `p` and hash rate `h`.
///
/// # Safety
/// As for `resune_excess_demand`.
#[no_mangle]
pub unsafe extern "C" fn resune_safety(economy: *const ResuneEconomy, p: f64, h: f64, out: *mut f64) -> ResuneStatus {
    guard(|| {
        let eco = self::economy(economy)?;
        write(out, resune::security::safety(eco.security(), p, h).safety)
    })
}

/// Scans for equilibria. `scan` may be null for the default window.
///
/// # Safety
/// `economy` must be a live handle; `scan` null or readable; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn resune_find_equilibria(
    economy: *const ResuneEconomy,
    scan: *const ResuneScan,
    out: *mut *mut ResuneEquilibriumList,
) -> ResuneStatus {
    guard(|| {
        let set = equilibrium::find_equilibria(self::economy(economy)?, &scan_from(scan)?)?;
        let items = set.equilibria.iter().map(to_c).collect();
        write(out, Box::into_raw(Box::new(ResuneEquilibriumList { items })))
    })
}

/// Number of equilibria in `list`; 0 for null.
///
/// # Safety
/// `list` must be null or a live list handle.
#[no_mangle]
pub unsafe extern "C" fn resune_equilibrium_list_len(list: *const ResuneEquilibriumList) -> usize {
    list.as_ref().map_or(0, |l| l.items.len())
}

/// # Safety
/// `list` must be a live list handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn resune_equilibrium_list_get(
    list: *const ResuneEquilibriumList,
    index: usize,
    out: *mut ResuneEquilibrium,
) -> ResuneStatus {
    guard(|| {
        let list = list.as_ref().ok_or_else(|| null("list"))?;
        let item = list.items.get(index).ok_or_else(|| {
            Failure(ResuneStatus::OutOfRange, format!("index {index} out of range for {} equilibria", list.items.len()))
        })?;
        write(out, *item)
    })
}

/// # Safety
/// `list` must be null or a handle from `resune_find_equilibria` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn resune_equilibrium_list_free(list: *mut ResuneEquilibriumList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Compares equilibria before and after scaling the block subsidy by
/// `factor` (0.5 for a halving). `scan` may be null.
///
/// # Safety
/// `economy` must be a live handle; `scan` null or readable; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn resune_subsidy_shock(
    economy: *const ResuneEconomy,
    factor: f64,
    scan: *const ResuneScan,
    out: *mut ResuneHalving,
) -> ResuneStatus {
    guard(|| {
        let r = scenarios::subsidy_shock_report(self::economy(economy)?, factor, &scan_from(scan)?)?;
        write(
            out,
            ResuneHalving {
                pre: to_c(&r.pre),
                post: to_c(&r.post),
                delta_p: r.delta_p,
                delta_h: r.delta_h,
                delta_sigma: r.delta_sigma,
                uniqueness_pre: r.uniqueness_pre,
                uniqueness_post: r.uniqueness_post,
                prediction: match r.prediction {
                    HalvingPrediction::Confirmed => ResunePrediction::Confirmed,
                    HalvingPrediction::Violated => ResunePrediction::Violated,
                    HalvingPrediction::NotApplicable => ResunePrediction::NotApplicable,
                },
            },
        )
    })
}
