//! C ABI over `bbt-core`.
//!
//! Domains and trees are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`BbtStatus`]; on failure the
//! message is available from [`bbt_last_error`] on the same thread. Strings
//! handed out by the library are NUL-terminated UTF-8 and must be released
//! with [`bbt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bbt_core::belief::PhysicalState;
use bbt_core::classic::monte_carlo;
use bbt_core::domain::{ground, parse_domain, GroundedDomain};
use bbt_core::exec::{initial_belief, simulate, SimulationLimits};
use bbt_core::planner::{refine_tree, PlanRequest};
use bbt_core::tree::Node;
use bbt_core::{dot, treefile, Error};

/// Grounded domain handle.
pub struct BbtDomain {
    inner: GroundedDomain,
}

/// Tree handle. Only meaningful together with the domain it was built against.
pub struct BbtTree {
    inner: Node,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed domain or tree text, or a name the domain does not define.
    Parse = 3,
    /// The planner could not reach the target.
    Planning = 4,
    /// Tick or belief-size limit exceeded.
    Limits = 5,
    Io = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Bounds on exhaustive simulation.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BbtLimits {
    pub max_root_ticks: usize,
    pub max_entries: usize,
    pub prune_epsilon: f64,
}

impl From<BbtLimits> for SimulationLimits {
    fn from(l: BbtLimits) -> Self {
        SimulationLimits {
            max_root_ticks: l.max_root_ticks,
            max_entries: l.max_entries,
            prune_epsilon: l.prune_epsilon,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> BbtStatus {
    match err {
        e if e.is_limit() => BbtStatus::Limits,
        Error::Io(_) => BbtStatus::Io,
        Error::EmptyGoal
        | Error::NothingFailed
        | Error::NoFailedCondition
        | Error::NoResolver { .. }
        | Error::UnresolvableThreat { .. }
        | Error::IterationLimit { .. }
        | Error::InvalidRequest(_)
        | Error::NoPending => BbtStatus::Planning,
        _ => BbtStatus::Parse,
    }
}

struct Fail(BbtStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> BbtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BbtStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside bbt".into());
            BbtStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(BbtStatus::NullPointer, "null pointer argument".into()))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(BbtStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(BbtStatus::InvalidUtf8, e.to_string()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(BbtStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bbt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default simulation limits (10000 root ticks, 100000 entries, no pruning).
#[no_mangle]
pub extern "C" fn bbt_limits_default() -> BbtLimits {
    let d = SimulationLimits::default();
    BbtLimits {
        max_root_ticks: d.max_root_ticks,
        max_entries: d.max_entries,
        prune_epsilon: d.prune_epsilon,
    }
}

/// Parses and grounds a domain definition.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbt_domain_parse(source: *const c_char, out: *mut *mut BbtDomain) -> BbtStatus {
    guard(|| {
        let src = text(source)?;
        let spec = parse_domain(src).map_err(Error::from)?;
        let inner = ground(&spec)?;
        put(out, Box::into_raw(Box::new(BbtDomain { inner })))
    })
}

/// # Safety
/// `domain` must come from [`bbt_domain_parse`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bbt_domain_free(domain: *mut BbtDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// Number of grounded literals, actions and templates.
///
/// # Safety
/// `domain` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbt_domain_counts(
    domain: *const BbtDomain,
    literals: *mut usize,
    actions: *mut usize,
    templates: *mut usize,
) -> BbtStatus {
    guard(|| {
        let d = &borrow(domain)?.inner;
        put(literals, d.literals().len())?;
        put(actions, d.actions().len())?;
        put(templates, d.templates().len())
    })
}

/// Synthesizes a tree for the domain's goal. A `target` outside (0, 1]
/// keeps the domain's own goal probability. `log` (optional) receives the
/// tab-separated iteration log.
///
/// # Safety
/// `domain` must be a live handle; `tree` and `probability` must be writable;
/// `log` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn bbt_plan(
    domain: *const BbtDomain,
    target: f64,
    limits: BbtLimits,
    tree: *mut *mut BbtTree,
    probability: *mut f64,
    log: *mut *mut c_char,
) -> BbtStatus {
    guard(|| {
        let d = &borrow(domain)?.inner;
        let mut request = PlanRequest::from_domain(d)?;
        request.limits = limits.into();
        if target > 0.0 && target <= 1.0 {
            request.target_probability = target;
        }
        let plan = refine_tree(&request)?;
        if tree.is_null() || probability.is_null() {
            return Err(Fail(BbtStatus::NullPointer, "null output pointer".into()));
        }
        put(probability, plan.probability)?;
        if !log.is_null() {
            put(log, c_string(plan.log_text()))?;
        }
        put(tree, Box::into_raw(Box::new(BbtTree { inner: plan.tree })))
    })
}

/// Loads a JSON tree file against `domain`.
///
/// # Safety
/// `domain` must be live, `json` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bbt_tree_from_json(
    domain: *const BbtDomain,
    json: *const c_char,
    out: *mut *mut BbtTree,
) -> BbtStatus {
    guard(|| {
        let d = &borrow(domain)?.inner;
        let inner = treefile::from_json(text(json)?, d)?;
        put(out, Box::into_raw(Box::new(BbtTree { inner })))
    })
}

/// # Safety
/// `domain` and `tree` must be live; `out` writable. Free the result with [`bbt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bbt_tree_to_json(
    domain: *const BbtDomain,
    tree: *const BbtTree,
    out: *mut *mut c_char,
) -> BbtStatus {
    guard(|| {
        let json = treefile::to_json(&borrow(tree)?.inner, &borrow(domain)?.inner)?;
        put(out, c_string(json))
    })
}

/// # Safety
/// `domain` and `tree` must be live; `out` writable. Free the result with [`bbt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bbt_tree_to_dot(
    domain: *const BbtDomain,
    tree: *const BbtTree,
    out: *mut *mut c_char,
) -> BbtStatus {
    guard(|| {
        let text = dot::to_dot(&borrow(tree)?.inner, &borrow(domain)?.inner);
        put(out, c_string(text))
    })
}

/// # Safety
/// `tree` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bbt_tree_free(tree: *mut BbtTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Exhaustive simulation from the domain's initial state; writes the success
/// probability and, if `dump` is non-NULL, the terminal distribution.
///
/// # Safety
/// `domain` and `tree` must be live; `probability` writable; `dump` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn bbt_simulate(
    domain: *const BbtDomain,
    tree: *const BbtTree,
    limits: BbtLimits,
    probability: *mut f64,
    dump: *mut *mut c_char,
) -> BbtStatus {
    guard(|| {
        let d = &borrow(domain)?.inner;
        let t = &borrow(tree)?.inner;
        let res = simulate(d, t, &initial_belief(d), &limits.into())?;
        put(probability, res.success_probability())?;
        if !dump.is_null() {
            put(dump, c_string(res.terminal.dump(d)))?;
        }
        Ok(())
    })
}

/// Monte Carlo execution: `runs` independent classic runs seeded from
/// `(seed, run index)`. Writes the number of successful runs.
///
/// # Safety
/// `domain` and `tree` must be live; `successes` writable.
#[no_mangle]
pub unsafe extern "C" fn bbt_exec(
    domain: *const BbtDomain,
    tree: *const BbtTree,
    seed: u64,
    runs: u64,
    max_ticks: usize,
    successes: *mut u64,
) -> BbtStatus {
    guard(|| {
        let d = &borrow(domain)?.inner;
        let t = &borrow(tree)?.inner;
        let initial = PhysicalState::new(d.initial().to_vec());
        let summary = monte_carlo(d, t, &initial, seed, runs, max_ticks)?;
        put(successes, summary.successes)
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bbt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
