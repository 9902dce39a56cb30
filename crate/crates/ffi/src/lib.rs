//! C interface to `dupmatch`.
//!
//! Instances and solutions live behind opaque handles. Every function returns
//! a [`DmStatus`]; on failure [`dm_last_error`] describes what went wrong on
//! the calling thread. Strings handed out by this library must be released
//! with [`dm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dupmatch::format::{from_json, to_json};
use dupmatch::verify::Oracle;
use dupmatch::{ConstructionChoice, Engine, Error, Instance, Matching, SolveOptions, SolveReport};

pub const DM_ENGINE_AUTO: u32 = 0;
pub const DM_ENGINE_GS: u32 = 1;
pub const DM_ENGINE_KERNEL: u32 = 2;

pub const DM_CONSTRUCTION_AUTO: u32 = 0;
pub const DM_CONSTRUCTION_SIMPLE: u32 = 1;
pub const DM_CONSTRUCTION_GENERAL: u32 = 2;

/// Default brute-force edge limit for [`dm_certify`].
pub const DM_DEFAULT_CAP: usize = 20;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON or numbers.
    ParseError = 3,
    /// Well-formed but violates the model (ranges, thresholds, matroid axioms).
    InvalidInstance = 4,
    /// `DM_ENGINE_GS` on an instance that is not one-to-one.
    EngineMismatch = 5,
    /// Brute force was asked for more edges than the cap allows.
    CapExceeded = 6,
    /// Unknown engine or construction code, or a repeated edge id.
    BadArgument = 7,
    Panic = 8,
}

/// Opaque instance handle.
pub struct DmInstance {
    inner: Instance,
}

/// Opaque solution handle.
pub struct DmSolution {
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(DmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let status = match &e {
            Error::Json(_) | Error::Format(_) | Error::Value(_) => DmStatus::ParseError,
            Error::EngineMismatch { .. } => DmStatus::EngineMismatch,
            Error::CapExceeded { .. } => DmStatus::CapExceeded,
            Error::Invalid(_) | Error::Precondition(_) | Error::Matroid(_) => DmStatus::InvalidInstance,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(DmStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `body`, records any failure and converts panics into `Panic`.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> DmStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DmStatus::Ok,
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
            set_error(format!("panic: {msg}"));
            DmStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(DmStatus::InvalidUtf8, format!("`{what}`: {e}")))
}

fn into_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s).map(CString::into_raw).map_err(|e| Fail(DmStatus::ParseError, e.to_string()))
}

fn engine(code: u32) -> Result<Engine, Fail> {
    match code {
        DM_ENGINE_AUTO => Ok(Engine::Auto),
        DM_ENGINE_GS => Ok(Engine::Gs),
        DM_ENGINE_KERNEL => Ok(Engine::Kernel),
        other => Err(Fail(DmStatus::BadArgument, format!("unknown engine code {other}"))),
    }
}

fn construction(code: u32) -> Result<ConstructionChoice, Fail> {
    match code {
        DM_CONSTRUCTION_AUTO => Ok(ConstructionChoice::Auto),
        DM_CONSTRUCTION_SIMPLE => Ok(ConstructionChoice::Simple),
        DM_CONSTRUCTION_GENERAL => Ok(ConstructionChoice::General),
        other => Err(Fail(DmStatus::BadArgument, format!("unknown construction code {other}"))),
    }
}

fn json_error(e: serde_json::Error) -> Fail {
    Fail::from(Error::from(e))
}

/// Library version, a static nul-terminated string.
#[no_mangle]
pub extern "C" fn dm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn dm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses and validates an instance. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be NULL or a nul-terminated string; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dm_instance_from_json(json: *const c_char, out: *mut *mut DmInstance) -> DmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let inst = from_json(read_str(json, "json")?)?;
        inst.validated()?;
        *out = Box::into_raw(Box::new(DmInstance { inner: inst }));
        Ok(())
    })
}

/// # Safety
/// `inst` must be NULL or a handle from [`dm_instance_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dm_instance_free(inst: *mut DmInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of edges, 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dm_instance_edge_count(inst: *const DmInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.edges.len())
}

/// Canonical JSON for the instance; free with [`dm_string_free`].
///
/// # Safety
/// `inst` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dm_instance_to_json(inst: *const DmInstance, out: *mut *mut c_char) -> DmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        *out = into_c_string(to_json(&inst.inner))?;
        Ok(())
    })
}

/// Solves with the given `DM_ENGINE_*` and `DM_CONSTRUCTION_*` codes.
///
/// # Safety
/// `inst` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dm_solve(
    inst: *const DmInstance,
    engine_code: u32,
    construction_code: u32,
    out: *mut *mut DmSolution,
) -> DmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        let options = SolveOptions {
            engine: engine(engine_code)?,
            construction: construction(construction_code)?,
            ..SolveOptions::default()
        };
        let report = dupmatch::solve(&inst.inner, &options)?;
        *out = Box::into_raw(Box::new(DmSolution { report }));
        Ok(())
    })
}

/// # Safety
/// `sol` must be NULL or a handle from [`dm_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dm_solution_free(sol: *mut DmSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Number of matched edges, 0 for NULL.
///
/// # Safety
/// `sol` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dm_solution_size(sol: *const DmSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.report.size)
}

/// Matched edges at critical vertices, 0 for NULL.
///
/// # Safety
/// `sol` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dm_solution_criticality_score(sol: *const DmSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.report.criticality_score)
}

/// Copies up to `capacity` matched edge ids, ascending, into `buf` and
/// returns the total count. Call with `capacity` 0 to size the buffer.
///
/// # Safety
/// `sol` must be NULL or a live handle; `buf` must hold `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn dm_solution_edges(sol: *const DmSolution, buf: *mut usize, capacity: usize) -> usize {
    let Some(sol) = sol.as_ref() else { return 0 };
    let edges = sol.report.matching.edges();
    if !buf.is_null() {
        let n = capacity.min(edges.len());
        ptr::copy_nonoverlapping(edges.as_ptr(), buf, n);
    }
    edges.len()
}

/// The full solve report as JSON; free with [`dm_string_free`].
///
/// # Safety
/// `sol` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dm_solution_to_json(sol: *const DmSolution, out: *mut *mut c_char) -> DmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let sol = sol.as_ref().ok_or_else(|| null("sol"))?;
        *out = into_c_string(serde_json::to_string(&sol.report).map_err(json_error)?)?;
        Ok(())
    })
}

/// Checks `edges[0..len]` by brute force over all feasible matchings, which
/// is refused above `cap` edges. `*stable` receives the verdict; if
/// `certificate` is not NULL it receives the certificate JSON.
///
/// # Safety
/// `inst` must be NULL or a live handle; `edges` must hold `len` elements
/// (it may be NULL when `len` is 0); the out pointers must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn dm_certify(
    inst: *const DmInstance,
    edges: *const usize,
    len: usize,
    cap: usize,
    stable: *mut bool,
    certificate: *mut *mut c_char,
) -> DmStatus {
    guard(|| {
        if stable.is_null() {
            return Err(null("stable"));
        }
        *stable = false;
        if !certificate.is_null() {
            *certificate = ptr::null_mut();
        }
        let inst = inst.as_ref().ok_or_else(|| null("inst"))?;
        let ids: &[usize] = match (edges.is_null(), len) {
            (_, 0) => &[],
            (true, _) => return Err(null("edges")),
            (false, n) => std::slice::from_raw_parts(edges, n),
        };
        let m: Matching = ids.iter().copied().collect();
        if m.len() != ids.len() {
            return Err(Fail(DmStatus::BadArgument, "matching repeats an edge id".into()));
        }
        let cert = Oracle::new(&inst.inner, cap)?.certify(&m);
        if !certificate.is_null() {
            *certificate = into_c_string(serde_json::to_string(&cert).map_err(json_error)?)?;
        }
        *stable = cert.is_cgamma_stable;
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cap_matches_core() {
        assert_eq!(DM_DEFAULT_CAP, dupmatch::verify::DEFAULT_CAP);
    }

    #[test]
    fn version_is_package_version() {
        let v = unsafe { CStr::from_ptr(dm_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), DmStatus::Panic);
        let msg = unsafe { CStr::from_ptr(dm_last_error()) };
        assert_eq!(msg.to_str().unwrap(), "panic: boom");
        assert_eq!(guard(|| Ok(())), DmStatus::Ok);
        assert!(dm_last_error().is_null());
    }
}
