//! C interface to `osp-da`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every call returns an
//! [`OspStatus`]; on failure a description is available from
//! [`osp_last_error`] on the same thread. Strings returned through `char**`
//! out-parameters must be released with [`osp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use osp_da::classify::classify;
use osp_da::da::run_da;
use osp_da::io::{classification_to_value, matching_to_json, priorities_from_json, profile_from_json};
use osp_da::mechanism::{check_implements, check_osp, CheckMode, MechanismTree};
use osp_da::synth::synthesize;
use osp_da::{Error, PrioritySet};

/// Result codes shared by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OspStatus {
    Ok = 0,
    /// A null pointer or out-of-range argument.
    InvalidArgument = 1,
    /// Malformed JSON or lists that are not permutations.
    ParseError = 2,
    /// Inputs of different sizes.
    SizeMismatch = 3,
    /// The market is too large for the requested operation.
    TooLarge = 4,
    /// Synthesis was asked for priorities that are not limited cyclic.
    NotLimitedCyclic = 5,
    /// A tree failed validation.
    InvalidTree = 6,
    /// A profile uses a type outside the tree's environment.
    OutsideEnvironment = 7,
    /// A panic was caught at the boundary.
    Internal = 8,
}

/// Opaque priority set.
pub struct OspPriorities(PrioritySet);

/// Opaque mechanism tree.
pub struct OspTree(MechanismTree);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn status_of(e: &Error) -> OspStatus {
    match e {
        Error::NotAPermutation { .. } | Error::Parse(_) | Error::MalformedSubdomain(_) => OspStatus::ParseError,
        Error::SizeMismatch { .. } => OspStatus::SizeMismatch,
        Error::TooLarge { .. } => OspStatus::TooLarge,
        Error::NotLimitedCyclic { .. } => OspStatus::NotLimitedCyclic,
        Error::InvalidTree { .. } => OspStatus::InvalidTree,
        Error::OutsideEnvironment { .. } => OspStatus::OutsideEnvironment,
        Error::InvalidRestriction(_) | Error::Precondition(_) => OspStatus::InvalidArgument,
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), OspStatus>) -> OspStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => OspStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            OspStatus::Internal
        }
    }
}

fn fail(e: Error) -> OspStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn invalid(msg: &str) -> OspStatus {
    set_error(msg);
    OspStatus::InvalidArgument
}

unsafe fn read_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, OspStatus> {
    if s.is_null() {
        return Err(invalid(&format!("{name} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| invalid(&format!("{name} is not valid UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> Result<(), OspStatus> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    let c = CString::new(text).map_err(|_| invalid("output contains a nul byte"))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, OspStatus> {
    p.as_ref().ok_or_else(|| invalid(&format!("{name} is null")))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn osp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library, freed only once.
#[no_mangle]
pub unsafe extern "C" fn osp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses priorities from JSON such as
/// `{"n":3,"priorities":[["a","b","c"],...]}`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osp_priorities_from_json(json: *const c_char, out: *mut *mut OspPriorities) -> OspStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        let q = priorities_from_json(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(OspPriorities(q)));
        Ok(())
    })
}

/// # Safety
/// `q` must be null or a handle from this library, freed only once.
#[no_mangle]
pub unsafe extern "C" fn osp_priorities_free(q: *mut OspPriorities) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Number of applicants, or 0 for a null handle.
///
/// # Safety
/// `q` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn osp_priorities_size(q: *const OspPriorities) -> usize {
    q.as_ref().map_or(0, |q| q.0.n())
}

/// Writes 1 to `limited_cyclic` when the priorities admit an obviously
/// strategyproof implementation and 0 otherwise.
///
/// # Safety
/// `q` must be a live handle and `limited_cyclic` writable.
#[no_mangle]
pub unsafe extern "C" fn osp_classify(q: *const OspPriorities, limited_cyclic: *mut i32) -> OspStatus {
    guard(|| {
        let q = deref(q, "priorities")?;
        if limited_cyclic.is_null() {
            return Err(invalid("output pointer is null"));
        }
        *limited_cyclic = i32::from(classify(&q.0).is_limited_cyclic());
        Ok(())
    })
}

/// Full classification (verdict, blocks, labelings or witness) as JSON.
///
/// # Safety
/// `q` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osp_classify_json(q: *const OspPriorities, out: *mut *mut c_char) -> OspStatus {
    guard(|| {
        let q = deref(q, "priorities")?;
        write_string(out, classification_to_value(&classify(&q.0)).to_string())
    })
}

/// Runs deferred acceptance on a JSON profile and returns the matching as
/// JSON.
///
/// # Safety
/// `q` must be a live handle, `profile_json` nul-terminated and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn osp_run_da(q: *const OspPriorities, profile_json: *const c_char, out: *mut *mut c_char) -> OspStatus {
    guard(|| {
        let q = deref(q, "priorities")?;
        let p = profile_from_json(read_str(profile_json, "profile_json")?).map_err(fail)?;
        let m = run_da(&q.0, &p).map_err(fail)?;
        write_string(out, matching_to_json(&m))
    })
}

/// Builds an obviously strategyproof tree for limited-cyclic priorities.
///
/// # Safety
/// `q` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osp_synthesize(q: *const OspPriorities, out: *mut *mut OspTree) -> OspStatus {
    guard(|| {
        let q = deref(q, "priorities")?;
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        let t = synthesize(&q.0).map_err(fail)?;
        *out = Box::into_raw(Box::new(OspTree(t)));
        Ok(())
    })
}

/// # Safety
/// `t` must be null or a handle from this library, freed only once.
#[no_mangle]
pub unsafe extern "C" fn osp_tree_free(t: *mut OspTree) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn osp_tree_node_count(t: *const OspTree) -> usize {
    t.as_ref().map_or(0, |t| t.0.node_count())
}

/// # Safety
/// `t` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osp_tree_to_json(t: *const OspTree, out: *mut *mut c_char) -> OspStatus {
    guard(|| {
        let t = deref(t, "tree")?;
        write_string(out, t.0.to_json())
    })
}

/// Parses and validates a tree.
///
/// # Safety
/// `json` must be nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn osp_tree_from_json(json: *const c_char, out: *mut *mut OspTree) -> OspStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        if out.is_null() {
            return Err(invalid("output pointer is null"));
        }
        let t = MechanismTree::from_json(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(OspTree(t)));
        Ok(())
    })
}

/// Counts obvious-strategyproofness violations; 0 means the tree is OSP.
///
/// # Safety
/// `t` must be a live handle and `violations` writable.
#[no_mangle]
pub unsafe extern "C" fn osp_check_osp(t: *const OspTree, violations: *mut usize) -> OspStatus {
    guard(|| {
        let t = deref(t, "tree")?;
        if violations.is_null() {
            return Err(invalid("output pointer is null"));
        }
        *violations = check_osp(&t.0).map_err(fail)?.violation_count;
        Ok(())
    })
}

/// Compares the tree with deferred acceptance under `q`: every profile when
/// `samples` is 0, otherwise `samples` random profiles drawn with `seed`.
/// Writes 1 to `implements` when no profile disagrees.
///
/// # Safety
/// `t` and `q` must be live handles and `implements` writable.
#[no_mangle]
pub unsafe extern "C" fn osp_check_implements(
    t: *const OspTree,
    q: *const OspPriorities,
    samples: u64,
    seed: u64,
    implements: *mut i32,
) -> OspStatus {
    guard(|| {
        let t = deref(t, "tree")?;
        let q = deref(q, "priorities")?;
        if implements.is_null() {
            return Err(invalid("output pointer is null"));
        }
        let mode = if samples == 0 {
            CheckMode::Exhaustive
        } else {
            CheckMode::Sampled { count: samples, seed }
        };
        *implements = i32::from(check_implements(&t.0, &q.0, &mode).map_err(fail)?.ok());
        Ok(())
    })
}
