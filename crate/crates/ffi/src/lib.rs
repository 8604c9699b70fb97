//! C ABI over the conflict-forest scheduler.
//!
//! Instances and schedules are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns a
//! [`CfStatus`]; on failure, [`cf_last_error_message`] describes the error.
//! Strings returned through `char **` must be released with [`cf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use conflict_forest::caps::Caps;
use conflict_forest::instance::{Algorithm, Instance, InstanceFile, ScheduleReport};
use conflict_forest::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    VerificationFailed = 1,
    InputError = 2,
    CapExceeded = 3,
    NullPointer = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfAlgorithm {
    Conn = 0,
    MstGreedy = 1,
    Steiner = 2,
}

impl From<CfAlgorithm> for Algorithm {
    fn from(a: CfAlgorithm) -> Self {
        match a {
            CfAlgorithm::Conn => Algorithm::Conn,
            CfAlgorithm::MstGreedy => Algorithm::MstGreedy,
            CfAlgorithm::Steiner => Algorithm::Steiner,
        }
    }
}

/// A parsed instance.
pub struct CfInstance {
    inner: Instance,
}

/// A schedule report produced by [`cf_schedule`].
pub struct CfSchedule {
    report: ScheduleReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    let text = CString::new(message).expect("nul bytes were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> CfStatus {
    match e {
        Error::CapExceeded { .. } => CfStatus::CapExceeded,
        Error::Internal(_) => CfStatus::Internal,
        _ => CfStatus::InputError,
    }
}

// Runs `f`, turning errors and panics into a status and the thread's error message.
fn guarded(f: impl FnOnce() -> Result<CfStatus, (CfStatus, String)>) -> CfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CfStatus::Internal
        }
    }
}

fn fail(e: Error) -> (CfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (CfStatus, String) {
    (CfStatus::NullPointer, format!("{name} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (CfStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CfStatus::InputError, format!("{name} is not valid UTF-8")))
}

/// Parses an instance from JSON. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_instance_from_json(json: *const c_char, out: *mut *mut CfInstance) -> CfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = read_str(json, "json")?;
        let inner = InstanceFile::from_json(text).and_then(|f| f.build()).map_err(fail)?;
        *out = Box::into_raw(Box::new(CfInstance { inner }));
        Ok(CfStatus::Ok)
    })
}

/// # Safety
/// `instance` must come from [`cf_instance_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cf_instance_free(instance: *mut CfInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Node count, or 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_instance_node_count(instance: *const CfInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.graph.node_count())
}

/// Link count, or 0 for a null handle.
///
/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_instance_link_count(instance: *const CfInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.graph.link_count())
}

/// Schedules the instance. The schedule is returned even when the
/// independent check rejects it, with status `VerificationFailed`.
///
/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_schedule(
    instance: *const CfInstance,
    algorithm: CfAlgorithm,
    dual: bool,
    out: *mut *mut CfSchedule,
) -> CfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let instance = instance.as_ref().ok_or_else(|| null("instance"))?;
        let caps = Caps::from_env().map_err(fail)?;
        let report = instance.inner.schedule(algorithm.into(), dual, &caps).map_err(fail)?;
        let ok = report.verification.ok();
        *out = Box::into_raw(Box::new(CfSchedule { report }));
        if ok {
            Ok(CfStatus::Ok)
        } else {
            set_error("schedule failed verification");
            Ok(CfStatus::VerificationFailed)
        }
    })
}

/// # Safety
/// `schedule` must come from [`cf_schedule`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cf_schedule_free(schedule: *mut CfSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

/// Number of slots, or 0 for a null handle.
///
/// # Safety
/// `schedule` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_schedule_slot_count(schedule: *const CfSchedule) -> usize {
    schedule.as_ref().map_or(0, |s| s.report.slots.len())
}

/// Number of links in `slot`, or 0 if the handle is null or the slot does not exist.
///
/// # Safety
/// `schedule` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_schedule_slot_len(schedule: *const CfSchedule, slot: usize) -> usize {
    schedule
        .as_ref()
        .and_then(|s| s.report.slots.get(slot))
        .map_or(0, |s| s.len())
}

/// Copies up to `capacity` link ids of `slot` into `buffer` and stores the
/// slot's full length in `*len`.
///
/// # Safety
/// `buffer` must hold `capacity` elements (it may be null when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn cf_schedule_slot_links(
    schedule: *const CfSchedule,
    slot: usize,
    buffer: *mut usize,
    capacity: usize,
    len: *mut usize,
) -> CfStatus {
    guarded(|| {
        let schedule = schedule.as_ref().ok_or_else(|| null("schedule"))?;
        if len.is_null() {
            return Err(null("len"));
        }
        if buffer.is_null() && capacity > 0 {
            return Err(null("buffer"));
        }
        let links = schedule.report.slots.get(slot).ok_or_else(|| {
            (
                CfStatus::InputError,
                format!("slot {slot} out of range ({} slots)", schedule.report.slots.len()),
            )
        })?;
        for (i, id) in links.links().iter().take(capacity).enumerate() {
            *buffer.add(i) = id.0;
        }
        *len = links.len();
        Ok(CfStatus::Ok)
    })
}

/// Canonical JSON of the schedule report; release with [`cf_string_free`].
///
/// # Safety
/// `schedule` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cf_schedule_to_json(schedule: *const CfSchedule, out: *mut *mut c_char) -> CfStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let schedule = schedule.as_ref().ok_or_else(|| null("schedule"))?;
        let text = schedule.report.to_json().map_err(fail)?;
        let text = CString::new(text).map_err(|_| (CfStatus::Internal, "report contains a nul byte".to_string()))?;
        *out = text.into_raw();
        Ok(CfStatus::Ok)
    })
}

/// Checks a schedule report (JSON) against the instance: `Ok` if valid,
/// `VerificationFailed` with the first violation as the error message otherwise.
///
/// # Safety
/// `instance` must be a live handle and `report_json` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cf_verify_json(instance: *const CfInstance, report_json: *const c_char) -> CfStatus {
    guarded(|| {
        let instance = instance.as_ref().ok_or_else(|| null("instance"))?;
        let report = ScheduleReport::from_json(read_str(report_json, "report_json")?).map_err(fail)?;
        match instance.inner.verify_report(&report).first_violation() {
            None => Ok(CfStatus::Ok),
            Some(v) => Err((CfStatus::VerificationFailed, v.to_string())),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cf_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
