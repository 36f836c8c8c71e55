//! C ABI over `cdi-registry`.
//!
//! Records cross the boundary as canonical JSON strings. Every function
//! returns a [`CdiStatus`]; on failure a message is available from
//! [`cdi_last_error`] until the next call on the same thread. Strings handed
//! out through `out` parameters are owned by the caller and must be released
//! with [`cdi_string_free`]. Stores are opaque handles released with
//! [`cdi_store_close`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cdi_registry::api::parse_submission;
use cdi_registry::schema::{eu_serious_incident, from_canonical_json, redact, AccessTier, CodecError};
use cdi_registry::store::{QueryFilter, ReviewAction, ReviewEvent, Store, StoreError};
use cdi_registry::{count_words, validate_incident, IncidentId};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdiStatus {
    Ok = 0,
    /// Null pointer, non-UTF-8 text or an unparseable argument.
    InvalidArgument = 1,
    ParseError = 2,
    SchemaError = 3,
    ValidationFailed = 4,
    NotFound = 5,
    IllegalTransition = 6,
    MissingReason = 7,
    BadFilter = 8,
    Locked = 9,
    Io = 10,
    Internal = 11,
}

/// Opaque store handle.
pub struct CdiStore {
    inner: Store,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(CdiStatus, String);

impl From<CodecError> for Fail {
    fn from(e: CodecError) -> Self {
        let status = match e {
            CodecError::Parse(_) => CdiStatus::ParseError,
            CodecError::Schema(_) => CdiStatus::SchemaError,
        };
        Fail(status, e.to_string())
    }
}

impl From<StoreError> for Fail {
    fn from(e: StoreError) -> Self {
        let status = match &e {
            StoreError::Validation(_) => CdiStatus::ValidationFailed,
            StoreError::NotFound(_) => CdiStatus::NotFound,
            StoreError::IllegalTransition { .. } | StoreError::NotPublished(_) => CdiStatus::IllegalTransition,
            StoreError::MissingReason => CdiStatus::MissingReason,
            StoreError::BadFilter(_) => CdiStatus::BadFilter,
            StoreError::Locked(_) => CdiStatus::Locked,
            StoreError::Io(_) => CdiStatus::Io,
            StoreError::IdMismatch { .. } => CdiStatus::InvalidArgument,
            StoreError::ReadOnly | StoreError::IdsExhausted | StoreError::Corrupt(_) => CdiStatus::Internal,
        };
        Fail(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(CdiStatus::InvalidArgument, msg.into())
}

// Runs `f`, records its error message, and turns panics into Internal.
fn guard(f: impl FnOnce() -> Result<CdiStatus, Fail>) -> CdiStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CdiStatus::Internal
        }
    }
}

unsafe fn c_text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn opt_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        c_text(p, what).map(Some)
    }
}

unsafe fn put(out: *mut *mut c_char, value: impl Into<Vec<u8>>) -> Result<(), Fail> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    let s = CString::new(value).map_err(|_| Fail(CdiStatus::Internal, "output contains NUL".into()))?;
    *out = s.into_raw();
    Ok(())
}

unsafe fn store_ref<'a>(store: *const CdiStore) -> Result<&'a Store, Fail> {
    store
        .as_ref()
        .map(|s| &s.inner)
        .ok_or_else(|| invalid("store handle is null"))
}

fn parse_id(s: &str) -> Result<IncidentId, Fail> {
    s.parse().map_err(|e: String| invalid(e))
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread; do not free.
#[no_mangle]
pub extern "C" fn cdi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code, e.g. "CDI_STATUS_NOT_FOUND". Do not free.
#[no_mangle]
pub extern "C" fn cdi_status_name(status: CdiStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CdiStatus::Ok => c"CDI_STATUS_OK",
        CdiStatus::InvalidArgument => c"CDI_STATUS_INVALID_ARGUMENT",
        CdiStatus::ParseError => c"CDI_STATUS_PARSE_ERROR",
        CdiStatus::SchemaError => c"CDI_STATUS_SCHEMA_ERROR",
        CdiStatus::ValidationFailed => c"CDI_STATUS_VALIDATION_FAILED",
        CdiStatus::NotFound => c"CDI_STATUS_NOT_FOUND",
        CdiStatus::IllegalTransition => c"CDI_STATUS_ILLEGAL_TRANSITION",
        CdiStatus::MissingReason => c"CDI_STATUS_MISSING_REASON",
        CdiStatus::BadFilter => c"CDI_STATUS_BAD_FILTER",
        CdiStatus::Locked => c"CDI_STATUS_LOCKED",
        CdiStatus::Io => c"CDI_STATUS_IO",
        CdiStatus::Internal => c"CDI_STATUS_INTERNAL",
    };
    s.as_ptr()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn cdi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Whitespace-delimited word count, or -1 if `text` is null or not UTF-8.
///
/// # Safety
/// `text` must be null or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cdi_count_words(text: *const c_char) -> i64 {
    match c_text(text, "text") {
        Ok(t) => count_words(t) as i64,
        Err(Fail(_, msg)) => {
            set_error(msg);
            -1
        }
    }
}

/// Validates one canonical record. Writes the validation report JSON to
/// `out_report` and returns `Ok` if valid, `ValidationFailed` if not.
///
/// # Safety
/// `record_json` must be a NUL-terminated string and `out_report` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn cdi_validate(record_json: *const c_char, out_report: *mut *mut c_char) -> CdiStatus {
    guard(|| {
        let record = from_canonical_json(c_text(record_json, "record_json")?.as_bytes())?;
        let report = validate_incident(&record);
        put(out_report, serde_json::to_vec(&report).expect("serializes"))?;
        Ok(if report.is_valid() {
            CdiStatus::Ok
        } else {
            CdiStatus::ValidationFailed
        })
    })
}

/// Writes the public (redacted) view of a record.
///
/// # Safety
/// `record_json` must be a NUL-terminated string and `out_json` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn cdi_redact_public(record_json: *const c_char, out_json: *mut *mut c_char) -> CdiStatus {
    guard(|| {
        let record = from_canonical_json(c_text(record_json, "record_json")?.as_bytes())?;
        put(out_json, redact(&record, AccessTier::Public).to_json())?;
        Ok(CdiStatus::Ok)
    })
}

/// Serious-incident assessment: sets `*out_serious` and, if `out_json` is
/// not null, writes `{"serious":..,"clauses":[..]}`.
///
/// # Safety
/// `record_json` must be a NUL-terminated string; `out_serious` must be
/// valid; `out_json` may be null.
#[no_mangle]
pub unsafe extern "C" fn cdi_serious_incident(
    record_json: *const c_char,
    out_serious: *mut bool,
    out_json: *mut *mut c_char,
) -> CdiStatus {
    guard(|| {
        if out_serious.is_null() {
            return Err(invalid("out_serious is null"));
        }
        let record = from_canonical_json(c_text(record_json, "record_json")?.as_bytes())?;
        let a = eu_serious_incident(&record);
        *out_serious = a.serious;
        if !out_json.is_null() {
            put(out_json, serde_json::to_vec(&a).expect("serializes"))?;
        }
        Ok(CdiStatus::Ok)
    })
}

/// Opens (creating if needed) a store directory and takes its lock.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out_store` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdi_store_open(dir: *const c_char, out_store: *mut *mut CdiStore) -> CdiStatus {
    guard(|| {
        if out_store.is_null() {
            return Err(invalid("out_store is null"));
        }
        let store = Store::open(c_text(dir, "dir")?)?;
        *out_store = Box::into_raw(Box::new(CdiStore { inner: store }));
        Ok(CdiStatus::Ok)
    })
}

/// A store that keeps nothing on disk. Never null.
#[no_mangle]
pub extern "C" fn cdi_store_open_in_memory() -> *mut CdiStore {
    Box::into_raw(Box::new(CdiStore {
        inner: Store::in_memory(),
    }))
}

/// Releases a store handle and its lock. Null is ignored.
///
/// # Safety
/// `store` must be null or a handle from this library, closed once.
#[no_mangle]
pub unsafe extern "C" fn cdi_store_close(store: *mut CdiStore) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// Submits a record (its `incident_id` may be empty or absent) and writes
/// the allocated id.
///
/// # Safety
/// `store` must be a live handle, `record_json` a NUL-terminated string and
/// `out_id` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cdi_store_submit(
    store: *const CdiStore,
    record_json: *const c_char,
    out_id: *mut *mut c_char,
) -> CdiStatus {
    guard(|| {
        let store = store_ref(store)?;
        let record = parse_submission(c_text(record_json, "record_json")?.as_bytes())?;
        let id = store.submit(record)?;
        put(out_id, id.to_string())?;
        Ok(CdiStatus::Ok)
    })
}

/// Applies "claim", "approve" or "reject" and writes the new state name.
/// `reason` may be null except for reject. `out_state` may be null.
///
/// # Safety
/// `store` must be a live handle; string arguments must be NUL-terminated
/// or, where noted, null.
#[no_mangle]
pub unsafe extern "C" fn cdi_store_review(
    store: *const CdiStore,
    incident_id: *const c_char,
    action: *const c_char,
    reviewer_id: *const c_char,
    reason: *const c_char,
    out_state: *mut *mut c_char,
) -> CdiStatus {
    guard(|| {
        let store = store_ref(store)?;
        let id = parse_id(c_text(incident_id, "incident_id")?)?;
        let action: ReviewAction = c_text(action, "action")?.parse().map_err(invalid)?;
        let mut event = ReviewEvent::new(id, action, c_text(reviewer_id, "reviewer_id")?);
        event.reason = opt_text(reason, "reason")?.map(str::to_string);
        let state = store.review(id, event)?;
        if !out_state.is_null() {
            put(out_state, state.as_str())?;
        }
        Ok(CdiStatus::Ok)
    })
}

/// Writes one incident. Public callers (`reviewer == false`) only see
/// published incidents, redacted; reviewers get the full detail with
/// state and history.
///
/// # Safety
/// `store` must be a live handle, `incident_id` NUL-terminated and
/// `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn cdi_store_get(
    store: *const CdiStore,
    incident_id: *const c_char,
    reviewer: bool,
    out_json: *mut *mut c_char,
) -> CdiStatus {
    guard(|| {
        let store = store_ref(store)?;
        let id = parse_id(c_text(incident_id, "incident_id")?)?;
        let bytes = if reviewer {
            serde_json::to_vec(&store.detail(id)?).expect("serializes")
        } else {
            store.get(id, AccessTier::Public)?.to_json()
        };
        put(out_json, bytes)?;
        Ok(CdiStatus::Ok)
    })
}

/// Runs a query. `filter_json` is a filter object such as
/// `{"severity":["Critical"],"harm_kinds":["physical"]}` or null for no
/// filter. Writes a JSON array of views.
///
/// # Safety
/// `store` must be a live handle, `filter_json` null or NUL-terminated, and
/// `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn cdi_store_query(
    store: *const CdiStore,
    filter_json: *const c_char,
    reviewer: bool,
    out_json: *mut *mut c_char,
) -> CdiStatus {
    guard(|| {
        let store = store_ref(store)?;
        let filter: QueryFilter = match opt_text(filter_json, "filter_json")? {
            None => QueryFilter::default(),
            Some(t) => serde_json::from_str(t).map_err(|e| Fail(CdiStatus::BadFilter, e.to_string()))?,
        };
        let tier = if reviewer {
            AccessTier::Reviewer
        } else {
            AccessTier::Public
        };
        let views = store.query(&filter, tier)?;
        put(out_json, serde_json::to_vec(&views).expect("serializes"))?;
        Ok(CdiStatus::Ok)
    })
}

/// Writes the public JSON Lines export of published incidents.
///
/// # Safety
/// `store` must be a live handle and `out_jsonl` valid.
#[no_mangle]
pub unsafe extern "C" fn cdi_store_export(store: *const CdiStore, out_jsonl: *mut *mut c_char) -> CdiStatus {
    guard(|| {
        let store = store_ref(store)?;
        put(out_jsonl, store.export_public())?;
        Ok(CdiStatus::Ok)
    })
}
