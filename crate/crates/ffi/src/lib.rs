//! C bindings for erpgraph.
//!
//! Every function returns an [`ErpgStatus`]. On failure the message is
//! available from [`erpg_last_error`] on the same thread. Strings handed out
//! through `char **out` parameters are owned by the caller and released with
//! [`erpg_string_free`]; handles are released with their `_free` function.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use erpgraph::graph::subgraph_export;
use erpgraph::identify::TableSelection;
use erpgraph::ocel::{serialize_ocel, validate_ocel, ExtractionConfig};
use erpgraph::workspace::HubLimit;
use erpgraph::{Error, ErrorKind, Settings, Workspace};

/// Result of every call. Nonzero values other than the last two match the
/// CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErpgStatus {
    ErpgOk = 0,
    ErpgIo = 1,
    ErpgUsage = 2,
    ErpgParse = 3,
    ErpgUnknownEntity = 4,
    ErpgExtraction = 5,
    ErpgValidation = 6,
    /// A null pointer or non-UTF-8 string was passed.
    ErpgInvalidArgument = 7,
    ErpgPanic = 8,
}

impl From<ErrorKind> for ErpgStatus {
    fn from(kind: ErrorKind) -> Self {
        match kind {
            ErrorKind::Io => ErpgStatus::ErpgIo,
            ErrorKind::Usage => ErpgStatus::ErpgUsage,
            ErrorKind::Parse => ErpgStatus::ErpgParse,
            ErrorKind::UnknownEntity => ErpgStatus::ErpgUnknownEntity,
            ErrorKind::Extraction => ErpgStatus::ErpgExtraction,
            ErrorKind::Validation => ErpgStatus::ErpgValidation,
        }
    }
}

/// A loaded dataset.
pub struct ErpgDataset {
    workspace: Workspace,
}

/// A table selection.
pub struct ErpgSelection {
    selection: TableSelection,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Failure(ErpgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.kind().into(), e.to_string())
    }
}

fn invalid(what: &str) -> Failure {
    Failure(ErpgStatus::ErpgInvalidArgument, what.to_string())
}

/// Runs `f`, recording failures and containing panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ErpgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ErpgStatus::ErpgOk,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            ErpgStatus::ErpgPanic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(&format!("{what} is not UTF-8")))
}

unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn hub_limit(p: *const c_char) -> Result<Option<HubLimit>, Failure> {
    optional_text(p, "hub_limit")?
        .map(|s| s.parse::<HubLimit>().map_err(|m| Failure(ErpgStatus::ErpgUsage, m)))
        .transpose()
}

unsafe fn reference<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| invalid(&format!("{what} is null")))
}

unsafe fn reference_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| invalid(&format!("{what} is null")))
}

unsafe fn put_string(out: *mut *mut c_char, value: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(invalid("out is null"));
    }
    let c = CString::new(value).map_err(|_| Failure(ErpgStatus::ErpgIo, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(invalid("out is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string(value).map_err(|e| Failure(ErpgStatus::ErpgIo, e.to_string()))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn erpg_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn erpg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opens the dataset directory `dir` with default settings.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erpg_dataset_open(dir: *const c_char, out: *mut *mut ErpgDataset) -> ErpgStatus {
    guard(|| {
        let dir = text(dir, "dir")?;
        let workspace = Workspace::open(dir, Settings::default())?;
        put_handle(out, ErpgDataset { workspace })
    })
}

/// # Safety
/// `ds` must be null or a live handle from [`erpg_dataset_open`].
#[no_mangle]
pub unsafe extern "C" fn erpg_dataset_free(ds: *mut ErpgDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// The document classes as a JSON array.
///
/// # Safety
/// `ds` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erpg_dataset_classes_json(ds: *const ErpgDataset, out: *mut *mut c_char) -> ErpgStatus {
    guard(|| {
        let ds = reference(ds, "dataset")?;
        put_string(out, json(&ds.workspace.classes().classes())?)
    })
}

/// Seeds a selection on `class_id` and expands it `depth` hops. `hub_limit`
/// is `"auto"`, `"none"`, a number, or null for the default.
///
/// # Safety
/// Pointers must be valid; `hub_limit` may be null.
#[no_mangle]
pub unsafe extern "C" fn erpg_identify(
    ds: *const ErpgDataset,
    class_id: *const c_char,
    depth: usize,
    hub_limit: *const c_char,
    out: *mut *mut ErpgSelection,
) -> ErpgStatus {
    guard(|| {
        let ds = reference(ds, "dataset")?;
        let class_id = text(class_id, "class_id")?;
        let selection = ds.workspace.identify(class_id, depth, self::hub_limit(hub_limit)?)?;
        put_handle(out, ErpgSelection { selection })
    })
}

/// Expands `sel` in place.
///
/// # Safety
/// Pointers must be valid; `hub_limit` may be null.
#[no_mangle]
pub unsafe extern "C" fn erpg_selection_expand(
    ds: *const ErpgDataset,
    sel: *mut ErpgSelection,
    depth: usize,
    hub_limit: *const c_char,
) -> ErpgStatus {
    guard(|| {
        let ds = reference(ds, "dataset")?;
        let sel = reference_mut(sel, "selection")?;
        let limit = ds.workspace.hub_limit(self::hub_limit(hub_limit)?);
        sel.selection = ds
            .workspace
            .identifier()
            .expand_selection(&sel.selection, depth, limit)
            .map_err(Error::from)?;
        Ok(())
    })
}

/// Includes or excludes `table` in place.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn erpg_selection_toggle(
    ds: *const ErpgDataset,
    sel: *mut ErpgSelection,
    table: *const c_char,
    included: bool,
) -> ErpgStatus {
    guard(|| {
        let ds = reference(ds, "dataset")?;
        let sel = reference_mut(sel, "selection")?;
        let table = text(table, "table")?;
        sel.selection = ds
            .workspace
            .identifier()
            .toggle_table(&sel.selection, table, included)
            .map_err(Error::from)?;
        Ok(())
    })
}

/// # Safety
/// `sel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erpg_selection_to_json(sel: *const ErpgSelection, out: *mut *mut c_char) -> ErpgStatus {
    guard(|| {
        let sel = reference(sel, "selection")?;
        put_string(out, json(&sel.selection)?)
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erpg_selection_from_json(json: *const c_char, out: *mut *mut ErpgSelection) -> ErpgStatus {
    guard(|| {
        let json = text(json, "json")?;
        let selection: TableSelection = serde_json::from_str(json)
            .map_err(|e| Failure(ErpgStatus::ErpgParse, format!("not a selection document: {e}")))?;
        put_handle(out, ErpgSelection { selection })
    })
}

/// # Safety
/// `sel` must be null or a live selection handle.
#[no_mangle]
pub unsafe extern "C" fn erpg_selection_free(sel: *mut ErpgSelection) {
    if !sel.is_null() {
        drop(Box::from_raw(sel));
    }
}

/// Extracts an OCEL JSON document from `sel` under `config_json`.
///
/// # Safety
/// Pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erpg_extract(
    ds: *const ErpgDataset,
    sel: *const ErpgSelection,
    config_json: *const c_char,
    out: *mut *mut c_char,
) -> ErpgStatus {
    guard(|| {
        let ds = reference(ds, "dataset")?;
        let sel = reference(sel, "selection")?;
        let config = ExtractionConfig::from_reader(text(config_json, "config_json")?.as_bytes()).map_err(Error::from)?;
        let log = ds.workspace.extract(&sel.selection, &config, |_, _| {})?;
        let bytes = serialize_ocel(&log);
        put_string(out, String::from_utf8(bytes).map_err(|e| Failure(ErpgStatus::ErpgIo, e.to_string()))?)
    })
}

/// Validates an OCEL document. The findings report is written to `out` in
/// both cases; the status is `ErpgValidation` when there are findings.
///
/// # Safety
/// `ocel_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erpg_validate_ocel(ocel_json: *const c_char, out: *mut *mut c_char) -> ErpgStatus {
    guard(|| {
        let report = validate_ocel(text(ocel_json, "ocel_json")?.as_bytes());
        put_string(out, json(&report)?)?;
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::Validation(report.findings.len()).into())
        }
    })
}

/// The whole schema graph with layout coordinates, as JSON.
///
/// # Safety
/// `ds` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erpg_layout_json(
    ds: *const ErpgDataset,
    seed: u64,
    iterations: usize,
    out: *mut *mut c_char,
) -> ErpgStatus {
    guard(|| {
        let ds = reference(ds, "dataset")?;
        let g = ds.workspace.graph();
        let placed = ds.workspace.layout(seed, iterations);
        let doc = subgraph_export(g, g.nodes().iter().map(|n| n.id.as_str()), Some(&placed)).map_err(Error::from)?;
        put_string(out, doc.to_json())
    })
}
