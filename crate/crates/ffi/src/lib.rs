//! C interface over opaque workspace and report handles.
//!
//! Every fallible call returns a `TkStatus`; on failure the message is
//! available from `tk_last_error` on the same thread. A failed mathematical
//! check is not an error: the call succeeds and the report says it failed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use graded_tannaka::document::{bundled_text, CertBundle, DocError, Workspace};
use graded_tannaka::report::{run, Method, Options};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TkStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Schema = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TkMethod {
    Lefschetz = 0,
    Semisimple = 1,
}

/// A parsed document with its category, fiber functor and window.
pub struct TkWorkspace {
    ws: Workspace,
}

/// A finished query, rendered both ways.
pub struct TkReport {
    machine: CString,
    human: CString,
    pass: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Fail = (TkStatus, String);

fn set_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TkStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (TkStatus::Ok, None),
        Ok(Err((s, m))) => (s, Some(m)),
        Err(_) => (TkStatus::Panic, Some("internal panic".to_string())),
    };
    set_error(msg);
    status
}

fn doc_fail(e: DocError) -> Fail {
    match e {
        DocError::Parse { .. } => (TkStatus::Parse, e.to_string()),
        _ => (TkStatus::Schema, e.to_string()),
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err((TkStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (TkStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn cstring(s: String) -> CString {
    CString::new(s.replace('\0', " ")).expect("no interior nul")
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err((TkStatus::NullArgument, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn tk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on this thread.
#[no_mangle]
pub extern "C" fn tk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a JSON document.
///
/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tk_workspace_parse(json: *const c_char, out: *mut *mut TkWorkspace) -> TkStatus {
    guard(|| {
        let ws = Workspace::parse(text(json, "document")?).map_err(doc_fail)?;
        put(out, TkWorkspace { ws })
    })
}

/// Opens a document file, or a bundled dataset by name.
///
/// # Safety
/// `path` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tk_workspace_open(path: *const c_char, out: *mut *mut TkWorkspace) -> TkStatus {
    guard(|| {
        let p = text(path, "path")?;
        let body = match std::fs::read_to_string(p) {
            Ok(s) => s,
            Err(e) => bundled_text(p).map(str::to_string).ok_or((TkStatus::Io, format!("{p}: {e}")))?,
        };
        let ws = Workspace::parse(&body).map_err(doc_fail)?;
        put(out, TkWorkspace { ws })
    })
}

/// Replaces the window by comma-separated labels.
///
/// # Safety
/// `ws` comes from this library; `labels` is a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tk_workspace_set_window(ws: *mut TkWorkspace, labels: *const c_char) -> TkStatus {
    guard(|| {
        let ws = ws.as_mut().ok_or((TkStatus::NullArgument, "workspace is null".into()))?;
        let labels: Vec<String> = text(labels, "labels")?.split(',').map(|s| s.trim().to_string()).collect();
        ws.ws.set_window(&labels).map_err(doc_fail)
    })
}

/// # Safety
/// `ws` is null or comes from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tk_workspace_free(ws: *mut TkWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

unsafe fn finish(w: &TkWorkspace, verb: &str, args: &[String], opts: &Options, out: *mut *mut TkReport) -> Result<(), Fail> {
    let r = run(&w.ws, verb, args, opts).map_err(doc_fail)?;
    let rep = TkReport { machine: cstring(r.machine(&w.ws)), human: cstring(r.human()), pass: r.pass };
    put(out, rep)
}

/// Runs `verb` (validate, hom, fiber, split, twist, check) with `argc`
/// arguments. With no arguments, hom, fiber and split answer the document's
/// queries and check runs every suite.
///
/// # Safety
/// `ws` comes from this library; `verb` and the `argc` entries of `argv`
/// are nul-terminated strings; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tk_run(
    ws: *const TkWorkspace,
    verb: *const c_char,
    argv: *const *const c_char,
    argc: usize,
    depth: usize,
    method: TkMethod,
    out: *mut *mut TkReport,
) -> TkStatus {
    guard(|| {
        let w = ws.as_ref().ok_or((TkStatus::NullArgument, "workspace is null".into()))?;
        let verb = text(verb, "verb")?;
        if argc > 0 && argv.is_null() {
            return Err((TkStatus::NullArgument, "argv is null".into()));
        }
        let args = (0..argc).map(|i| text(*argv.add(i), "argument").map(str::to_string)).collect::<Result<Vec<_>, _>>()?;
        let method = match method {
            TkMethod::Lefschetz => Method::Lefschetz,
            TkMethod::Semisimple => Method::Semisimple,
        };
        finish(w, verb, &args, &Options { depth, method, bundle: None }, out)
    })
}

/// Replays the certificates of a machine report against the workspace.
///
/// # Safety
/// `ws` comes from this library; `report` is a nul-terminated string;
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn tk_replay(ws: *const TkWorkspace, report: *const c_char, out: *mut *mut TkReport) -> TkStatus {
    guard(|| {
        let w = ws.as_ref().ok_or((TkStatus::NullArgument, "workspace is null".into()))?;
        let bundle = CertBundle::from_report(text(report, "report")?).map_err(|e| (TkStatus::Parse, e))?;
        finish(w, "replay", &[], &Options { bundle: Some(bundle), ..Options::default() }, out)
    })
}

/// # Safety
/// `r` comes from this library.
#[no_mangle]
pub unsafe extern "C" fn tk_report_passed(r: *const TkReport) -> bool {
    r.as_ref().is_some_and(|r| r.pass)
}

/// 0 when the report passed, 1 otherwise.
///
/// # Safety
/// `r` comes from this library.
#[no_mangle]
pub unsafe extern "C" fn tk_report_exit_code(r: *const TkReport) -> i32 {
    if tk_report_passed(r) { 0 } else { 1 }
}

/// Machine report JSON, owned by the report.
///
/// # Safety
/// `r` comes from this library.
#[no_mangle]
pub unsafe extern "C" fn tk_report_machine(r: *const TkReport) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.machine.as_ptr())
}

/// Human-readable report, owned by the report.
///
/// # Safety
/// `r` comes from this library.
#[no_mangle]
pub unsafe extern "C" fn tk_report_human(r: *const TkReport) -> *const c_char {
    r.as_ref().map_or(ptr::null(), |r| r.human.as_ptr())
}

/// # Safety
/// `r` is null or comes from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tk_report_free(r: *mut TkReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
