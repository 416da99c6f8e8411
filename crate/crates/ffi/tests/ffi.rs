use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use graded_tannaka_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn open(name: &str) -> *mut TkWorkspace {
    let mut ws = ptr::null_mut();
    assert_eq!(tk_workspace_open(c(name).as_ptr(), &mut ws), TkStatus::Ok);
    ws
}

unsafe fn run(ws: *const TkWorkspace, verb: &str, args: &[&str]) -> (TkStatus, *mut TkReport) {
    let owned: Vec<CString> = args.iter().map(|a| c(a)).collect();
    let argv: Vec<_> = owned.iter().map(|a| a.as_ptr()).collect();
    let mut r = ptr::null_mut();
    let s = tk_run(ws, c(verb).as_ptr(), argv.as_ptr(), argv.len(), 2, TkMethod::Lefschetz, &mut r);
    (s, r)
}

fn last_error() -> String {
    let p = tk_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn hom_round_trip_through_handles() {
    unsafe {
        let ws = open("rep-z2");
        let (s, r) = run(ws, "hom", &["triv", "triv"]);
        assert_eq!(s, TkStatus::Ok);
        assert!(tk_report_passed(r));
        assert_eq!(tk_report_exit_code(r), 0);
        let machine = CStr::from_ptr(tk_report_machine(r)).to_str().unwrap().to_owned();
        assert!(machine.contains("\"met\": true"));
        assert!(CStr::from_ptr(tk_report_human(r)).to_str().unwrap().starts_with("hom"));

        let mut back = ptr::null_mut();
        assert_eq!(tk_replay(ws, c(&machine).as_ptr(), &mut back), TkStatus::Ok);
        assert!(tk_report_passed(back));
        tk_report_free(back);
        tk_report_free(r);
        tk_workspace_free(ws);
    }
}

#[test]
fn failures_map_to_status_codes() {
    unsafe {
        let mut ws = ptr::null_mut();
        assert_eq!(tk_workspace_parse(c("{\n  oops").as_ptr(), &mut ws), TkStatus::Parse);
        assert!(last_error().contains("line 2"), "{}", last_error());
        assert!(ws.is_null());
        assert_eq!(tk_workspace_parse(ptr::null(), &mut ws), TkStatus::NullArgument);
        assert_eq!(tk_workspace_open(c("/no/such/file").as_ptr(), &mut ws), TkStatus::Io);
        assert_eq!(tk_workspace_parse(c("{}").as_ptr(), &mut ws), TkStatus::Parse);

        let ws = open("point");
        let (s, r) = run(ws, "hom", &["1", "nowhere"]);
        assert_eq!(s, TkStatus::Schema);
        assert!(r.is_null());
        assert!(last_error().contains("nowhere"));
        assert_eq!(tk_workspace_set_window(ws, c("1,nowhere").as_ptr()), TkStatus::Schema);
        assert_eq!(tk_workspace_set_window(ws, c("1").as_ptr()), TkStatus::Ok);
        assert!(tk_last_error().is_null());
        tk_workspace_free(ws);
        tk_workspace_free(ptr::null_mut());
        tk_report_free(ptr::null_mut());
    }
}

#[test]
fn mathematical_failure_is_a_failed_report() {
    unsafe {
        let ws = open("rep-z-unipotent");
        let (s, r) = run(ws, "check", &["semisimple"]);
        assert_eq!(s, TkStatus::Ok);
        assert!(!tk_report_passed(r));
        assert_eq!(tk_report_exit_code(r), 1);
        tk_report_free(r);
        tk_workspace_free(ws);
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(tk_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn c_program_links_against_the_header() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<this test> -> target/<profile>
    let profile = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile.join("libgraded_tannaka_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let exe = profile.join("tannaka-smoke");
    let cc = Command::new("cc")
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .expect("cc runs");
    assert!(cc.status.success(), "{}", String::from_utf8_lossy(&cc.stderr));
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("split genus-1: PASS"));
}
