use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qplane_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    qp_string_free(p);
    s
}

#[test]
fn normalize_reorders_and_specializes() {
    unsafe {
        let e = qp_engine_new(QpMode::Specialized);
        let mut out = ptr::null_mut();
        assert_eq!(
            qp_normalize(e, cstr("y*x").as_ptr(), &mut out),
            QpStatus::Ok
        );
        assert_eq!(take(out), "(-1 - j) * x*y");
        qp_engine_free(e);

        let e = qp_engine_new(QpMode::Symbolic);
        assert_eq!(
            qp_normalize(e, cstr("y*x").as_ptr(), &mut out),
            QpStatus::Ok
        );
        assert_eq!(take(out), "q^-1 * x*y");
        qp_engine_free(e);
    }
}

#[test]
fn differential_and_pairing() {
    unsafe {
        let e = qp_engine_new(QpMode::Specialized);
        let mut out = ptr::null_mut();
        assert_eq!(
            qp_differential(e, cstr("x*y").as_ptr(), 3, &mut out),
            QpStatus::Ok
        );
        assert_eq!(take(out), "0");
        assert_eq!(
            qp_differential(e, cstr("x").as_ptr(), 1, &mut out),
            QpStatus::Ok
        );
        assert_eq!(take(out), "dx");
        assert_eq!(
            qp_pair(e, cstr("B").as_ptr(), cstr("y*x").as_ptr(), &mut out),
            QpStatus::Ok
        );
        assert_eq!(take(out), "-1 - j");
        assert_eq!(
            qp_act(e, cstr("H").as_ptr(), cstr("x").as_ptr(), &mut out),
            QpStatus::Ok
        );
        assert_eq!(take(out), "x");
        qp_engine_free(e);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let e = qp_engine_new(QpMode::Specialized);
        let mut out = ptr::null_mut();
        assert_eq!(
            qp_normalize(e, cstr("x**").as_ptr(), &mut out),
            QpStatus::ParseError
        );
        assert!(out.is_null());
        let msg = CStr::from_ptr(qp_last_error()).to_str().unwrap();
        assert!(msg.contains("parse"), "{msg}");

        assert_eq!(
            qp_normalize(ptr::null(), cstr("x").as_ptr(), &mut out),
            QpStatus::NullArgument
        );
        assert_eq!(
            qp_normalize(e, ptr::null(), &mut out),
            QpStatus::NullArgument
        );
        assert_eq!(
            qp_normalize(e, cstr("x").as_ptr(), ptr::null_mut()),
            QpStatus::NullArgument
        );

        let bad = [0xffu8, 0];
        assert_eq!(
            qp_normalize(e, bad.as_ptr() as *const c_char, &mut out),
            QpStatus::InvalidUtf8
        );

        assert_eq!(
            qp_differential(e, cstr("x*dx*dy*dx").as_ptr(), 1, &mut out),
            QpStatus::Ok
        );
        qp_string_free(out);
        assert_eq!(
            qp_verify(e, cstr("nope").as_ptr(), 4, 3, 0, &mut out),
            QpStatus::Unsupported
        );
        qp_engine_free(e);
        qp_engine_free(ptr::null_mut());
        qp_string_free(ptr::null_mut());
    }
}

#[test]
fn verify_returns_json_report() {
    unsafe {
        let e = qp_engine_new(QpMode::Specialized);
        let mut out = ptr::null_mut();
        assert_eq!(
            qp_verify(e, cstr("calculus").as_ptr(), 4, 3, 7, &mut out),
            QpStatus::Ok
        );
        let json: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(json["suite"], "calculus");
        assert!(json["items"].as_array().unwrap().len() > 5);
        qp_engine_free(e);

        // Symbolic confluence has non-joinable pairs: reported, not an error.
        let e = qp_engine_new(QpMode::Symbolic);
        let st = qp_verify(e, cstr("confluence").as_ptr(), 4, 3, 0, &mut out);
        assert_eq!(st, QpStatus::VerificationFailed);
        let json: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert!(json["summary"]["fail"].as_u64().unwrap() > 0);
        qp_engine_free(e);
    }
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/qplane.h")
}

fn compiler() -> Option<String> {
    ["cc", "clang", "gcc"]
        .into_iter()
        .find(|c| {
            Command::new(c)
                .arg("--version")
                .output()
                .is_ok_and(|o| o.status.success())
        })
        .map(str::to_owned)
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let h = header();
    assert!(h.exists(), "header not generated");
    let text = std::fs::read_to_string(&h).unwrap();
    for f in [
        "qp_engine_new",
        "qp_normalize",
        "qp_differential",
        "qp_act",
        "qp_pair",
        "qp_verify",
        "qp_last_error",
        "qp_string_free",
    ] {
        assert!(text.contains(f), "missing {f}");
    }
    let Some(cc) = compiler() else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    let st = Command::new(&cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", "-std=c99"])
        .arg(&h)
        .status()
        .unwrap();
    assert!(st.success());
    let st = Command::new(&cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c++"])
        .arg(&h)
        .status()
        .unwrap();
    assert!(st.success());
}

#[test]
fn c_program_links_against_staticlib() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler; skipping link test");
        return;
    };
    // target/<profile>/deps/abi-xxxx -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libqplane_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping link test", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <string.h>
#include "qplane.h"
int main(void) {
    QpEngine *e = qp_engine_new(QP_MODE_SPECIALIZED);
    char *out = NULL;
    if (qp_normalize(e, "y*x", &out) != QP_STATUS_OK) return 2;
    int ok = strcmp(out, "(-1 - j) * x*y") == 0;
    qp_string_free(out);
    if (qp_normalize(e, "(", &out) != QP_STATUS_PARSE_ERROR) return 3;
    if (strlen(qp_last_error()) == 0) return 4;
    qp_engine_free(e);
    return ok ? 0 : 1;
}
"#,
    )
    .unwrap();
    let bin = dir.join("main");
    let st = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(st.success(), "link failed");
    assert!(Command::new(&bin).status().unwrap().success());
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("qplane-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
