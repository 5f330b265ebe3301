//! C ABI over the qplane engine.
//!
//! Every fallible call returns a [`QpStatus`]. Strings handed out through
//! `out` parameters are owned by the caller and released with
//! [`qp_string_free`]. After a non-`OK` status, [`qp_last_error`] describes the
//! failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qplane::calculus::d_times;
use qplane::cli::{expand_forms, infer_system, run_suite, tensor_as_element};
use qplane::dual::Pairing;
use qplane::lie::{act, OpExpr};
use qplane::parse::{parse, parse_element, Parsed};
use qplane::report::RunConfig;
use qplane::rewrite::build_main_system;
use qplane::{Error, QMode};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    AlgebraError = 4,
    Unsupported = 5,
    /// A verification report contains failing items; its JSON is still returned.
    VerificationFailed = 6,
    Panic = 7,
}

/// How `q` is treated.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpMode {
    /// `q = j`.
    Specialized = 0,
    /// `q` a free Laurent variable.
    Symbolic = 1,
}

/// Opaque engine handle.
pub struct QpEngine {
    mode: QMode,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QpStatus {
    match e {
        Error::Parse { .. } => QpStatus::ParseError,
        Error::Unsupported(_) | Error::RuleTable(_) => QpStatus::Unsupported,
        _ => QpStatus::AlgebraError,
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, QpStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(QpStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        QpStatus::InvalidUtf8
    })
}

unsafe fn write_out(out: *mut *mut c_char, s: String) -> QpStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            QpStatus::Ok
        }
        Err(_) => {
            set_error("result contains an interior NUL byte");
            QpStatus::AlgebraError
        }
    }
}

/// Runs `f` with panics and engine errors mapped to status codes.
fn guarded<F>(out: *mut *mut c_char, f: F) -> QpStatus
where
    F: FnOnce() -> Result<(String, QpStatus), QpStatus>,
{
    if out.is_null() {
        set_error("null output pointer");
        return QpStatus::NullArgument;
    }
    unsafe { *out = ptr::null_mut() };
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok((s, status))) => {
            let w = unsafe { write_out(out, s) };
            if w == QpStatus::Ok {
                status
            } else {
                w
            }
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            QpStatus::Panic
        }
    }
}

fn engine_err(e: Error) -> QpStatus {
    set_error(&e.to_string());
    status_of(&e)
}

unsafe fn engine_ref<'a>(e: *const QpEngine) -> Result<&'a QpEngine, QpStatus> {
    if e.is_null() {
        set_error("null engine handle");
        return Err(QpStatus::NullArgument);
    }
    Ok(&*e)
}

/// Creates an engine. Release with [`qp_engine_free`].
#[no_mangle]
pub extern "C" fn qp_engine_new(mode: QpMode) -> *mut QpEngine {
    let mode = match mode {
        QpMode::Specialized => QMode::Specialized,
        QpMode::Symbolic => QMode::Symbolic,
    };
    Box::into_raw(Box::new(QpEngine { mode }))
}

/// # Safety
/// `engine` must come from [`qp_engine_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qp_engine_free(engine: *mut QpEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Normal form of an element or tensor, rewritten in the system matching its
/// alphabet.
///
/// # Safety
/// Pointers must be valid; `expr` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qp_normalize(
    engine: *const QpEngine,
    expr: *const c_char,
    out: *mut *mut c_char,
) -> QpStatus {
    guarded(out, || {
        let eng = engine_ref(engine)?;
        let text = read_str(expr)?;
        let s = match parse(text, eng.mode).map_err(engine_err)? {
            Parsed::Element(e) => infer_system(&e, eng.mode)
                .normalize(&e)
                .map_err(engine_err)?
                .to_string(),
            Parsed::Tensor(t) => infer_system(&tensor_as_element(&t), eng.mode)
                .normalize_tensor_uniform(&t)
                .map_err(engine_err)?
                .to_string(),
        };
        Ok((s, QpStatus::Ok))
    })
}

/// `d^times(expr)` in normal form.
///
/// # Safety
/// Pointers must be valid; `expr` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qp_differential(
    engine: *const QpEngine,
    expr: *const c_char,
    times: u32,
    out: *mut *mut c_char,
) -> QpStatus {
    guarded(out, || {
        let eng = engine_ref(engine)?;
        let sys = build_main_system(eng.mode);
        let e = parse_element(read_str(expr)?, eng.mode).map_err(engine_err)?;
        let e = expand_forms(&e, &sys).map_err(engine_err)?;
        let r = d_times(&sys, &e, times as usize).map_err(engine_err)?;
        Ok((r.to_string(), QpStatus::Ok))
    })
}

/// Applies an operator composition such as `"X*H"` to a coordinate polynomial.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qp_act(
    engine: *const QpEngine,
    op: *const c_char,
    expr: *const c_char,
    out: *mut *mut c_char,
) -> QpStatus {
    guarded(out, || {
        let eng = engine_ref(engine)?;
        let o = OpExpr::parse(read_str(op)?).map_err(engine_err)?;
        let f = parse_element(read_str(expr)?, eng.mode).map_err(engine_err)?;
        Ok((
            act(&o, &f, eng.mode).map_err(engine_err)?.to_string(),
            QpStatus::Ok,
        ))
    })
}

/// The pairing `<u, f>` rendered as a scalar.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qp_pair(
    engine: *const QpEngine,
    u: *const c_char,
    f: *const c_char,
    out: *mut *mut c_char,
) -> QpStatus {
    guarded(out, || {
        let eng = engine_ref(engine)?;
        let u = parse_element(read_str(u)?, eng.mode).map_err(engine_err)?;
        let f = parse_element(read_str(f)?, eng.mode).map_err(engine_err)?;
        let p = Pairing::new(eng.mode, 1);
        Ok((
            p.pair(&u, &f).map_err(engine_err)?.to_string(),
            QpStatus::Ok,
        ))
    })
}

/// Runs a verification suite and writes its JSON report. Returns
/// `VERIFICATION_FAILED` (with the report still written) when any item fails.
///
/// # Safety
/// Pointers must be valid; `suite` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qp_verify(
    engine: *const QpEngine,
    suite: *const c_char,
    max_degree: u32,
    window: u32,
    seed: u64,
    out_json: *mut *mut c_char,
) -> QpStatus {
    guarded(out_json, || {
        let eng = engine_ref(engine)?;
        let name = read_str(suite)?;
        let cfg = RunConfig {
            q_mode: eng.mode,
            max_degree: max_degree as usize,
            window: window as usize,
            tensor_twist: "auto".into(),
            seed,
        };
        let r = run_suite(name, &cfg, None).map_err(engine_err)?;
        let status = if r.all_pass() {
            QpStatus::Ok
        } else {
            set_error(&format!(
                "{} of {} items failed",
                r.fail_count(),
                r.items.len()
            ));
            QpStatus::VerificationFailed
        };
        Ok((r.to_json(&cfg), status))
    })
}

/// Message for the last failure on this thread. Valid until the next call
/// that fails on the same thread; never free it.
#[no_mangle]
pub extern "C" fn qp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned through an `out` parameter.
///
/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn qp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
