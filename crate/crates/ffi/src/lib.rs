//! C ABI over `jordanlab`.
//!
//! Schemes and loops are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns a [`JlStatus`];
//! on failure, [`jl_last_error_message`] describes the error on the calling
//! thread. Strings returned through out-pointers are freed with
//! [`jl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use jordanlab::cli_io::{self, FormatError};
use jordanlab::closures::{self, ClosureKind};
use jordanlab::fixtures;
use jordanlab::loops::{self, CayleyTable, LoopSchemeOutcome};
use jordanlab::rainbow::{classify_rainbow, ColorMatrix};
use jordanlab::schemes::{self, SchemeRecord};

/// Opaque rainbow handle.
pub struct JlScheme {
    cm: ColorMatrix,
}

/// Opaque loop handle.
pub struct JlLoop {
    table: CayleyTable,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    SyntaxError = 3,
    ValidationError = 4,
    LoopError = 5,
    DomainError = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JlClosureKind {
    /// Weisfeiler–Leman (ordinary matrix product).
    Wl = 0,
    Jordan = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct JlClassification {
    pub order: usize,
    pub rank: usize,
    pub homogeneous: bool,
    pub regular: bool,
    pub thin: bool,
    pub symmetric: bool,
    pub is_cc: bool,
    pub is_jc: bool,
    pub is_as: bool,
    pub is_js: bool,
    /// `rank / order` in lowest terms.
    pub ratio_numerator: u64,
    pub ratio_denominator: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: JlStatus, message: impl Into<String>) -> JlStatus {
    set_error(message.into());
    status
}

/// Runs `f`, clearing the error slot first and turning panics into a status.
fn guard(f: impl FnOnce() -> JlStatus) -> JlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            fail(JlStatus::Panic, format!("internal error: {msg}"))
        }
    }
}

fn format_status(e: &FormatError) -> JlStatus {
    match e {
        FormatError::Syntax { .. } => JlStatus::SyntaxError,
        FormatError::Validation(_) => JlStatus::ValidationError,
        FormatError::Loop(_) => JlStatus::LoopError,
    }
}

unsafe fn text_arg<'a>(text: *const c_char) -> Result<&'a str, JlStatus> {
    if text.is_null() {
        return Err(fail(JlStatus::NullPointer, "text is null"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| fail(JlStatus::InvalidUtf8, format!("text is not UTF-8: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, JlStatus> {
    p.as_ref().ok_or_else(|| fail(JlStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> JlStatus {
    if out.is_null() {
        return fail(JlStatus::NullPointer, "output pointer is null");
    }
    out.write(value);
    JlStatus::Ok
}

fn boxed_scheme(cm: ColorMatrix) -> *mut JlScheme {
    Box::into_raw(Box::new(JlScheme { cm }))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn jl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a scheme file (native or list-of-lists syntax).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_scheme_parse(text: *const c_char, out: *mut *mut JlScheme) -> JlStatus {
    guard(|| {
        let text = tri!(text_arg(text));
        match cli_io::parse_scheme_file(text) {
            Ok(cm) => write_out(out, boxed_scheme(cm)),
            Err(e) => fail(format_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `scheme` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jl_scheme_free(scheme: *mut JlScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

/// # Safety
/// `scheme` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_scheme_order(scheme: *const JlScheme, out: *mut usize) -> JlStatus {
    guard(|| write_out(out, tri!(handle(scheme, "scheme")).cm.order()))
}

/// # Safety
/// `scheme` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_scheme_rank(scheme: *const JlScheme, out: *mut usize) -> JlStatus {
    guard(|| write_out(out, tri!(handle(scheme, "scheme")).cm.rank()))
}

/// Color of the cell `(a, b)`.
///
/// # Safety
/// `scheme` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_scheme_color(scheme: *const JlScheme, a: usize, b: usize, out: *mut usize) -> JlStatus {
    guard(|| {
        let s = tri!(handle(scheme, "scheme"));
        let n = s.cm.order();
        if a >= n || b >= n {
            return fail(JlStatus::OutOfRange, format!("cell ({a}, {b}) outside {n} points"));
        }
        write_out(out, s.cm.color(a, b))
    })
}

/// # Safety
/// `scheme` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_scheme_classify(scheme: *const JlScheme, out: *mut JlClassification) -> JlStatus {
    guard(|| {
        let s = tri!(handle(scheme, "scheme"));
        let class = classify_rainbow(&s.cm);
        let rec = SchemeRecord::analyze(s.cm.clone());
        write_out(
            out,
            JlClassification {
                order: class.order,
                rank: class.rank,
                homogeneous: class.homogeneous,
                regular: class.regular,
                thin: class.thin,
                symmetric: class.symmetric,
                is_cc: rec.flags.is_cc,
                is_jc: rec.flags.is_jc,
                is_as: rec.flags.is_as,
                is_js: rec.flags.is_js,
                ratio_numerator: *class.ratio.numer(),
                ratio_denominator: *class.ratio.denom(),
            },
        )
    })
}

/// Closure of a rainbow; the result is a new handle.
///
/// # Safety
/// `scheme` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_scheme_closure(
    scheme: *const JlScheme,
    kind: JlClosureKind,
    out: *mut *mut JlScheme,
) -> JlStatus {
    guard(|| {
        let s = tri!(handle(scheme, "scheme"));
        let kind = match kind {
            JlClosureKind::Wl => ClosureKind::Associative,
            JlClosureKind::Jordan => ClosureKind::Jordan,
        };
        if out.is_null() {
            return fail(JlStatus::NullPointer, "output pointer is null");
        }
        write_out(out, boxed_scheme(closures::closure(&s.cm, kind)))
    })
}

/// Merges every class with its transpose; the result is a new handle.
///
/// # Safety
/// `scheme` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_scheme_symmetrize(scheme: *const JlScheme, out: *mut *mut JlScheme) -> JlStatus {
    guard(|| {
        let s = tri!(handle(scheme, "scheme"));
        if out.is_null() {
            return fail(JlStatus::NullPointer, "output pointer is null");
        }
        write_out(out, boxed_scheme(schemes::symmetrize(&s.cm)))
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("serialized text has no NUL").into_raw()
}

/// Canonical native serialization; free the result with [`jl_string_free`].
///
/// # Safety
/// `scheme` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_scheme_serialize(scheme: *const JlScheme, out: *mut *mut c_char) -> JlStatus {
    guard(|| {
        let s = tri!(handle(scheme, "scheme"));
        if out.is_null() {
            return fail(JlStatus::NullPointer, "output pointer is null");
        }
        write_out(out, into_c_string(cli_io::serialize_scheme(&s.cm)))
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a loop file; the identity is moved to element 0 if needed.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_loop_parse(text: *const c_char, out: *mut *mut JlLoop) -> JlStatus {
    guard(|| {
        let text = tri!(text_arg(text));
        match cli_io::parse_loop_file(text) {
            Ok(l) => write_out(out, Box::into_raw(Box::new(JlLoop { table: l.table }))),
            Err(e) => fail(format_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `l` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jl_loop_free(l: *mut JlLoop) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// # Safety
/// `l` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_loop_order(l: *const JlLoop, out: *mut usize) -> JlStatus {
    guard(|| write_out(out, tri!(handle(l, "loop")).table.order()))
}

/// Whether the loop satisfies the RA conditions.
///
/// # Safety
/// `l` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_loop_is_ra(l: *const JlLoop, out: *mut bool) -> JlStatus {
    guard(|| write_out(out, loops::is_ra_loop(&tri!(handle(l, "loop")).table).ra))
}

/// The left translations of a loop as a thin Jordan scheme, or
/// `DomainError` when they do not form one.
///
/// # Safety
/// `l` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_loop_scheme(l: *const JlLoop, out: *mut *mut JlScheme) -> JlStatus {
    guard(|| {
        let l = tri!(handle(l, "loop"));
        if out.is_null() {
            return fail(JlStatus::NullPointer, "output pointer is null");
        }
        match loops::scheme_from_loop(&l.table) {
            Ok(LoopSchemeOutcome::Scheme(rec)) => write_out(out, boxed_scheme(rec.cm)),
            Ok(LoopSchemeOutcome::Failure(f)) => fail(JlStatus::DomainError, format!("{f:?}")),
            Err(e) => fail(JlStatus::LoopError, e.to_string()),
        }
    })
}

/// `J(Z_n)`, the non-regular thin Jordan scheme on `2n` points.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jl_construct_jcal_cyclic(n: usize, out: *mut *mut JlScheme) -> JlStatus {
    guard(|| {
        if n == 0 {
            return fail(JlStatus::OutOfRange, "group order must be positive");
        }
        if out.is_null() {
            return fail(JlStatus::NullPointer, "output pointer is null");
        }
        match schemes::construct_jcal(&fixtures::cyclic(n)) {
            Ok(rec) => write_out(out, boxed_scheme(rec.cm)),
            Err(e) => fail(JlStatus::DomainError, e.to_string()),
        }
    })
}
