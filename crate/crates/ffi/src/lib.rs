//! C ABI for the `feynmotic` library.
//!
//! Conventions:
//! * every function returns an [`FmStatus`]; results go through out-pointers;
//! * graphs are opaque [`FmGraph`] handles created by [`fm_graph_parse`] and
//!   released with [`fm_graph_free`];
//! * strings returned through `char **` are owned by the caller and must be
//!   released with [`fm_string_free`];
//! * after a failure, [`fm_last_error_message`] describes the error of the
//!   calling thread;
//! * panics never cross the boundary; they are reported as
//!   `FM_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use feynmotic::{Error, FeynmanGraph};

/// Status codes.  The nonzero library codes coincide with the exit codes of
/// the command-line tool.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmStatus {
    Ok = 0,
    /// Any other library error.
    Error = 1,
    /// Malformed input or invalid graph.
    Parse = 2,
    /// A mathematical precondition is violated (divergent, non-generic, …).
    Precondition = 3,
    /// The numerical budget was exhausted.
    Budget = 4,
    /// A required pointer argument was null.
    NullArgument = 10,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 11,
    /// An internal panic was caught.
    Internal = 12,
}

/// Opaque graph handle.
pub struct FmGraph {
    graph: FeynmanGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FmStatus {
    match e.exit_code() {
        2 => FmStatus::Parse,
        3 => FmStatus::Precondition,
        4 => FmStatus::Budget,
        _ => FmStatus::Error,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), FmStatus>>(f: F) -> FmStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            FmStatus::Internal
        }
    }
}

fn lib<T>(r: feynmotic::Result<T>) -> Result<T, FmStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, FmStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(FmStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        FmStatus::InvalidUtf8
    })
}

unsafe fn graph_arg<'a>(g: *const FmGraph) -> Result<&'a FeynmanGraph, FmStatus> {
    if g.is_null() {
        set_error("null graph handle");
        return Err(FmStatus::NullArgument);
    }
    Ok(&(*g).graph)
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), FmStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(FmStatus::NullArgument);
    }
    let c = CString::new(s).map_err(|_| {
        set_error("output contains a NUL byte");
        FmStatus::Internal
    })?;
    *out = c.into_raw();
    Ok(())
}

/// Message describing the last failure on this thread (empty after a
/// success).  The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn fm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a graph in the text or JSON format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fm_graph_parse(text: *const c_char, out: *mut *mut FmGraph) -> FmStatus {
    guard(|| {
        let text = str_arg(text)?;
        if out.is_null() {
            set_error("null output pointer");
            return Err(FmStatus::NullArgument);
        }
        let graph = lib(feynmotic::io::parse_graph(text))?;
        *out = Box::into_raw(Box::new(FmGraph { graph }));
        Ok(())
    })
}

/// Releases a graph handle (null is ignored).
///
/// # Safety
/// `g` must come from [`fm_graph_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fm_graph_free(g: *mut FmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Releases a string returned by this library (null is ignored).
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of edges and loop number of a graph.
///
/// # Safety
/// `g` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_graph_shape(g: *const FmGraph, n_edges: *mut usize, loops: *mut usize) -> FmStatus {
    guard(|| {
        let g = graph_arg(g)?;
        if n_edges.is_null() || loops.is_null() {
            set_error("null output pointer");
            return Err(FmStatus::NullArgument);
        }
        *n_edges = g.n_edges();
        *loops = g.loop_number();
        Ok(())
    })
}

/// Which graph polynomial [`fm_graph_polynomial`] returns.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmPolynomial {
    Psi = 0,
    Phi = 1,
    Xi = 2,
}

/// Canonical text of `Ψ`, `Φ` or `Ξ`.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer; free the result with
/// [`fm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn fm_graph_polynomial(g: *const FmGraph, which: FmPolynomial, out: *mut *mut c_char) -> FmStatus {
    guard(|| {
        let g = graph_arg(g)?;
        let p = match which {
            FmPolynomial::Psi => feynmotic::symanzik::psi(g),
            FmPolynomial::Phi => feynmotic::symanzik::phi(g),
            FmPolynomial::Xi => feynmotic::symanzik::xi(g),
        };
        write_string(out, p.to_canonical_string())
    })
}

/// Convergence in dimension `d`.  `witness` receives the edge bitmask of the
/// lexicographically least offending subgraph (bit `e−1` for edge `e`), or 0.
///
/// # Safety
/// `g` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fm_graph_is_convergent(
    g: *const FmGraph,
    d: u32,
    convergent: *mut bool,
    witness: *mut u64,
) -> FmStatus {
    guard(|| {
        let g = graph_arg(g)?;
        if convergent.is_null() || witness.is_null() {
            set_error("null output pointer");
            return Err(FmStatus::NullArgument);
        }
        let (c, w) = lib(feynmotic::convergence::is_convergent(g, d))?;
        *convergent = c;
        *witness = w.map_or(0, |w| w.iter().fold(0u64, |m, e| m | 1u64 << (e - 1)));
        Ok(())
    })
}

/// Runs a command-line invocation.  `argv` holds `argc` arguments *without*
/// the program name.  The JSON report is written to `out_json` and the
/// command's exit code to `exit_code`; the status is `FM_STATUS_OK` whenever
/// the command ran, whatever its exit code.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; the out-pointers must
/// be valid.  Free the report with [`fm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn fm_run(
    argc: usize,
    argv: *const *const c_char,
    out_json: *mut *mut c_char,
    exit_code: *mut i32,
) -> FmStatus {
    guard(|| {
        if (argv.is_null() && argc > 0) || exit_code.is_null() {
            set_error("null argument");
            return Err(FmStatus::NullArgument);
        }
        let mut args = vec!["feynmotic".to_string()];
        for i in 0..argc {
            args.push(str_arg(*argv.add(i))?.to_string());
        }
        let outcome = feynmotic::cli::run(args);
        *exit_code = outcome.code;
        write_string(out_json, outcome.output)
    })
}
