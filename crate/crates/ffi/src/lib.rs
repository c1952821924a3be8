//! C interface to `protoef`.
//!
//! Graphs and formulations are opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`PefStatus`]; on failure the message is available from
//! [`pef_last_error`] until the next call on the same thread. Strings
//! returned by the library are freed with [`pef_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use protoef::decomposition::{build_direct, build_threshold};
use protoef::formulation::Formulation;
use protoef::graph::Graph;
use protoef::special::{clawfree_full_ef, clawfree_reduced_ef, mud_ef, MinUpDown};
use protoef::verify::{check_sandwich, projections_agree};
use protoef::yannakakis::yannakakis_formulation;
use protoef::Error;

pub struct PefGraph(Graph);

pub struct PefFormulation(Formulation);

#[allow(non_camel_case_types)]
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PefStatus {
    PEF_OK = 0,
    /// A required pointer argument was null.
    PEF_ERR_NULL = 1,
    /// Malformed text input (JSON, LP text, UTF-8).
    PEF_ERR_PARSE = 2,
    /// Well-formed but invalid input.
    PEF_ERR_INVALID = 3,
    /// The graph contains the forbidden induced pattern.
    PEF_ERR_FORBIDDEN = 4,
    /// A Rust panic was caught at the boundary.
    PEF_ERR_PANIC = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PefSize {
    pub num_inequalities: usize,
    pub num_equations: usize,
    pub num_variables: usize,
    pub num_aux: usize,
    pub total_encoding: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PefStatus {
    match e {
        Error::Json(_) | Error::Parse(_) => PefStatus::PEF_ERR_PARSE,
        Error::ForbiddenPattern { .. } => PefStatus::PEF_ERR_FORBIDDEN,
        _ => PefStatus::PEF_ERR_INVALID,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (PefStatus, String)>) -> PefStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PefStatus::PEF_OK,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside protoef".into());
            PefStatus::PEF_ERR_PANIC
        }
    }
}

fn lift(e: Error) -> (PefStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PefStatus, String) {
    (PefStatus::PEF_ERR_NULL, format!("{what} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (PefStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (PefStatus::PEF_ERR_PARSE, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, v: T) {
    *out = Box::into_raw(Box::new(v));
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn pef_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pef_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn pef_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a graph from JSON (`{"n":…, "edges":[[i,j],…]}`) or a DIMACS
/// edge list.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pef_graph_load(text: *const c_char, out: *mut *mut PefGraph) -> PefStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = Graph::load(c_str(text, "text")?).map_err(lift)?;
        put(out, PefGraph(g));
        Ok(())
    })
}

/// # Safety
/// `edges` must point to `2 * num_edges` vertex indices.
#[no_mangle]
pub unsafe extern "C" fn pef_graph_new(
    n: usize,
    edges: *const usize,
    num_edges: usize,
    out: *mut *mut PefGraph,
) -> PefStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if edges.is_null() && num_edges > 0 {
            return Err(null("edges"));
        }
        let flat = if num_edges == 0 { &[][..] } else { std::slice::from_raw_parts(edges, 2 * num_edges) };
        let e: Vec<(usize, usize)> = flat.chunks(2).map(|p| (p[0], p[1])).collect();
        let g = Graph::new(n, &e).map_err(lift)?;
        put(out, PefGraph(g));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn pef_graph_num_vertices(g: *const PefGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// # Safety
/// `g` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pef_graph_free(g: *mut PefGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

unsafe fn build_from_graph(
    g: *const PefGraph,
    out: *mut *mut PefFormulation,
    f: impl FnOnce(&Graph) -> Result<Formulation, Error>,
) -> PefStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        put(out, PefFormulation(f(&g.0).map_err(lift)?));
        Ok(())
    })
}

/// Formulation compiled from the clique-vs-stable-set protocol.
///
/// # Safety
/// `g` must be a graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pef_build_yannakakis(g: *const PefGraph, out: *mut *mut PefFormulation) -> PefStatus {
    build_from_graph(g, out, yannakakis_formulation)
}

/// # Safety
/// `g` must be a graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pef_build_direct(
    g: *const PefGraph,
    leaf_size: usize,
    out: *mut *mut PefFormulation,
) -> PefStatus {
    build_from_graph(g, out, |g| build_direct(g, leaf_size).map(|r| r.0))
}

/// Fails with `PEF_ERR_FORBIDDEN` when `g` contains `pattern`.
///
/// # Safety
/// `g` and `pattern` must be graph handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pef_build_threshold(
    g: *const PefGraph,
    pattern: *const PefGraph,
    out: *mut *mut PefFormulation,
) -> PefStatus {
    let Some(h) = pattern.as_ref() else {
        return guard(|| Err(null("pattern")));
    };
    build_from_graph(g, out, |g| build_threshold(g, &h.0, None).map(|r| r.0))
}

/// # Safety
/// `g` must be a graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pef_build_clawfree(
    g: *const PefGraph,
    t: usize,
    reduced: bool,
    out: *mut *mut PefFormulation,
) -> PefStatus {
    build_from_graph(g, out, |g| if reduced { clawfree_reduced_ef(g, t) } else { clawfree_full_ef(g, t) })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pef_build_minupdown(
    t: usize,
    big_l: usize,
    ell: usize,
    out: *mut *mut PefFormulation,
) -> PefStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inst = MinUpDown::new(t, big_l, ell).map_err(lift)?;
        put(out, PefFormulation(mud_ef(&inst).map_err(lift)?));
        Ok(())
    })
}

/// Parses a formulation from JSON or LP text.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pef_formulation_load(text: *const c_char, out: *mut *mut PefFormulation) -> PefStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = c_str(text, "text")?;
        let f = if s.trim_start().starts_with('{') { Formulation::from_json(s) } else { Formulation::from_lp_text(s) };
        put(out, PefFormulation(f.map_err(lift)?));
        Ok(())
    })
}

/// JSON text of `f`; free with [`pef_string_free`]. Null on a null handle.
///
/// # Safety
/// `f` must be null or a formulation handle.
#[no_mangle]
pub unsafe extern "C" fn pef_formulation_to_json(f: *const PefFormulation) -> *mut c_char {
    f.as_ref().map_or(ptr::null_mut(), |f| owned_string(f.0.to_json()))
}

/// LP text of `f`; free with [`pef_string_free`]. Null on a null handle.
///
/// # Safety
/// `f` must be null or a formulation handle.
#[no_mangle]
pub unsafe extern "C" fn pef_formulation_to_lp(f: *const PefFormulation) -> *mut c_char {
    f.as_ref().map_or(ptr::null_mut(), |f| owned_string(f.0.to_lp_text()))
}

/// # Safety
/// `f` must be a formulation handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pef_formulation_size(f: *const PefFormulation, out: *mut PefSize) -> PefStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("formulation"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let m = f.0.size_metrics();
        *out = PefSize {
            num_inequalities: m.num_inequalities,
            num_equations: m.num_equations,
            num_variables: m.num_variables,
            num_aux: m.num_aux,
            total_encoding: m.total_encoding,
        };
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pef_formulation_free(f: *mut PefFormulation) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Exact check of `STAB(G) ⊆ π(F) ⊆ QSTAB(G)`.
///
/// # Safety
/// `g`, `f` must be handles and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pef_check_sandwich(
    g: *const PefGraph,
    f: *const PefFormulation,
    passed: *mut bool,
) -> PefStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let f = f.as_ref().ok_or_else(|| null("formulation"))?;
        let passed = passed.as_mut().ok_or_else(|| null("passed"))?;
        *passed = check_sandwich(&g.0, &f.0).map_err(lift)?.passed;
        Ok(())
    })
}

/// Compares LP maxima of two formulations over the unit directions, the
/// all-ones direction and `directions` seeded random ones.
///
/// # Safety
/// `a`, `b` must be handles and `agree` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pef_projections_agree(
    a: *const PefFormulation,
    b: *const PefFormulation,
    directions: usize,
    seed: u64,
    agree: *mut bool,
) -> PefStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        let agree = agree.as_mut().ok_or_else(|| null("agree"))?;
        *agree = projections_agree(&a.0, &b.0, directions, seed).map_err(lift)?.agree;
        Ok(())
    })
}
