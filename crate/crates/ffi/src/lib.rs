//! C ABI over the `hycolor` library.
//!
//! Graphs and models are opaque heap handles released with their `_free` function.
//! Every fallible call returns an [`HcStatus`]; on failure a message for the calling
//! thread is available from [`hc_last_error`]. Colorings are written to caller-owned
//! `uint32_t` buffers of length `n` with colors in `1..=n`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::time::Duration;

use hycolor::correction::color_correct;
use hycolor::exact::{chromatic_number, SolveStatus};
use hycolor::graph::{Coloring, Graph};
use hycolor::heuristics::dsatur;
use hycolor::hybrid::{hybrid_color, NodeOrder};
use hycolor::io::parse_dimacs;
use hycolor::neural::{predict_colors, ModelParams};
use hycolor::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    ModelFormat = 5,
    TooLarge = 6,
    Timeout = 7,
    Internal = 8,
}

/// Opaque graph handle.
pub struct HcGraph(Graph);

/// Opaque model handle.
pub struct HcModel(ModelParams);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HcCorrectionStats {
    pub initial_invalid_edges: usize,
    pub recolored_by_reuse: usize,
    pub fresh_colors_added: usize,
    pub final_colors_used: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> HcStatus {
    match e {
        Error::Parse { .. } => HcStatus::Parse,
        Error::Io { .. } => HcStatus::Io,
        Error::ModelFormat { .. } => HcStatus::ModelFormat,
        Error::TooLarge { .. } => HcStatus::TooLarge,
        Error::Invariant(_) | Error::NonFiniteLoss { .. } => HcStatus::Internal,
        _ => HcStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (HcStatus, String)>) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HcStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside hycolor");
            HcStatus::Internal
        }
    }
}

fn lib<T>(r: hycolor::Result<T>) -> Result<T, (HcStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (HcStatus, String) {
    (HcStatus::NullPointer, "null pointer argument".into())
}

unsafe fn graph_ref<'a>(g: *const HcGraph) -> Result<&'a Graph, (HcStatus, String)> {
    g.as_ref().map(|h| &h.0).ok_or_else(null)
}

unsafe fn out_slice<'a>(out: *mut u32, n: usize) -> Result<&'a mut [u32], (HcStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts_mut(out, n))
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a Path, (HcStatus, String)> {
    if path.is_null() {
        return Err(null());
    }
    CStr::from_ptr(path)
        .to_str()
        .map(Path::new)
        .map_err(|_| (HcStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

fn write_coloring(c: &Coloring, out: &mut [u32]) {
    out.copy_from_slice(c.as_slice());
}

/// Message describing the calling thread's most recent failure, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn hc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates an edgeless graph with `n >= 1` nodes.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hc_graph_new(n: usize, out: *mut *mut HcGraph) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let g = lib(Graph::new(n))?;
        *out = Box::into_raw(Box::new(HcGraph(g)));
        Ok(())
    })
}

/// Adds the undirected edge `u`-`v` (0-based).
///
/// # Safety
/// `g` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn hc_graph_add_edge(g: *mut HcGraph, u: usize, v: usize) -> HcStatus {
    guard(|| {
        let g = g.as_mut().ok_or_else(null)?;
        lib(g.0.add_edge(u, v))
    })
}

/// Parses a NUL-terminated DIMACS `.col` text.
///
/// # Safety
/// `text` must be a valid C string and `out` valid storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hc_graph_from_dimacs(text: *const c_char, out: *mut *mut HcGraph) -> HcStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(text).to_str().map_err(|_| (HcStatus::Parse, "text is not valid UTF-8".into()))?;
        let g = lib(parse_dimacs(text))?;
        *out = Box::into_raw(Box::new(HcGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hc_graph_node_count(g: *const HcGraph) -> usize {
    g.as_ref().map_or(0, |h| h.0.n())
}

/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hc_graph_edge_count(g: *const HcGraph) -> usize {
    g.as_ref().map_or(0, |h| h.0.edge_count())
}

/// # Safety
/// `g` must be a handle from this library or null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hc_graph_free(g: *mut HcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Exact chromatic number within `timeout_ms`. On timeout returns `Timeout` with the
/// best coloring found and its color count still written.
///
/// # Safety
/// `g` must be a live handle, `chi` valid, and `coloring_out` writable for `n` values.
#[no_mangle]
pub unsafe extern "C" fn hc_exact_chromatic(
    g: *const HcGraph,
    timeout_ms: u64,
    chi: *mut usize,
    coloring_out: *mut u32,
) -> HcStatus {
    let mut timed_out = false;
    let status = guard(|| {
        let g = graph_ref(g)?;
        let out = out_slice(coloring_out, g.n())?;
        let chi = chi.as_mut().ok_or_else(null)?;
        let r = chromatic_number(g, Duration::from_millis(timeout_ms));
        *chi = r.chromatic_number;
        write_coloring(&r.coloring, out);
        timed_out = r.status == SolveStatus::TimedOut;
        Ok(())
    });
    if status == HcStatus::Ok && timed_out {
        set_error("exact solver timed out; best known coloring returned");
        return HcStatus::Timeout;
    }
    status
}

/// DSATUR coloring.
///
/// # Safety
/// `g` must be a live handle and `coloring_out` writable for `n` values.
#[no_mangle]
pub unsafe extern "C" fn hc_dsatur(g: *const HcGraph, coloring_out: *mut u32) -> HcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        write_coloring(&dsatur(g), out_slice(coloring_out, g.n())?);
        Ok(())
    })
}

/// Repairs `colors` in place so that no edge is monochromatic.
///
/// # Safety
/// `g` must be a live handle, `colors` readable and writable for `n` values, and
/// `stats` valid or null.
#[no_mangle]
pub unsafe extern "C" fn hc_color_correct(
    g: *const HcGraph,
    colors: *mut u32,
    stats: *mut HcCorrectionStats,
) -> HcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let buf = out_slice(colors, g.n())?;
        let input = lib(Coloring::new(buf.to_vec()))?;
        let (fixed, s) = lib(color_correct(g, &input))?;
        write_coloring(&fixed, buf);
        if let Some(stats) = stats.as_mut() {
            *stats = HcCorrectionStats {
                initial_invalid_edges: s.initial_invalid_edges,
                recolored_by_reuse: s.recolored_by_reuse,
                fresh_colors_added: s.fresh_colors_added,
                final_colors_used: s.final_colors_used,
            };
        }
        Ok(())
    })
}

/// Loads a parameter file.
///
/// # Safety
/// `path` must be a valid C string and `out` valid storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hc_model_load(path: *const c_char, out: *mut *mut HcModel) -> HcStatus {
    guard(|| {
        let path = path_arg(path)?;
        if out.is_null() {
            return Err(null());
        }
        let m = lib(ModelParams::load(path))?;
        *out = Box::into_raw(Box::new(HcModel(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be a handle from this library or null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hc_model_free(m: *mut HcModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Raw model prediction (not necessarily proper).
///
/// # Safety
/// `m` and `g` must be live handles and `coloring_out` writable for `n` values.
#[no_mangle]
pub unsafe extern "C" fn hc_model_predict(m: *const HcModel, g: *const HcGraph, coloring_out: *mut u32) -> HcStatus {
    guard(|| {
        let m = &m.as_ref().ok_or_else(null)?.0;
        let g = graph_ref(g)?;
        let out = out_slice(coloring_out, g.n())?;
        write_coloring(&lib(predict_colors(m, g))?, out);
        Ok(())
    })
}

/// Model prediction followed by color correction; the result is always proper.
/// `bfs != 0` feeds nodes to the model in breadth-first order.
///
/// # Safety
/// `m` and `g` must be live handles, `coloring_out` writable for `n` values, and
/// `stats` valid or null.
#[no_mangle]
pub unsafe extern "C" fn hc_hybrid_color(
    m: *const HcModel,
    g: *const HcGraph,
    bfs: i32,
    coloring_out: *mut u32,
    stats: *mut HcCorrectionStats,
) -> HcStatus {
    guard(|| {
        let m = &m.as_ref().ok_or_else(null)?.0;
        let g = graph_ref(g)?;
        let out = out_slice(coloring_out, g.n())?;
        let order = if bfs != 0 { NodeOrder::Bfs } else { NodeOrder::Natural };
        let h = lib(hybrid_color(m, g, order))?;
        write_coloring(&h.corrected, out);
        if let Some(stats) = stats.as_mut() {
            *stats = HcCorrectionStats {
                initial_invalid_edges: h.stats.initial_invalid_edges,
                recolored_by_reuse: h.stats.recolored_by_reuse,
                fresh_colors_added: h.stats.fresh_colors_added,
                final_colors_used: h.stats.final_colors_used,
            };
        }
        Ok(())
    })
}
