//! C ABI over the `sharedp` engines.
//!
//! Graphs and result sets are opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! an [`SdpStatus`]; on failure [`sdp_last_error`] describes the problem.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;
use std::time::Duration;

use sharedp::bench::{run_engine, Engine, RunError, RunReport};
use sharedp::{Batch, Graph, VertexId};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was out of range or malformed.
    InvalidArgument = 2,
    /// The graph file could not be read or parsed.
    LoadFailed = 3,
    /// The engine reported an internal inconsistency.
    EngineFailed = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Engine selector for [`sdp_run`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpEngine {
    Sharedp = 0,
    Maxflow = 1,
    Oracle = 2,
}

/// Opaque immutable graph.
pub struct SdpGraph(Graph);

/// Opaque per-query results of one run.
pub struct SdpResults(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Failure(SdpStatus, String);

fn fail<T>(status: SdpStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, recording any failure or panic for [`sdp_last_error`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SdpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SdpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SdpStatus::Panic
        }
    }
}

unsafe fn nonnull<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().map_or_else(|| fail(SdpStatus::NullArgument, format!("{name} is null")), Ok)
}

unsafe fn array<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(SdpStatus::NullArgument, format!("{name} is null"));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return fail(SdpStatus::NullArgument, "output pointer is null");
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return fail(SdpStatus::NullArgument, "output pointer is null");
    }
    *out = value;
    Ok(())
}

/// Message for the most recent failed call on this thread, or "" after a
/// successful one. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sdp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sdp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a `"u v"` edge list. When `undirected` is true each edge is added
/// in both directions.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdp_graph_load(path: *const c_char, undirected: bool, out: *mut *mut SdpGraph) -> SdpStatus {
    guard(|| {
        if path.is_null() {
            return fail(SdpStatus::NullArgument, "path is null");
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure(SdpStatus::InvalidArgument, "path is not UTF-8".into()))?;
        let g = Graph::load(path, undirected).map_err(|e| Failure(SdpStatus::LoadFailed, e.to_string()))?;
        store(out, SdpGraph(g))
    })
}

/// Builds a graph on `n` vertices from `m` edges `src[i] -> dst[i]`.
/// Self-loops and duplicates are dropped.
///
/// # Safety
/// `src` and `dst` must hold `m` elements each; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdp_graph_from_edges(
    n: usize,
    src: *const u32,
    dst: *const u32,
    m: usize,
    out: *mut *mut SdpGraph,
) -> SdpStatus {
    guard(|| {
        let src = array(src, m, "src")?;
        let dst = array(dst, m, "dst")?;
        if n > u32::MAX as usize {
            return fail(SdpStatus::InvalidArgument, "too many vertices");
        }
        if let Some(i) = (0..m).find(|&i| src[i] as usize >= n || dst[i] as usize >= n) {
            return fail(SdpStatus::InvalidArgument, format!("edge {i} ({} -> {}) is outside 0..{n}", src[i], dst[i]));
        }
        let g = Graph::from_edges(n, src.iter().copied().zip(dst.iter().copied()));
        store(out, SdpGraph(g))
    })
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sdp_graph_vertex_count(g: *const SdpGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.vertex_count())
}

/// Edge count after deduplication, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sdp_graph_edge_count(g: *const SdpGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sdp_graph_free(g: *mut SdpGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Answers `count` queries `sources[i] -> targets[i]` for `k` disjoint
/// paths each. `timeout_secs` is the per-query limit; the shared engine
/// gets `timeout_secs * count` for the whole batch.
///
/// # Safety
/// `g` must be a live handle; `sources` and `targets` must hold `count`
/// elements each; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdp_run(
    g: *const SdpGraph,
    engine: SdpEngine,
    k: u32,
    sources: *const u32,
    targets: *const u32,
    count: usize,
    timeout_secs: f64,
    out: *mut *mut SdpResults,
) -> SdpStatus {
    guard(|| {
        let g = &nonnull(g, "graph")?.0;
        let sources = array(sources, count, "sources")?;
        let targets = array(targets, count, "targets")?;
        let timeout = Duration::try_from_secs_f64(timeout_secs)
            .ok()
            .filter(|d| !d.is_zero())
            .ok_or_else(|| Failure(SdpStatus::InvalidArgument, "timeout must be positive".into()))?;
        let pairs: Vec<(VertexId, VertexId)> = sources.iter().copied().zip(targets.iter().copied()).collect();
        let batch = Batch::validated(g, k as usize, &pairs)
            .map_err(|e| Failure(SdpStatus::InvalidArgument, format!("queries, {e}")))?;
        let engine = match engine {
            SdpEngine::Sharedp => Engine::Sharedp,
            SdpEngine::Maxflow => Engine::Maxflow,
            SdpEngine::Oracle => Engine::Oracle,
        };
        let report = run_engine(g, &batch, engine, timeout).map_err(|e| match e {
            RunError::Usage(u) => Failure(SdpStatus::InvalidArgument, u.to_string()),
            other => Failure(SdpStatus::EngineFailed, other.to_string()),
        })?;
        store(out, SdpResults(report))
    })
}

/// Number of queries in a result set, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sdp_results_len(r: *const SdpResults) -> usize {
    r.as_ref().map_or(0, |r| r.0.records.len())
}

unsafe fn record<'a>(r: *const SdpResults, query: usize) -> Result<&'a sharedp::bench::QueryRecord, Failure> {
    let r = nonnull(r, "results")?;
    r.0.records.get(query).map_or_else(|| fail(SdpStatus::InvalidArgument, format!("query {query} out of range")), Ok)
}

/// Number of disjoint paths found for `query`.
///
/// # Safety
/// `r` must be a live handle; `found` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdp_results_found(r: *const SdpResults, query: usize, found: *mut usize) -> SdpStatus {
    guard(|| put(found, record(r, query)?.found))
}

/// Whether `query` ran out of time.
///
/// # Safety
/// `r` must be a live handle; `timed_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdp_results_timed_out(r: *const SdpResults, query: usize, timed_out: *mut bool) -> SdpStatus {
    guard(|| put(timed_out, record(r, query)?.timed_out))
}

/// Whether every path set in the run passed the disjointness check.
///
/// # Safety
/// `r` must be a live handle; `verified` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdp_results_verified(r: *const SdpResults, verified: *mut bool) -> SdpStatus {
    guard(|| put(verified, nonnull(r, "results")?.0.verified()))
}

/// Vertex count of path `path` of `query`, endpoints included.
///
/// # Safety
/// `r` must be a live handle; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdp_results_path_len(
    r: *const SdpResults,
    query: usize,
    path: usize,
    len: *mut usize,
) -> SdpStatus {
    guard(|| {
        let rec = record(r, query)?;
        let p = rec
            .paths
            .get(path)
            .ok_or_else(|| Failure(SdpStatus::InvalidArgument, format!("path {path} out of range")))?;
        put(len, p.len())
    })
}

/// Copies path `path` of `query` into `buf`, which holds `cap` vertices.
/// Fails without writing when `cap` is too small.
///
/// # Safety
/// `r` must be a live handle; `buf` must hold `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn sdp_results_path_copy(
    r: *const SdpResults,
    query: usize,
    path: usize,
    buf: *mut u32,
    cap: usize,
) -> SdpStatus {
    guard(|| {
        let rec = record(r, query)?;
        let p = rec
            .paths
            .get(path)
            .ok_or_else(|| Failure(SdpStatus::InvalidArgument, format!("path {path} out of range")))?;
        if cap < p.len() {
            return fail(SdpStatus::InvalidArgument, format!("buffer holds {cap}, path has {}", p.len()));
        }
        if buf.is_null() {
            return fail(SdpStatus::NullArgument, "buf is null");
        }
        ptr::copy_nonoverlapping(p.as_ptr(), buf, p.len());
        Ok(())
    })
}

/// Shared expansions over all expansions for a shared-engine run; negative
/// when the engine does not share work.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sdp_results_share_ratio(r: *const SdpResults) -> f64 {
    r.as_ref().and_then(|r| r.0.aggregate.share_ratio).unwrap_or(-1.0)
}

/// Releases a result set. Null is ignored.
///
/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sdp_results_free(r: *mut SdpResults) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
