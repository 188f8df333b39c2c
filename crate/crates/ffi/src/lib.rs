//! C ABI over the critgraph library.
//!
//! Handles are opaque pointers created by `cg_*_new`-style constructors and
//! released with the matching `*_free`. Every fallible call returns a
//! [`CgStatus`]; on failure the message is available from
//! [`cg_last_error`] on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use critgraph::graphcore::{components, Graph};
use critgraph::limits::{bf_ode_solve, BfOdeOptions, CmLimitParams};
use critgraph::metric::{ghp_bounds, ghp_exact, MeasuredMetricSpace};
use critgraph::models::{cm_uniform_match, gen_er, gen_gxq, WeightedVertexSet};
use critgraph::observables::observe_graph;
use critgraph::rng::stream;
use critgraph::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    SizeCap = 3,
    NonConvergence = 4,
    Io = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Opaque multigraph.
pub struct CgGraph(Graph);

/// Opaque finite measured metric space.
pub struct CgSpace(MeasuredMetricSpace);

/// Susceptibilities of a graph: `s_k = Σ |C|^k / n`, `d = Σ D(C) / n`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CgSusceptibility {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub d: f64,
    pub largest: u64,
    pub diameter: u32,
}

/// Bohman–Frieze limit constants.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CgBfConstants {
    pub t_c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
}

/// Configuration-model degree parameters.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CgCmParams {
    pub mu: f64,
    pub nu: f64,
    pub beta: f64,
    pub t_c: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CgStatus {
    match e {
        Error::SizeCap(_) => CgStatus::SizeCap,
        Error::NonConvergence(_) => CgStatus::NonConvergence,
        Error::Io(_) => CgStatus::Io,
        _ => CgStatus::InvalidInput,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (CgStatus, String)>) -> CgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CgStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            CgStatus::Panic
        }
    }
}

fn lib<T>(r: critgraph::Result<T>) -> Result<T, (CgStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (CgStatus, String) {
    (CgStatus::NullPointer, format!("{name} is null"))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], (CgStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, v: T, name: &str) -> Result<(), (CgStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    *out = v;
    Ok(())
}

fn need<T>(p: *mut T, name: &str) -> Result<(), (CgStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    Ok(())
}

unsafe fn graph<'a>(g: *const CgGraph) -> Result<&'a Graph, (CgStatus, String)> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("graph"))
}

unsafe fn space<'a>(s: *const CgSpace) -> Result<&'a MeasuredMetricSpace, (CgStatus, String)> {
    s.as_ref().map(|s| &s.0).ok_or_else(|| null("space"))
}

unsafe fn put_graph(out: *mut *mut CgGraph, g: Graph) -> Result<(), (CgStatus, String)> {
    put(out, Box::into_raw(Box::new(CgGraph(g))), "out")
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Erdős–Rényi graph at time `t` (edge probability `1 - exp(-t/n)`).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_er(n: usize, t: f64, seed: u64, out: *mut *mut CgGraph) -> CgStatus {
    guard(|| {
        need(out, "out")?;
        let g = lib(gen_er(n, t, &mut stream(seed, 0)))?;
        put_graph(out, g)
    })
}

/// G(x,q) with edge probabilities `1 - exp(-q x_i x_j)`.
///
/// # Safety
/// `x` must point to `len` readable doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_gxq(
    x: *const f64,
    len: usize,
    q: f64,
    seed: u64,
    out: *mut *mut CgGraph,
) -> CgStatus {
    guard(|| {
        need(out, "out")?;
        let w = lib(WeightedVertexSet::new(slice(x, len, "x")?.to_vec()))?;
        let g = lib(gen_gxq(&w, q, &mut stream(seed, 0)))?;
        put_graph(out, g)
    })
}

/// Configuration model: uniform matching of the half-edges.
///
/// # Safety
/// `degrees` must point to `len` readable values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_cm(
    degrees: *const u32,
    len: usize,
    seed: u64,
    out: *mut *mut CgGraph,
) -> CgStatus {
    guard(|| {
        need(out, "out")?;
        let g = lib(cm_uniform_match(slice(degrees, len, "degrees")?, &mut stream(seed, 0)))?;
        put_graph(out, g)
    })
}

/// Releases a graph; null is ignored.
///
/// # Safety
/// `g` must come from a `cg_graph_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_free(g: *mut CgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count, or 0 for null.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_n(g: *const CgGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Edge count, or 0 for null.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_edge_count(g: *const CgGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Copies the edges into `u`, `v` (capacity `cap` each).
/// Returns `BufferTooSmall` when `cap` is less than the edge count.
///
/// # Safety
/// `u` and `v` must be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_edges(g: *const CgGraph, u: *mut u64, v: *mut u64, cap: usize) -> CgStatus {
    guard(|| {
        let g = graph(g)?;
        let m = g.edge_count();
        if cap < m {
            return Err((CgStatus::BufferTooSmall, format!("need room for {m} edges")));
        }
        if m > 0 && (u.is_null() || v.is_null()) {
            return Err(null("edge buffer"));
        }
        for (i, (a, b)) in g.edges().enumerate() {
            *u.add(i) = a as u64;
            *v.add(i) = b as u64;
        }
        Ok(())
    })
}

/// Component sizes in decreasing order; `count` receives the number of
/// components. Returns `BufferTooSmall` (with `count` set) if `cap` is short.
///
/// # Safety
/// `sizes` must be valid for `cap` writes and `count` for one write.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_component_sizes(
    g: *const CgGraph,
    sizes: *mut u64,
    cap: usize,
    count: *mut usize,
) -> CgStatus {
    guard(|| {
        let g = graph(g)?;
        let mut s = components(g).sizes();
        s.sort_unstable_by(|a, b| b.cmp(a));
        put(count, s.len(), "count")?;
        if cap < s.len() {
            return Err((CgStatus::BufferTooSmall, format!("need room for {} sizes", s.len())));
        }
        if !s.is_empty() && sizes.is_null() {
            return Err(null("sizes"));
        }
        for (i, v) in s.into_iter().enumerate() {
            *sizes.add(i) = v as u64;
        }
        Ok(())
    })
}

/// Susceptibilities with exact all-pairs distances.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_susceptibility(g: *const CgGraph, out: *mut CgSusceptibility) -> CgStatus {
    guard(|| {
        need(out, "out")?;
        let r = observe_graph(graph(g)?, 0.0);
        put(
            out,
            CgSusceptibility { s1: r.s1, s2: r.s2, s3: r.s3, d: r.d, largest: r.largest as u64, diameter: r.diam_max },
            "out",
        )
    })
}

/// Measured metric space from a row-major `n×n` distance matrix and `n`
/// masses.
///
/// # Safety
/// `dist` must hold `n*n` doubles, `mass` `n` doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_space_new(
    n: usize,
    dist: *const f64,
    mass: *const f64,
    out: *mut *mut CgSpace,
) -> CgStatus {
    guard(|| {
        need(out, "out")?;
        let nn = n.checked_mul(n).ok_or_else(|| (CgStatus::InvalidInput, "n too large".to_string()))?;
        let d = slice(dist, nn, "dist")?;
        let m = slice(mass, n, "mass")?;
        let rows: Vec<Vec<f64>> = (0..n).map(|i| d[i * n..(i + 1) * n].to_vec()).collect();
        let s = lib(MeasuredMetricSpace::new(rows, m.to_vec()))?;
        put(out, Box::into_raw(Box::new(CgSpace(s))), "out")
    })
}

/// Releases a space; null is ignored.
///
/// # Safety
/// `s` must come from [`cg_space_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cg_space_free(s: *mut CgSpace) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Point count, or 0 for null.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cg_space_len(s: *const CgSpace) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Exact GHP distance (product of point counts at most 36).
///
/// # Safety
/// Handles must be live; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_ghp_exact(a: *const CgSpace, b: *const CgSpace, out: *mut f64) -> CgStatus {
    guard(|| {
        need(out, "out")?;
        let d = lib(ghp_exact(space(a)?, space(b)?))?;
        put(out, d, "out")
    })
}

/// Lower and upper bounds on the GHP distance.
///
/// # Safety
/// Handles must be live; `lower` and `upper` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_ghp_bounds(
    a: *const CgSpace,
    b: *const CgSpace,
    lower: *mut f64,
    upper: *mut f64,
) -> CgStatus {
    guard(|| {
        need(lower, "lower")?;
        need(upper, "upper")?;
        let r = lib(ghp_bounds(space(a)?, space(b)?))?;
        put(lower, r.lower, "lower")?;
        put(upper, r.upper, "upper")
    })
}

/// Bohman–Frieze critical time and scaling constants.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_bf_constants(out: *mut CgBfConstants) -> CgStatus {
    guard(|| {
        need(out, "out")?;
        let s = lib(bf_ode_solve(&[], &BfOdeOptions::default()))?;
        put(out, CgBfConstants { t_c: s.t_c, alpha: s.alpha, beta: s.beta, rho: s.rho }, "out")
    })
}

/// Degree parameters and critical time from a pmf `p[k] = P(D = k)`.
///
/// # Safety
/// `pmf` must hold `len` doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cg_cm_params(pmf: *const f64, len: usize, out: *mut CgCmParams) -> CgStatus {
    guard(|| {
        need(out, "out")?;
        let p = lib(CmLimitParams::from_pmf(slice(pmf, len, "pmf")?))?;
        put(out, CgCmParams { mu: p.mu, nu: p.nu, beta: p.beta, t_c: p.t_c() }, "out")
    })
}
