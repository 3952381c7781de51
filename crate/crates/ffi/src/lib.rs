//! C ABI over `markov-iso`.
//!
//! Chains are opaque `MiChain` handles created by the `mi_chain_*` constructors and
//! released with `mi_chain_free`. Every fallible call returns an `MiStatus`; on failure
//! `mi_last_error` describes the most recent error on the calling thread.
//! Vertex ids are 0-based. Matrices are dense and row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use markov_iso::families::{circulant_lambda2_analytic, gen_ht_counterexample, ht_laplacian_first_row};
use markov_iso::isoperimetry::{phi_p_exact, phi_p_of_set, sweep_cut};
use markov_iso::spectral::{lambda2_directed, lambda2_reversible};
use markov_iso::{CutResult, Error, MarkovChain, WeightedGraph};
use nalgebra::DMatrix;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Reducible chain, disconnected graph, isolated or sink vertex.
    NotIrreducible = 3,
    NotReversible = 4,
    /// Input exceeds the exact enumeration cap.
    TooLarge = 5,
    Numerical = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque chain handle.
pub struct MiChain {
    inner: MarkovChain,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<Vec<u8>>) {
    let msg = CString::new(msg).unwrap_or_else(|_| CString::from(c"error message contained NUL"));
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> MiStatus {
    use Error::*;
    match e {
        DisconnectedGraph | IsolatedVertex { .. } | NotStronglyConnected | SinkVertex { .. } | NotIrreducible => {
            MiStatus::NotIrreducible
        }
        NotReversible => MiStatus::NotReversible,
        TooLarge { .. } | DimensionTooLarge { .. } => MiStatus::TooLarge,
        NumericalFailure { .. } | NoConvergence { .. } | DegenerateEigenvector | ZeroVector => MiStatus::Numerical,
        _ => MiStatus::InvalidArgument,
    }
}

/// Run `f`, mapping library errors and panics to a status code.
fn guard(f: impl FnOnce() -> Result<(), MiStatus>) -> MiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MiStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_last_error("panic inside markov-iso");
            MiStatus::Panic
        }
    }
}

fn fail(e: Error) -> MiStatus {
    set_last_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> MiStatus {
    set_last_error(format!("{what} is null"));
    MiStatus::NullPointer
}

unsafe fn chain_ref<'a>(chain: *const MiChain) -> Result<&'a MarkovChain, MiStatus> {
    chain.as_ref().map(|c| &c.inner).ok_or_else(|| null("chain"))
}

unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], MiStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn store_handle(out: *mut *mut MiChain, chain: MarkovChain) -> Result<(), MiStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(MiChain { inner: chain }));
    Ok(())
}

/// Write `cut.phi` to `phi` and, when `membership` is non-null, a 0/1 indicator of length `len ≥ n`.
unsafe fn store_cut(cut: &CutResult, n: usize, phi: *mut f64, membership: *mut u8, len: usize) -> Result<(), MiStatus> {
    if phi.is_null() {
        return Err(null("phi"));
    }
    if !membership.is_null() {
        if len < n {
            set_last_error(format!("membership buffer holds {len} entries, chain has {n}"));
            return Err(MiStatus::BufferTooSmall);
        }
        let out = std::slice::from_raw_parts_mut(membership, n);
        out.fill(0);
        for &v in &cut.subset {
            out[v] = 1;
        }
    }
    *phi = cut.phi;
    Ok(())
}

/// Version string of the library; static, never freed.
#[no_mangle]
pub extern "C" fn mi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread. Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Chain from an `n × n` row-major transition matrix.
///
/// # Safety
/// `p` must point to `n*n` doubles and `out` to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn mi_chain_from_transition(p: *const f64, n: usize, out: *mut *mut MiChain) -> MiStatus {
    guard(|| {
        let Some(len) = n.checked_mul(n) else {
            return Err(fail(Error::InvalidParameter(format!("matrix order {n} overflows"))));
        };
        let data = slice(p, len, "p")?;
        let m = DMatrix::from_row_slice(n, n, data);
        let chain = MarkovChain::from_transition(m).map_err(fail)?;
        store_handle(out, chain)
    })
}

/// Random walk on a weighted graph with `m` edges `(u[i], v[i], w[i])`.
///
/// # Safety
/// `u`, `v` and `w` must each point to `m` elements; `out` to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn mi_chain_from_edges(
    n: usize,
    directed: bool,
    u: *const usize,
    v: *const usize,
    w: *const f64,
    m: usize,
    out: *mut *mut MiChain,
) -> MiStatus {
    guard(|| {
        let (u, v, w) = (slice(u, m, "u")?, slice(v, m, "v")?, slice(w, m, "w")?);
        let mut g = if directed {
            WeightedGraph::directed(n)
        } else {
            WeightedGraph::undirected(n)
        }
        .with_self_loops();
        for i in 0..m {
            g.add_edge(u[i], v[i], w[i]).map_err(fail)?;
        }
        let chain = if directed {
            MarkovChain::from_directed(&g)
        } else {
            MarkovChain::from_undirected(&g)
        }
        .map_err(fail)?;
        store_handle(out, chain)
    })
}

/// The cubic-decay circulant `G_n`, `P(i,j) ∝ 1/min(|i−j|, n−|i−j|)³`.
///
/// # Safety
/// `out` must point to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn mi_chain_ht_counterexample(n: usize, out: *mut *mut MiChain) -> MiStatus {
    guard(|| {
        let (chain, _) = gen_ht_counterexample(n).map_err(fail)?;
        store_handle(out, chain)
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `chain` must come from an `mi_chain_*` constructor and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mi_chain_free(chain: *mut MiChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `chain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mi_chain_n(chain: *const MiChain) -> usize {
    chain.as_ref().map_or(0, |c| c.inner.n())
}

/// Copy `π` into `out`, which holds `len ≥ n` doubles.
///
/// # Safety
/// `chain` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mi_chain_stationary(chain: *const MiChain, out: *mut f64, len: usize) -> MiStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len < c.n() {
            set_last_error(format!("buffer holds {len} entries, chain has {}", c.n()));
            return Err(MiStatus::BufferTooSmall);
        }
        std::slice::from_raw_parts_mut(out, c.n()).copy_from_slice(c.stationary().as_slice());
        Ok(())
    })
}

/// `λ₂` of the normalized Laplacian, or of Chung's directed Laplacian when `directed` is set.
///
/// # Safety
/// `chain` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mi_lambda2(chain: *const MiChain, directed: bool, out: *mut f64) -> MiStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cert = if directed { lambda2_directed(c) } else { lambda2_reversible(c) }.map_err(fail)?;
        *out = cert.lambda2;
        Ok(())
    })
}

/// `φ_p(S)` for the `len` vertices in `set`.
///
/// # Safety
/// `chain` must be a live handle, `set` must point to `len` ids and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn mi_phi_of_set(
    chain: *const MiChain,
    set: *const usize,
    len: usize,
    p: f64,
    out: *mut f64,
) -> MiStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let set = slice(set, len, "set")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = phi_p_of_set(c, set, p).map_err(fail)?.phi;
        Ok(())
    })
}

/// Exact `φ_p` by enumeration; `membership` (optional) receives the minimizing set.
///
/// # Safety
/// `chain` must be a live handle, `phi` writable, and `membership` null or `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mi_phi_exact(
    chain: *const MiChain,
    p: f64,
    phi: *mut f64,
    membership: *mut u8,
    len: usize,
) -> MiStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let cut = phi_p_exact(c, p).map_err(fail)?;
        store_cut(&cut, c.n(), phi, membership, len)
    })
}

/// Best level set of the truncated second eigenvector.
///
/// # Safety
/// Same contract as [`mi_phi_exact`].
#[no_mangle]
pub unsafe extern "C" fn mi_sweep_cut(
    chain: *const MiChain,
    p: f64,
    directed: bool,
    phi: *mut f64,
    membership: *mut u8,
    len: usize,
) -> MiStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let cert = if directed || !c.is_reversible_default() {
            lambda2_directed(c)
        } else {
            lambda2_reversible(c)
        }
        .map_err(fail)?;
        let cut = sweep_cut(c, p, &cert).map_err(fail)?;
        store_cut(&cut, c.n(), phi, membership, len)
    })
}

/// `λ₂` of `G_n` from its circulant spectrum, without building the matrix.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mi_ht_lambda2(n: usize, out: *mut f64) -> MiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let row = ht_laplacian_first_row(n).map_err(fail)?;
        *out = circulant_lambda2_analytic(&row).map_err(fail)?;
        Ok(())
    })
}
