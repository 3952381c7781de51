//! Finite Markov chains `(V, P, π)` and their construction from weighted graphs.

use std::collections::{HashSet, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum deviation of a row sum from 1.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Maximum `‖πᵀP − πᵀ‖∞` accepted for a stationary vector.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Relative tolerance of the detailed-balance test, scaled by the largest flow `π(i)P(i,j)`.
pub const REVERSIBILITY_TOL: f64 = 1e-10;
/// Transition weights at or below this value are structural zeros of the support digraph.
pub const SUPPORT_EPS: f64 = 1e-15;

const POWER_TOL: f64 = 1e-13;
const POWER_MAX_ITERS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    UndirectedGraph,
    DirectedGraph,
    RawMatrix,
}

/// Edge list with non-negative weights over vertices `0..n`.
///
/// Undirected edges are stored once with `u <= v`; a repeated pair is rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    directed: bool,
    allow_self_loops: bool,
    edges: Vec<(usize, usize, f64)>,
    seen: HashSet<(usize, usize)>,
}

impl WeightedGraph {
    pub fn undirected(n: usize) -> Self {
        Self::new(n, false)
    }

    pub fn directed(n: usize) -> Self {
        Self::new(n, true)
    }

    fn new(n: usize, directed: bool) -> Self {
        Self {
            n,
            directed,
            allow_self_loops: false,
            edges: Vec::new(),
            seen: HashSet::new(),
        }
    }

    /// Accept positive-weight self-loops. They count towards the weighted degree.
    pub fn with_self_loops(mut self) -> Self {
        self.allow_self_loops = true;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn allows_self_loops(&self) -> bool {
        self.allow_self_loops
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::VertexOutOfRange {
                vertex: u.max(v),
                n: self.n,
            });
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidGraph(format!(
                "weight {w} on edge ({u}, {v}) is not a finite non-negative number"
            )));
        }
        if u == v && w > 0.0 && !self.allow_self_loops {
            return Err(Error::InvalidGraph(format!(
                "self-loop at vertex {u} without self-loops enabled"
            )));
        }
        let key = if self.directed { (u, v) } else { (u.min(v), u.max(v)) };
        if !self.seen.insert(key) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                key.0, key.1
            )));
        }
        self.edges.push((key.0, key.1, w));
        Ok(())
    }

    /// Dense weight matrix; undirected edges are mirrored.
    pub fn weight_matrix(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n, self.n);
        for &(u, v, x) in &self.edges {
            w[(u, v)] += x;
            if !self.directed && u != v {
                w[(v, u)] += x;
            }
        }
        w
    }
}

/// An irreducible chain: row-stochastic `P` with strictly positive stationary `π`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovChain {
    p: DMatrix<f64>,
    pi: DVector<f64>,
    origin: Origin,
}

impl MarkovChain {
    /// Random walk `P(u,v) = w(uv)/deg_w(u)` with `π ∝ deg_w`.
    pub fn from_undirected(g: &WeightedGraph) -> Result<Self> {
        if g.is_directed() {
            return Err(Error::InvalidGraph("expected an undirected graph".into()));
        }
        let n = g.n();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let w = g.weight_matrix();
        let degrees: Vec<f64> = (0..n).map(|u| w.row(u).sum()).collect();
        if let Some(vertex) = degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::IsolatedVertex { vertex });
        }
        let p = DMatrix::from_fn(n, n, |u, v| w[(u, v)] / degrees[u]);
        if !is_irreducible(&p) {
            return Err(Error::DisconnectedGraph);
        }
        let volume: f64 = degrees.iter().sum();
        let pi = DVector::from_iterator(n, degrees.iter().map(|d| d / volume));
        Ok(Self {
            p,
            pi,
            origin: Origin::UndirectedGraph,
        })
    }

    /// Random walk `P(u,v) = w(uv)/Σ_v w(uv)` on a strongly connected digraph.
    pub fn from_directed(g: &WeightedGraph) -> Result<Self> {
        if !g.is_directed() {
            return Err(Error::InvalidGraph("expected a directed graph".into()));
        }
        let n = g.n();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let w = g.weight_matrix();
        let out: Vec<f64> = (0..n).map(|u| w.row(u).sum()).collect();
        if let Some(vertex) = out.iter().position(|&d| d <= 0.0) {
            return Err(Error::SinkVertex { vertex });
        }
        let p = DMatrix::from_fn(n, n, |u, v| w[(u, v)] / out[u]);
        if !is_irreducible(&p) {
            return Err(Error::NotStronglyConnected);
        }
        let pi = stationary_distribution(&p)?;
        Ok(Self {
            p,
            pi,
            origin: Origin::DirectedGraph,
        })
    }

    /// Validate a raw transition matrix and solve for its stationary distribution.
    pub fn from_transition(p: DMatrix<f64>) -> Result<Self> {
        validate_stochastic(&p)?;
        let pi = stationary_distribution(&p)?;
        Ok(Self {
            p,
            pi,
            origin: Origin::RawMatrix,
        })
    }

    /// Assemble a chain whose stationary vector is known in closed form.
    pub(crate) fn from_parts(p: DMatrix<f64>, pi: DVector<f64>, origin: Origin) -> Self {
        debug_assert!(stationary_residual(&p, &pi) <= STATIONARY_TOL);
        Self { p, pi, origin }
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn stationary(&self) -> &DVector<f64> {
        &self.pi
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    /// Largest detailed-balance violation `max |π(i)P(i,j) − π(j)P(j,i)|`.
    pub fn detailed_balance_gap(&self) -> f64 {
        let n = self.n();
        let mut gap = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let fwd = self.pi[i] * self.p[(i, j)];
                let bwd = self.pi[j] * self.p[(j, i)];
                gap = gap.max((fwd - bwd).abs());
            }
        }
        gap
    }

    pub fn is_reversible(&self, tol: f64) -> bool {
        self.detailed_balance_gap() <= tol
    }

    /// Detailed balance with the default tolerance scaled by the largest flow entry.
    pub fn is_reversible_default(&self) -> bool {
        let n = self.n();
        let mut max_flow = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                max_flow = max_flow.max(self.pi[i] * self.p[(i, j)]);
            }
        }
        self.is_reversible(REVERSIBILITY_TOL * max_flow)
    }

    /// True when every state holds at least half of its mass: `P(v,v) ≥ 1/2`.
    pub fn is_lazy(&self) -> bool {
        (0..self.n()).all(|v| self.p[(v, v)] >= 0.5)
    }

    /// `P → (1−δ)I + δP`. The stationary vector is carried over unchanged.
    pub fn lazy_transform(&self, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::DeltaOutOfRange(delta));
        }
        if delta == 1.0 {
            return Ok(self.clone());
        }
        let n = self.n();
        let p = DMatrix::from_fn(n, n, |i, j| {
            let stay = if i == j { 1.0 - delta } else { 0.0 };
            stay + delta * self.p[(i, j)]
        });
        Ok(Self {
            p,
            pi: self.pi.clone(),
            origin: self.origin,
        })
    }

    /// `‖πᵀP − πᵀ‖∞` for the stored `π`.
    pub fn stationary_residual(&self) -> f64 {
        stationary_residual(&self.p, &self.pi)
    }
}

fn validate_stochastic(p: &DMatrix<f64>) -> Result<()> {
    if p.nrows() != p.ncols() {
        return Err(Error::NonSquare {
            rows: p.nrows(),
            cols: p.ncols(),
        });
    }
    if p.nrows() == 0 {
        return Err(Error::InvalidMatrix("empty matrix".into()));
    }
    for (idx, &x) in p.iter().enumerate() {
        if !x.is_finite() || !(0.0..=1.0).contains(&x) {
            let (i, j) = (idx % p.nrows(), idx / p.nrows());
            return Err(Error::InvalidMatrix(format!(
                "entry ({i}, {j}) = {x} outside [0, 1]"
            )));
        }
    }
    for i in 0..p.nrows() {
        let s = p.row(i).sum();
        if (s - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidMatrix(format!("row {i} sums to {s}")));
        }
    }
    Ok(())
}

/// Strong connectivity of `{(i,j) : P(i,j) > 1e-15}` by forward and reverse traversal from state 0.
pub fn is_irreducible(p: &DMatrix<f64>) -> bool {
    let n = p.nrows();
    if n == 0 || p.ncols() != n {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let w = if forward { p[(u, v)] } else { p[(v, u)] };
                if w > SUPPORT_EPS && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

fn stationary_residual(p: &DMatrix<f64>, pi: &DVector<f64>) -> f64 {
    let lhs = p.transpose() * pi;
    (lhs - pi).amax()
}

/// Unique stationary distribution of an irreducible row-stochastic matrix.
///
/// Solves `(Pᵀ − I)x = 0` with the last equation replaced by `Σx = 1`. When
/// that system is numerically singular, or its answer misses the residual
/// tolerance, power iteration on the half-lazy chain takes over.
pub fn stationary_distribution(p: &DMatrix<f64>) -> Result<DVector<f64>> {
    if p.nrows() != p.ncols() {
        return Err(Error::NonSquare {
            rows: p.nrows(),
            cols: p.ncols(),
        });
    }
    if !is_irreducible(p) {
        return Err(Error::NotIrreducible);
    }
    let accept = |x: &DVector<f64>| {
        x.iter().all(|&v| v > 0.0) && stationary_residual(p, x) <= STATIONARY_TOL
    };
    if let Some(x) = direct_stationary(p) {
        if accept(&x) {
            return Ok(x);
        }
    }
    let x = power_stationary(p);
    if accept(&x) {
        Ok(x)
    } else {
        Err(Error::NumericalFailure {
            residual: stationary_residual(p, &x),
        })
    }
}

fn direct_stationary(p: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = p.nrows();
    let mut a = p.transpose();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let x = solve_partial_pivot(a, b)?;
    let total = x.sum();
    Some(x / total)
}

/// Gaussian elimination with partial pivoting; `None` if a pivot vanishes relative to the matrix scale.
fn solve_partial_pivot(mut a: DMatrix<f64>, mut b: DVector<f64>) -> Option<DVector<f64>> {
    let n = a.nrows();
    let scale = a.amax();
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, a[(r, col)].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= 1e-14 * scale {
            return None;
        }
        if pivot_row != col {
            a.swap_rows(col, pivot_row);
            b.swap_rows(col, pivot_row);
        }
        for r in (col + 1)..n {
            let factor = a[(r, col)] / a[(col, col)];
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[(r, c)] -= factor * a[(col, c)];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = DVector::zeros(n);
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in (r + 1)..n {
            acc -= a[(r, c)] * x[c];
        }
        x[r] = acc / a[(r, r)];
    }
    Some(x)
}

fn power_stationary(p: &DMatrix<f64>) -> DVector<f64> {
    let n = p.nrows();
    let lazy_t = (p.transpose() + DMatrix::identity(n, n)) * 0.5;
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..POWER_MAX_ITERS {
        let mut next = &lazy_t * &x;
        let total = next.sum();
        next /= total;
        let change = (&next - &x).lp_norm(1);
        x = next;
        if change <= POWER_TOL {
            break;
        }
    }
    x
}
