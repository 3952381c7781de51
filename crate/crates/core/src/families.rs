//! Graph families: cycles, hypercubes, dumbbells, seeded random chains, and the
//! cubic-decay circulant `G_n` with `P(i,j) ∝ 1/min(|i−j|, n−|i−j|)³`.
//!
//! For `G_n` the module also provides the analytic circulant `λ₂`, the
//! `φ_{1/2}` of contiguous arcs computed without materializing `P`, and the
//! block function `h` that lower-bounds `√(2C)·Σ_{u∈A} √P(u,B)` for a
//! 2-coloring of the cycle.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundReport, BOUND_TOL};
use crate::chain::{MarkovChain, Origin, WeightedGraph};
use crate::error::{Error, Result};
use crate::HALF_MASS_SLACK;

pub const MAX_HYPERCUBE_CHAIN_DIM: usize = 12;
pub const MAX_HYPERCUBE_QUANTITY_DIM: usize = 14;

/// Compensated (Neumaier) summation.
fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn cyclic_distance(n: usize, d: usize) -> usize {
    d.min(n - d)
}

fn cube(m: usize) -> f64 {
    let m = m as f64;
    m * m * m
}

/// `Σ_{d=1}^{n−1} 1/min(d, n−d)³`, the row normalizer of `G_n`.
pub fn ht_normalizer(n: usize) -> f64 {
    neumaier((1..n).rev().map(|d| 1.0 / cube(cyclic_distance(n, d))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleMeta {
    pub n: usize,
    pub c: f64,
}

/// `G_n`: `P(i,j) = 1/(C·min(|i−j|, n−|i−j|)³)` for `i ≠ j`, uniform `π`.
pub fn gen_ht_counterexample(n: usize) -> Result<(MarkovChain, CounterexampleMeta)> {
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    let c = ht_normalizer(n);
    let p = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            1.0 / (c * cube(cyclic_distance(n, i.abs_diff(j))))
        }
    });
    let pi = DVector::from_element(n, 1.0 / n as f64);
    Ok((
        MarkovChain::from_parts(p, pi, Origin::UndirectedGraph),
        CounterexampleMeta { n, c },
    ))
}

/// `G_n` as an undirected graph with weights `P(i,j)`.
pub fn ht_counterexample_graph(n: usize) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    let c = ht_normalizer(n);
    let mut g = WeightedGraph::undirected(n);
    for i in 0..n {
        for j in (i + 1)..n {
            g.add_edge(i, j, 1.0 / (c * cube(cyclic_distance(n, j - i))))?;
        }
    }
    Ok(g)
}

/// First row `(1, −P(1,2), …, −P(1,n))` of `I − P` for `G_n`.
pub fn ht_laplacian_first_row(n: usize) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    let c = ht_normalizer(n);
    Ok(std::iter::once(1.0)
        .chain((1..n).map(|d| -1.0 / (c * cube(cyclic_distance(n, d)))))
        .collect())
}

/// Second smallest eigenvalue `min_{k≠0} Σ_i a_i·cos(2πki/n)` of the symmetric circulant with first row `a`.
pub fn circulant_lambda2_analytic(first_row: &[f64]) -> Result<f64> {
    let n = first_row.len();
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    let scale = first_row.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for d in 1..n {
        if (first_row[d] - first_row[n - d]).abs() > 1e-14 * scale {
            return Err(Error::NonSymmetricCirculant);
        }
    }
    let eigenvalue = |k: usize| {
        neumaier(first_row.iter().enumerate().map(|(i, a)| {
            let phase = (k * i) % n;
            a * (2.0 * PI * phase as f64 / n as f64).cos()
        }))
    };
    Ok((1..n).map(eigenvalue).fold(f64::INFINITY, f64::min))
}

/// `λ₂(I − P)` of `G_n` from the root of unity `ω = e^{2πi/n}`:
/// `4·Σ_{d<n/2} P(1,1+d)·sin²(πd/n)`, plus `2·P(1,1+n/2)` when `n` is even.
pub fn ht_lambda2_closed_form(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    let c = ht_normalizer(n);
    let weight = |d: usize| 1.0 / (c * cube(cyclic_distance(n, d)));
    let half = n.div_ceil(2);
    let paired = neumaier((1..half).map(|d| {
        let s = (PI * d as f64 / n as f64).sin();
        4.0 * weight(d) * s * s
    }));
    let middle = if n.is_multiple_of(2) { 2.0 * weight(n / 2) } else { 0.0 };
    Ok(paired + middle)
}

pub fn cycle_graph(n: usize) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    let mut g = WeightedGraph::undirected(n);
    for i in 0..n {
        g.add_edge(i, (i + 1) % n, 1.0)?;
    }
    Ok(g)
}

pub fn gen_cycle(n: usize) -> Result<MarkovChain> {
    MarkovChain::from_undirected(&cycle_graph(n)?)
}

/// `Q_d` on `{0,1}^d`; vertex `x` is the integer with bit `i` equal to `x_i`.
pub fn hypercube_graph(d: usize) -> Result<WeightedGraph> {
    if d == 0 {
        return Err(Error::TooSmall { n: d, min: 1 });
    }
    if d > MAX_HYPERCUBE_CHAIN_DIM {
        return Err(Error::DimensionTooLarge {
            d,
            max: MAX_HYPERCUBE_CHAIN_DIM,
        });
    }
    let mut g = WeightedGraph::undirected(1 << d);
    for x in 0..(1usize << d) {
        for i in 0..d {
            let y = x ^ (1 << i);
            if x < y {
                g.add_edge(x, y, 1.0)?;
            }
        }
    }
    Ok(g)
}

pub fn gen_hypercube(d: usize) -> Result<MarkovChain> {
    MarkovChain::from_undirected(&hypercube_graph(d)?)
}

/// Two copies of `K_m` on `0..m` and `m..2m` joined by the edge `(m−1, m)`.
pub fn dumbbell_graph(m: usize) -> Result<WeightedGraph> {
    if m < 3 {
        return Err(Error::TooSmall { n: m, min: 3 });
    }
    let mut g = WeightedGraph::undirected(2 * m);
    for base in [0, m] {
        for i in 0..m {
            for j in (i + 1)..m {
                g.add_edge(base + i, base + j, 1.0)?;
            }
        }
    }
    g.add_edge(m - 1, m, 1.0)?;
    Ok(g)
}

pub fn gen_dumbbell(m: usize) -> Result<MarkovChain> {
    MarkovChain::from_undirected(&dumbbell_graph(m)?)
}

fn check_density(density: f64) -> Result<()> {
    if (0.0..=1.0).contains(&density) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("density {density} outside [0, 1]")))
    }
}

/// Symmetric weights: each pair `i < j` keeps a uniform(0,1) weight with probability `density`;
/// the ring pairs `(i, i+1 mod n)` are always kept with a weight in `(0, 1]`.
pub fn random_reversible_graph(n: usize, density: f64, seed: u64) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    check_density(density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::undirected(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let keep = rng.random_bool(density);
            let w = 1.0 - rng.random::<f64>();
            let ring = j == i + 1 || (i == 0 && j == n - 1);
            if keep || ring {
                g.add_edge(i, j, w)?;
            }
        }
    }
    Ok(g)
}

pub fn gen_random_reversible(n: usize, density: f64, seed: u64) -> Result<MarkovChain> {
    MarkovChain::from_undirected(&random_reversible_graph(n, density, seed)?)
}

/// Directed analogue of [`random_reversible_graph`] with the forced cycle `i → i+1 mod n`.
pub fn random_directed_graph(n: usize, density: f64, seed: u64) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    check_density(density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::directed(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let keep = rng.random_bool(density);
            let w = 1.0 - rng.random::<f64>();
            if keep || j == (i + 1) % n {
                g.add_edge(i, j, w)?;
            }
        }
    }
    Ok(g)
}

pub fn gen_random_directed(n: usize, density: f64, seed: u64) -> Result<MarkovChain> {
    MarkovChain::from_directed(&random_directed_graph(n, density, seed)?)
}

fn suite(
    count: usize,
    sizes: RangeInclusive<usize>,
    density: f64,
    seed: u64,
    make: fn(usize, f64, u64) -> Result<MarkovChain>,
) -> Result<Vec<MarkovChain>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<(usize, u64)> = (0..count)
        .map(|_| (rng.random_range(sizes.clone()), rng.random::<u64>()))
        .collect();
    specs.into_iter().map(|(n, s)| make(n, density, s)).collect()
}

/// `count` seeded reversible chains with sizes drawn from `sizes`.
pub fn random_reversible_suite(
    count: usize,
    sizes: RangeInclusive<usize>,
    density: f64,
    seed: u64,
) -> Result<Vec<MarkovChain>> {
    suite(count, sizes, density, seed, gen_random_reversible)
}

/// `count` seeded strongly connected directed chains with sizes drawn from `sizes`.
pub fn random_directed_suite(
    count: usize,
    sizes: RangeInclusive<usize>,
    density: f64,
    seed: u64,
) -> Result<Vec<MarkovChain>> {
    suite(count, sizes, density, seed, gen_random_directed)
}

/// Boundary statistics of `S ⊆ {0,1}^d` under the uniform measure `μ`, where
/// `h_S(x)` counts the coordinates `i` with `x ⊕ e_i ∉ S` for `x ∈ S` (and is 0 off `S`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypercubeQuantities {
    /// `E_μ[h_S]`
    pub poincare_num: f64,
    /// `E_μ[√h_S]`
    pub talagrand_num: f64,
    /// `μ(∂S)`
    pub vertex_boundary: f64,
    pub mass: f64,
}

impl HypercubeQuantities {
    pub fn phi1(&self, d: usize) -> f64 {
        self.poincare_num / (d as f64 * self.mass)
    }

    pub fn phi_half(&self, d: usize) -> f64 {
        self.talagrand_num / ((d as f64).sqrt() * self.mass)
    }

    pub fn phi0(&self) -> f64 {
        self.vertex_boundary / self.mass
    }
}

pub fn hypercube_quantities(d: usize, subset: &[usize]) -> Result<HypercubeQuantities> {
    if d > MAX_HYPERCUBE_QUANTITY_DIM {
        return Err(Error::DimensionTooLarge {
            d,
            max: MAX_HYPERCUBE_QUANTITY_DIM,
        });
    }
    if subset.is_empty() {
        return Err(Error::EmptySet);
    }
    let size = 1usize << d;
    let mut members = vec![false; size];
    for &x in subset {
        if x >= size {
            return Err(Error::VertexOutOfRange { vertex: x, n: size });
        }
        members[x] = true;
    }
    let mu = 1.0 / size as f64;
    let count = members.iter().filter(|&&m| m).count();
    let mass = count as f64 * mu;
    if mass > 0.5 + HALF_MASS_SLACK {
        return Err(Error::MassTooLarge { mass });
    }
    let (mut h_sum, mut sqrt_sum, mut boundary) = (0usize, 0.0f64, 0usize);
    for x in (0..size).filter(|&x| members[x]) {
        let h = (0..d).filter(|&i| !members[x ^ (1 << i)]).count();
        h_sum += h;
        sqrt_sum += (h as f64).sqrt();
        boundary += usize::from(h > 0);
    }
    Ok(HypercubeQuantities {
        poincare_num: h_sum as f64 * mu,
        talagrand_num: sqrt_sum * mu,
        vertex_boundary: boundary as f64 * mu,
        mass,
    })
}

/// `f(A, B) = Σ_{u∈A} √P(u, B)`.
pub fn f_sqrt_crossweight(c: &MarkovChain, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = c.n();
    let mut in_b = vec![false; n];
    for &v in b {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        in_b[v] = true;
    }
    let mut in_a = vec![false; n];
    for &u in a {
        if u >= n {
            return Err(Error::VertexOutOfRange { vertex: u, n });
        }
        if in_b[u] {
            return Err(Error::OverlappingSets);
        }
        in_a[u] = true;
    }
    let p = c.transition();
    Ok((0..n)
        .filter(|&u| in_a[u])
        .map(|u| (0..n).filter(|&v| in_b[v]).map(|v| p[(u, v)]).sum::<f64>().sqrt())
        .sum())
}

/// Sizes `(a₁, b₁, …, a_k, b_k)` of the alternating runs `A₁, B₁, …, A_k, B_k` of a
/// 2-coloring of the cycle `0..n`, with `A₁` starting at vertex 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionBlocks {
    pub sizes: Vec<usize>,
}

impl PartitionBlocks {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || !sizes.len().is_multiple_of(2) {
            return Err(Error::InvalidBlocks(format!(
                "expected an even, nonzero number of sizes, got {}",
                sizes.len()
            )));
        }
        if sizes.iter().sum::<usize>() == 0 {
            return Err(Error::InvalidBlocks("all blocks are empty".into()));
        }
        Ok(Self { sizes })
    }

    /// Runs of a coloring, rotated so that the result starts at the first vertex
    /// of an `A` run. Returns the blocks and that starting vertex.
    pub fn from_coloring(in_a: &[bool]) -> Result<(Self, usize)> {
        let n = in_a.len();
        if !in_a.iter().any(|&x| x) || in_a.iter().all(|&x| x) {
            return Err(Error::InvalidBlocks("both colors must be present".into()));
        }
        let start = (0..n)
            .find(|&v| in_a[v] && !in_a[(v + n - 1) % n])
            .expect("a run of A starts somewhere");
        let mut sizes = Vec::new();
        let mut current = true;
        let mut run = 0;
        for j in 0..n {
            let color = in_a[(start + j) % n];
            if color == current {
                run += 1;
            } else {
                sizes.push(run);
                current = color;
                run = 1;
            }
        }
        sizes.push(run);
        Ok((Self::new(sizes)?, start))
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.sizes.len() / 2
    }

    pub fn is_canonical(&self) -> bool {
        self.sizes.iter().all(|&s| s > 0)
    }

    /// Membership of `A` when `A₁` starts at vertex 0.
    pub fn a_membership(&self) -> Vec<bool> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(i, &s)| std::iter::repeat_n(i % 2 == 0, s))
            .collect()
    }
}

/// `h(a₁, b₁, …, a_k, b_k)`: over every contiguous block `[S, T]` of the runs except
/// the whole cycle, `+log(|[S,T]|+1)` for blocks of an odd number of runs and
/// `−log(|[S,T]|+1)` for even ones, minus `k·log(n+1)` (the whole cycle counted once,
/// plus the `(k−1)·log(n+1)` correction).
///
/// Zero-size runs are admitted; for `k = 1` this is `log(a+1) + log(b+1) − log(n+1)`.
pub fn blocks_h(pb: &PartitionBlocks) -> f64 {
    let m = pb.sizes.len();
    let terms = (0..m).flat_map(|start| {
        let mut size = 0usize;
        (1..m).map(move |len| {
            size += pb.sizes[(start + len - 1) % m];
            let term = (size as f64).ln_1p();
            if len % 2 == 1 {
                term
            } else {
                -term
            }
        })
    });
    neumaier(terms) - pb.k() as f64 * (pb.n() as f64).ln_1p()
}

/// Merge the two neighbours of the single zero-size run into one run.
pub fn merge_zero_block(pb: &PartitionBlocks) -> Result<PartitionBlocks> {
    let zeros: Vec<usize> = (0..pb.sizes.len()).filter(|&i| pb.sizes[i] == 0).collect();
    let z = match zeros.as_slice() {
        [] => return Err(Error::NoZeroBlock),
        [z] => *z,
        _ => {
            return Err(Error::InvalidBlocks(
                "more than one zero-size block".into(),
            ))
        }
    };
    let m = pb.sizes.len();
    if m == 2 {
        return Err(Error::InvalidBlocks(
            "a single block pair has no merge target".into(),
        ));
    }
    let left = (z + m - 1) % m;
    let right = (z + 1) % m;
    let merged = pb.sizes[left] + pb.sizes[right];
    let sizes = (0..m)
        .filter(|&i| i != z && i != right)
        .map(|i| if i == left { merged } else { pb.sizes[i] })
        .collect();
    PartitionBlocks::new(sizes)
}

/// `|h(pb) − h(merged)|` for blocks with exactly one zero-size run.
pub fn blocks_merge_check(pb: &PartitionBlocks) -> Result<f64> {
    let merged = merge_zero_block(pb)?;
    Ok((blocks_h(pb) - blocks_h(&merged)).abs())
}

/// `h(blocks) ≤ √(2C)·f(A, B)` on `G_n`, with `A` laid out from vertex 0 by `blocks`.
pub fn lower_bound_fab_check(c: &MarkovChain, blocks: &PartitionBlocks) -> Result<BoundReport> {
    let n = c.n();
    if blocks.n() != n {
        return Err(Error::InvalidBlocks(format!(
            "blocks cover {} vertices, chain has {n}",
            blocks.n()
        )));
    }
    if !blocks.is_canonical() {
        return Err(Error::InvalidBlocks("blocks must all be nonempty".into()));
    }
    let in_a = blocks.a_membership();
    let a: Vec<usize> = (0..n).filter(|&v| in_a[v]).collect();
    let b: Vec<usize> = (0..n).filter(|&v| !in_a[v]).collect();
    let f = f_sqrt_crossweight(c, &a, &b)?;
    let rhs = (2.0 * ht_normalizer(n)).sqrt() * f;
    Ok(BoundReport::new("log-sum-lower-bound", blocks_h(blocks), rhs, BOUND_TOL))
}

/// Tail sums of the cubic kernel for arc computations on `G_n`.
struct ArcKernel {
    n: usize,
    /// `tail[m] = Σ_{t=m}^{n} 1/t³`, with `tail[n+1] = 0`.
    tail: Vec<f64>,
    c: f64,
}

impl ArcKernel {
    fn new(n: usize) -> Self {
        let mut tail = vec![0.0; n + 2];
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for m in (1..=n).rev() {
            let x = 1.0 / cube(m);
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
            tail[m] = sum + comp;
        }
        let mut k = Self { n, tail, c: 0.0 };
        k.c = k.range(1, n - 1);
        k
    }

    /// `Σ_{t=x}^{y} 1/t³`.
    fn linear(&self, x: usize, y: usize) -> f64 {
        if x > y {
            0.0
        } else {
            self.tail[x] - self.tail[y + 1]
        }
    }

    /// `Σ_{r=lo}^{hi} 1/min(r, n−r)³` for `1 ≤ lo ≤ hi ≤ n−1`.
    fn range(&self, lo: usize, hi: usize) -> f64 {
        let half = self.n / 2;
        let near = self.linear(lo, hi.min(half));
        let far_lo = lo.max(half + 1);
        let far = if far_lo <= hi {
            self.linear(self.n - hi, self.n - far_lo)
        } else {
            0.0
        };
        near + far
    }

    fn phi_half(&self, l: usize) -> f64 {
        let n = self.n;
        neumaier((0..l).map(|i| (self.range(l - i, n - 1 - i) / self.c).sqrt())) / l as f64
    }
}

/// `φ_{1/2}` of the arc `{0, …, l−1}` in `G_n`, from prefix sums of the weight kernel.
pub fn arc_phi_half(n: usize, l: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    if l == 0 || l > n / 2 {
        return Err(Error::InvalidParameter(format!(
            "arc length {l} outside 1..={}",
            n / 2
        )));
    }
    Ok(ArcKernel::new(n).phi_half(l))
}

/// `min_{1 ≤ l ≤ n/2} φ_{1/2}(arc of length l)` and the smallest minimizing `l`.
pub fn arc_min_phi_half(n: usize) -> Result<(f64, usize)> {
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    let kernel = ArcKernel::new(n);
    Ok((1..=n / 2)
        .map(|l| (kernel.phi_half(l), l))
        .fold((f64::INFINITY, 0), |best, cur| if cur.0 < best.0 { cur } else { best }))
}

/// One row of the `G_n` scaling scan. `phi_half_arc` is an upper bound on `φ_{1/2}(G_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub lambda2: f64,
    pub phi_half_arc: f64,
    pub arc_len: usize,
    pub rho: f64,
    /// `λ₂·n²/log n`
    pub lambda2_scaled: f64,
    /// `φ_{1/2}·n/log n`
    pub phi_scaled: f64,
}

pub fn scan_row(n: usize) -> Result<ScanRow> {
    if n < 8 {
        return Err(Error::TooSmall { n, min: 8 });
    }
    let lambda2 = circulant_lambda2_analytic(&ht_laplacian_first_row(n)?)?;
    let (phi, arc_len) = arc_min_phi_half(n)?;
    let nf = n as f64;
    Ok(ScanRow {
        n,
        lambda2,
        phi_half_arc: phi,
        arc_len,
        rho: phi / lambda2.sqrt(),
        lambda2_scaled: lambda2 * nf * nf / nf.ln(),
        phi_scaled: phi * nf / nf.ln(),
    })
}

/// Scan rows for every distinct `n` in `n_list`, in ascending order of `n`.
pub fn scaling_scan(n_list: &[usize]) -> Result<Vec<ScanRow>> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    ns.par_iter().map(|&n| scan_row(n)).collect()
}
