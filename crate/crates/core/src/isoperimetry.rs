//! `φ_p(S) = Σ_{v∈S} π(v)·P(v,S̄)^p / π(S)` and its minimum over sets of mass at most 1/2.
//!
//! For `p = 0` the numerator is the mass of the inner vertex boundary, the
//! vertices of `S` with positive transition mass leaving `S`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::MarkovChain;
use crate::error::{Error, Result};
use crate::spectral::{truncated_eigenvector, SpectralCertificate};
use crate::HALF_MASS_SLACK;

/// Default largest state count accepted by [`phi_p_exact`].
pub const DEFAULT_EXACT_CAP: usize = 24;
/// Environment variable overriding [`DEFAULT_EXACT_CAP`].
pub const EXACT_CAP_ENV: &str = "ISO_MAX_EXACT_N";

const MAX_ENUMERABLE: usize = 40;
const CHUNK_BITS: usize = 12;
const BLOCK_BITS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutMethod {
    Exact,
    Sweep,
    GivenSet,
}

/// A vertex set with its `φ_p` value. Vertices are 0-based in memory and 1-based when serialized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    #[serde(with = "one_based")]
    pub subset: Vec<usize>,
    pub p: f64,
    pub numerator: f64,
    pub pi_mass: f64,
    pub phi: f64,
    pub method: CutMethod,
}

mod one_based {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[usize], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x + 1))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<usize>, D::Error> {
        let ids = Vec::<usize>::deserialize(d)?;
        ids.into_iter()
            .map(|x| {
                x.checked_sub(1)
                    .ok_or_else(|| serde::de::Error::custom("vertex ids are 1-based"))
            })
            .collect()
    }
}

/// `x^p` with the exact shortcuts for `p ∈ {1/2, 1}`.
#[inline]
fn pow_p(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 0.5 {
        x.sqrt()
    } else {
        x.powf(p)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ExponentOutOfRange { p })
    }
}

pub fn phi_p_of_set(c: &MarkovChain, subset: &[usize], p: f64) -> Result<CutResult> {
    evaluate(c, subset, p, CutMethod::GivenSet)
}

fn evaluate(c: &MarkovChain, subset: &[usize], p: f64, method: CutMethod) -> Result<CutResult> {
    check_exponent(p)?;
    let n = c.n();
    if subset.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut members = vec![false; n];
    for &v in subset {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        members[v] = true;
    }
    let subset: Vec<usize> = (0..n).filter(|&v| members[v]).collect();
    let pi = c.stationary();
    let pi_mass: f64 = subset.iter().map(|&v| pi[v]).sum();
    if pi_mass > 0.5 + HALF_MASS_SLACK {
        return Err(Error::MassTooLarge { mass: pi_mass });
    }
    let trans = c.transition();
    let numerator: f64 = subset
        .iter()
        .map(|&v| {
            let out: f64 = (0..n).filter(|&u| !members[u]).map(|u| trans[(v, u)]).sum();
            if p == 0.0 {
                if out > 0.0 {
                    pi[v]
                } else {
                    0.0
                }
            } else {
                pi[v] * pow_p(out, p)
            }
        })
        .sum();
    Ok(CutResult {
        subset,
        p,
        numerator,
        pi_mass,
        phi: numerator / pi_mass,
        method,
    })
}

/// Enumeration cap: [`EXACT_CAP_ENV`] when set to an integer, otherwise [`DEFAULT_EXACT_CAP`].
pub fn exact_cap() -> usize {
    std::env::var(EXACT_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_EXACT_CAP)
}

/// Exact `φ_p` by enumerating every nonempty set of mass at most 1/2, using [`exact_cap`].
pub fn phi_p_exact(c: &MarkovChain, p: f64) -> Result<CutResult> {
    phi_p_exact_with_cap(c, p, exact_cap())
}

/// Exact `φ_p` with an explicit cap on the state count.
///
/// Ties are broken by the smallest bitmask (vertex `v` is bit `v`). The range
/// of bitmasks is cut into fixed blocks that are scanned in parallel and
/// reduced in block order, so the answer does not depend on the thread count.
pub fn phi_p_exact_with_cap(c: &MarkovChain, p: f64, cap: usize) -> Result<CutResult> {
    check_exponent(p)?;
    let n = c.n();
    let cap = cap.min(MAX_ENUMERABLE);
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    let tables = Tables::new(c);
    let total: u64 = 1u64 << n;
    let block = 1u64 << BLOCK_BITS.min(n);
    let blocks = total / block;
    let best = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = (b * block).max(1);
            let end = (b + 1) * block;
            let mut best: Option<(f64, u64)> = None;
            for mask in start..end {
                if let Some(phi) = tables.phi(mask, p) {
                    if best.is_none_or(|(x, _)| phi < x) {
                        best = Some((phi, mask));
                    }
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None::<(f64, u64)>, |acc, cur| match acc {
            Some(a) if a.0 <= cur.0 => Some(a),
            _ => Some(cur),
        });
    let (_, mask) = best.ok_or_else(|| Error::InvalidParameter("no admissible set".into()))?;
    let subset: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    evaluate(c, &subset, p, CutMethod::Exact)
}

/// Per-chunk partial sums of `P(v, ·)` and `π` over every sub-mask of a chunk of states.
struct Tables {
    n: usize,
    pi: Vec<f64>,
    full: u64,
    chunks: Vec<Chunk>,
    out_support: Vec<u64>,
}

struct Chunk {
    shift: usize,
    width_mask: u64,
    /// `row_sums[v * size + sub]`
    row_sums: Vec<f64>,
    mass: Vec<f64>,
}

impl Tables {
    fn new(c: &MarkovChain) -> Self {
        let n = c.n();
        let trans = c.transition();
        let pi: Vec<f64> = c.stationary().iter().copied().collect();
        let mut chunks = Vec::new();
        let mut shift = 0;
        while shift < n {
            let width = CHUNK_BITS.min(n - shift);
            let size = 1usize << width;
            let mut row_sums = vec![0.0; n * size];
            let mut mass = vec![0.0; size];
            for sub in 1..size {
                let low = sub.trailing_zeros() as usize;
                let rest = sub & (sub - 1);
                mass[sub] = mass[rest] + pi[shift + low];
                for v in 0..n {
                    row_sums[v * size + sub] = row_sums[v * size + rest] + trans[(v, shift + low)];
                }
            }
            chunks.push(Chunk {
                shift,
                width_mask: (size - 1) as u64,
                row_sums,
                mass,
            });
            shift += width;
        }
        let out_support = (0..n)
            .map(|v| (0..n).filter(|&u| trans[(v, u)] > 0.0).fold(0u64, |m, u| m | 1 << u))
            .collect();
        Self {
            n,
            pi,
            full: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            chunks,
            out_support,
        }
    }

    fn mass(&self, mask: u64) -> f64 {
        self.chunks
            .iter()
            .map(|ch| ch.mass[((mask >> ch.shift) & ch.width_mask) as usize])
            .sum()
    }

    fn out(&self, v: usize, complement: u64) -> f64 {
        self.chunks
            .iter()
            .map(|ch| {
                let size = (ch.width_mask + 1) as usize;
                ch.row_sums[v * size + ((complement >> ch.shift) & ch.width_mask) as usize]
            })
            .sum()
    }

    /// `φ_p` of the set `mask`, or `None` when its mass exceeds 1/2.
    fn phi(&self, mask: u64, p: f64) -> Option<f64> {
        let mass = self.mass(mask);
        if mass > 0.5 + HALF_MASS_SLACK {
            return None;
        }
        let complement = !mask & self.full;
        let mut num = 0.0;
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if p == 0.0 {
                if self.out_support[v] & complement != 0 {
                    num += self.pi[v];
                }
            } else {
                num += self.pi[v] * pow_p(self.out(v, complement), p);
            }
        }
        debug_assert!(self.n <= 64);
        Some(num / mass)
    }
}

/// Level sets `{v : f(v)² ≥ t}` of the truncated eigenvector, one per distinct positive value of `f²`,
/// in order of decreasing threshold.
pub fn sweep_levels(c: &MarkovChain, p: f64, cert: &SpectralCertificate) -> Result<Vec<CutResult>> {
    check_exponent(p)?;
    let f = truncated_eigenvector(cert, c)?;
    let squares: Vec<f64> = f.iter().map(|x| x * x).collect();
    let mut thresholds: Vec<f64> = squares.iter().copied().filter(|&s| s > 0.0).collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    thresholds
        .into_iter()
        .map(|t| {
            let set: Vec<usize> = (0..c.n()).filter(|&v| squares[v] >= t).collect();
            evaluate(c, &set, p, CutMethod::Sweep)
        })
        .collect()
}

/// Best level set of the truncated eigenvector; the first (smallest) set wins ties.
pub fn sweep_cut(c: &MarkovChain, p: f64, cert: &SpectralCertificate) -> Result<CutResult> {
    sweep_levels(c, p, cert)?
        .into_iter()
        .reduce(|best, cur| if cur.phi < best.phi { cur } else { best })
        .ok_or(Error::DegenerateEigenvector)
}

/// Upper bound `2·√(λ₂/(2p−1))` met by [`sweep_cut`] for `p ∈ (1/2, 1]`; `None` otherwise.
pub fn sweep_guarantee(p: f64, lambda2: f64) -> Option<f64> {
    (p > 0.5 && p <= 1.0).then(|| 2.0 * (lambda2.max(0.0) / (2.0 * p - 1.0)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiProfile {
    pub phi0: f64,
    pub phi_half: f64,
    pub phi1: f64,
}

/// `(φ₀(S), φ_{1/2}(S), φ₁(S))`.
pub fn phi_profile(c: &MarkovChain, subset: &[usize]) -> Result<PhiProfile> {
    Ok(PhiProfile {
        phi0: phi_p_of_set(c, subset, 0.0)?.phi,
        phi_half: phi_p_of_set(c, subset, 0.5)?.phi,
        phi1: phi_p_of_set(c, subset, 1.0)?.phi,
    })
}
