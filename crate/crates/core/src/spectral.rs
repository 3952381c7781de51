//! Second eigenvalues of the reversible normalized Laplacian `I − Π^{1/2}PΠ^{−1/2}`
//! and of Chung's directed Laplacian, plus truncated eigenvectors.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::chain::MarkovChain;
use crate::error::{Error, Result};
use crate::HALF_MASS_SLACK;

/// Jacobi stops once the off-diagonal Frobenius mass drops below this fraction of `‖M‖_F`.
pub const JACOBI_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Inputs whose asymmetry exceeds this fraction of `‖M‖_F` are rejected.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigensolver.
///
/// The input is symmetrized as `(M + Mᵀ)/2` before rotating.
pub fn symmetric_eigensolve(m: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::NonSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    let norm = m.norm();
    let asymmetry = (m - m.transpose()).norm();
    if asymmetry > SYMMETRY_TOL * norm {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);

    let mut sweeps = 0;
    loop {
        if off_diagonal_norm(&a) <= JACOBI_TOL * norm {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Below rounding of both diagonal entries the rotation is a no-op.
                let g = 100.0 * apq.abs();
                if sweeps > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// `A ← JᵀAJ`, `V ← VJ` for the plane rotation in coordinates `(p, q)`.
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralKind {
    ReversibleNormalized,
    ChungDirected,
}

/// Second eigenpair of a chain Laplacian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCertificate {
    pub lambda2: f64,
    /// Reweighted eigenvector `Π^{−1/2}v₂`.
    pub f2: Vec<f64>,
    /// Unit eigenvector of the symmetric matrix.
    pub v2: Vec<f64>,
    pub kind: SpectralKind,
    /// `‖Mv₂ − λ₂v₂‖₂`.
    pub residual: f64,
}

/// `Π^{1/2} P Π^{−1/2}`.
fn similarity_transform(c: &MarkovChain) -> DMatrix<f64> {
    let pi = c.stationary();
    let p = c.transition();
    DMatrix::from_fn(c.n(), c.n(), |i, j| pi[i].sqrt() * p[(i, j)] / pi[j].sqrt())
}

/// `I − Π^{1/2}PΠ^{−1/2}`, symmetric for reversible chains.
pub fn normalized_laplacian(c: &MarkovChain) -> DMatrix<f64> {
    DMatrix::identity(c.n(), c.n()) - similarity_transform(c)
}

/// Chung's Laplacian `I − ½(Π^{1/2}PΠ^{−1/2} + Π^{−1/2}PᵀΠ^{1/2})`.
pub fn chung_laplacian(c: &MarkovChain) -> DMatrix<f64> {
    let s = similarity_transform(c);
    DMatrix::identity(c.n(), c.n()) - (&s + s.transpose()) * 0.5
}

pub fn lambda2_reversible(c: &MarkovChain) -> Result<SpectralCertificate> {
    if !c.is_reversible_default() {
        return Err(Error::NotReversible);
    }
    certificate(c, &normalized_laplacian(c), SpectralKind::ReversibleNormalized)
}

pub fn lambda2_directed(c: &MarkovChain) -> Result<SpectralCertificate> {
    certificate(c, &chung_laplacian(c), SpectralKind::ChungDirected)
}

/// `λ₂` of the Chung Laplacian when asked for, or when the chain is not reversible.
pub fn lambda2(c: &MarkovChain, use_directed: bool) -> Result<SpectralCertificate> {
    if use_directed || !c.is_reversible_default() {
        lambda2_directed(c)
    } else {
        lambda2_reversible(c)
    }
}

fn certificate(c: &MarkovChain, m: &DMatrix<f64>, kind: SpectralKind) -> Result<SpectralCertificate> {
    let n = c.n();
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    let eig = symmetric_eigensolve(m)?;
    let lambda2 = eig.values[1];
    let mut v2: DVector<f64> = eig.vectors.column(1).into_owned();
    if let Some(first) = v2.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v2.neg_mut();
        }
    }
    let residual = (m * &v2 - &v2 * lambda2).norm();
    let pi = c.stationary();
    let f2 = v2.iter().zip(pi.iter()).map(|(x, p)| x / p.sqrt()).collect();
    Ok(SpectralCertificate {
        lambda2,
        f2,
        v2: v2.as_slice().to_vec(),
        kind,
        residual,
    })
}

/// `f = max(±f₂, 0)` rescaled to maximum 1, with the sign chosen so the support has `π`-mass at most 1/2.
///
/// Entries of `f₂` within `1e-12·max|f₂|` of zero are treated as zero.
pub fn truncated_eigenvector(cert: &SpectralCertificate, c: &MarkovChain) -> Result<Vec<f64>> {
    let pi = c.stationary();
    if cert.f2.len() != c.n() {
        return Err(Error::InvalidParameter(format!(
            "certificate has {} entries for a chain on {} states",
            cert.f2.len(),
            c.n()
        )));
    }
    let scale = cert.f2.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::DegenerateEigenvector);
    }
    let cleaned: Vec<f64> = cert
        .f2
        .iter()
        .map(|&x| if x.abs() <= 1e-12 * scale { 0.0 } else { x })
        .collect();
    let mass = |positive: bool| -> f64 {
        cleaned
            .iter()
            .zip(pi.iter())
            .filter(|(x, _)| if positive { **x > 0.0 } else { **x < 0.0 })
            .map(|(_, p)| p)
            .sum()
    };
    let (pos, neg) = (mass(true), mass(false));
    let half = 0.5 + HALF_MASS_SLACK;
    let tied = (pos - 0.5).abs() <= HALF_MASS_SLACK && (neg - 0.5).abs() <= HALF_MASS_SLACK;
    let sign = if tied {
        match cleaned.iter().find(|x| **x != 0.0) {
            Some(x) if *x < 0.0 => -1.0,
            _ => 1.0,
        }
    } else if pos <= half {
        1.0
    } else {
        -1.0
    };
    let mut f: Vec<f64> = cleaned.iter().map(|x| (sign * x).max(0.0)).collect();
    let top = f.iter().cloned().fold(0.0f64, f64::max);
    if top == 0.0 {
        return Err(Error::DegenerateEigenvector);
    }
    for x in &mut f {
        *x /= top;
    }
    Ok(f)
}

/// `Σ_{f(u) ≥ f(v)} π(u)P(u,v)(f(u) − f(v))² / Σ_v π(v)f(v)²` over ordered pairs.
pub fn truncated_rayleigh(c: &MarkovChain, f: &[f64]) -> Result<f64> {
    let n = c.n();
    if f.len() != n {
        return Err(Error::InvalidParameter(format!(
            "vector has {} entries for a chain on {n} states",
            f.len()
        )));
    }
    if f.iter().any(|x| *x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidParameter("vector must be non-negative".into()));
    }
    let pi = c.stationary();
    let p = c.transition();
    let denom: f64 = (0..n).map(|v| pi[v] * f[v] * f[v]).sum();
    if denom == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut num = 0.0;
    for u in 0..n {
        for v in 0..n {
            if f[u] >= f[v] {
                let d = f[u] - f[v];
                num += pi[u] * p[(u, v)] * d * d;
            }
        }
    }
    Ok(num / denom)
}
