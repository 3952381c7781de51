//! Concrete instances of the Cheeger-type inequalities between `φ_p` and `λ₂`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::MarkovChain;
use crate::error::{Error, Result};
use crate::isoperimetry::{exact_cap, phi_p_exact_with_cap, sweep_cut, sweep_guarantee, CutResult};
use crate::spectral::{lambda2, lambda2_directed, lambda2_reversible, SpectralCertificate, SpectralKind};

/// Tolerance of every chain-level inequality report.
pub const BOUND_TOL: f64 = 1e-9;

/// One inequality instance `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Witness>,
}

/// The quantities a report was computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<CutResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_kind: Option<SpectralKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack,
            holds: lhs <= rhs + tol,
            tol,
            witnesses: None,
        }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witnesses = Some(w);
        self
    }
}

fn witness(cut: &CutResult, cert: &SpectralCertificate) -> Witness {
    Witness {
        cut: Some(cut.clone()),
        lambda2: Some(cert.lambda2),
        spectral_kind: Some(cert.kind),
        note: None,
    }
}

/// Exact `φ_p` when the chain is small enough to enumerate, the sweep cut of `cert` otherwise.
pub fn best_cut(c: &MarkovChain, p: f64, cert: &SpectralCertificate) -> Result<CutResult> {
    let cap = exact_cap();
    if c.n() <= cap {
        phi_p_exact_with_cap(c, p, cap)
    } else {
        sweep_cut(c, p, cert)
    }
}

fn certificate(c: &MarkovChain, use_directed: bool) -> Result<SpectralCertificate> {
    if use_directed {
        lambda2_directed(c)
    } else {
        lambda2_reversible(c)
    }
}

/// `φ_p² ≤ 4λ₂/(2p−1)` for `p ∈ (1/2, 1]`, with Chung's `λ₂` when `use_directed` is set.
pub fn check_main_theorem(c: &MarkovChain, p: f64, use_directed: bool) -> Result<BoundReport> {
    if !(p > 0.5 && p <= 1.0) {
        return Err(Error::ExponentOutOfRange { p });
    }
    let cert = certificate(c, use_directed)?;
    let cut = best_cut(c, p, &cert)?;
    let name = if use_directed {
        format!("main-theorem-directed(p={p})")
    } else {
        format!("main-theorem(p={p})")
    };
    let lhs = cut.phi * cut.phi;
    let rhs = 4.0 * cert.lambda2 / (2.0 * p - 1.0);
    Ok(BoundReport::new(name, lhs, rhs, BOUND_TOL).with_witness(witness(&cut, &cert)))
}

/// `φ_{1/2}²/(8·log(2/φ_{1/2})) ≤ λ₂`, with `φ_{1/2}` computed exactly.
///
/// No laziness hypothesis is imposed; the witness note records whether
/// `P(v,v) ≥ 1/2` holds everywhere.
pub fn check_morris_peres(c: &MarkovChain, use_directed: bool) -> Result<BoundReport> {
    let cert = certificate(c, use_directed)?;
    let cut = phi_p_exact_with_cap(c, 0.5, exact_cap())?;
    let phi = cut.phi;
    if !(phi > 0.0 && phi < 2.0) {
        return Err(Error::LogDomain { phi });
    }
    let lhs = phi * phi / (8.0 * (2.0 / phi).ln());
    let name = if use_directed {
        "morris-peres-directed"
    } else {
        "morris-peres"
    };
    let mut w = witness(&cut, &cert);
    w.note = Some(if c.is_lazy() { "lazy" } else { "not-lazy" }.to_string());
    Ok(BoundReport::new(name, lhs, cert.lambda2, BOUND_TOL).with_witness(w))
}

/// Classical Cheeger pair `λ₂/2 ≤ φ₁` and `φ₁ ≤ √(2λ₂)` for a reversible chain.
pub fn check_cheeger(c: &MarkovChain) -> Result<[BoundReport; 2]> {
    let cert = lambda2_reversible(c)?;
    let cut = best_cut(c, 1.0, &cert)?;
    let w = witness(&cut, &cert);
    Ok([
        BoundReport::new("cheeger-easy", cert.lambda2 / 2.0, cut.phi, BOUND_TOL).with_witness(w.clone()),
        BoundReport::new("cheeger-hard", cut.phi, (2.0 * cert.lambda2).sqrt(), BOUND_TOL).with_witness(w),
    ])
}

/// Chung's directed pair `½φ₁² ≤ λ₂(L⃗)` and `λ₂(L⃗) ≤ 2φ₁`.
pub fn check_chung(c: &MarkovChain) -> Result<[BoundReport; 2]> {
    let cert = lambda2_directed(c)?;
    let cut = best_cut(c, 1.0, &cert)?;
    let w = witness(&cut, &cert);
    Ok([
        BoundReport::new("chung-lower", 0.5 * cut.phi * cut.phi, cert.lambda2, BOUND_TOL).with_witness(w.clone()),
        BoundReport::new("chung-upper", cert.lambda2, 2.0 * cut.phi, BOUND_TOL).with_witness(w),
    ])
}

/// `ρ = φ_{1/2}/√λ₂`; Chung's `λ₂` is used for non-reversible chains.
pub fn check_conjecture_ratio(c: &MarkovChain) -> Result<f64> {
    let cert = lambda2(c, false)?;
    let cut = best_cut(c, 0.5, &cert)?;
    Ok(cut.phi / cert.lambda2.sqrt())
}

/// Slack allowed on the sweep-cut guarantee.
pub const SWEEP_TOL: f64 = 1e-8;

/// `φ_p(S_sweep) ≤ 2·√(λ₂/(2p−1))` for the sweep cut of `cert`.
pub fn check_sweep_guarantee(c: &MarkovChain, p: f64, cert: &SpectralCertificate) -> Result<BoundReport> {
    let rhs = sweep_guarantee(p, cert.lambda2).ok_or(Error::ExponentOutOfRange { p })?;
    let cut = sweep_cut(c, p, cert)?;
    Ok(BoundReport::new(format!("sweep-guarantee(p={p})"), cut.phi, rhs, SWEEP_TOL).with_witness(witness(&cut, cert)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSuite {
    Reversible,
    Directed,
    All,
}

pub const REVERSIBLE_EXPONENTS: [f64; 4] = [0.6, 0.75, 0.9, 1.0];
pub const DIRECTED_EXPONENTS: [f64; 2] = [0.6, 1.0];

/// Every bound of `suite` that applies to `c`.
///
/// Reversible bounds need a reversible chain; the Morris–Peres form is skipped
/// above the enumeration cap. Errors with `NotReversible` when nothing applies.
pub fn verify_suite(c: &MarkovChain, suite: BoundSuite) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let reversible = c.is_reversible_default();
    if suite != BoundSuite::Directed && reversible {
        for p in REVERSIBLE_EXPONENTS {
            out.push(check_main_theorem(c, p, false)?);
        }
        out.extend(check_cheeger(c)?);
        if c.n() <= exact_cap() {
            out.push(check_morris_peres(c, false)?);
        }
    }
    if suite != BoundSuite::Reversible {
        for p in DIRECTED_EXPONENTS {
            out.push(check_main_theorem(c, p, true)?);
        }
        out.extend(check_chung(c)?);
    }
    if out.is_empty() {
        return Err(Error::NotReversible);
    }
    Ok(out)
}

/// `Σ_j (a_j^p − a_{j−1}^p)²/(a_j − a_{j−1})` with `a_0 = 0` prepended; equal neighbours contribute 0.
pub fn gadget_sum(seq: &[f64], p: f64) -> f64 {
    let mut prev = 0.0f64;
    let mut total = 0.0;
    for &a in seq {
        let gap = a - prev;
        if gap > 0.0 {
            let d = a.powf(p) - prev.powf(p);
            total += d * d / gap;
        }
        prev = a;
    }
    total
}

/// Largest [`gadget_sum`] seen over `trials` random non-decreasing sequences in `[0, 1]`
/// (lengths 1 to 50, half of them ending at 1) and over the geometric sequences
/// `a_j = r^{m−j}` for `m ≤ 50` and a grid of ratios `r`.
pub fn gadget_c_supremum(p: f64, trials: usize, seed: u64) -> Result<f64> {
    if !(p > 0.5 && p <= 1.0) {
        return Err(Error::ExponentOutOfRange { p });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let mut seq = Vec::with_capacity(50);
    for t in 0..trials {
        let len = rng.random_range(1..=50);
        seq.clear();
        seq.extend((0..len).map(|_| rng.random::<f64>()));
        seq.sort_by(f64::total_cmp);
        if t % 2 == 0 {
            seq[len - 1] = 1.0;
        }
        best = best.max(gadget_sum(&seq, p));
    }
    for m in 1..=50 {
        for step in 1..1000 {
            let r = step as f64 / 1000.0;
            seq.clear();
            seq.extend((1..=m).map(|j| r.powi(m - j)));
            best = best.max(gadget_sum(&seq, p));
        }
    }
    Ok(best)
}

/// `(m+1)·(1 − b₀^{1/(m+1)})/(1 + b₀^{1/(m+1)})`, the maximum of the telescoping ratio sum
/// over chains `b₀ ≤ b₁ ≤ … ≤ b_m ≤ 1`. Increases with `m` towards `½·log(1/b₀)`.
pub fn gadget_log_chain(b0: f64, m: u64) -> f64 {
    let x = (m + 1) as f64;
    let y = b0.ln() / x;
    x * -y.exp_m1() / (1.0 + y.exp())
}
