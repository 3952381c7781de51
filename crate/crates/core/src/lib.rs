//! Isoperimetric constants `φ_p` of finite Markov chains.
//!
//! The crate computes
//!
//! - stationary distributions and structural predicates of chains built from
//!   weighted graphs or raw transition matrices ([`chain`]),
//! - second eigenvalues of the reversible normalized Laplacian and of Chung's
//!   directed Laplacian, with truncated eigenvectors ([`spectral`]),
//! - `φ_p(S)` for a given set, the exact `φ_p` by subset enumeration and the
//!   level-set sweep cut of the truncated eigenvector ([`isoperimetry`]),
//! - machine checks of the Cheeger-type inequalities relating `φ_p` and `λ₂`
//!   ([`bounds`]),
//! - graph families, most importantly the cubic-decay circulant family whose
//!   `φ_{1/2}/√λ₂` ratio grows without bound ([`families`]),
//! - file formats and reports used by the `markov-iso` binary ([`io`]).

pub mod bounds;
pub mod chain;
pub mod error;
pub mod families;
pub mod io;
pub mod isoperimetry;
pub mod spectral;

pub use bounds::BoundReport;
pub use chain::{MarkovChain, Origin, WeightedGraph};
pub use error::{Error, Result};
pub use isoperimetry::{CutMethod, CutResult};
pub use spectral::{SpectralCertificate, SpectralKind};

/// Additive slack admitted on the `π(S) ≤ 1/2` constraint.
pub const HALF_MASS_SLACK: f64 = 1e-12;
