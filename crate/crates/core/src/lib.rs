//! Symmetric tensor decomposition over ℂ.
//!
//! Given a symmetric tensor `F` of order `m` on ℂ^{n+1}, this crate computes
//! decompositions `F = Σᵢ (uᵢ)^⊗m` by
//!
//! 1. parameterizing the generating matrices of `F` (the linear relations the
//!    tensor imposes among low-degree monomials),
//! 2. solving the quadratic commutator system that makes the associated
//!    companion matrices pairwise commute,
//! 3. extracting the common zeros of the induced polynomial system from a
//!    Schur decomposition of a generic matrix combination, and
//! 4. recovering weights by linear least squares and refining the assembled
//!    decomposition with damped Gauss–Newton iterations.
//!
//! The crate also provides catalecticant matrices and rank heuristics, an
//! all-solutions mode (multi-start with deduplication up to the natural
//! equivalence of decompositions), and decomposition length reduction.

pub mod catalecticant;
pub mod decompose;
pub mod error;
pub mod genmat;
pub(crate) mod linalg;
pub(crate) mod lm;
pub mod symtensor;
pub mod syssolve;
#[cfg(test)]
pub(crate) mod testutil;
pub mod zerosolve;

pub use error::Error;
pub use symtensor::{MonomialPower, Poly, SymTensor};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
