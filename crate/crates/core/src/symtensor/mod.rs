//! Symmetric tensors over ℂ and the monomial bookkeeping they are built on.
//!
//! An order-m symmetric tensor on ℂ^{n+1} is stored as one coefficient per
//! monomial power α ∈ ℕⁿ with |α| ≤ m; the index-0 slot of a multi-index is
//! the homogenizing coordinate. Monomials are enumerated in graded
//! lexicographic order, which coincides with the lexicographic order of the
//! nondecreasing index tuples used for the upper-triangular entry listing.

mod monomial;
mod poly;
mod tensor;

pub use monomial::{
    binomial, cube_multiplicity, first_monomials, monomials_of_degree, monomials_up_to,
    MonomialPower, MonomialTable,
};
pub use poly::Poly;
pub use tensor::SymTensor;
