//! Catalecticant matrices and the closed-form rank and dimension formulas.
//!
//! The degree-k catalecticant of an order-m tensor represents its apolar
//! action on degree-k polynomials: rows are indexed by monomials β with
//! |β| ≤ m−k, columns by α with |α| ≤ k, and the (β, α) entry is F_{α+β}.
//! Its rank lower-bounds the symmetric rank, and its kernel consists of the
//! degree-k annihilating relations.

use nalgebra::DMatrix;

use crate::symtensor::{binomial, MonomialPower, MonomialTable, SymTensor};
use crate::{Error, Result, C64};

/// Relative singular-value threshold for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Catalecticant matrix of a fixed degree split (m−k, k).
#[derive(Clone, Debug)]
pub struct CatMatrix {
    rows_degree: u32,
    cols_degree: u32,
    row_mons: MonomialTable,
    col_mons: MonomialTable,
    data: DMatrix<C64>,
}

impl CatMatrix {
    /// Degree bound m−k of the row monomials.
    pub fn rows_degree(&self) -> u32 {
        self.rows_degree
    }

    /// Degree bound k of the column monomials.
    pub fn cols_degree(&self) -> u32 {
        self.cols_degree
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    /// Row monomials β, |β| ≤ m−k, in graded-lex order.
    pub fn row_monomials(&self) -> &[MonomialPower] {
        self.row_mons.monomials()
    }

    /// Column monomials α, |α| ≤ k, in graded-lex order.
    pub fn col_monomials(&self) -> &[MonomialPower] {
        self.col_mons.monomials()
    }

    /// Numerical rank at relative threshold `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        numerical_rank(&self.data, tol)
    }
}

fn numerical_rank(a: &DMatrix<C64>, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// Catalecticant of `f` with column degree `k`.
pub fn cat_matrix(f: &SymTensor, k: u32) -> Result<CatMatrix> {
    let m = f.order();
    if k > m {
        return Err(Error::Domain(format!(
            "catalecticant degree {} exceeds tensor order {}",
            k, m
        )));
    }
    let row_mons = MonomialTable::up_to(f.n_vars(), m - k);
    let col_mons = MonomialTable::up_to(f.n_vars(), k);
    let mut data = DMatrix::zeros(row_mons.len(), col_mons.len());
    for (i, beta) in row_mons.monomials().iter().enumerate() {
        for (j, alpha) in col_mons.monomials().iter().enumerate() {
            data[(i, j)] = f.entry(&alpha.add(beta)).expect("|α+β| ≤ m");
        }
    }
    Ok(CatMatrix {
        rows_degree: m - k,
        cols_degree: k,
        row_mons,
        col_mons,
        data,
    })
}

/// Rank of the most-square catalecticant (k = ⌈m/2⌉) at relative singular
/// value threshold `tol`. This lower-bounds the symmetric rank of `f`.
pub fn cat_rank(f: &SymTensor, tol: f64) -> usize {
    let k = f.order().div_ceil(2);
    cat_matrix(f, k).expect("⌈m/2⌉ ≤ m").rank(tol)
}

/// Generic symmetric rank in S^m(ℂ^{n+1}), with flags for the cases where the
/// counting formula does not literally apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenericRank {
    pub value: usize,
    /// (m, n) is one of the four exceptional pairs where the generic rank is
    /// one more than the naive count.
    pub exceptional: bool,
    /// m = 2: quadratics have generic rank n+1 outside the formula's domain.
    pub quadratic: bool,
}

/// Generic symmetric rank of order-m tensors on ℂ^{n+1}.
pub fn generic_rank(n: usize, m: u32) -> GenericRank {
    if m == 2 {
        return GenericRank {
            value: n + 1,
            exceptional: false,
            quadratic: true,
        };
    }
    let count = binomial(n + m as usize, m as usize).div_ceil(n + 1);
    let exceptional = matches!((m, n), (3, 4) | (4, 2) | (4, 3) | (4, 4));
    GenericRank {
        value: count + usize::from(exceptional),
        exceptional,
        quadratic: false,
    }
}

/// Dimension of the r-th secant variety of the Veronese (cone dimension of
/// the set of rank-≤r tensors in S^m(ℂ^{n+1}), minus 1).
pub fn secant_dim(n: usize, m: u32, r: usize) -> usize {
    let ambient = binomial(n + m as usize, m as usize) - 1;
    if m == 2 && (2..=n).contains(&r) {
        return binomial(r + 1, 2) + r * (n + 1 - r) - 1;
    }
    if m == 3 && n == 4 && r == 7 {
        return ambient - 1;
    }
    if m == 4 && (2..=4).contains(&n) && r == binomial(n + 2, 2) - 1 {
        return ambient - 1;
    }
    (r * (n + 1) - 1).min(ambient)
}

/// Defect d = r(n+1) − 1 − dim σ_r: the number of affine constraints needed
/// to cut the solution family of a defective commutator system down to
/// isolated points.
pub fn dimension_gap(n: usize, m: u32, r: usize) -> usize {
    (r * (n + 1) - 1).saturating_sub(secant_dim(n, m, r))
}
