//! Generating matrices: the linear relations a tensor imposes among monomials.
//!
//! For a target rank r, `B₀` is the set of the first r monomials in
//! graded-lex order and `B₁` its border (products xᵢ·x^β that leave B₀). A
//! generating matrix G expresses each border monomial as a combination of B₀
//! monomials through the relation polynomials φ[G,α] = Σ_β G(β,α)x^β − x^α
//! annihilating the tensor. The admissible G form an affine family C + N(ω);
//! each G yields one companion-style multiplication matrix per variable, and
//! the matrices commute exactly when the relations have r common zeros.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::linalg::{cpow, kernel_basis, lstsq_matrix, lstsq_min_norm};
use crate::symtensor::{first_monomials, monomials_up_to, MonomialPower, Poly, SymTensor};
use crate::{Error, Result, C64};

/// Relative tolerance below which a Vandermonde-style interpolation matrix is
/// declared singular.
const SINGULAR_RATIO: f64 = 1e-12;

/// The monomial basis B₀ (first r monomials in graded-lex order) together
/// with its border B₁.
#[derive(Clone, Debug)]
pub struct BasisPair {
    n_vars: usize,
    b0: Vec<MonomialPower>,
    b1: Vec<MonomialPower>,
    pos0: HashMap<Vec<u32>, usize>,
    pos1: HashMap<Vec<u32>, usize>,
}

/// B₀ = first r monomials in graded-lex order, B₁ = its border.
pub fn basis_pair(n: usize, r: usize) -> BasisPair {
    assert!(n >= 1 && r >= 1, "need n ≥ 1 and r ≥ 1");
    let b0 = first_monomials(n, r);
    let pos0: HashMap<_, _> = b0
        .iter()
        .enumerate()
        .map(|(i, a)| (a.exponents().to_vec(), i))
        .collect();
    let mut b1: Vec<MonomialPower> = Vec::new();
    for beta in &b0 {
        for i in 0..n {
            let cand = beta.times_var(i);
            if !pos0.contains_key(cand.exponents()) && !b1.contains(&cand) {
                b1.push(cand);
            }
        }
    }
    b1.sort();
    let pos1 = b1
        .iter()
        .enumerate()
        .map(|(i, a)| (a.exponents().to_vec(), i))
        .collect();
    BasisPair {
        n_vars: n,
        b0,
        b1,
        pos0,
        pos1,
    }
}

impl BasisPair {
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// r = |B₀|.
    pub fn r(&self) -> usize {
        self.b0.len()
    }

    pub fn b0(&self) -> &[MonomialPower] {
        &self.b0
    }

    pub fn b1(&self) -> &[MonomialPower] {
        &self.b1
    }

    pub fn position_b0(&self, alpha: &MonomialPower) -> Option<usize> {
        self.pos0.get(alpha.exponents()).copied()
    }

    pub fn position_b1(&self, alpha: &MonomialPower) -> Option<usize> {
        self.pos1.get(alpha.exponents()).copied()
    }

    /// Largest degree appearing in B₀.
    pub fn max_b0_degree(&self) -> u32 {
        self.b0.iter().map(|a| a.degree()).max().unwrap_or(0)
    }

    /// Largest degree appearing in B₁ (≤ max_b0_degree + 1).
    pub fn max_b1_degree(&self) -> u32 {
        self.b1.iter().map(|a| a.degree()).max().unwrap_or(0)
    }

    /// Evaluation vector [v]_{B₀} = (v^β)_{β ∈ B₀} at a point v ∈ ℂⁿ.
    pub fn eval_b0(&self, v: &DVector<C64>) -> DVector<C64> {
        DVector::from_iterator(self.b0.len(), self.b0.iter().map(|a| eval_monomial(a, v)))
    }

    /// Evaluation vector [v]_{B₁}.
    pub fn eval_b1(&self, v: &DVector<C64>) -> DVector<C64> {
        DVector::from_iterator(self.b1.len(), self.b1.iter().map(|a| eval_monomial(a, v)))
    }
}

/// v^α for v ∈ ℂⁿ.
pub fn eval_monomial(alpha: &MonomialPower, v: &DVector<C64>) -> C64 {
    alpha
        .exponents()
        .iter()
        .enumerate()
        .fold(C64::ONE, |acc, (j, &e)| acc * cpow(v[j], e))
}

/// A candidate generating matrix: one column per border monomial α ∈ B₁,
/// holding the B₀-coefficients of x^α's intended expansion.
#[derive(Clone, Debug)]
pub struct GenMatrix {
    basis: BasisPair,
    data: DMatrix<C64>,
}

impl GenMatrix {
    pub fn new(basis: BasisPair, data: DMatrix<C64>) -> Result<GenMatrix> {
        if data.shape() != (basis.r(), basis.b1.len()) {
            return Err(Error::Dimension(format!(
                "generating matrix is {}x{}, basis needs {}x{}",
                data.nrows(),
                data.ncols(),
                basis.r(),
                basis.b1.len()
            )));
        }
        Ok(GenMatrix { basis, data })
    }

    pub fn basis(&self) -> &BasisPair {
        &self.basis
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    /// Relation polynomial φ[G,α] = Σ_β G(β,α)x^β − x^α for border column j.
    pub fn relation(&self, j: usize) -> Poly {
        let mut p = Poly::monomial(self.basis.b1[j].clone(), -C64::ONE);
        for (i, beta) in self.basis.b0.iter().enumerate() {
            p.add_term(beta.clone(), self.data[(i, j)]);
        }
        p
    }
}

/// Linear system (A[F,α], b[F,α]) whose solutions are the admissible columns
/// of a generating matrix at border monomial α: rows are indexed by the
/// monomials γ with |γ| ≤ m − |α|, A entries are F_{β+γ} over β ∈ B₀, and b
/// entries are F_{α+γ}. A depends on α only through |α|.
pub fn gen_system(
    f: &SymTensor,
    alpha: &MonomialPower,
    basis: &BasisPair,
) -> Result<(DMatrix<C64>, DVector<C64>)> {
    let m = f.order();
    if alpha.degree() > m {
        return Err(Error::Domain(format!(
            "border monomial degree {} exceeds tensor order {}; the target rank is too large for this order",
            alpha.degree(),
            m
        )));
    }
    if f.n_vars() != basis.n_vars {
        return Err(Error::Dimension(format!(
            "tensor has {} variables, basis {}",
            f.n_vars(),
            basis.n_vars
        )));
    }
    let gammas = monomials_up_to(f.n_vars(), m - alpha.degree());
    let mut a = DMatrix::zeros(gammas.len(), basis.r());
    let mut b = DVector::zeros(gammas.len());
    for (i, gamma) in gammas.iter().enumerate() {
        for (j, beta) in basis.b0.iter().enumerate() {
            a[(i, j)] = f.entry(&beta.add(gamma)).expect("|β+γ| ≤ m");
        }
        b[i] = f.entry(&alpha.add(gamma)).expect("|α+γ| ≤ m");
    }
    Ok((a, b))
}

/// The affine family of generating matrices of a fixed tensor: G(ω) = C + N(ω)
/// with a particular solution C and per-column orthonormal kernel bases.
#[derive(Clone, Debug)]
pub struct GenMatrixParam {
    base: GenMatrix,
    null_bases: Vec<DMatrix<C64>>,
    offsets: Vec<usize>,
}

/// Solves the column systems of `f` at target rank `r`, returning the affine
/// parameterization of all generating matrices. `tol` is the relative
/// threshold both for kernel extraction and for declaring a column system
/// inconsistent (which signals that the symmetric rank of `f` exceeds `r`).
pub fn parameterize(f: &SymTensor, r: usize, tol: f64) -> Result<GenMatrixParam> {
    let basis = basis_pair(f.n_vars(), r);
    if basis.max_b1_degree() > f.order() {
        return Err(Error::Domain(format!(
            "rank {} needs border monomials of degree {} > order {}",
            r,
            basis.max_b1_degree(),
            f.order()
        )));
    }
    let fnorm = f.norm();
    let mut data = DMatrix::zeros(basis.r(), basis.b1.len());
    let mut null_bases = Vec::with_capacity(basis.b1.len());
    let mut offsets = vec![0usize];
    // A[F,α] depends on α only through |α|; reuse it per border degree.
    let mut a_by_degree: HashMap<u32, DMatrix<C64>> = HashMap::new();
    for (j, alpha) in basis.b1.iter().enumerate() {
        let a = match a_by_degree.get(&alpha.degree()) {
            Some(a) => a.clone(),
            None => {
                let (a, _) = gen_system(f, alpha, &basis)?;
                a_by_degree.insert(alpha.degree(), a.clone());
                a
            }
        };
        let (_, b) = gen_system(f, alpha, &basis)?;
        let (c, _, residual) = lstsq_min_norm(&a, &b, tol);
        if residual > tol * fnorm {
            return Err(Error::InconsistentSystem {
                alpha: alpha.exponents().to_vec(),
                residual,
                tol: tol * fnorm,
            });
        }
        data.set_column(j, &c);
        let kernel = kernel_basis(&a, tol);
        offsets.push(offsets[j] + kernel.ncols());
        null_bases.push(kernel);
    }
    Ok(GenMatrixParam {
        base: GenMatrix { basis, data },
        null_bases,
        offsets,
    })
}

impl GenMatrixParam {
    pub fn basis(&self) -> &BasisPair {
        self.base.basis()
    }

    /// The particular (minimum-norm) solution C.
    pub fn base(&self) -> &GenMatrix {
        &self.base
    }

    /// Orthonormal kernel basis N_α for border column j.
    pub fn null_basis(&self, j: usize) -> &DMatrix<C64> {
        &self.null_bases[j]
    }

    /// Total parameter count ℓ = Σ_α dim N_α.
    pub fn omega_len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Prefix sums of kernel dimensions: parameters for column j occupy
    /// offsets[j]..offsets[j+1] of ω.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// G(ω) = C + N(ω).
    pub fn realize(&self, omega: &DVector<C64>) -> Result<GenMatrix> {
        if omega.len() != self.omega_len() {
            return Err(Error::Dimension(format!(
                "parameter vector has length {}, family has {}",
                omega.len(),
                self.omega_len()
            )));
        }
        let mut g = self.base.clone();
        for (j, kernel) in self.null_bases.iter().enumerate() {
            if kernel.ncols() == 0 {
                continue;
            }
            let w = omega.rows(self.offsets[j], kernel.ncols());
            let mut col = g.data.column_mut(j);
            col += kernel * w;
        }
        Ok(g)
    }

    /// Best ω with realize(ω) ≈ g: per column, the orthogonal projection of
    /// g_α − c_α onto the kernel basis.
    pub fn project(&self, g: &GenMatrix) -> Result<DVector<C64>> {
        if g.data.shape() != self.base.data.shape() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, family is {}x{}",
                g.data.nrows(),
                g.data.ncols(),
                self.base.data.nrows(),
                self.base.data.ncols()
            )));
        }
        let mut omega = DVector::zeros(self.omega_len());
        for (j, kernel) in self.null_bases.iter().enumerate() {
            if kernel.ncols() == 0 {
                continue;
            }
            let diff = g.data.column(j) - self.base.data.column(j);
            let w = kernel.adjoint() * diff;
            omega
                .rows_mut(self.offsets[j], kernel.ncols())
                .copy_from(&w);
        }
        Ok(omega)
    }
}

/// The multiplication matrices M_{x₁},…,M_{x_n} induced by a generating
/// matrix. Each is r×r and affine-linear in G.
#[derive(Clone, Debug)]
pub struct CompanionSet {
    mats: Vec<DMatrix<C64>>,
}

impl CompanionSet {
    pub fn n_vars(&self) -> usize {
        self.mats.len()
    }

    pub fn r(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[DMatrix<C64>] {
        &self.mats
    }
}

/// Companion-style matrices of G: column ν of matrix i holds the
/// B₀-representation of xᵢ·x^ν, either a unit vector (when xᵢx^ν stays in B₀)
/// or the G column at the border monomial xᵢx^ν.
pub fn companion(g: &GenMatrix) -> CompanionSet {
    let basis = &g.basis;
    let (n, r) = (basis.n_vars, basis.r());
    let mut mats = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = DMatrix::zeros(r, r);
        for (nu, beta) in basis.b0.iter().enumerate() {
            let shifted = beta.times_var(i);
            if let Some(mu) = basis.position_b0(&shifted) {
                m[(mu, nu)] = C64::ONE;
            } else {
                let j = basis
                    .position_b1(&shifted)
                    .expect("border closure: xᵢ·B₀ ⊆ B₀ ∪ B₁");
                m.set_column(nu, &g.data.column(j));
            }
        }
        mats.push(m);
    }
    CompanionSet { mats }
}

/// Stacked entries of the pairwise commutators MᵢMⱼ − MⱼMᵢ, i < j. Zero
/// exactly when the relation polynomials admit r common zeros (counted with
/// multiplicity).
pub fn commutator_residual(cs: &CompanionSet) -> DVector<C64> {
    let n = cs.n_vars();
    let r = cs.r();
    let blocks = n * (n - 1) / 2;
    let mut out = DVector::zeros(blocks * r * r);
    let mut at = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let c = &cs.mats[i] * &cs.mats[j] - &cs.mats[j] * &cs.mats[i];
            out.rows_mut(at, r * r)
                .copy_from(&DVector::from_column_slice(c.as_slice()));
            at += r * r;
        }
    }
    out
}

/// The unique generating matrix interpolating r points: solves
/// V G = W with V[k,β] = v_k^β over B₀ and W[k,α] = v_k^α over B₁. Every
/// point is then a common zero of all relation polynomials.
pub fn from_points(points: &[DVector<C64>], basis: &BasisPair) -> Result<GenMatrix> {
    let r = basis.r();
    if points.len() != r {
        return Err(Error::Dimension(format!(
            "{} points for a rank-{} basis",
            points.len(),
            r
        )));
    }
    for (k, v) in points.iter().enumerate() {
        if v.len() != basis.n_vars {
            return Err(Error::Dimension(format!(
                "point {} has {} coordinates, expected {}",
                k,
                v.len(),
                basis.n_vars
            )));
        }
    }
    let mut v = DMatrix::zeros(r, r);
    let mut w = DMatrix::zeros(r, basis.b1.len());
    for (k, p) in points.iter().enumerate() {
        v.set_row(k, &basis.eval_b0(p).transpose());
        w.set_row(k, &basis.eval_b1(p).transpose());
    }
    let (g, cond_ratio) = lstsq_matrix(&v, &w, SINGULAR_RATIO);
    if cond_ratio <= SINGULAR_RATIO {
        return Err(Error::SingularVandermonde(cond_ratio));
    }
    Ok(GenMatrix {
        basis: basis.clone(),
        data: g,
    })
}

/// Whether G is a generating matrix for `f`: every shifted relation
/// x^γ·φ[G,α] with |γ| ≤ m − |α| must pair to zero against `f` within
/// `tol`·‖f‖.
pub fn is_generating(f: &SymTensor, g: &GenMatrix, tol: f64) -> bool {
    let basis = &g.basis;
    if f.n_vars() != basis.n_vars || basis.max_b1_degree() > f.order() {
        return false;
    }
    let bound = tol * f.norm();
    for (j, alpha) in basis.b1.iter().enumerate() {
        let (a, b) = gen_system(f, alpha, basis).expect("degrees checked above");
        let res = a * g.data.column(j) - b;
        if res.iter().any(|z| z.norm() > bound) {
            return false;
        }
    }
    true
}

/// Rebuilds the full order-m tensor from its B₀ entries using the recursion
/// F_{α+γ} = Σ_β G(β,α) F_{β+γ}. Entries are filled in increasing graded-lex
/// order; when several border splittings δ = α+γ exist the graded-lex
/// smallest α is used and the rest are checked for consistency (warning above
/// 1e−6 relative disagreement).
pub fn recover_tensor(g: &GenMatrix, first_entries: &[C64], order: u32) -> Result<SymTensor> {
    let basis = &g.basis;
    let n = basis.n_vars;
    if first_entries.len() != basis.r() {
        return Err(Error::Dimension(format!(
            "{} leading entries for a rank-{} basis",
            first_entries.len(),
            basis.r()
        )));
    }
    if basis.max_b0_degree() > order {
        return Err(Error::Structure(format!(
            "basis monomial degree {} exceeds tensor order {}",
            basis.max_b0_degree(),
            order
        )));
    }
    let all = monomials_up_to(n, order);
    let mut pos: HashMap<Vec<u32>, usize> = HashMap::new();
    for (i, a) in all.iter().enumerate() {
        pos.insert(a.exponents().to_vec(), i);
    }
    let mut coeffs = vec![C64::ZERO; all.len()];
    let mut known = vec![false; all.len()];
    let scale: f64 = first_entries.iter().map(|c| c.norm()).sum::<f64>() + 1.0;

    for (i, delta) in all.iter().enumerate() {
        if let Some(k) = basis.position_b0(delta) {
            coeffs[i] = first_entries[k];
            known[i] = true;
            continue;
        }
        let mut value: Option<C64> = None;
        for (j, alpha) in basis.b1.iter().enumerate() {
            if !alpha.divides(delta) {
                continue;
            }
            let gamma = delta.checked_sub(alpha).expect("divisibility checked");
            let mut acc = C64::ZERO;
            let mut ok = true;
            for (bi, beta) in basis.b0.iter().enumerate() {
                let idx = pos[beta.add(&gamma).exponents()];
                if !known[idx] {
                    ok = false;
                    break;
                }
                acc += g.data[(bi, j)] * coeffs[idx];
            }
            if !ok {
                continue;
            }
            match value {
                None => value = Some(acc),
                Some(first) => {
                    let dev = (acc - first).norm();
                    if dev > 1e-6 * (scale + first.norm()) {
                        log::warn!(
                            "recovered entry {:?} disagrees across border splittings by {:.3e}",
                            delta.exponents(),
                            dev
                        );
                    }
                }
            }
        }
        match value {
            Some(v) => {
                coeffs[i] = v;
                known[i] = true;
            }
            None => {
                return Err(Error::Structure(format!(
                    "monomial {:?} is not reachable from the basis via any border splitting",
                    delta.exponents()
                )));
            }
        }
    }

    let mut out = SymTensor::zero(n, order);
    for (i, delta) in all.iter().enumerate() {
        out.set_entry(delta, coeffs[i])?;
    }
    Ok(out)
}
