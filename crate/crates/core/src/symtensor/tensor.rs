use nalgebra::{DMatrix, DVector};

use crate::linalg::cpow;
use crate::symtensor::monomial::{binomial, cube_multiplicity, MonomialTable};
use crate::symtensor::{MonomialPower, Poly};
use crate::{Error, Result, C64};

/// Order-m symmetric tensor on ℂ^{n+1}, stored by monomial powers: one
/// coefficient per α ∈ ℕⁿ with |α| ≤ m. The multi-index entry F_{i₁…i_m}
/// equals the coefficient at the α counting occurrences of 1,…,n in the
/// tuple (index 0 is the homogenizing slot and does not enter α).
#[derive(Clone, Debug)]
pub struct SymTensor {
    n_vars: usize,
    order: u32,
    table: MonomialTable,
    coeffs: Vec<C64>,
}

/// Calls `f` on every nondecreasing tuple (i₁ ≤ … ≤ i_m) with entries in
/// 0..=n, in lexicographic order.
fn for_each_uptri_tuple(m: u32, n: usize, mut f: impl FnMut(&[usize])) {
    let m = m as usize;
    let mut t = vec![0usize; m];
    loop {
        f(&t);
        // Advance to the next nondecreasing tuple.
        let mut p = m;
        while p > 0 {
            if t[p - 1] < n {
                break;
            }
            p -= 1;
        }
        if p == 0 {
            return;
        }
        let v = t[p - 1] + 1;
        t[(p - 1)..m].fill(v);
    }
}

fn tuple_to_alpha(tuple: &[usize], n: usize) -> MonomialPower {
    let mut e = vec![0u32; n];
    for &i in tuple {
        if i > 0 {
            e[i - 1] += 1;
        }
    }
    MonomialPower::new(e)
}

impl SymTensor {
    /// The zero tensor.
    pub fn zero(n_vars: usize, order: u32) -> SymTensor {
        let table = MonomialTable::up_to(n_vars, order);
        let len = table.len();
        SymTensor {
            n_vars,
            order,
            table,
            coeffs: vec![C64::ZERO; len],
        }
    }

    /// Builds a tensor from its upper-triangular entries, listed for the
    /// index tuples 0 ≤ i₁ ≤ … ≤ i_m ≤ n in lexicographic order.
    pub fn from_uptri(n_vars: usize, order: u32, values: &[C64]) -> Result<SymTensor> {
        let expected = binomial(n_vars + order as usize, order as usize);
        if values.len() != expected {
            return Err(Error::Dimension(format!(
                "uptri list has {} entries, expected binom({}+{},{}) = {}",
                values.len(),
                n_vars,
                order,
                order,
                expected
            )));
        }
        let mut t = SymTensor::zero(n_vars, order);
        let mut k = 0;
        for_each_uptri_tuple(order, n_vars, |tuple| {
            let alpha = tuple_to_alpha(tuple, n_vars);
            let pos = t.table.position(&alpha).expect("tuple alpha in range");
            t.coeffs[pos] = values[k];
            k += 1;
        });
        debug_assert_eq!(k, expected);
        Ok(t)
    }

    /// Σᵢ (uᵢ)^⊗m from the given vectors in ℂ^{n+1}.
    pub fn from_rank_one_sum(
        n_vars: usize,
        order: u32,
        vectors: &[DVector<C64>],
    ) -> Result<SymTensor> {
        for (i, u) in vectors.iter().enumerate() {
            if u.len() != n_vars + 1 {
                return Err(Error::Dimension(format!(
                    "vector {} has length {}, expected {}",
                    i,
                    u.len(),
                    n_vars + 1
                )));
            }
        }
        let mut t = SymTensor::zero(n_vars, order);
        for (pos, alpha) in t.table.monomials().iter().enumerate() {
            let head = order - alpha.degree();
            let mut acc = C64::ZERO;
            for u in vectors {
                let mut term = cpow(u[0], head);
                for (j, &e) in alpha.exponents().iter().enumerate() {
                    term *= cpow(u[j + 1], e);
                }
                acc += term;
            }
            t.coeffs[pos] = acc;
        }
        Ok(t)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of stored coefficients, binom(n+m, m).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The monomials indexing the coefficients, in graded-lex order.
    pub fn monomials(&self) -> &[MonomialPower] {
        self.table.monomials()
    }

    /// Coefficient at α; error if |α| > m or the variable count differs.
    pub fn entry(&self, alpha: &MonomialPower) -> Result<C64> {
        if alpha.n_vars() != self.n_vars {
            return Err(Error::Dimension(format!(
                "monomial in {} variables, tensor has {}",
                alpha.n_vars(),
                self.n_vars
            )));
        }
        self.table
            .position(alpha)
            .map(|p| self.coeffs[p])
            .ok_or_else(|| {
                Error::Index(format!(
                    "|α| = {} exceeds order {}",
                    alpha.degree(),
                    self.order
                ))
            })
    }

    /// Coefficient at α given exponents directly.
    pub fn entry_exps(&self, exps: &[u32]) -> Result<C64> {
        self.entry(&MonomialPower::new(exps.to_vec()))
    }

    /// Overwrites the coefficient at α.
    pub fn set_entry(&mut self, alpha: &MonomialPower, value: C64) -> Result<()> {
        if alpha.n_vars() != self.n_vars {
            return Err(Error::Dimension(format!(
                "monomial in {} variables, tensor has {}",
                alpha.n_vars(),
                self.n_vars
            )));
        }
        let pos = self.table.position(alpha).ok_or_else(|| {
            Error::Index(format!(
                "|α| = {} exceeds order {}",
                alpha.degree(),
                self.order
            ))
        })?;
        self.coeffs[pos] = value;
        Ok(())
    }

    /// Multi-index entry F_{i₁…i_m}; invariant under tuple permutations.
    pub fn entry_by_tuple(&self, tuple: &[usize]) -> Result<C64> {
        if tuple.len() != self.order as usize {
            return Err(Error::Dimension(format!(
                "tuple has {} indices, order is {}",
                tuple.len(),
                self.order
            )));
        }
        if let Some(&bad) = tuple.iter().find(|&&i| i > self.n_vars) {
            return Err(Error::Index(format!(
                "index {} out of range 0..={}",
                bad, self.n_vars
            )));
        }
        let alpha = tuple_to_alpha(tuple, self.n_vars);
        let pos = self.table.position(&alpha).expect("alpha within order");
        Ok(self.coeffs[pos])
    }

    /// Upper-triangular entries in lexicographic tuple order (the inverse of
    /// `from_uptri`).
    pub fn uptri(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.len());
        for_each_uptri_tuple(self.order, self.n_vars, |tuple| {
            let alpha = tuple_to_alpha(tuple, self.n_vars);
            let pos = self.table.position(&alpha).expect("alpha within order");
            out.push(self.coeffs[pos]);
        });
        out
    }

    /// Entrywise ℓ² norm over the full (n+1)^m index cube.
    pub fn norm(&self) -> f64 {
        self.table
            .monomials()
            .iter()
            .zip(&self.coeffs)
            .map(|(alpha, c)| cube_multiplicity(self.order, alpha) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// The bilinear pairing ⟨p, F⟩ = Σ_α p_α F_α.
    pub fn pairing(&self, p: &Poly) -> Result<C64> {
        if p.n_vars() != self.n_vars {
            return Err(Error::Dimension(format!(
                "polynomial in {} variables, tensor has {}",
                p.n_vars(),
                self.n_vars
            )));
        }
        if p.degree() > self.order {
            return Err(Error::Domain(format!(
                "polynomial degree {} exceeds tensor order {}",
                p.degree(),
                self.order
            )));
        }
        let mut acc = C64::ZERO;
        for (alpha, c) in p.terms() {
            let pos = self.table.position(alpha).expect("degree checked");
            acc += c * self.coeffs[pos];
        }
        Ok(acc)
    }

    /// Differential (apolar) action of a degree-k polynomial, normalized so
    /// the result is the order-(m−k) tensor with entries
    /// G_β = Σ_α p_α F_{α+β}. Inhomogeneous p is treated through its
    /// homogenization. G is the zero tensor exactly when the homogenization
    /// annihilates F in degree k.
    pub fn apolar_apply(&self, p: &Poly) -> Result<SymTensor> {
        if p.n_vars() != self.n_vars {
            return Err(Error::Dimension(format!(
                "polynomial in {} variables, tensor has {}",
                p.n_vars(),
                self.n_vars
            )));
        }
        let k = p.degree();
        if k > self.order {
            return Err(Error::Domain(format!(
                "polynomial degree {} exceeds tensor order {}",
                k, self.order
            )));
        }
        let mut out = SymTensor::zero(self.n_vars, self.order - k);
        for (pos, beta) in out.table.monomials().iter().enumerate() {
            let mut acc = C64::ZERO;
            for (alpha, c) in p.terms() {
                let idx = self
                    .table
                    .position(&alpha.add(beta))
                    .expect("|α+β| ≤ k + (m−k) = m");
                acc += c * self.coeffs[idx];
            }
            out.coeffs[pos] = acc;
        }
        Ok(out)
    }

    /// Applies the invertible change of variables Q ∈ ℂ^{(n+1)×(n+1)}:
    /// the result L_Q(F) satisfies L_Q(Σ uᵢ^⊗m) = Σ (Q uᵢ)^⊗m.
    pub fn unitary_transform(&self, q: &DMatrix<C64>) -> Result<SymTensor> {
        let dim = self.n_vars + 1;
        if q.shape() != (dim, dim) {
            return Err(Error::Dimension(format!(
                "transform is {}x{}, tensor needs {}x{}",
                q.nrows(),
                q.ncols(),
                dim,
                dim
            )));
        }
        let sv = q.clone().svd(false, false);
        let smax = sv.singular_values.max();
        let smin = sv.singular_values.min();
        if smax == 0.0 || smin <= 1e-12 * smax {
            return Err(Error::Domain(
                "transform matrix is numerically singular".into(),
            ));
        }

        // Materialize the full cube, contract each mode with Q, read back.
        let m = self.order as usize;
        let size = dim.pow(self.order);
        let mut cube = vec![C64::ZERO; size];
        let mut digits = vec![0usize; m];
        for (flat, slot) in cube.iter_mut().enumerate() {
            let mut rem = flat;
            for d in digits.iter_mut() {
                *d = rem % dim;
                rem /= dim;
            }
            let alpha = tuple_to_alpha(&digits, self.n_vars);
            let pos = self.table.position(&alpha).expect("digit alpha in range");
            *slot = self.coeffs[pos];
        }
        let mut scratch = vec![C64::ZERO; size];
        for mode in 0..m {
            let stride = dim.pow(mode as u32);
            for (flat, out) in scratch.iter_mut().enumerate() {
                let digit = (flat / stride) % dim;
                let base = flat - digit * stride;
                let mut acc = C64::ZERO;
                for i in 0..dim {
                    acc += q[(digit, i)] * cube[base + i * stride];
                }
                *out = acc;
            }
            std::mem::swap(&mut cube, &mut scratch);
        }
        let mut out = SymTensor::zero(self.n_vars, self.order);
        for (pos, alpha) in out.table.monomials().iter().enumerate() {
            // Representative tuple: α₁ copies of 1, … , padded with 0s.
            let mut flat = 0usize;
            let mut slot = 0;
            for (j, &e) in alpha.exponents().iter().enumerate() {
                for _ in 0..e {
                    flat += (j + 1) * dim.pow(slot);
                    slot += 1;
                }
            }
            out.coeffs[pos] = cube[flat];
        }
        Ok(out)
    }

    /// F + G.
    pub fn add(&self, other: &SymTensor) -> SymTensor {
        assert_eq!((self.n_vars, self.order), (other.n_vars, other.order));
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        out
    }

    /// F − G.
    pub fn sub(&self, other: &SymTensor) -> SymTensor {
        assert_eq!((self.n_vars, self.order), (other.n_vars, other.order));
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: C64) -> SymTensor {
        let mut out = self.clone();
        for a in out.coeffs.iter_mut() {
            *a *= c;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::small_cubic;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }
    fn cr(re: f64) -> C64 {
        C64::new(re, 0.0)
    }
    fn mp(e: &[u32]) -> MonomialPower {
        MonomialPower::new(e.to_vec())
    }

    #[test]
    fn uptri_round_trip_is_exact() {
        let t = small_cubic();
        let back = t.uptri();
        let expected = [7.0, -3.0, 9.0, 13.0, 20.0, 19.0, -27.0, 6.0, 6.0, 45.0];
        assert_eq!(back.len(), 10);
        for (g, e) in back.iter().zip(expected.iter()) {
            assert_eq!(*g, cr(*e));
        }
    }

    #[test]
    fn uptri_length_mismatch_errors() {
        assert!(SymTensor::from_uptri(2, 3, &[C64::ZERO; 9]).is_err());
    }

    #[test]
    fn known_coefficients_of_small_cubic() {
        let t = small_cubic();
        assert_eq!(t.entry_exps(&[0, 0]).unwrap(), cr(7.0));
        assert_eq!(t.entry_exps(&[1, 0]).unwrap(), cr(-3.0));
        assert_eq!(t.entry_exps(&[0, 1]).unwrap(), cr(9.0));
        assert_eq!(t.entry_exps(&[2, 0]).unwrap(), cr(13.0));
        assert_eq!(t.entry_exps(&[1, 1]).unwrap(), cr(20.0));
        assert_eq!(t.entry_exps(&[0, 2]).unwrap(), cr(19.0));
        assert_eq!(t.entry_exps(&[3, 0]).unwrap(), cr(-27.0));
        assert_eq!(t.entry_exps(&[2, 1]).unwrap(), cr(6.0));
        assert_eq!(t.entry_exps(&[1, 2]).unwrap(), cr(6.0));
        assert_eq!(t.entry_exps(&[0, 3]).unwrap(), cr(45.0));
    }

    #[test]
    fn entry_by_tuple_matches_and_is_symmetric() {
        let t = small_cubic();
        assert_eq!(t.entry_by_tuple(&[0, 0, 0]).unwrap(), cr(7.0));
        assert_eq!(t.entry_by_tuple(&[1, 2, 2]).unwrap(), cr(6.0));
        // All permutations of (1,2,2).
        for perm in [[1, 2, 2], [2, 1, 2], [2, 2, 1]] {
            assert_eq!(t.entry_by_tuple(&perm).unwrap(), cr(6.0));
        }
        assert!(t.entry_by_tuple(&[0, 0]).is_err());
        assert!(t.entry_by_tuple(&[0, 0, 3]).is_err());
    }

    #[test]
    fn order_one_uptri() {
        let t = SymTensor::from_uptri(1, 1, &[c(1.0, 2.0), c(3.0, 4.0)]).unwrap();
        assert_eq!(t.entry_exps(&[0]).unwrap(), c(1.0, 2.0));
        assert_eq!(t.entry_exps(&[1]).unwrap(), c(3.0, 4.0));
    }

    #[test]
    fn rank_one_sum_reproduces_small_cubic() {
        // 3·(1,−2,−1)^⊗3 + 5·(1,1,2)^⊗3 − (1,2,−2)^⊗3, weights folded in as
        // cube roots.
        let w: Vec<f64> = vec![3.0, 5.0, -1.0];
        let dirs = [
            vec![1.0, -2.0, -1.0],
            vec![1.0, 1.0, 2.0],
            vec![1.0, 2.0, -2.0],
        ];
        let vectors: Vec<DVector<C64>> = w
            .iter()
            .zip(dirs.iter())
            .map(|(&wi, d)| {
                let root = C64::new(wi, 0.0).powf(1.0 / 3.0);
                DVector::from_iterator(3, d.iter().map(|&x| root * cr(x)))
            })
            .collect();
        let t = SymTensor::from_rank_one_sum(2, 3, &vectors).unwrap();
        let expect = small_cubic();
        let diff = t.sub(&expect);
        assert!(diff.norm() < 1e-10 * expect.norm());
    }

    #[test]
    fn rank_one_sum_edge_cases() {
        // Single e₀ at order 2: only the constant-α entry is 1.
        let e0 = DVector::from_vec(vec![C64::ONE, C64::ZERO, C64::ZERO]);
        let t = SymTensor::from_rank_one_sum(2, 2, &[e0]).unwrap();
        assert_eq!(t.entry_exps(&[0, 0]).unwrap(), C64::ONE);
        for alpha in t.monomials() {
            if alpha.degree() > 0 {
                assert_eq!(t.entry(alpha).unwrap(), C64::ZERO);
            }
        }
        // u and −u at odd order cancel.
        let u = DVector::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.25), c(3.0, -1.0)]);
        let t = SymTensor::from_rank_one_sum(2, 3, &[u.clone(), -u]).unwrap();
        assert_eq!(t.norm(), 0.0);
        // Wrong vector length errors.
        let bad = DVector::from_vec(vec![C64::ONE, C64::ONE]);
        assert!(SymTensor::from_rank_one_sum(2, 3, &[bad]).is_err());
    }

    #[test]
    fn norm_examples() {
        // e₀^⊗m has a single unit entry.
        let e0 = DVector::from_vec(vec![C64::ONE, C64::ZERO]);
        for m in 1..=4 {
            let t = SymTensor::from_rank_one_sum(1, m, std::slice::from_ref(&e0)).unwrap();
            assert_relative_eq!(t.norm(), 1.0, max_relative = 1e-14);
        }
        assert_eq!(SymTensor::zero(2, 3).norm(), 0.0);
        // u=(1,1), m=2: full 2x2 cube of ones has norm 2.
        let u = DVector::from_vec(vec![C64::ONE, C64::ONE]);
        let t = SymTensor::from_rank_one_sum(1, 2, &[u]).unwrap();
        assert_relative_eq!(t.norm(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn rank_one_norm_is_vector_norm_power() {
        let u = DVector::from_vec(vec![c(1.0, 0.5), c(-2.0, 1.0), c(0.25, -1.5)]);
        for m in 1..=5 {
            let t = SymTensor::from_rank_one_sum(2, m, std::slice::from_ref(&u)).unwrap();
            assert_relative_eq!(t.norm(), u.norm().powi(m as i32), max_relative = 1e-12);
        }
    }

    #[test]
    fn pairing_examples() {
        let t = small_cubic();
        // ⟨1, F⟩ = F at α = 0.
        let one = Poly::constant(2, C64::ONE);
        assert_eq!(t.pairing(&one).unwrap(), cr(7.0));
        // ⟨x₁x₂, F⟩ = F₁₁ = 20.
        let p = Poly::monomial(mp(&[1, 1]), C64::ONE);
        assert_eq!(t.pairing(&p).unwrap(), cr(20.0));
        // The degree-2 relation 14 − x₁ − 4x₂ − 5x₁² pairs to zero.
        let g1 = Poly::from_terms(
            2,
            [
                (mp(&[0, 0]), cr(14.0)),
                (mp(&[1, 0]), cr(-1.0)),
                (mp(&[0, 1]), cr(-4.0)),
                (mp(&[2, 0]), cr(-5.0)),
            ],
        );
        assert_eq!(t.pairing(&g1).unwrap(), C64::ZERO);
        // Degree overflow errors.
        let too_big = Poly::monomial(mp(&[4, 0]), C64::ONE);
        assert!(t.pairing(&too_big).is_err());
    }

    #[test]
    fn pairing_is_bilinear() {
        let t = small_cubic();
        let u = SymTensor::from_rank_one_sum(
            2,
            3,
            &[DVector::from_vec(vec![
                c(0.5, 1.0),
                c(1.0, -1.0),
                c(2.0, 0.0),
            ])],
        )
        .unwrap();
        let p = Poly::from_terms(2, [(mp(&[1, 0]), c(2.0, 1.0)), (mp(&[1, 2]), c(0.0, -3.0))]);
        let q = Poly::from_terms(2, [(mp(&[0, 0]), c(1.0, 1.0)), (mp(&[2, 1]), c(-1.0, 2.0))]);
        let (a, b) = (c(0.7, -0.3), c(-1.2, 0.8));
        let lhs = t.pairing(&p.scale(a).add(&q.scale(b))).unwrap();
        let rhs = a * t.pairing(&p).unwrap() + b * t.pairing(&q).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        let combo = t.scale(a).add(&u.scale(b));
        let lhs = combo.pairing(&p).unwrap();
        let rhs = a * t.pairing(&p).unwrap() + b * u.pairing(&p).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn apolar_apply_known_relation_annihilates() {
        let t = small_cubic();
        let g1 = Poly::from_terms(
            2,
            [
                (mp(&[0, 0]), cr(14.0)),
                (mp(&[1, 0]), cr(-1.0)),
                (mp(&[0, 1]), cr(-4.0)),
                (mp(&[2, 0]), cr(-5.0)),
            ],
        );
        let g = t.apolar_apply(&g1).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.norm() < 1e-12);
    }

    #[test]
    fn apolar_apply_variable_on_rank_one() {
        let u = DVector::from_vec(vec![c(1.0, 1.0), c(2.0, -1.0), c(-0.5, 0.5)]);
        let t = SymTensor::from_rank_one_sum(2, 4, std::slice::from_ref(&u)).unwrap();
        for var in 0..2usize {
            let p = Poly::monomial(MonomialPower::var(2, var), C64::ONE);
            let g = t.apolar_apply(&p).unwrap();
            let expect = SymTensor::from_rank_one_sum(2, 3, std::slice::from_ref(&u))
                .unwrap()
                .scale(u[var + 1]);
            assert!(g.sub(&expect).norm() < 1e-12 * (1.0 + expect.norm()));
        }
        // p = 1 leaves the tensor unchanged.
        let id = t.apolar_apply(&Poly::constant(2, C64::ONE)).unwrap();
        assert!(id.sub(&t).norm() == 0.0);
    }

    #[test]
    fn unitary_transform_identity_and_inverse() {
        let t = small_cubic();
        let id = DMatrix::<C64>::identity(3, 3);
        let same = t.unitary_transform(&id).unwrap();
        assert!(same.sub(&t).norm() == 0.0);

        // A fixed unitary: QR of a deterministic complex matrix.
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.3, 0.8),
                c(-1.2, 0.1),
                c(0.5, -0.6),
                c(1.1, -0.4),
                c(0.2, 0.9),
                c(-0.7, 0.3),
                c(-0.5, 0.2),
                c(0.6, -1.0),
                c(1.4, 0.7),
            ],
        );
        let q = a.qr().q();
        let qinv = q.adjoint();
        let round = t
            .unitary_transform(&q)
            .unwrap()
            .unitary_transform(&qinv)
            .unwrap();
        assert!(round.sub(&t).norm() <= 1e-12 * t.norm());
    }

    #[test]
    fn unitary_transform_rank_one_equivariance() {
        let u = DVector::from_vec(vec![c(1.0, 0.0), c(0.5, -1.0), c(-2.0, 0.25)]);
        let q = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(2.0, 0.0),
                C64::ZERO,
                C64::ZERO,
                c(1.0, 1.0),
                c(0.5, 0.0),
                c(0.0, 1.0),
                C64::ZERO,
                c(3.0, -1.0),
            ],
        );
        let lhs = SymTensor::from_rank_one_sum(2, 3, std::slice::from_ref(&u))
            .unwrap()
            .unitary_transform(&q)
            .unwrap();
        let qu = &q * &u;
        let rhs = SymTensor::from_rank_one_sum(2, 3, &[qu]).unwrap();
        assert!(lhs.sub(&rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn unitary_transform_rejects_singular() {
        let t = small_cubic();
        let mut q = DMatrix::<C64>::zeros(3, 3);
        q[(0, 0)] = C64::ONE;
        q[(1, 1)] = C64::ONE;
        assert!(t.unitary_transform(&q).is_err());
    }
}
