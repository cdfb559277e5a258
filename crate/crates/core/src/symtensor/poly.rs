use std::collections::BTreeMap;

use crate::symtensor::MonomialPower;
use crate::C64;

/// Polynomial in x = (x₁,…,x_n) with complex coefficients, stored sparsely.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    n_vars: usize,
    terms: BTreeMap<MonomialPower, C64>,
}

impl Poly {
    pub fn zero(n_vars: usize) -> Self {
        Self {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: C64) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(MonomialPower::one(n_vars), c);
        p
    }

    pub fn monomial(alpha: MonomialPower, c: C64) -> Self {
        let mut p = Self::zero(alpha.n_vars());
        p.add_term(alpha, c);
        p
    }

    pub fn from_terms<I>(n_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MonomialPower, C64)>,
    {
        let mut p = Self::zero(n_vars);
        for (a, c) in terms {
            p.add_term(a, c);
        }
        p
    }

    /// Adds `c·x^alpha`, pruning the term if the result is exactly zero.
    pub fn add_term(&mut self, alpha: MonomialPower, c: C64) {
        debug_assert_eq!(alpha.n_vars(), self.n_vars);
        let now_zero = {
            let v = self.terms.entry(alpha.clone()).or_insert(C64::ZERO);
            *v += c;
            v.re == 0.0 && v.im == 0.0
        };
        if now_zero {
            self.terms.remove(&alpha);
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum term degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|a| a.degree()).max().unwrap_or(0)
    }

    pub fn coefficient(&self, alpha: &MonomialPower) -> C64 {
        self.terms.get(alpha).copied().unwrap_or(C64::ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialPower, &C64)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: C64) -> Poly {
        if c == C64::ZERO {
            return Poly::zero(self.n_vars);
        }
        Poly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.n_vars, other.n_vars);
        let mut out = self.clone();
        for (a, c) in other.terms() {
            out.add_term(a.clone(), *c);
        }
        out
    }

    /// Multiplies by the monomial x^beta (shifts every exponent).
    pub fn mul_monomial(&self, beta: &MonomialPower) -> Poly {
        Poly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(a, c)| (a.add(beta), *c)).collect(),
        }
    }

    /// Evaluates at a point v ∈ ℂⁿ.
    pub fn evaluate(&self, v: &[C64]) -> C64 {
        debug_assert_eq!(v.len(), self.n_vars);
        let mut acc = C64::ZERO;
        for (a, c) in &self.terms {
            let mut term = *c;
            for (j, &e) in a.exponents().iter().enumerate() {
                for _ in 0..e {
                    term *= v[j];
                }
            }
            acc += term;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(e: &[u32]) -> MonomialPower {
        MonomialPower::new(e.to_vec())
    }
    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn no_zero_terms_stored() {
        let mut p = Poly::zero(2);
        p.add_term(mp(&[1, 0]), c(2.0, 0.0));
        p.add_term(mp(&[1, 0]), c(-2.0, 0.0));
        assert!(p.is_zero());
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn evaluate_and_shift() {
        // p = 3 + 2x₁x₂ − x₂²
        let p = Poly::from_terms(
            2,
            [
                (mp(&[0, 0]), c(3.0, 0.0)),
                (mp(&[1, 1]), c(2.0, 0.0)),
                (mp(&[0, 2]), c(-1.0, 0.0)),
            ],
        );
        assert_eq!(p.degree(), 2);
        let v = [c(2.0, 0.0), c(-1.0, 0.0)];
        // 3 + 2·2·(−1) − 1 = −2
        assert_eq!(p.evaluate(&v), c(-2.0, 0.0));

        let q = p.mul_monomial(&mp(&[1, 0]));
        assert_eq!(q.degree(), 3);
        assert_eq!(q.coefficient(&mp(&[2, 1])), c(2.0, 0.0));
        // q(v) = v₁·p(v)
        assert_eq!(q.evaluate(&v), c(-4.0, 0.0));
    }

    #[test]
    fn linear_ops() {
        let p = Poly::from_terms(1, [(mp(&[0]), c(1.0, 1.0)), (mp(&[2]), c(0.0, -1.0))]);
        let q = p.scale(c(0.0, 1.0));
        assert_eq!(q.coefficient(&mp(&[0])), c(-1.0, 1.0));
        assert_eq!(q.coefficient(&mp(&[2])), c(1.0, 0.0));
        let s = p.add(&p.scale(c(-1.0, 0.0)));
        assert!(s.is_zero());
    }
}
