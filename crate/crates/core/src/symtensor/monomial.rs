use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

/// Exponent vector α ∈ ℕⁿ of a monomial x^α = x₁^{α₁}⋯x_n^{α_n}.
///
/// The ordering is graded lexicographic: lower total degree first; within a
/// degree, the lexicographically larger exponent vector comes first. This
/// reproduces the listing 1 ≺ x₁ ≺ x₂ ≺ x₁² ≺ x₁x₂ ≺ x₂² ≺ … .
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonomialPower {
    exponents: Vec<u32>,
}

impl MonomialPower {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self { exponents }
    }

    /// The constant monomial 1 in `n` variables.
    pub fn one(n: usize) -> Self {
        Self {
            exponents: vec![0; n],
        }
    }

    /// The single variable with exponent slot `var` (0-based).
    pub fn var(n: usize, var: usize) -> Self {
        let mut e = vec![0; n];
        e[var] = 1;
        Self { exponents: e }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn n_vars(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Entrywise sum α + β.
    pub fn add(&self, other: &MonomialPower) -> MonomialPower {
        debug_assert_eq!(self.n_vars(), other.n_vars());
        MonomialPower::new(
            self.exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Entrywise difference α − β, if β divides α.
    pub fn checked_sub(&self, other: &MonomialPower) -> Option<MonomialPower> {
        debug_assert_eq!(self.n_vars(), other.n_vars());
        self.exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MonomialPower::new)
    }

    /// Whether x^self divides x^other.
    pub fn divides(&self, other: &MonomialPower) -> bool {
        self.exponents
            .iter()
            .zip(&other.exponents)
            .all(|(a, b)| a <= b)
    }

    /// α + e_var (multiplication by one variable).
    pub fn times_var(&self, var: usize) -> MonomialPower {
        let mut e = self.exponents.clone();
        e[var] += 1;
        MonomialPower::new(e)
    }
}

impl Ord for MonomialPower {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            // Within a grade the lex-larger vector comes first.
            .then_with(|| other.exponents.cmp(&self.exponents))
    }
}

impl PartialOrd for MonomialPower {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MonomialPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^{:?}", self.exponents)
    }
}

impl fmt::Display for MonomialPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (j, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{}", j + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// All exponent vectors in `n` variables of total degree exactly `d`,
/// in descending lexicographic order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<MonomialPower> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill_degree(&mut out, &mut current, 0, d);
    out
}

fn fill_degree(out: &mut Vec<MonomialPower>, current: &mut Vec<u32>, slot: usize, remaining: u32) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(MonomialPower::new(current.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[slot] = e;
        fill_degree(out, current, slot + 1, remaining - e);
    }
    current[slot] = 0;
}

/// All exponent vectors of degree ≤ `d` in graded-lex order.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<MonomialPower> {
    let mut out = Vec::new();
    for g in 0..=d {
        out.extend(monomials_of_degree(n, g));
    }
    out
}

/// The first `r` monomials of the graded-lex order, degrees unbounded.
pub fn first_monomials(n: usize, r: usize) -> Vec<MonomialPower> {
    let mut out = Vec::with_capacity(r);
    let mut g = 0;
    while out.len() < r {
        for mon in monomials_of_degree(n, g) {
            out.push(mon);
            if out.len() == r {
                break;
            }
        }
        g += 1;
    }
    out
}

/// Binomial coefficient as usize; desk-scale arguments only.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Number of times the entry indexed by α appears in the full order-m index
/// cube: the multinomial m! / ((m−|α|)!·α₁!⋯α_n!).
pub fn cube_multiplicity(m: u32, alpha: &MonomialPower) -> f64 {
    // Product of binomials: choose slots for each index group in turn.
    let mut acc: u128 = 1;
    let mut remaining = m;
    let groups = std::iter::once(m - alpha.degree()).chain(alpha.exponents().iter().copied());
    for g in groups {
        acc *= binomial(remaining as usize, g as usize) as u128;
        remaining -= g;
    }
    debug_assert_eq!(remaining, 0);
    acc as f64
}

/// Ordered index of the monomials of degree ≤ `max_deg` in `n` variables,
/// with O(1) position lookup by exponent vector.
#[derive(Clone, Debug)]
pub struct MonomialTable {
    mons: Vec<MonomialPower>,
    pos: HashMap<Vec<u32>, usize>,
}

impl MonomialTable {
    pub fn up_to(n: usize, max_deg: u32) -> Self {
        let mons = monomials_up_to(n, max_deg);
        let pos = mons
            .iter()
            .enumerate()
            .map(|(i, m)| (m.exponents().to_vec(), i))
            .collect();
        Self { mons, pos }
    }

    pub fn len(&self) -> usize {
        self.mons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mons.is_empty()
    }

    pub fn monomials(&self) -> &[MonomialPower] {
        &self.mons
    }

    pub fn monomial(&self, i: usize) -> &MonomialPower {
        &self.mons[i]
    }

    pub fn position(&self, alpha: &MonomialPower) -> Option<usize> {
        self.pos.get(alpha.exponents()).copied()
    }
}
