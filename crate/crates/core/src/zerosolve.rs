//! Common zeros of the relation polynomials from commuting companion
//! matrices.
//!
//! When the multiplication matrices M_{x₁},…,M_{x_n} commute, a random
//! positive combination N(ξ) = Σ ξᵢ Mᵢ has Schur form whose diagonal groups
//! into one cluster per common zero; the zero's i-th coordinate is the
//! normalized block trace of Q*MᵢQ over that cluster, and the cluster size is
//! the zero's multiplicity.

use std::collections::HashMap;

use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::genmat::CompanionSet;
use crate::{Error, Result, C64};

/// Relative gap under which two Schur diagonal entries are treated as the
/// same zero.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

/// Internal seed for the combination used by `stickelberger_check`; fixed so
/// the check is deterministic.
const CHECK_SEED: u64 = 0x9e37_79b9;

/// The common zeros of a relation system, with multiplicities.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    points: Vec<(DVector<C64>, usize)>,
}

impl ZeroSet {
    /// Distinct zeros with their multiplicities.
    pub fn points(&self) -> &[(DVector<C64>, usize)] {
        &self.points
    }

    /// Σ multiplicities; equals r on success.
    pub fn total(&self) -> usize {
        self.points.iter().map(|(_, s)| s).sum()
    }

    /// All multiplicities are 1.
    pub fn nondefective(&self) -> bool {
        self.points.iter().all(|(_, s)| *s == 1)
    }

    /// Zeros repeated by multiplicity.
    pub fn expanded(&self) -> Vec<DVector<C64>> {
        let mut out = Vec::with_capacity(self.total());
        for (v, s) in &self.points {
            for _ in 0..*s {
                out.push(v.clone());
            }
        }
        out
    }
}

/// ξ in the open simplex with a per-coordinate floor, so the combination is
/// generic but never close to dropping a matrix.
fn simplex_with_floor<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let floor = 0.05f64.min(0.5 / n as f64);
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws
        .iter()
        .map(|e| floor + (1.0 - n as f64 * floor) * e / total)
        .collect()
}

fn combine(mats: &[DMatrix<C64>], xi: &[f64]) -> DMatrix<C64> {
    let r = mats[0].nrows();
    let mut out = DMatrix::zeros(r, r);
    for (m, &x) in mats.iter().zip(xi) {
        out += m * C64::new(x, 0.0);
    }
    out
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Unitary swap of adjacent Schur diagonal entries k and k+1, updating T and
/// Q in place.
fn swap_adjacent(t: &mut DMatrix<C64>, q: &mut DMatrix<C64>, k: usize) {
    let a = t[(k, k)];
    let b = t[(k, k + 1)];
    let c = t[(k + 1, k + 1)];
    // Unit eigenvector of [[a,b],[0,c]] for eigenvalue c.
    let x0 = b;
    let x1 = c - a;
    let nrm = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
    if nrm == 0.0 {
        return; // equal eigenvalues, nothing to move
    }
    let g00 = x0 / nrm;
    let g10 = x1 / nrm;
    // G = [[g00, -conj(g10)], [g10, conj(g00)]] is unitary with first column
    // the eigenvector, so G* T G swaps the diagonal pair.
    let r = t.nrows();
    for row in 0..r {
        let (p, s) = (t[(row, k)], t[(row, k + 1)]);
        t[(row, k)] = p * g00 + s * g10;
        t[(row, k + 1)] = p * (-g10.conj()) + s * g00.conj();
    }
    for col in 0..r {
        let (p, s) = (t[(k, col)], t[(k + 1, col)]);
        t[(k, col)] = g00.conj() * p + g10.conj() * s;
        t[(k + 1, col)] = -g10 * p + g00 * s;
    }
    t[(k + 1, k)] = C64::ZERO;
    for row in 0..q.nrows() {
        let (p, s) = (q[(row, k)], q[(row, k + 1)]);
        q[(row, k)] = p * g00 + s * g10;
        q[(row, k + 1)] = p * (-g10.conj()) + s * g00.conj();
    }
}

/// Extracts the common zeros of a commuting companion set. Draws a seeded
/// generic combination, Schur-decomposes it, clusters the diagonal at
/// relative gap `cluster_tol` (single linkage), reorders clusters into
/// contiguous blocks, and reads each zero off the block traces of the
/// conjugated matrices. Deterministic given (inputs, seed).
pub fn cgt_zeros(cs: &CompanionSet, seed: u64, cluster_tol: f64) -> Result<ZeroSet> {
    let n = cs.n_vars();
    let r = cs.r();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi = simplex_with_floor(&mut rng, n);
    let nxi = combine(cs.mats(), &xi);
    let schur = Schur::try_new(nxi, 1e-13, 100_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (mut q, mut t) = schur.unpack();

    // Single-linkage clusters of the diagonal.
    let diag: Vec<C64> = (0..r).map(|k| t[(k, k)]).collect();
    let mut parent: Vec<usize> = (0..r).collect();
    for a in 0..r {
        for b in 0..r {
            if a != b && (diag[a] - diag[b]).norm() <= cluster_tol * (1.0 + diag[a].norm()) {
                union(&mut parent, a, b);
            }
        }
    }
    // Cluster keys ranked by first occurrence along the diagonal.
    let mut rank: HashMap<usize, usize> = HashMap::new();
    let mut key = vec![0usize; r];
    for (k, slot) in key.iter_mut().enumerate() {
        let root = find(&mut parent, k);
        let next = rank.len();
        *slot = *rank.entry(root).or_insert(next);
    }
    // Stable bubble sort by key with unitary swaps groups clusters into
    // contiguous blocks without disturbing the Schur structure.
    loop {
        let mut swapped = false;
        for k in 0..r.saturating_sub(1) {
            if key[k] > key[k + 1] {
                swap_adjacent(&mut t, &mut q, k);
                key.swap(k, k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    // Block boundaries.
    let mut blocks: Vec<(usize, usize)> = Vec::new(); // (start, size)
    let mut start = 0;
    for k in 1..=r {
        if k == r || key[k] != key[start] {
            blocks.push((start, k - start));
            start = k;
        }
    }
    if blocks.iter().map(|(_, s)| s).sum::<usize>() != r {
        return Err(Error::Internal("cluster sizes do not sum to r".into()));
    }

    let mut points: Vec<(DVector<C64>, usize)> = blocks
        .iter()
        .map(|&(_, len)| (DVector::zeros(n), len))
        .collect();
    for (i, m) in cs.mats().iter().enumerate() {
        let conj = q.adjoint() * m * &q;
        // The conjugated matrices should be block upper triangular in the
        // same pattern; mass below it signals a borderline cluster split.
        let mut below = 0.0f64;
        for &(s, len) in &blocks {
            for row in (s + len)..r {
                for col in s..(s + len) {
                    below += conj[(row, col)].norm_sqr();
                }
            }
        }
        let scale = conj.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if below.sqrt() > 1e-6 * (1.0 + scale) {
            log::warn!(
                "conjugated multiplication matrix {} deviates from block triangular form by {:.3e}",
                i,
                below.sqrt()
            );
        }
        for (j, &(s, len)) in blocks.iter().enumerate() {
            let tr: C64 = (s..s + len).map(|k| conj[(k, k)]).sum();
            points[j].0[i] = tr / C64::new(len as f64, 0.0);
        }
    }
    Ok(ZeroSet { points })
}

/// Verifies the eigenvalue characterization of the zeros: each point v must
/// admit a common unit left eigenvector w with Mᵢᵀw ≈ vᵢw for every i. The
/// candidate w is the null-direction of (N(ξ)ᵀ − λI) at the point's combined
/// eigenvalue λ = Σ ξᵢvᵢ.
pub fn stickelberger_check(cs: &CompanionSet, zs: &ZeroSet, tol: f64) -> bool {
    let n = cs.n_vars();
    let r = cs.r();
    let mut rng = ChaCha8Rng::seed_from_u64(CHECK_SEED);
    let xi = simplex_with_floor(&mut rng, n);
    let nxi_t = combine(cs.mats(), &xi).transpose();
    for (v, _) in zs.points() {
        let lambda: C64 = xi
            .iter()
            .zip(v.iter())
            .map(|(&x, &c)| C64::new(x, 0.0) * c)
            .sum();
        let mut shifted = nxi_t.clone();
        for k in 0..r {
            shifted[(k, k)] -= lambda;
        }
        let dec = shifted.svd(false, true);
        let v_t = dec.v_t.as_ref().expect("svd with v_t");
        let sv = dec.singular_values.as_slice();
        let (idx, _) =
            sv.iter().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (i, &s)| {
                    if s < acc.1 {
                        (i, s)
                    } else {
                        acc
                    }
                },
            );
        let w = DVector::from_iterator(r, v_t.row(idx).iter().map(|z| z.conj()));
        for (i, m) in cs.mats().iter().enumerate() {
            let resid = (m.transpose() * &w - &w * v[i]).norm();
            if resid > tol {
                return false;
            }
        }
    }
    true
}

/// Greedy bottleneck distance between two point lists: repeatedly matches the
/// globally closest unmatched pair and reports the largest matched distance.
/// Infinite when the list lengths differ.
pub fn point_set_distance(a: &[DVector<C64>], b: &[DVector<C64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let k = a.len();
    if k == 0 {
        return 0.0;
    }
    let mut used_a = vec![false; k];
    let mut used_b = vec![false; k];
    let mut worst = 0.0f64;
    for _ in 0..k {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..k {
            if used_a[i] {
                continue;
            }
            for j in 0..k {
                if used_b[j] {
                    continue;
                }
                let d = (&a[i] - &b[j]).norm();
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        used_a[best.1] = true;
        used_b[best.2] = true;
        worst = worst.max(best.0);
    }
    worst
}
