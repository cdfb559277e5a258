//! Decomposition results and the end-to-end drivers: nonlinear fitting,
//! weight recovery, assembly, multi-solution search, and length reduction.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use crate::catalecticant::{dimension_gap, generic_rank};
use crate::genmat::{companion, eval_monomial, from_points, parameterize};
use crate::linalg::{complex_gaussian_vector, cpow, lstsq_min_norm};
use crate::lm::{minimize, LeastSquares, LmOptions};
use crate::symtensor::{cube_multiplicity, SymTensor};
use crate::syssolve::{all_solve, numeric_solve, random_affine, restart_rng, SolveConfig};
use crate::zerosolve::{cgt_zeros, DEFAULT_CLUSTER_TOL};
use crate::{Error, Result, C64};

/// A symmetric decomposition F ≈ Σᵢ (uᵢ)^⊗m. Weights are folded into the
/// vectors (an m-th root per vector), so the representation is unique only up
/// to reordering and multiplying each vector by an m-th root of unity.
#[derive(Clone, Debug)]
pub struct Decomposition {
    n_vars: usize,
    order: u32,
    vectors: Vec<DVector<C64>>,
}

impl Decomposition {
    pub fn new(n_vars: usize, order: u32, vectors: Vec<DVector<C64>>) -> Result<Decomposition> {
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
        Ok(Decomposition {
            n_vars,
            order,
            vectors,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of rank-one terms.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[DVector<C64>] {
        &self.vectors
    }

    /// Σᵢ (uᵢ)^⊗m.
    pub fn tensor(&self) -> SymTensor {
        SymTensor::from_rank_one_sum(self.n_vars, self.order, &self.vectors)
            .expect("vector lengths checked at construction")
    }

    /// Relative reconstruction error ‖F − Σᵢ uᵢ^⊗m‖ / ‖F‖, absolute when
    /// ‖F‖ = 0.
    pub fn error_against(&self, f: &SymTensor) -> Result<f64> {
        if f.n_vars() != self.n_vars || f.order() != self.order {
            return Err(Error::Dimension(format!(
                "decomposition shape (n+1, m) = ({}, {}) vs tensor ({}, {})",
                self.n_vars + 1,
                self.order,
                f.n_vars() + 1,
                f.order()
            )));
        }
        let diff = f.sub(&self.tensor()).norm();
        let scale = f.norm();
        Ok(if scale == 0.0 { diff } else { diff / scale })
    }

    /// Whether `self` and `other` are the same decomposition up to reordering
    /// the terms and scaling each vector by an m-th root of unity. Vector
    /// pairs are matched greedily at relative tolerance `tol`.
    pub fn equivalent(&self, other: &Decomposition, tol: f64) -> bool {
        if self.n_vars != other.n_vars
            || self.order != other.order
            || self.vectors.len() != other.vectors.len()
        {
            return false;
        }
        let m = self.order;
        let mut used = vec![false; other.vectors.len()];
        'outer: for u in &self.vectors {
            let scale = 1.0 + u.norm();
            for (j, v) in other.vectors.iter().enumerate() {
                if used[j] {
                    continue;
                }
                if (0..m).any(|k| {
                    let root = root_of_unity(m, k);
                    (u - v.map(|x| x * root)).norm() <= tol * scale
                }) {
                    used[j] = true;
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }
}

fn root_of_unity(m: u32, k: u32) -> C64 {
    let theta = std::f64::consts::TAU * k as f64 / m as f64;
    C64::new(theta.cos(), theta.sin())
}

/// Consistency tolerance handed to `parameterize` by the drivers.
const CONSISTENCY_TOL: f64 = 1e-8;

/// Leading entries below this fraction of ‖u‖ count as zero when converting
/// fitted vectors to affine points.
const LEADING_TOL: f64 = 1e-6;

/// Relative noise added to near-singular point sets, and how often to retry.
const PERTURB_SCALE: f64 = 1e-3;
const VANDERMONDE_RETRIES: usize = 3;

/// Inner fit budget; the absolute tolerance is scaled by 1 + ‖F‖. The target
/// sits near the f64 floor so the fit only stops early on genuine stalls.
const FIT_TOL_REL: f64 = 1e-14;
const FIT_MAX_ITERS: usize = 300;

/// Warm continuation of a stalled fit: re-enter with fresh damping while each
/// round still improves the residual by this factor, up to this many rounds.
const FIT_POLISH_ROUNDS: usize = 12;
const FIT_POLISH_FACTOR: f64 = 0.999;

// RNG stream tags for the drivers, disjoint from solver restart indices.
const STREAM_FIT: u64 = 1 << 40;
const STREAM_POINTS: u64 = (1 << 40) + 1;
const STREAM_PERTURB: u64 = (1 << 40) + 2;
const STREAM_PAD: u64 = (1 << 40) + 3;
const STREAM_POLISH: u64 = (1 << 40) + 4;

fn stream(seed: u64, tag: u64) -> u64 {
    seed.wrapping_add(tag.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn relative(err: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        err
    } else {
        err / scale
    }
}

/// ‖Σᵢ uᵢ^⊗m − F‖ in the weighted entry norm (absolute).
pub fn decomposition_error(f: &SymTensor, vectors: &[DVector<C64>]) -> Result<f64> {
    let sum = SymTensor::from_rank_one_sum(f.n_vars(), f.order(), vectors)?;
    Ok(f.sub(&sum).norm())
}

/// ‖F − Σᵢ uᵢ^⊗m‖² over the stacked vectors uᵢ ∈ ℂ^{n+1}. One residual row
/// per stored entry, scaled by the square root of its cube multiplicity so
/// the residual norm equals the tensor-norm error.
struct TensorFitProblem {
    r: usize,
    n_plus_1: usize,
    /// Full cube exponents (m−|α|, α), √multiplicity, and target per row.
    rows: Vec<(Vec<u32>, f64, C64)>,
}

impl TensorFitProblem {
    fn new(f: &SymTensor, r: usize) -> TensorFitProblem {
        let m = f.order();
        let rows = f
            .monomials()
            .iter()
            .map(|alpha| {
                let mut exps = Vec::with_capacity(f.n_vars() + 1);
                exps.push(m - alpha.degree());
                exps.extend_from_slice(alpha.exponents());
                let w = cube_multiplicity(m, alpha).sqrt();
                let target = f
                    .entry(alpha)
                    .expect("monomial from the tensor's own table");
                (exps, w, target)
            })
            .collect();
        TensorFitProblem {
            r,
            n_plus_1: f.n_vars() + 1,
            rows,
        }
    }

    fn term(&self, x: &DVector<C64>, i: usize, exps: &[u32]) -> C64 {
        let base = i * self.n_plus_1;
        exps.iter()
            .enumerate()
            .map(|(j, &e)| cpow(x[base + j], e))
            .product()
    }
}

impl LeastSquares for TensorFitProblem {
    fn residual(&self, x: &DVector<C64>) -> DVector<C64> {
        DVector::from_iterator(
            self.rows.len(),
            self.rows.iter().map(|(exps, w, target)| {
                let sum: C64 = (0..self.r).map(|i| self.term(x, i, exps)).sum();
                (sum - target) * C64::new(*w, 0.0)
            }),
        )
    }

    fn jacobian(&self, x: &DVector<C64>) -> DMatrix<C64> {
        let mut jac = DMatrix::zeros(self.rows.len(), x.len());
        for (row, (exps, w, _)) in self.rows.iter().enumerate() {
            for i in 0..self.r {
                let base = i * self.n_plus_1;
                for (j, &e) in exps.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let mut d = C64::new(*w * e as f64, 0.0);
                    for (jj, &ee) in exps.iter().enumerate() {
                        let p = if jj == j { ee - 1 } else { ee };
                        d *= cpow(x[base + jj], p);
                    }
                    jac[(row, base + j)] = d;
                }
            }
        }
        jac
    }
}

/// Starting point for `nls_fit`.
#[derive(Clone, Debug)]
pub enum FitStart {
    /// Warm start from the given vectors, one per term.
    Vectors(Vec<DVector<C64>>),
    /// Complex-Gaussian start drawn from this seed.
    Random(u64),
}

/// Locally minimizes ‖F − Σᵢ uᵢ^⊗m‖ over r vectors by damped least squares.
/// Returns the best vectors found and their absolute error; a poor local
/// minimum comes back as a large error, not as a failure.
pub fn nls_fit(f: &SymTensor, r: usize, start: FitStart) -> Result<(Vec<DVector<C64>>, f64)> {
    let k = f.n_vars() + 1;
    let x0 = match start {
        FitStart::Vectors(vs) => {
            if vs.len() != r {
                return Err(Error::Dimension(format!(
                    "{} starting vectors for {} terms",
                    vs.len(),
                    r
                )));
            }
            let mut x = DVector::zeros(r * k);
            for (i, u) in vs.iter().enumerate() {
                if u.len() != k {
                    return Err(Error::Dimension(format!(
                        "starting vector {} has length {}, expected {}",
                        i,
                        u.len(),
                        k
                    )));
                }
                x.rows_mut(i * k, k).copy_from(u);
            }
            x
        }
        FitStart::Random(seed) => complex_gaussian_vector(&mut restart_rng(seed, 0), r * k),
    };
    let problem = TensorFitProblem::new(f, r);
    let out = minimize(
        &problem,
        x0,
        LmOptions {
            max_iters: FIT_MAX_ITERS,
            tol: FIT_TOL_REL * (1.0 + f.norm()),
            damping_init: 1e-3,
        },
    );
    let vectors = (0..r).map(|i| out.x.rows(i * k, k).clone_owned()).collect();
    Ok((vectors, out.residual_norm))
}

/// Runs `nls_fit` and keeps re-entering it from its own output until the
/// residual meets `target` or stalls; fresh damping un-sticks slow descents.
fn polished_fit(
    f: &SymTensor,
    r: usize,
    start: FitStart,
    target: f64,
) -> Result<(Vec<DVector<C64>>, f64)> {
    let (mut u, mut res) = nls_fit(f, r, start)?;
    for _ in 0..FIT_POLISH_ROUNDS {
        if res <= target {
            break;
        }
        let (u2, res2) = nls_fit(f, r, FitStart::Vectors(u.clone()))?;
        if res2 >= res * FIT_POLISH_FACTOR {
            break;
        }
        u = u2;
        res = res2;
    }
    Ok((u, res))
}

/// Least-squares weights λ with Σᵢ λᵢ (1, vᵢ)^⊗m ≈ F, solved row-weighted so
/// the minimized quantity is the tensor-norm error.
pub fn weights_from_points(f: &SymTensor, points: &[DVector<C64>]) -> Result<DVector<C64>> {
    let n = f.n_vars();
    for (i, v) in points.iter().enumerate() {
        if v.len() != n {
            return Err(Error::Dimension(format!(
                "point {} has length {}, expected {}",
                i,
                v.len(),
                n
            )));
        }
    }
    let mut a = DMatrix::zeros(f.len(), points.len());
    let mut b = DVector::zeros(f.len());
    for (row, alpha) in f.monomials().iter().enumerate() {
        let w = C64::new(cube_multiplicity(f.order(), alpha).sqrt(), 0.0);
        for (col, v) in points.iter().enumerate() {
            a[(row, col)] = w * eval_monomial(alpha, v);
        }
        b[row] = w * f
            .entry(alpha)
            .expect("monomial from the tensor's own table");
    }
    let (lambda, _, _) = lstsq_min_norm(&a, &b, 1e-12);
    Ok(lambda)
}

/// uᵢ = λᵢ^{1/m} (1, vᵢ) with the principal m-th root, argument in
/// (−π/m, π/m].
pub fn assemble(
    lambda: &DVector<C64>,
    points: &[DVector<C64>],
    order: u32,
) -> Result<Vec<DVector<C64>>> {
    if lambda.len() != points.len() {
        return Err(Error::Dimension(format!(
            "{} weights for {} points",
            lambda.len(),
            points.len()
        )));
    }
    if order == 0 {
        return Err(Error::Domain("order must be at least 1".into()));
    }
    Ok(lambda
        .iter()
        .zip(points)
        .map(|(&lam, v)| {
            let root = if lam == C64::ZERO {
                C64::ZERO
            } else {
                lam.powf(1.0 / f64::from(order))
            };
            let mut u = DVector::zeros(v.len() + 1);
            u[0] = root;
            for j in 0..v.len() {
                u[j + 1] = root * v[j];
            }
            u
        })
        .collect())
}

/// Rank choice for `decompose_numeric`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank {
    /// The generic rank for the tensor's shape.
    Auto,
    Fixed(usize),
}

/// Numeric decomposition driver. A direct nonlinear fit is tried first; when
/// it does not already meet `cfg.residual_tol`, its terms seed a generating
/// matrix through their affine points, the commutator system is solved under
/// generic affine constraints, and the solution's zeros are reweighted,
/// assembled, and refined.
pub fn decompose_numeric(f: &SymTensor, rank: Rank, cfg: &SolveConfig) -> Result<Decomposition> {
    let n = f.n_vars();
    let m = f.order();
    let r = match rank {
        Rank::Auto => generic_rank(n, m).value,
        Rank::Fixed(r) => r,
    };
    if r == 0 {
        return Err(Error::Domain("rank must be at least 1".into()));
    }
    let fnorm = f.norm();

    // An inconsistent border system normally means r is below the rank, but
    // the verdict waits until the direct fit has run: the fit is chart-free,
    // while the border columns degenerate when a term sits at infinity.
    let param = parameterize(f, r, CONSISTENCY_TOL);

    let (u0, res0) = nls_fit(f, r, FitStart::Random(stream(cfg.seed, STREAM_FIT)))?;
    if res0 <= cfg.residual_tol * (1.0 + fnorm) {
        return Decomposition::new(n, m, u0);
    }

    let param = match param {
        Ok(p) => p,
        Err(err @ Error::InconsistentSystem { .. }) => {
            // No generating matrix exists in this basis, which normally means
            // the rank exceeds r. Tensors on the closure of the rank-r locus
            // can still meet the residual target, so polished direct fits get
            // the restart budget before the failure is reported.
            let target = cfg.residual_tol * (1.0 + fnorm);
            let mut best = (u0, res0);
            for idx in 0..=cfg.max_restarts {
                let start = if idx == 0 {
                    FitStart::Vectors(best.0.clone())
                } else {
                    FitStart::Random(stream(cfg.seed, STREAM_POLISH + idx as u64))
                };
                let (u, res) = polished_fit(f, r, start, target)?;
                if res < best.1 {
                    best = (u, res);
                }
                if best.1 <= target {
                    return Decomposition::new(n, m, best.0);
                }
            }
            return Err(err);
        }
        Err(err) => return Err(err),
    };
    let l = param.omega_len();

    // Affine points from the fitted terms; a vanishing leading entry means
    // the point at infinity, replaced by a random draw.
    let mut rng_points = restart_rng(cfg.seed, STREAM_POINTS);
    let mut points: Vec<DVector<C64>> = u0
        .iter()
        .map(|u| {
            if u[0].norm() > LEADING_TOL * u.norm() {
                DVector::from_fn(n, |j, _| u[j + 1] / u[0])
            } else {
                complex_gaussian_vector(&mut rng_points, n)
            }
        })
        .collect();
    let mut rng_perturb = restart_rng(cfg.seed, STREAM_PERTURB);
    let mut attempt = 0;
    let g0 = loop {
        match from_points(&points, param.basis()) {
            Ok(g) => break g,
            Err(Error::SingularVandermonde(_)) if attempt < VANDERMONDE_RETRIES => {
                attempt += 1;
                for v in points.iter_mut() {
                    let noise = complex_gaussian_vector(&mut rng_perturb, n);
                    let s = C64::new(PERTURB_SCALE * (1.0 + v.norm()), 0.0);
                    for j in 0..n {
                        v[j] += s * noise[j];
                    }
                }
            }
            Err(e) => return Err(e),
        }
    };
    let omega0 = param.project(&g0)?;

    let gap = dimension_gap(n, m, r);
    let d = gap.min(l);
    if gap > l {
        log::warn!("dimension gap {gap} exceeds the {l} free parameters; using {l} constraints");
    }
    let ac = random_affine(l, d, cfg.seed)?;
    let omega = match numeric_solve(&param, &ac, &omega0, cfg) {
        Ok(w) => w,
        Err(Error::NoConvergence { attempts, .. }) => {
            let best = Decomposition::new(n, m, u0)?;
            return Err(Error::NoConvergence {
                best_residual: relative(res0, fnorm),
                attempts,
                best: Some(Box::new(best)),
            });
        }
        Err(e) => return Err(e),
    };

    let g = param.realize(&omega)?;
    let zeros = cgt_zeros(&companion(&g), cfg.seed, DEFAULT_CLUSTER_TOL)?;
    let mut points: Vec<DVector<C64>> = zeros.points().iter().map(|(v, _)| v.clone()).collect();
    if points.len() < r {
        // Merged clusters leave fewer than r zeros; pad with generic points.
        let mut rng_pad = restart_rng(cfg.seed, STREAM_PAD);
        while points.len() < r {
            points.push(complex_gaussian_vector(&mut rng_pad, n));
        }
    }

    let lambda = weights_from_points(f, &points)?;
    let assembled = assemble(&lambda, &points, m)?;
    let (refined, res) = nls_fit(f, r, FitStart::Vectors(assembled))?;
    // A padded or ill-conditioned zero set can lose to the direct fit; keep
    // the better of the two.
    if res0 < res {
        return Decomposition::new(n, m, u0);
    }
    Decomposition::new(n, m, refined)
}

/// Multi-start search for all r-term decompositions: every distinct solution
/// of the constrained commutator system becomes a decomposition through its
/// zero set. No final refinement is applied.
pub fn decompose_all(f: &SymTensor, r: usize, cfg: &SolveConfig) -> Result<Vec<Decomposition>> {
    let n = f.n_vars();
    let m = f.order();
    if r == 0 {
        return Err(Error::Domain("rank must be at least 1".into()));
    }
    let param = parameterize(f, r, CONSISTENCY_TOL)?;
    let l = param.omega_len();
    let gap = dimension_gap(n, m, r);
    let d = gap.min(l);
    if gap > l {
        log::warn!("dimension gap {gap} exceeds the {l} free parameters; using {l} constraints");
    }
    let ac = random_affine(l, d, cfg.seed)?;
    let mut out: Vec<Decomposition> = Vec::new();
    for (idx, omega) in all_solve(&param, &ac, cfg).iter().enumerate() {
        let g = param.realize(omega)?;
        let zeros = match cgt_zeros(&companion(&g), cfg.seed, DEFAULT_CLUSTER_TOL) {
            Ok(z) => z,
            Err(e) => {
                log::warn!("zero extraction failed on solution {idx}: {e}");
                continue;
            }
        };
        let mut points: Vec<DVector<C64>> = zeros.points().iter().map(|(v, _)| v.clone()).collect();
        if points.len() < r {
            let mut rng_pad = restart_rng(cfg.seed, STREAM_PAD.wrapping_add(idx as u64));
            while points.len() < r {
                points.push(complex_gaussian_vector(&mut rng_pad, n));
            }
        }
        let lambda = weights_from_points(f, &points)?;
        let dec = Decomposition::new(n, m, assemble(&lambda, &points, m)?)?;
        if out
            .iter()
            .all(|other| !other.equivalent(&dec, cfg.dedup_tol))
        {
            out.push(dec);
        }
    }
    Ok(out)
}

/// Repeatedly drops the smallest-norm term and refits, keeping each shorter
/// decomposition whose relative error stays within max(1e-8,
/// cfg.residual_tol). Returns the input when no reduction succeeds.
pub fn reduce_length(f: &SymTensor, dec: &Decomposition, cfg: &SolveConfig) -> Decomposition {
    if dec.n_vars() != f.n_vars() || dec.order() != f.order() {
        log::warn!("decomposition shape does not match the tensor; nothing to reduce");
        return dec.clone();
    }
    let accept = cfg.residual_tol.max(1e-8);
    let fnorm = f.norm();
    let mut current = dec.clone();
    while !current.is_empty() {
        let mut vs = current.vectors().to_vec();
        vs.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(Ordering::Equal));
        vs.pop();
        let shorter = vs.len();
        let Ok((u, res)) = nls_fit(f, shorter, FitStart::Vectors(vs)) else {
            break;
        };
        if relative(res, fnorm) > accept {
            break;
        }
        current = Decomposition::new(f.n_vars(), f.order(), u)
            .expect("fit vectors have the tensor's shape");
    }
    current
}
