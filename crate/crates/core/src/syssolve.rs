//! Solving the commutator system in the parameterization coordinates ω.
//!
//! A member G(ω) = C + N(ω) of the affine family yields companion matrices
//! whose pairwise commutators are quadratic polynomials in ω; the system is
//! augmented with random affine constraints when the solution family has
//! positive dimension. One solution is found by damped least squares from a
//! warm start; many solutions by seeded multi-start with deduplication of the
//! induced zero sets.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::genmat::{commutator_residual, companion, from_points, GenMatrixParam};
use crate::linalg::{complex_gaussian_vector, fro_norm};
use crate::lm::{minimize, LeastSquares, LmOptions, LmOutcome};
use crate::symtensor::MonomialPower;
use crate::zerosolve::{cgt_zeros, point_set_distance, DEFAULT_CLUSTER_TOL};
use crate::{Error, Result, C64};

/// Affine conditions aᵢᵀω = bᵢ appended to the commutator system to cut a
/// d-dimensional solution family down to isolated points.
#[derive(Clone, Debug)]
pub struct AffineConstraints {
    a: DMatrix<C64>,
    b: DVector<C64>,
}

impl AffineConstraints {
    pub fn new(a: DMatrix<C64>, b: DVector<C64>) -> Result<AffineConstraints> {
        if a.nrows() != b.len() {
            return Err(Error::Dimension(format!(
                "{} constraint rows but {} right-hand sides",
                a.nrows(),
                b.len()
            )));
        }
        Ok(AffineConstraints { a, b })
    }

    /// No constraints on an ℓ-dimensional parameter.
    pub fn empty(l: usize) -> AffineConstraints {
        AffineConstraints {
            a: DMatrix::zeros(0, l),
            b: DVector::zeros(0),
        }
    }

    /// Number of constraints d.
    pub fn len(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.a
    }

    pub fn rhs(&self) -> &DVector<C64> {
        &self.b
    }
}

/// d seeded complex-Gaussian constraints on ℂ^ℓ.
pub fn random_affine(l: usize, d: usize, seed: u64) -> Result<AffineConstraints> {
    if d > l {
        return Err(Error::Domain(format!(
            "{} affine constraints on a {}-dimensional parameter",
            d, l
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(d, l, |_, _| crate::linalg::standard_complex(&mut rng));
    let b = complex_gaussian_vector(&mut rng, d);
    Ok(AffineConstraints { a, b })
}

/// Knobs shared by the solvers and the end-to-end drivers.
#[derive(Clone, Copy, Debug)]
pub struct SolveConfig {
    pub seed: u64,
    pub max_iters: usize,
    /// Relative residual target; scaled by (1 + ‖C‖) internally.
    pub residual_tol: f64,
    pub max_restarts: usize,
    /// Zero sets closer than this (bottleneck matching) count as the same
    /// solution.
    pub dedup_tol: f64,
    pub damping_init: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            seed: 0,
            max_iters: 200,
            residual_tol: 1e-12,
            max_restarts: 50,
            dedup_tol: 1e-6,
            damping_init: 1e-3,
        }
    }
}

/// Commutator entries of G(ω)'s companion matrices, followed by the affine
/// rows Aω − b. Quadratic in ω.
pub fn residual_map(
    param: &GenMatrixParam,
    ac: &AffineConstraints,
    omega: &DVector<C64>,
) -> Result<DVector<C64>> {
    if omega.len() != param.omega_len() {
        return Err(Error::Dimension(format!(
            "parameter vector has length {}, family has {}",
            omega.len(),
            param.omega_len()
        )));
    }
    Ok(CommutatorProblem::new(param, ac).residual(omega))
}

/// The least-squares problem behind `numeric_solve`: per-parameter sparsity
/// of ∂G/∂ω_k (a single column of a single border slot) makes the analytic
/// Jacobian cheap.
struct CommutatorProblem<'a> {
    param: &'a GenMatrixParam,
    ac: &'a AffineConstraints,
    /// Border column and local kernel index owning each ω coordinate.
    owners: Vec<(usize, usize)>,
    /// For variable i and ω index k: the companion column whose entry block
    /// is G(:, owner(k)), when the border monomial shifts back into B₀.
    targets: Vec<Vec<Option<usize>>>,
}

impl<'a> CommutatorProblem<'a> {
    fn new(param: &'a GenMatrixParam, ac: &'a AffineConstraints) -> Self {
        let basis = param.basis();
        let n = basis.n_vars();
        let mut owners = Vec::with_capacity(param.omega_len());
        for (j, _) in basis.b1().iter().enumerate() {
            for local in 0..param.null_basis(j).ncols() {
                owners.push((j, local));
            }
        }
        let mut targets = vec![vec![None; owners.len()]; n];
        for (k, &(j, _)) in owners.iter().enumerate() {
            let alpha = &basis.b1()[j];
            for (i, row) in targets.iter_mut().enumerate() {
                let e_i = MonomialPower::var(basis.n_vars(), i);
                if let Some(beta) = alpha.checked_sub(&e_i) {
                    row[k] = basis.position_b0(&beta);
                }
            }
        }
        CommutatorProblem {
            param,
            ac,
            owners,
            targets,
        }
    }

    fn residual_len(&self) -> usize {
        let n = self.param.basis().n_vars();
        let r = self.param.basis().r();
        n * (n - 1) / 2 * r * r + self.ac.len()
    }
}

impl LeastSquares for CommutatorProblem<'_> {
    fn residual(&self, omega: &DVector<C64>) -> DVector<C64> {
        let g = self.param.realize(omega).expect("ω length fixed");
        let comm = commutator_residual(&companion(&g));
        let mut out = DVector::zeros(self.residual_len());
        out.rows_mut(0, comm.len()).copy_from(&comm);
        if !self.ac.is_empty() {
            let affine = self.ac.matrix() * omega - self.ac.rhs();
            out.rows_mut(comm.len(), affine.len()).copy_from(&affine);
        }
        out
    }

    fn jacobian(&self, omega: &DVector<C64>) -> DMatrix<C64> {
        let g = self.param.realize(omega).expect("ω length fixed");
        let mats = companion(&g).mats().to_vec();
        let basis = self.param.basis();
        let n = basis.n_vars();
        let r = basis.r();
        let l = omega.len();
        let mut jac = DMatrix::zeros(self.residual_len(), l);
        for k in 0..l {
            let (jcol, local) = self.owners[k];
            let dirs = self.param.null_basis(jcol).column(local);
            let mut at = 0;
            for i in 0..n {
                for jv in (i + 1)..n {
                    // d/dω_k of [Mᵢ, Mⱼ] with dMᵢ = dirs·e_νᵢᵀ per target.
                    let mut c = DMatrix::<C64>::zeros(r, r);
                    if let Some(nu) = self.targets[i][k] {
                        // dMᵢ·Mⱼ − Mⱼ·dMᵢ
                        for col in 0..r {
                            let mrow = mats[jv][(nu, col)];
                            for row in 0..r {
                                c[(row, col)] += dirs[row] * mrow;
                            }
                        }
                        let mv = &mats[jv] * dirs;
                        for row in 0..r {
                            c[(row, nu)] -= mv[row];
                        }
                    }
                    if let Some(nu) = self.targets[jv][k] {
                        // Mᵢ·dMⱼ − dMⱼ·Mᵢ
                        let mv = &mats[i] * dirs;
                        for row in 0..r {
                            c[(row, nu)] += mv[row];
                        }
                        for col in 0..r {
                            let mrow = mats[i][(nu, col)];
                            for row in 0..r {
                                c[(row, col)] -= dirs[row] * mrow;
                            }
                        }
                    }
                    // Column-major stacking matches commutator_residual.
                    for col in 0..r {
                        for row in 0..r {
                            jac[(at + col * r + row, k)] = c[(row, col)];
                        }
                    }
                    at += r * r;
                }
            }
        }
        if !self.ac.is_empty() {
            let base = self.residual_len() - self.ac.len();
            for d in 0..self.ac.len() {
                for k in 0..l {
                    jac[(base + d, k)] = self.ac.matrix()[(d, k)];
                }
            }
        }
        jac
    }
}

pub(crate) fn restart_rng(seed: u64, idx: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(idx.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

fn run_lm(
    problem: &CommutatorProblem,
    start: DVector<C64>,
    cfg: &SolveConfig,
    tol_abs: f64,
) -> LmOutcome {
    minimize(
        problem,
        start,
        LmOptions {
            max_iters: cfg.max_iters,
            tol: tol_abs,
            damping_init: cfg.damping_init,
        },
    )
}

/// Finds one ω with ‖residual_map(ω)‖ ≤ residual_tol·(1+‖C‖), starting from
/// `omega0` and falling back to seeded random restarts. Deterministic given
/// inputs and seed.
pub fn numeric_solve(
    param: &GenMatrixParam,
    ac: &AffineConstraints,
    omega0: &DVector<C64>,
    cfg: &SolveConfig,
) -> Result<DVector<C64>> {
    if omega0.len() != param.omega_len() {
        return Err(Error::Dimension(format!(
            "start vector has length {}, family has {}",
            omega0.len(),
            param.omega_len()
        )));
    }
    let problem = CommutatorProblem::new(param, ac);
    let tol_abs = cfg.residual_tol * (1.0 + fro_norm(param.base().data()));
    let l = param.omega_len();
    let mut best: Option<(f64, DVector<C64>)> = None;
    let mut attempts = 0;
    for idx in 0..cfg.max_restarts.max(1) {
        let start = if idx == 0 {
            omega0.clone()
        } else {
            complex_gaussian_vector(&mut restart_rng(cfg.seed, idx as u64), l)
        };
        let out = run_lm(&problem, start, cfg, tol_abs);
        attempts += 1;
        if out.converged {
            return Ok(out.x);
        }
        if best.as_ref().is_none_or(|(r, _)| out.residual_norm < *r) {
            best = Some((out.residual_norm, out.x));
        }
        if l == 0 {
            break; // nothing to vary; restarts would repeat the same point
        }
    }
    let (best_residual, _) = best.expect("at least one attempt ran");
    Err(Error::NoConvergence {
        best_residual,
        attempts,
        best: None,
    })
}

/// Scale ladder for multi-start points; solutions whose zeros sit far from
/// the origin are reachable only from starts of comparable magnitude.
const START_SCALES: [f64; 3] = [1.0, 8.0, 64.0];

/// Start for the idx-th restart: random points at the ladder scale, turned
/// into a consistent generating matrix and projected into the family. Starts
/// on (the projection of) the consistency variety spread across solution
/// basins far better than raw Gaussian parameter draws.
fn multi_start(param: &GenMatrixParam, seed: u64, idx: usize) -> DVector<C64> {
    let mut rng = restart_rng(seed, idx as u64);
    let scale = C64::new(START_SCALES[idx % START_SCALES.len()], 0.0);
    let basis = param.basis();
    let points: Vec<DVector<C64>> = (0..basis.r())
        .map(|_| complex_gaussian_vector(&mut rng, basis.n_vars()) * scale)
        .collect();
    match from_points(&points, basis).and_then(|g| param.project(&g)) {
        Ok(omega0) => omega0,
        Err(_) => complex_gaussian_vector(&mut rng, param.omega_len()) * scale,
    }
}

/// Multi-start search for many solutions: one damped least-squares run per
/// seeded start, keeping solutions whose induced zero sets are new at
/// `dedup_tol`. Returns the distinct list; deterministic given seed.
pub fn all_solve(
    param: &GenMatrixParam,
    ac: &AffineConstraints,
    cfg: &SolveConfig,
) -> Vec<DVector<C64>> {
    let problem = CommutatorProblem::new(param, ac);
    let tol_abs = cfg.residual_tol * (1.0 + fro_norm(param.base().data()));
    let l = param.omega_len();
    let mut kept: Vec<(DVector<C64>, Vec<DVector<C64>>)> = Vec::new();
    for idx in 0..cfg.max_restarts.max(1) {
        let start = if l == 0 {
            DVector::zeros(0)
        } else {
            multi_start(param, cfg.seed, idx)
        };
        let out = run_lm(&problem, start, cfg, tol_abs);
        if out.converged {
            let g = param.realize(&out.x).expect("ω length fixed");
            match cgt_zeros(&companion(&g), cfg.seed, DEFAULT_CLUSTER_TOL) {
                Ok(zs) => {
                    let expanded = zs.expanded();
                    if kept
                        .iter()
                        .all(|(_, e)| point_set_distance(e, &expanded) > cfg.dedup_tol)
                    {
                        kept.push((out.x, expanded));
                    }
                }
                Err(e) => log::warn!("zero extraction failed on a solution: {e}"),
            }
        }
        if l == 0 {
            break;
        }
    }
    kept.into_iter().map(|(x, _)| x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmat::{from_points, parameterize};
    use crate::linalg::standard_complex;
    use crate::symtensor::SymTensor;
    use crate::testutil::{gap2_cubic, small_cubic};

    fn cr(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn residual_is_exactly_quadratic() {
        let f = gap2_cubic();
        let param = parameterize(&f, 4, 1e-8).unwrap();
        let ac = random_affine(param.omega_len(), 2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let l = param.omega_len();
        let h = complex_gaussian_vector(&mut rng, l);
        let x0 = complex_gaussian_vector(&mut rng, l);
        let x1 = complex_gaussian_vector(&mut rng, l);
        let at =
            |base: &DVector<C64>, t: f64| residual_map(&param, &ac, &(base + &h * cr(t))).unwrap();
        // Second difference along h is independent of the base point.
        let d2_a = at(&x0, 2.0) - at(&x0, 1.0) * cr(2.0) + at(&x0, 0.0);
        let d2_b = at(&x1, 2.0) - at(&x1, 1.0) * cr(2.0) + at(&x1, 0.0);
        let scale = d2_a.norm() + 1.0;
        assert!((&d2_a - &d2_b).norm() <= 1e-10 * scale);
        // Third difference vanishes.
        let d3 = at(&x0, 3.0) - at(&x0, 2.0) * cr(3.0) + at(&x0, 1.0) * cr(3.0) - at(&x0, 0.0);
        assert!(d3.norm() <= 1e-9 * scale);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let f = gap2_cubic();
        let param = parameterize(&f, 4, 1e-8).unwrap();
        let ac = random_affine(param.omega_len(), 2, 17).unwrap();
        let problem = CommutatorProblem::new(&param, &ac);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = complex_gaussian_vector(&mut rng, param.omega_len());
        let jac = problem.jacobian(&x);
        let h = 1e-6;
        for k in 0..param.omega_len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += cr(h);
            xm[k] -= cr(h);
            let col = (problem.residual(&xp) - problem.residual(&xm)) / cr(2.0 * h);
            let diff = (jac.column(k) - &col).norm();
            assert!(
                diff <= 1e-6 * (1.0 + col.norm()),
                "column {} off by {}",
                k,
                diff
            );
        }
    }

    #[test]
    fn interpolated_parameter_solves_the_commutators() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts: Vec<DVector<C64>> = (0..4)
            .map(|_| complex_gaussian_vector(&mut rng, 2))
            .collect();
        let vectors: Vec<DVector<C64>> = pts
            .iter()
            .map(|v| {
                let w = standard_complex(&mut rng);
                DVector::from_vec(vec![w, w * v[0], w * v[1]])
            })
            .collect();
        let f = SymTensor::from_rank_one_sum(2, 3, &vectors).unwrap();
        let param = parameterize(&f, 4, 1e-8).unwrap();
        let g = from_points(&pts, param.basis()).unwrap();
        let omega = param.project(&g).unwrap();
        // The projection reproduces G itself (G lies in the affine family).
        let back = param.realize(&omega).unwrap();
        assert!(fro_norm(&(back.data() - g.data())) <= 1e-8 * (1.0 + fro_norm(g.data())));
        let resid =
            residual_map(&param, &AffineConstraints::empty(param.omega_len()), &omega).unwrap();
        assert!(resid.norm() <= 1e-10 * (1.0 + fro_norm(g.data())));
    }

    #[test]
    fn rigid_family_returns_empty_parameter() {
        let f = small_cubic();
        let param = parameterize(&f, 3, 1e-8).unwrap();
        assert_eq!(param.omega_len(), 0);
        let ac = AffineConstraints::empty(0);
        let resid = residual_map(&param, &ac, &DVector::zeros(0)).unwrap();
        assert!(resid.norm() <= 1e-10);
        let omega =
            numeric_solve(&param, &ac, &DVector::zeros(0), &SolveConfig::default()).unwrap();
        assert_eq!(omega.len(), 0);
        // d = 0 appends no affine block.
        assert_eq!(resid.len(), 9);
    }

    #[test]
    fn random_affine_properties() {
        let a = random_affine(8, 2, 99).unwrap();
        let b = random_affine(8, 2, 99).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert_eq!(a.rhs(), b.rhs());
        assert_eq!(a.len(), 2);
        // Constraint rows are linearly independent.
        let sv = a.matrix().clone().singular_values();
        assert!(sv.min() > 1e-3 * sv.max());
        assert!(random_affine(2, 3, 0).is_err());
        assert_eq!(random_affine(5, 0, 0).unwrap().len(), 0);
    }

    #[test]
    fn gap_example_converges_to_machine_precision() {
        let f = gap2_cubic();
        let param = parameterize(&f, 4, 1e-8).unwrap();
        let ac = random_affine(param.omega_len(), 2, 5).unwrap();
        let cfg = SolveConfig::default();
        let start = DVector::zeros(param.omega_len());
        let omega = numeric_solve(&param, &ac, &start, &cfg).unwrap();
        let resid = residual_map(&param, &ac, &omega).unwrap();
        assert!(resid.norm() <= 1e-10 * (1.0 + fro_norm(param.base().data())));
    }

    #[test]
    fn numeric_solve_is_deterministic() {
        let f = gap2_cubic();
        let param = parameterize(&f, 4, 1e-8).unwrap();
        let ac = random_affine(param.omega_len(), 2, 5).unwrap();
        let cfg = SolveConfig {
            seed: 31,
            ..SolveConfig::default()
        };
        let start = DVector::from_element(param.omega_len(), C64::new(0.3, -0.2));
        let a = numeric_solve(&param, &ac, &start, &cfg).unwrap();
        let b = numeric_solve(&param, &ac, &start, &cfg).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn contradictory_constraints_fail_with_diagnostics() {
        let f = gap2_cubic();
        let param = parameterize(&f, 4, 1e-8).unwrap();
        let l = param.omega_len();
        let mut a = DMatrix::zeros(2, l);
        a[(0, 0)] = C64::ONE;
        a[(1, 0)] = C64::ONE;
        let b = DVector::from_vec(vec![cr(0.0), cr(1.0)]);
        let ac = AffineConstraints::new(a, b).unwrap();
        let cfg = SolveConfig {
            max_restarts: 5,
            ..SolveConfig::default()
        };
        match numeric_solve(&param, &ac, &DVector::zeros(l), &cfg) {
            Err(Error::NoConvergence {
                best_residual,
                attempts,
                ..
            }) => {
                assert!(best_residual > 0.1);
                assert_eq!(attempts, 5);
            }
            other => panic!("expected NoConvergence, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn all_solve_on_rigid_family_returns_one_solution() {
        let f = small_cubic();
        let param = parameterize(&f, 3, 1e-8).unwrap();
        let sols = all_solve(
            &param,
            &AffineConstraints::empty(0),
            &SolveConfig::default(),
        );
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].len(), 0);
    }

    #[test]
    fn all_solve_finds_distinct_solutions() {
        let f = gap2_cubic();
        let param = parameterize(&f, 4, 1e-8).unwrap();
        let ac = random_affine(param.omega_len(), 2, 7).unwrap();
        let cfg = SolveConfig {
            seed: 11,
            max_restarts: 40,
            ..SolveConfig::default()
        };
        let sols = all_solve(&param, &ac, &cfg);
        assert!(sols.len() >= 2, "found {}", sols.len());
        // Dedup soundness: induced zero sets are pairwise separated.
        let zero_sets: Vec<Vec<DVector<C64>>> = sols
            .iter()
            .map(|w| {
                let g = param.realize(w).unwrap();
                cgt_zeros(&companion(&g), cfg.seed, DEFAULT_CLUSTER_TOL)
                    .unwrap()
                    .expanded()
            })
            .collect();
        for i in 0..zero_sets.len() {
            for j in (i + 1)..zero_sets.len() {
                assert!(point_set_distance(&zero_sets[i], &zero_sets[j]) > cfg.dedup_tol);
            }
        }
        // Every solution satisfies the full system.
        for w in &sols {
            let resid = residual_map(&param, &ac, w).unwrap();
            assert!(resid.norm() <= 1e-9 * (1.0 + fro_norm(param.base().data())));
        }
    }
}
