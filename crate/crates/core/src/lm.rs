//! Damped least-squares (Levenberg–Marquardt) over complex unknowns.
//!
//! The residuals used in this crate are holomorphic in the unknowns, so the
//! real-split normal equations are exactly the real representation of the
//! complex ones; iterating directly in complex arithmetic with J*J + λI is
//! therefore equivalent to the standard real formulation and halves the
//! bookkeeping.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::C64;

pub(crate) trait LeastSquares {
    fn residual(&self, x: &DVector<C64>) -> DVector<C64>;
    fn jacobian(&self, x: &DVector<C64>) -> DMatrix<C64>;
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct LmOptions {
    pub max_iters: usize,
    /// Absolute residual-norm target (callers fold in their relative scale).
    pub tol: f64,
    pub damping_init: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct LmOutcome {
    pub x: DVector<C64>,
    pub residual_norm: f64,
    pub converged: bool,
}

const DAMP_MAX: f64 = 1e12;
const DAMP_MIN: f64 = 1e-14;

/// Solves (H + λI)δ = g for Hermitian positive semidefinite H.
fn damped_solve(h: &DMatrix<C64>, g: &DVector<C64>, lambda: f64) -> Option<DVector<C64>> {
    let k = h.nrows();
    let mut hh = h.clone();
    for i in 0..k {
        hh[(i, i)] += C64::new(lambda, 0.0);
    }
    if let Some(chol) = Cholesky::new(hh.clone()) {
        return Some(chol.solve(g));
    }
    hh.lu().solve(g)
}

pub(crate) fn minimize<P: LeastSquares>(
    problem: &P,
    x0: DVector<C64>,
    opts: LmOptions,
) -> LmOutcome {
    let mut x = x0;
    let mut f = problem.residual(&x);
    let mut fnorm = f.norm();
    if x.is_empty() || fnorm <= opts.tol {
        return LmOutcome {
            converged: fnorm <= opts.tol,
            x,
            residual_norm: fnorm,
        };
    }
    let mut lambda = opts.damping_init;
    for _ in 0..opts.max_iters {
        let j = problem.jacobian(&x);
        let h = j.adjoint() * &j;
        let g = j.adjoint() * &f;
        if g.norm() <= 1e-16 * (1.0 + fnorm) {
            break; // stationary point
        }
        // Retry with stronger damping until the step reduces the residual.
        let mut accepted = false;
        while lambda <= DAMP_MAX {
            let Some(step) = damped_solve(&h, &g, lambda) else {
                lambda *= 10.0;
                continue;
            };
            let cand = &x - &step;
            let fc = problem.residual(&cand);
            let fcnorm = fc.norm();
            if fcnorm < fnorm {
                x = cand;
                f = fc;
                fnorm = fcnorm;
                lambda = (lambda / 10.0).max(DAMP_MIN);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            break; // damping exhausted: stalled
        }
        if fnorm <= opts.tol {
            break;
        }
    }
    LmOutcome {
        converged: fnorm <= opts.tol,
        x,
        residual_norm: fnorm,
    }
}
