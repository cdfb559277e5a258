//! Dense complex linear-algebra helpers shared across the crate.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::C64;

/// z^k with the convention z^0 = 1 (also for z = 0).
pub(crate) fn cpow(z: C64, k: u32) -> C64 {
    let mut acc = C64::ONE;
    for _ in 0..k {
        acc *= z;
    }
    acc
}

/// Complex standard normal: independent N(0,1) real and imaginary parts.
pub(crate) fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub(crate) fn complex_gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> DVector<C64> {
    DVector::from_fn(len, |_, _| standard_complex(rng))
}

/// Thin SVD wrapper; panics only on nalgebra's internal failure.
fn svd(a: &DMatrix<C64>) -> nalgebra::linalg::SVD<C64, nalgebra::Dyn, nalgebra::Dyn> {
    a.clone().svd(true, true)
}

/// Minimum-norm least-squares solution of A x = b together with the numerical
/// rank used and the residual ‖A x − b‖.
pub(crate) fn lstsq_min_norm(
    a: &DMatrix<C64>,
    b: &DVector<C64>,
    tol: f64,
) -> (DVector<C64>, usize, f64) {
    let dec = svd(a);
    let u = dec.u.as_ref().expect("svd with u");
    let v_t = dec.v_t.as_ref().expect("svd with v_t");
    let sv = dec.singular_values.as_slice();
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let thresh = tol * smax;
    let mut x = DVector::<C64>::zeros(a.ncols());
    let mut rank = 0;
    for (i, &s) in sv.iter().enumerate() {
        if smax == 0.0 || s <= thresh {
            continue;
        }
        rank += 1;
        // x += v_i · (u_i^H b) / s  with v_i = conj(row i of v_t).
        let ub: C64 = u
            .column(i)
            .iter()
            .zip(b.iter())
            .map(|(ue, be)| ue.conj() * be)
            .sum();
        let coef = ub / C64::new(s, 0.0);
        for j in 0..a.ncols() {
            x[j] += v_t[(i, j)].conj() * coef;
        }
    }
    let residual = (a * &x - b).norm();
    (x, rank, residual)
}

/// Orthonormal basis of the numerical kernel of A (right singular vectors with
/// σ ≤ tol·σ_max, plus the directions beyond the thin rank), as matrix columns.
///
/// The input is padded with zero rows when wide so the full right factor is
/// available.
pub(crate) fn kernel_basis(a: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    let (rows, cols) = a.shape();
    let padded;
    let work = if rows < cols {
        padded = {
            let mut p = DMatrix::<C64>::zeros(cols, cols);
            p.view_mut((0, 0), (rows, cols)).copy_from(a);
            p
        };
        &padded
    } else {
        a
    };
    let dec = svd(work);
    let v_t = dec.v_t.as_ref().expect("svd with v_t");
    let sv = dec.singular_values.as_slice();
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let thresh = tol * smax;
    let kernel_rows: Vec<usize> = (0..v_t.nrows())
        .filter(|&i| smax == 0.0 || sv[i] <= thresh)
        .collect();
    let mut basis = DMatrix::<C64>::zeros(cols, kernel_rows.len());
    for (k, &i) in kernel_rows.iter().enumerate() {
        for j in 0..cols {
            basis[(j, k)] = v_t[(i, j)].conj();
        }
    }
    basis
}

/// Least-squares solve A X = B column by column through the pseudo-inverse.
/// Also returns σ_min/σ_max of A for conditioning checks.
pub(crate) fn lstsq_matrix(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) -> (DMatrix<C64>, f64) {
    let dec = svd(a);
    let u = dec.u.as_ref().expect("svd with u");
    let v_t = dec.v_t.as_ref().expect("svd with v_t");
    let sv = dec.singular_values.as_slice();
    let smax = sv.iter().cloned().fold(0.0f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond_ratio = if smax == 0.0 { 0.0 } else { smin / smax };
    let thresh = tol * smax;
    let mut x = DMatrix::<C64>::zeros(a.ncols(), b.ncols());
    for (i, &s) in sv.iter().enumerate() {
        if smax == 0.0 || s <= thresh {
            continue;
        }
        // X += v_i (u_i^H B) / s
        let uib = u.column(i).adjoint() * b;
        for col in 0..b.ncols() {
            let coef = uib[(0, col)] / C64::new(s, 0.0);
            for j in 0..a.ncols() {
                x[(j, col)] += v_t[(i, j)].conj() * coef;
            }
        }
    }
    (x, cond_ratio)
}

/// Frobenius norm of a complex matrix.
pub(crate) fn fro_norm(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
