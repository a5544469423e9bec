//! Hermitian Jacobi eigendecomposition and the unitary-matrix utilities
//! built on it: anti-Hermitian exponentials and eigenphase extraction.

use num_complex::Complex;

use super::{real, ComplexMatrix, Scalar};
use crate::error::{Error, Result};

/// Eigendecomposition `H = V·diag(λ)·V†` of a Hermitian matrix, with real
/// eigenvalues sorted ascending and `V` unitary.
pub fn eig_hermitian<T: Scalar>(h: &ComplexMatrix<T>) -> Result<(Vec<T>, ComplexMatrix<T>)> {
    if !h.is_square() {
        return Err(Error::Domain(
            "eigendecomposition of a non-square matrix".into(),
        ));
    }
    let n = h.rows();
    let scale = h.frobenius_norm();
    let herm_dev = (h - &h.adjoint()).frobenius_norm();
    if herm_dev > real::<T>(1e-10) * (T::one() + scale) {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian: deviation {:e}",
            herm_dev.to_f64().unwrap()
        )));
    }

    let mut a = h.clone();
    let mut v = ComplexMatrix::<T>::identity(n);
    let eps = T::epsilon();
    let max_sweeps = 10 * n * n + 30;

    for _sweep in 0..max_sweeps {
        let mut off = T::zero();
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off = off + a.get(p, q).norm_sqr();
                }
            }
        }
        if off.sqrt() <= eps * (T::one() + scale) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= eps * (T::one() + scale) {
                    continue;
                }
                // Phase the pivot real, then a real Jacobi rotation zeroes it.
                let w = apq.conj() / Complex::new(r, T::zero());
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let zeta = (aqq - app) / (real::<T>(2.0) * r);
                let t = if zeta >= T::zero() {
                    T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
                } else {
                    -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                apply_similarity(&mut a, p, q, c, s, w);
                update_columns(&mut v, p, q, c, s, w);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v.get(i, order[k]));
    Ok((values, vectors))
}

/// A ← R†·A·R with the (p,q) plane rotation R defined by (c, s, w).
fn apply_similarity<T: Scalar>(
    a: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
    c: T,
    s: T,
    w: Complex<T>,
) {
    update_columns(a, p, q, c, s, w);
    // Rows transform with conjugated coefficients.
    let n = a.cols();
    let cc = Complex::new(c, T::zero());
    let ss = Complex::new(s, T::zero());
    let wc = w.conj();
    for j in 0..n {
        let rp = a.get(p, j);
        let rq = a.get(q, j) * wc;
        a.set(p, j, cc * rp - ss * rq);
        a.set(q, j, ss * rp + cc * rq);
    }
}

/// col_p ← c·col_p − s·w·col_q, col_q ← s·col_p + c·w·col_q.
fn update_columns<T: Scalar>(
    a: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
    c: T,
    s: T,
    w: Complex<T>,
) {
    let cc = Complex::new(c, T::zero());
    let ss = Complex::new(s, T::zero());
    for i in 0..a.rows() {
        let ap = a.get(i, p);
        let aq = a.get(i, q) * w;
        a.set(i, p, cc * ap - ss * aq);
        a.set(i, q, ss * ap + cc * aq);
    }
}

/// `exp(A)` for anti-Hermitian `A`, via the Hermitian eigendecomposition of
/// `iA`. The result is unitary to machine precision.
pub fn expm_antihermitian<T: Scalar>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if !a.is_square() {
        return Err(Error::Domain("expm of a non-square matrix".into()));
    }
    let dev = a.antihermiticity_residual();
    if dev > real::<T>(1e-10) * (T::one() + a.frobenius_norm()) {
        return Err(Error::Domain(format!(
            "matrix is not anti-Hermitian: ‖A + A†‖_F = {:e}",
            dev.to_f64().unwrap()
        )));
    }
    let i_unit = Complex::new(T::zero(), T::one());
    let h = a.scale(i_unit); // iA is Hermitian
    let (lambda, v) = eig_hermitian(&h)?;
    // A = -i (iA)  =>  exp(A) = V diag(e^{-i λ}) V†
    let n = a.rows();
    let d = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new(lambda[i].cos(), -lambda[i].sin())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    Ok(&(&v * &d) * &v.adjoint())
}

/// Eigenphases θ_j ∈ (−π, π] of a unitary matrix, sorted ascending.
///
/// A unitary is normal, so its Hermitian and skew parts commute; a generic
/// real combination of them is diagonalized instead, and each eigenvector's
/// Rayleigh quotient recovers the unit-modulus eigenvalue. Degenerate
/// combinations are detected by residual and retried with a rotated mix.
pub fn eigenphases<T: Scalar>(u: &ComplexMatrix<T>) -> Result<Vec<T>> {
    let tol = real::<T>(1e-8);
    if !u.is_square() {
        return Err(Error::Domain("eigenphases of a non-square matrix".into()));
    }
    let res = u.unitarity_residual();
    if res > tol {
        return Err(Error::Domain(format!(
            "matrix is not unitary within tolerance: residual {:e}",
            res.to_f64().unwrap()
        )));
    }
    let n = u.rows();
    let ud = u.adjoint();
    let half = Complex::new(real::<T>(0.5), T::zero());
    let minus_half_i = Complex::new(T::zero(), -real::<T>(0.5));
    let herm = (u + &ud).scale(half);
    let skew = (u - &ud).scale(minus_half_i);

    let mut last_err: Option<Error> = None;
    for k in 0..8 {
        let angle = real::<T>(1.0 + 0.7 * k as f64);
        let combo = &herm.scale_real(angle.cos()) + &skew.scale_real(angle.sin());
        let (_, v) = eig_hermitian(&combo)?;
        if let Some(phases) = phases_from_basis(u, &v, n) {
            return Ok(phases);
        }
        last_err = Some(Error::NumericalFailure(
            "degenerate Hermitian combination while extracting eigenphases".into(),
        ));
    }
    Err(last_err.unwrap())
}

fn phases_from_basis<T: Scalar>(
    u: &ComplexMatrix<T>,
    v: &ComplexMatrix<T>,
    n: usize,
) -> Option<Vec<T>> {
    let accept = real::<T>(1e-6);
    let mut phases = Vec::with_capacity(n);
    for j in 0..n {
        let col = v.column(j);
        let uv = u.matvec(&col);
        let mut lambda = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            lambda = lambda + col[i].conj() * uv[i];
        }
        let mut residual = T::zero();
        for i in 0..n {
            residual = residual + (uv[i] - lambda * col[i]).norm_sqr();
        }
        if residual.sqrt() > accept {
            return None;
        }
        let mut theta = lambda.im.atan2(lambda.re);
        if theta <= -T::from_f64(std::f64::consts::PI).unwrap() {
            theta = T::from_f64(std::f64::consts::PI).unwrap();
        }
        phases.push(theta);
    }
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some(phases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn hermitian_eigen_roundtrip() {
        let h = M::from_rows(&[
            vec![c(2.0, 0.0), c(0.3, -0.7), c(0.0, 0.2)],
            vec![c(0.3, 0.7), c(-1.0, 0.0), c(0.5, 0.0)],
            vec![c(0.0, -0.2), c(0.5, 0.0), c(0.4, 0.0)],
        ])
        .unwrap();
        let (vals, vecs) = eig_hermitian(&h).unwrap();
        assert!(vecs.unitarity_residual() < 1e-12);
        let lam = M::diagonal(&vals);
        let back = &(&vecs * &lam) * &vecs.adjoint();
        assert!((&back - &h).frobenius_norm() < 1e-12);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = M::zeros(3, 3);
        let e = expm_antihermitian(&z).unwrap();
        assert!((&e - &M::identity(3)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn expm_diagonal_phases() {
        let a = M::from_rows(&[
            vec![c(0.0, PI / 2.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, -PI / 2.0)],
        ])
        .unwrap();
        let e = expm_antihermitian(&a).unwrap();
        let expect = M::from_rows(&[
            vec![c(0.0, 1.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, -1.0)],
        ])
        .unwrap();
        assert!((&e - &expect).frobenius_norm() < 1e-13);
    }

    #[test]
    fn expm_rejects_non_antihermitian() {
        let a = M::identity(2);
        assert!(expm_antihermitian(&a).is_err());
    }

    #[test]
    fn eigenphases_of_identity() {
        let phases = eigenphases(&M::identity(2)).unwrap();
        assert!(phases.iter().all(|p| p.abs() < 1e-12));
    }

    #[test]
    fn eigenphases_of_diag_i_minus_i() {
        let u = M::from_rows(&[
            vec![c(0.0, 1.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, -1.0)],
        ])
        .unwrap();
        let phases = eigenphases(&u).unwrap();
        assert!((phases[0] + PI / 2.0).abs() < 1e-12);
        assert!((phases[1] - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigenphases_reject_non_unitary() {
        let m = M::diagonal(&[2.0, 1.0]);
        assert!(eigenphases(&m).is_err());
    }

    #[test]
    fn reference_rotation_eigenphases() {
        // exp(-2π A_φ) with A_φ = [[0, -0.76484],[0.76484, 0]]
        // has eigenphases ±1.47754 after wrapping into (−π, π].
        let k = 0.76484;
        let a = M::from_rows(&[
            vec![c(0.0, 0.0), c(2.0 * PI * k, 0.0)],
            vec![c(-2.0 * PI * k, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let u = expm_antihermitian(&a).unwrap();
        assert!(u.unitarity_residual() < 1e-12);
        let phases = eigenphases(&u).unwrap();
        assert!((phases[0] + 1.47754).abs() < 1e-4, "{phases:?}");
        assert!((phases[1] - 1.47754).abs() < 1e-4, "{phases:?}");
    }
}
