//! One-sided Jacobi SVD for small dense complex matrices.
//!
//! Chosen for accuracy at tiny sizes over speed: column pairs are rotated
//! until mutually orthogonal, giving singular values accurate to machine
//! precision for the well-conditioned overlaps this library handles.

use num_complex::Complex;

use super::{real, ComplexMatrix, Scalar, SvdResult};
use crate::error::{Error, Result};

/// Full SVD `M = L·diag(σ)·R†`, σ descending.
pub fn svd<T: Scalar>(m: &ComplexMatrix<T>) -> Result<SvdResult<T>> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::Domain("SVD of an empty matrix".into()));
    }
    if m.rows() >= m.cols() {
        svd_tall(m)
    } else {
        let t = svd_tall(&m.adjoint())?;
        Ok(SvdResult {
            left: t.right,
            singular_values: t.singular_values,
            right: t.left,
        })
    }
}

/// One-sided Jacobi on an `d×n` matrix with `d ≥ n`.
fn svd_tall<T: Scalar>(m: &ComplexMatrix<T>) -> Result<SvdResult<T>> {
    let d = m.rows();
    let n = m.cols();
    let mut a = m.clone();
    let mut v = ComplexMatrix::<T>::identity(n);

    let eps = T::epsilon();
    // Sweep cap per the small-matrix accuracy-first design.
    let max_sweeps = 10 * d.max(n) * d.max(n);

    for _sweep in 0..max_sweeps {
        let mut converged = true;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = column_moments(&a, p, q);
                let g = gamma.norm();
                // Rounding noise in the rotated columns floors the cross
                // moment at a few ulps of √(αβ); demanding less stalls the
                // sweep on ill-conditioned pairs.
                let thresh = real::<T>(8.0) * eps * (alpha * beta).sqrt() + T::min_positive_value();
                if g <= thresh {
                    continue;
                }
                converged = false;
                // Phase the q column so the cross moment becomes real,
                // then apply a real Jacobi rotation.
                let w = gamma.conj() / Complex::new(g, T::zero());
                let zeta = (beta - alpha) / (real::<T>(2.0) * g);
                let t = if zeta >= T::zero() {
                    T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
                } else {
                    -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut a, p, q, c, s, w);
                rotate_columns(&mut v, p, q, c, s, w);
            }
        }
        if converged {
            return finish(a, v, d, n);
        }
    }
    Err(Error::NumericalFailure(format!(
        "one-sided Jacobi SVD did not converge within {max_sweeps} sweeps"
    )))
}

/// (‖a_p‖², ‖a_q‖², a_p†·a_q)
fn column_moments<T: Scalar>(a: &ComplexMatrix<T>, p: usize, q: usize) -> (T, T, Complex<T>) {
    let mut alpha = T::zero();
    let mut beta = T::zero();
    let mut gamma = Complex::new(T::zero(), T::zero());
    for i in 0..a.rows() {
        let ap = a.get(i, p);
        let aq = a.get(i, q);
        alpha = alpha + ap.norm_sqr();
        beta = beta + aq.norm_sqr();
        gamma = gamma + ap.conj() * aq;
    }
    (alpha, beta, gamma)
}

/// col_p ← c·col_p − s·w·col_q, col_q ← s·col_p + c·w·col_q.
fn rotate_columns<T: Scalar>(
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

fn finish<T: Scalar>(
    a: ComplexMatrix<T>,
    v: ComplexMatrix<T>,
    d: usize,
    n: usize,
) -> Result<SvdResult<T>> {
    // Column norms are the singular values.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<T> = (0..n)
        .map(|j| {
            let mut s = T::zero();
            for i in 0..d {
                s = s + a.get(i, j).norm_sqr();
            }
            s.sqrt()
        })
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let singular_values: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let sigma_max = singular_values[0];
    let tiny = sigma_max * T::epsilon() * real::<T>(d as f64) + T::min_positive_value();

    let right = ComplexMatrix::from_fn(n, n, |i, k| v.get(i, order[k]));

    // Normalized columns of the rotated matrix form the thin left factor;
    // null directions and the tall-case complement are filled by
    // Gram-Schmidt against the standard basis.
    let mut left_cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(d);
    for (k, &j) in order.iter().enumerate() {
        if singular_values[k] > tiny {
            let col: Vec<Complex<T>> = (0..d)
                .map(|i| a.get(i, j) / Complex::new(singular_values[k], T::zero()))
                .collect();
            left_cols.push(col);
        }
    }
    complete_basis(&mut left_cols, d)?;
    let left = ComplexMatrix::from_fn(d, d, |i, j| left_cols[j][i]);

    Ok(SvdResult {
        left,
        singular_values,
        right,
    })
}

/// Extends a set of orthonormal columns to a full orthonormal basis of C^d.
fn complete_basis<T: Scalar>(cols: &mut Vec<Vec<Complex<T>>>, d: usize) -> Result<()> {
    let mut candidate = 0usize;
    while cols.len() < d {
        if candidate >= d {
            return Err(Error::NumericalFailure(
                "failed to complete an orthonormal basis".into(),
            ));
        }
        let mut vec: Vec<Complex<T>> = (0..d)
            .map(|i| {
                if i == candidate {
                    Complex::new(T::one(), T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();
        candidate += 1;
        for _pass in 0..2 {
            for q in cols.iter() {
                let mut proj = Complex::new(T::zero(), T::zero());
                for i in 0..d {
                    proj = proj + q[i].conj() * vec[i];
                }
                for i in 0..d {
                    vec[i] = vec[i] - q[i] * proj;
                }
            }
        }
        let norm = vec.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
        if norm > real::<T>(0.1) {
            for z in vec.iter_mut() {
                *z = *z / Complex::new(norm, T::zero());
            }
            cols.push(vec);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn diagonal_positive_matrix() {
        let m = M::diagonal(&[3.0, 1.0]);
        let s = svd(&m).unwrap();
        assert!((s.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 1.0).abs() < 1e-14);
        assert!((&s.left - &M::identity(2)).frobenius_norm() < 1e-13);
        assert!((&s.right - &M::identity(2)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn antidiagonal_by_hand() {
        // M†M = diag(0.25, 4) so σ = (2, 0.5).
        let m = M::from_rows(&[
            vec![c(0.0, 0.0), c(2.0, 0.0)],
            vec![c(0.5, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let s = svd(&m).unwrap();
        assert!((s.singular_values[0] - 2.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 0.5).abs() < 1e-14);
        assert!((&s.reconstruct() - &m).frobenius_norm() < 1e-13);
    }

    #[test]
    fn unitary_input_has_unit_singular_values() {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let q = M::from_rows(&[
            vec![c(inv_sqrt2, 0.0), c(0.0, inv_sqrt2)],
            vec![c(0.0, inv_sqrt2), c(inv_sqrt2, 0.0)],
        ])
        .unwrap();
        let s = svd(&q).unwrap();
        for sv in &s.singular_values {
            assert!((sv - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn tall_matrix_full_factors() {
        let m = M::from_rows(&[
            vec![c(1.0, 0.2), c(0.1, -0.4)],
            vec![c(0.0, 1.0), c(2.0, 0.0)],
            vec![c(-0.3, 0.0), c(0.5, 0.5)],
        ])
        .unwrap();
        let s = svd(&m).unwrap();
        assert_eq!(s.left.rows(), 3);
        assert_eq!(s.left.cols(), 3);
        assert_eq!(s.right.rows(), 2);
        assert!(s.left.unitarity_residual() < 1e-12);
        assert!(s.right.unitarity_residual() < 1e-12);
        assert!((&s.reconstruct() - &m).frobenius_norm() < 1e-12);
    }

    #[test]
    fn wide_matrix_roundtrip() {
        let m = M::from_rows(&[vec![c(1.0, 0.0), c(0.5, 0.5), c(-0.2, 1.0)]]).unwrap();
        let s = svd(&m).unwrap();
        assert!((&s.reconstruct() - &m).frobenius_norm() < 1e-13);
    }

    #[test]
    fn rank_deficient_still_produces_unitary_factors() {
        let m = M::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        let s = svd(&m).unwrap();
        assert!(s.left.unitarity_residual() < 1e-12);
        assert!(s.right.unitarity_residual() < 1e-12);
        assert!(s.singular_values[1].abs() < 1e-12);
        assert!((&s.reconstruct() - &m).frobenius_norm() < 1e-12);
    }
}
