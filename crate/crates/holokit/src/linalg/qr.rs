//! Thin QR orthonormalization with the positive-diagonal gauge fix, and
//! Haar-distributed random unitaries built on it.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{real, ComplexMatrix, Scalar};
use crate::error::{Error, Result};

/// Orthonormalizes the columns of a full-column-rank `d×m` matrix by
/// modified Gram-Schmidt with re-orthogonalization.
///
/// The R-diagonal is real and positive by construction, so the output frame
/// is a deterministic gauge-fixed representative of the column span.
pub fn orthonormalize<T: Scalar>(columns: &ComplexMatrix<T>, tol: T) -> Result<ComplexMatrix<T>> {
    let d = columns.rows();
    let m = columns.cols();
    if d < m || m == 0 {
        return Err(Error::Domain(format!(
            "orthonormalize requires d >= m >= 1, got {d}x{m}"
        )));
    }
    let mut q: Vec<Vec<Complex<T>>> = Vec::with_capacity(m);
    for j in 0..m {
        let mut v = columns.column(j);
        let original_norm = norm(&v);
        for _pass in 0..2 {
            for prev in q.iter() {
                let proj = inner(prev, &v);
                for i in 0..d {
                    v[i] = v[i] - prev[i] * proj;
                }
            }
        }
        let n = norm(&v);
        if n <= tol * (T::one() + original_norm) {
            return Err(Error::RankDeficient { index: Some(j) });
        }
        for z in v.iter_mut() {
            *z = *z / Complex::new(n, T::zero());
        }
        q.push(v);
    }
    Ok(ComplexMatrix::from_fn(d, m, |i, j| q[j][i]))
}

/// Haar-distributed random unitary: QR of a complex Gaussian matrix with the
/// positive-diagonal phase convention.
pub fn haar_unitary<T: Scalar>(m: usize, rng: &mut impl Rng) -> ComplexMatrix<T> {
    assert!(m >= 1, "haar_unitary requires m >= 1");
    let g = ComplexMatrix::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(real::<T>(re), real::<T>(im))
    });
    orthonormalize(&g, real::<T>(1e-12))
        .expect("a complex Gaussian matrix is full rank almost surely")
}

fn inner<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    let mut s = Complex::new(T::zero(), T::zero());
    for i in 0..a.len() {
        s = s + a[i].conj() * b[i];
    }
    s
}

fn norm<T: Scalar>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn already_orthonormal_input_is_fixed_point() {
        let q = M::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let out = orthonormalize(&q, 1e-12).unwrap();
        assert!((&out - &q).frobenius_norm() < 1e-14);
    }

    #[test]
    fn scaled_single_column_normalized() {
        let v = M::from_rows(&[vec![c(2.0, 0.0)], vec![c(0.0, 0.0)]]).unwrap();
        let out = orthonormalize(&v, 1e-12).unwrap();
        assert!((out.get(0, 0) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn projector_of_span_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = M::from_fn(3, 2, |_, _| {
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let q = orthonormalize(&a, 1e-12).unwrap();
        assert!(q.unitarity_residual() < 1e-13);
        // Projector oracle via the normal equations: P = A (A†A)^{-1} A†.
        let g = a.adjoint().matmul(&a);
        let ginv = invert_2x2(&g);
        let p_oracle = &(&a * &ginv) * &a.adjoint();
        let p_q = &q * &q.adjoint();
        assert!((&p_oracle - &p_q).frobenius_norm() < 1e-10);
    }

    fn invert_2x2(g: &M) -> M {
        let det = g.get(0, 0) * g.get(1, 1) - g.get(0, 1) * g.get(1, 0);
        M::from_rows(&[
            vec![g.get(1, 1) / det, -g.get(0, 1) / det],
            vec![-g.get(1, 0) / det, g.get(0, 0) / det],
        ])
        .unwrap()
    }

    #[test]
    fn rank_deficient_rejected() {
        let a = M::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(1.0, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            orthonormalize(&a, 1e-12),
            Err(Error::RankDeficient { index: Some(1) })
        ));
    }

    #[test]
    fn haar_unitary_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 1..=4 {
            let q: M = haar_unitary(m, &mut rng);
            assert!(q.unitarity_residual() < 1e-12);
        }
    }

    #[test]
    fn haar_scalar_is_unit_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q: M = haar_unitary(1, &mut rng);
        assert!((q.get(0, 0).norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn haar_trace_moment_matches_monte_carlo_oracle() {
        // E[|Tr Q|^2] = 1 for Haar U(m); checked by Monte Carlo at m = 2.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples = 20_000;
        let mut acc = 0.0;
        for _ in 0..samples {
            let q: M = haar_unitary(2, &mut rng);
            acc += q.trace().norm_sqr();
        }
        let mean = acc / samples as f64;
        assert!((mean - 1.0).abs() < 0.05, "mean |Tr Q|^2 = {mean}");
    }
}
