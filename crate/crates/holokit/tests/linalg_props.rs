//! Randomized linear-algebra invariants, driven by proptest.

use num_complex::Complex;
use proptest::prelude::*;

use holokit::linalg::{eig_hermitian, expm_antihermitian, polar, svd};
use holokit::Matrix64;

fn matrix_strategy(dim: usize) -> impl Strategy<Value = Matrix64> {
    proptest::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex::new(re, im)),
        dim * dim,
    )
    .prop_map(move |data| Matrix64::from_entries(dim, dim, data).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_reconstructs_and_orders(m in matrix_strategy(3)) {
        let s = svd(&m).unwrap();
        prop_assert!((&s.reconstruct() - &m).frobenius_norm() < 1e-11);
        prop_assert!(s.left.unitarity_residual() < 1e-12);
        prop_assert!(s.right.unitarity_residual() < 1e-12);
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.singular_values.iter().all(|&sv| sv >= 0.0));
    }

    #[test]
    fn polar_factors_are_unitary_and_positive(m in matrix_strategy(2)) {
        if let Ok(p) = polar(&m, 1e-12) {
            prop_assert!(p.unitary.unitarity_residual() < 1e-12);
            // H = W†M is Hermitian positive semidefinite.
            let h = &p.positive;
            prop_assert!((h - &h.adjoint()).frobenius_norm() < 1e-12);
            prop_assert!((&p.unitary.matmul(h) - &m).frobenius_norm() < 1e-11);
        }
    }

    #[test]
    fn hermitian_eig_reconstructs(m in matrix_strategy(3)) {
        let h = &(&m + &m.adjoint()).scale_real(0.5);
        let (values, vectors) = eig_hermitian(h).unwrap();
        prop_assert!(vectors.unitarity_residual() < 1e-12);
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        let d = Matrix64::diagonal(&values);
        let back = vectors.matmul(&d).matmul(&vectors.adjoint());
        prop_assert!((&back - h).frobenius_norm() < 1e-11);
    }

    #[test]
    fn expm_of_antihermitian_is_unitary(m in matrix_strategy(3)) {
        let a = &(&m - &m.adjoint()).scale_real(0.5);
        let u = expm_antihermitian(a).unwrap();
        prop_assert!(u.unitarity_residual() < 1e-12);
        // exp(A)·exp(−A) = I.
        let inv = expm_antihermitian(&a.scale_real(-1.0)).unwrap();
        prop_assert!((&u.matmul(&inv) - &Matrix64::identity(3)).frobenius_norm() < 1e-11);
    }
}
