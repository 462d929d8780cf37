//! Dense complex linear algebra: matrix exponential, Hermitian
//! eigendecomposition, singular values and the norms built on them.

mod eig;
mod expm;
mod matrix;
mod real;
mod svd;

pub(crate) use eig::hermitian_eigvals_unchecked;
pub use eig::{hermitian_eig, psd_sqrt, Spectrum};
pub use expm::{expm, lu_solve};
pub use matrix::{pauli, ComplexMatrix};
pub(crate) use matrix::{I, ONE, ZERO};
pub use real::RealMatrix;
pub use svd::singular_values;

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::random::{random_hermitian, random_matrix, random_unitary, rng};

    #[test]
    fn random_hermitian_reconstruction() {
        let mut r = rng(7);
        let m = random_hermitian(&mut r, 8, 1.0);
        let s = hermitian_eig(&m).unwrap();
        let resid = (&s.reconstruct() - &m).max_abs();
        assert!(resid <= 1e-10 * m.max_abs(), "residual {resid:e}");
        let vtv = s.vectors.adjoint().matmul(&s.vectors);
        assert!((&vtv - &ComplexMatrix::identity(8)).max_abs() < 1e-10);
        assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn exp_of_i_hermitian_is_unitary(seed in any::<u64>(), d in 2usize..7) {
            let h = random_hermitian(&mut rng(seed), d, 2.0);
            let u = expm(&h.scale(I)).unwrap();
            prop_assert!(u.unitarity_defect() < 1e-10);
        }

        #[test]
        fn spectral_norm_is_submultiplicative(seed in any::<u64>(), d in 2usize..7) {
            let mut r = rng(seed);
            let a = random_matrix(&mut r, d, 1.0);
            let b = random_matrix(&mut r, d, 1.0);
            let lhs = a.matmul(&b).spectral_norm();
            prop_assert!(lhs <= a.spectral_norm() * b.spectral_norm() * (1.0 + 1e-12));
        }

        #[test]
        fn singular_values_unitarily_invariant(seed in any::<u64>(), d in 2usize..7) {
            let mut r = rng(seed);
            let m = random_matrix(&mut r, d, 1.0);
            let u = random_unitary(&mut r, d);
            let v = random_unitary(&mut r, d);
            let a = singular_values(&m).unwrap();
            let b = singular_values(&u.matmul(&m).matmul(&v)).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn singular_values_match_gram_eigenvalues(seed in any::<u64>(), d in 2usize..6) {
            let m = random_matrix(&mut rng(seed), d, 1.0);
            let sv = singular_values(&m).unwrap();
            let gram = hermitian_eig(&m.adjoint().matmul(&m)).unwrap();
            for (s, l) in sv.iter().zip(gram.values.iter().rev()) {
                prop_assert!((s * s - l).abs() < 1e-10);
            }
        }
    }
}
