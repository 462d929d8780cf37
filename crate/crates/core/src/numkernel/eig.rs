use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tolerances;

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    /// V Λ V†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| x)
    }

    /// V f(Λ) V†.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, |r, c| {
            (0..n).map(|k| v[(r, k)] * fv[k] * v[(c, k)].conj()).sum()
        })
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.values.len()).map(|r| self.vectors[(r, k)]).collect()
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_finite() {
        return Err(Error::input("hermitian_eig: matrix has non-finite entries"));
    }
    m.check_hermitian(tolerances::HERMITIAN_INPUT)?;
    Ok(jacobi(m.hermitian_part()))
}

/// Eigenvalues only, for callers that have already symmetrized their input.
pub(crate) fn hermitian_eigvals_unchecked(m: &ComplexMatrix) -> Vec<f64> {
    jacobi(m.hermitian_part()).values
}

fn jacobi(mut a: ComplexMatrix) -> Spectrum {
    let n = a.dim();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius();
    if scale == 0.0 {
        return Spectrum {
            values: vec![0.0; n],
            vectors: v,
        };
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q, scale);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Spectrum { values, vectors }
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let n = a.dim();
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= 1e-300 || mag <= 1e-18 * scale {
        return;
    }
    // Rotate the phase of index q so that a[p,q] becomes real and positive.
    let ph = apq / mag;
    let phc = ph.conj();
    for k in 0..n {
        a[(k, q)] *= phc;
    }
    for k in 0..n {
        a[(q, k)] *= ph;
    }
    for k in 0..n {
        v[(k, q)] *= phc;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * c - akq * s;
        a[(k, q)] = akp * s + akq * c;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = apk * c - aqk * s;
        a[(q, k)] = apk * s + aqk * c;
    }
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * c - vkq * s;
        v[(k, q)] = vkp * s + vkq * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Principal square root of a positive semidefinite Hermitian matrix; negative
/// eigenvalues are clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m)?.apply(|x| x.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::numkernel::matrix::pauli;

    #[test]
    fn sigma_z_values() {
        let s = hermitian_eig(&pauli::z()).unwrap();
        assert_eq!(s.values, vec![-1.0, 1.0]);
    }

    #[test]
    fn sigma_x_vectors() {
        let s = hermitian_eig(&pauli::x()).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-15);
        assert!((s.values[1] - 1.0).abs() < 1e-15);
        // (1, -1)/√2 for -1 and (1, 1)/√2 for +1, up to a global phase.
        let lo = s.vector(0);
        let hi = s.vector(1);
        let ip_lo = (lo[0] * FRAC_1_SQRT_2 - lo[1] * FRAC_1_SQRT_2).norm();
        let ip_hi = (hi[0] * FRAC_1_SQRT_2 + hi[1] * FRAC_1_SQRT_2).norm();
        assert!((ip_lo - 1.0).abs() < 1e-14);
        assert!((ip_hi - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        assert!(matches!(hermitian_eig(&pauli::minus()), Err(Error::Input(_))));
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let m = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let r = psd_sqrt(&m).unwrap();
        assert!((&r.matmul(&r) - &m).max_abs() < 1e-14);
    }
}
