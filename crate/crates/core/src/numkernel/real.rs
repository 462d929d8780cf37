//! Small dense real matrices: the interior-point solver works on real
//! symmetric blocks and the Bloch-sphere geometry on 3x3 real maps.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense square real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        Self { n, data }
    }

    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |r, c| rows[r][c])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        assert_eq!(n, other.n);
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for (o, b) in row.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        Self { n, data: out }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|k| self.data[i * n + k] * v[k]).sum())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    /// self + a·other.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x + a * y)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// Frobenius inner product ⟨A, B⟩ = Tr(AᵀB).
    pub fn dot(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// (A + Aᵀ)/2.
    pub fn symmetrize(&self) -> Self {
        Self::from_fn(self.n, |r, c| 0.5 * (self[(r, c)] + self[(c, r)]))
    }

    /// Lower Cholesky factor L with A = L Lᵀ.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::numerical("matrix is not positive definite"));
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// Solve (L Lᵀ) x = b given the lower Cholesky factor.
    pub fn cholesky_solve(l: &Self, b: &[f64]) -> Vec<f64> {
        let n = l.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[(k, i)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        y
    }

    /// L⁻¹ for a lower-triangular L.
    pub fn lower_inverse(l: &Self) -> Self {
        let n = l.n;
        let mut inv = Self::zeros(n);
        for c in 0..n {
            for i in c..n {
                let mut s = if i == c { 1.0 } else { 0.0 };
                for k in c..i {
                    s -= l[(i, k)] * inv[(k, c)];
                }
                inv[(i, c)] = s / l[(i, i)];
            }
        }
        inv
    }

    /// Inverse of a symmetric positive definite matrix.
    pub fn spd_inverse(&self) -> Result<Self> {
        let l = self.cholesky()?;
        let li = Self::lower_inverse(&l);
        Ok(li.transpose().matmul(&li))
    }

    /// Symmetric eigendecomposition by cyclic Jacobi; values ascending,
    /// eigenvectors as columns.
    pub fn sym_eig(&self) -> (Vec<f64>, Self) {
        let n = self.n;
        let mut a = self.symmetrize();
        let mut v = Self::identity(n);
        let scale = a.frobenius();
        if scale > 0.0 {
            for _ in 0..60 {
                let off: f64 = (0..n)
                    .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                    .map(|(p, q)| a[(p, q)] * a[(p, q)])
                    .sum();
                if off.sqrt() <= 1e-17 * scale {
                    break;
                }
                for p in 0..n {
                    for q in p + 1..n {
                        let apq = a[(p, q)];
                        if apq.abs() <= 1e-300 || apq.abs() <= 1e-18 * scale {
                            continue;
                        }
                        let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                        let t = if theta == 0.0 {
                            1.0
                        } else {
                            theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                        };
                        let c = 1.0 / (t * t + 1.0).sqrt();
                        let s = t * c;
                        for k in 0..n {
                            let (akp, akq) = (a[(k, p)], a[(k, q)]);
                            a[(k, p)] = c * akp - s * akq;
                            a[(k, q)] = s * akp + c * akq;
                        }
                        for k in 0..n {
                            let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                            a[(p, k)] = c * apk - s * aqk;
                            a[(q, k)] = s * apk + c * aqk;
                        }
                        for k in 0..n {
                            let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                            v[(k, p)] = c * vkp - s * vkq;
                            v[(k, q)] = s * vkp + c * vkq;
                        }
                        a[(p, q)] = 0.0;
                        a[(q, p)] = 0.0;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
        let values = order.iter().map(|&i| a[(i, i)]).collect();
        let vectors = Self::from_fn(n, |r, c| v[(r, order[c])]);
        (values, vectors)
    }

    pub fn sym_eigvals(&self) -> Vec<f64> {
        self.sym_eig().0
    }

    /// Singular values of a general real matrix, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let ata = self.transpose().matmul(self);
        let mut v: Vec<f64> = ata.sym_eigvals().into_iter().map(|x| x.max(0.0).sqrt()).collect();
        v.reverse();
        v
    }

    /// Spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        self.singular_values()[0]
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap();
            if a[piv * n + k] == 0.0 {
                return 0.0;
            }
            if piv != k {
                for c in 0..n {
                    a.swap(k * n + c, piv * n + c);
                }
                det = -det;
            }
            let p = a[k * n + k];
            det *= p;
            for r in k + 1..n {
                let f = a[r * n + k] / p;
                for c in k..n {
                    a[r * n + c] -= f * a[k * n + c];
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.n + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_roundtrip() {
        let a = RealMatrix::from_rows([[4.0, 2.0, 0.6], [2.0, 5.0, 1.0], [0.6, 1.0, 3.0]]);
        let l = a.cholesky().unwrap();
        assert!(l.matmul(&l.transpose()).sub(&a).frobenius() < 1e-14);
        let inv = a.spd_inverse().unwrap();
        assert!(inv.matmul(&a).sub(&RealMatrix::identity(3)).frobenius() < 1e-14);
        let x = RealMatrix::cholesky_solve(&l, &[1.0, 2.0, 3.0]);
        let back = a.mul_vec(&x);
        assert!((back[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn indefinite_cholesky_fails() {
        let a = RealMatrix::from_rows([[1.0, 2.0], [2.0, 1.0]]);
        assert!(a.cholesky().is_err());
    }

    #[test]
    fn sym_eig_reconstructs() {
        let a = RealMatrix::from_rows([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]);
        let (vals, vecs) = a.sym_eig();
        let lam = RealMatrix::from_fn(3, |r, c| if r == c { vals[r] } else { 0.0 });
        let back = vecs.matmul(&lam).matmul(&vecs.transpose());
        assert!(back.sub(&a).frobenius() < 1e-13);
        assert!((vals[0] - (2.0 - 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn determinant() {
        let a = RealMatrix::from_rows([[0.0, 2.0], [3.0, 1.0]]);
        assert!((a.det() + 6.0).abs() < 1e-15);
    }
}
