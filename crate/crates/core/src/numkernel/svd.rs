use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Singular values, descending.
///
/// One-sided (Hestenes) Jacobi orthogonalization of the columns. The values
/// are the square roots of the eigenvalues of M†M, but are computed without
/// forming M†M so small singular values keep full relative accuracy.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(Error::input("singular_values: matrix has non-finite entries"));
    }
    let n = m.dim();
    // Column-major working copy.
    let mut w: Vec<Vec<C64>> = (0..n).map(|c| (0..n).map(|r| m[(r, c)]).collect()).collect();
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phc = (gamma / g).conj();
                let theta = (beta - alpha) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let (lo, hi) = w.split_at_mut(q);
                let (wp, wq) = (&mut lo[p], &mut hi[0]);
                for (x, y) in wp.iter_mut().zip(wq.iter_mut()) {
                    // Column q is first rotated by the conjugate phase of γ so that
                    // the 2x2 Gram block is real.
                    let yq = *y * phc;
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = w
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}
