//! Matrix exponential by scaling and squaring with diagonal Padé approximants.
//!
//! Degree selection and the θ_m thresholds follow Higham (2005): the lowest
//! degree in {3, 5, 7, 9} whose θ bound covers ‖A‖₁ is used directly, and
//! anything larger is scaled by 2^{-s} into the degree-13 range.

use num_complex::Complex64 as C64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// e^M.
pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_finite() {
        return Err(Error::input("expm: matrix has non-finite entries"));
    }
    let n = m.dim();
    let norm = m.norm_one();
    let id = ComplexMatrix::identity(n);
    if norm == 0.0 {
        return Ok(id);
    }

    for (theta, coeffs) in [
        (THETA_3, &B3[..]),
        (THETA_5, &B5[..]),
        (THETA_7, &B7[..]),
        (THETA_9, &B9[..]),
    ] {
        if norm <= theta {
            let (u, v) = pade_low(m, coeffs);
            return solve_pade(&u, &v);
        }
    }

    let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
    let a = m.scale_real(0.5f64.powi(s));
    let (u, v) = pade_13(&a);
    let mut r = solve_pade(&u, &v)?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}

fn lin_comb(terms: &[(f64, &ComplexMatrix)]) -> ComplexMatrix {
    let n = terms[0].1.dim();
    let mut out = ComplexMatrix::zeros(n);
    for (c, m) in terms {
        for (o, v) in out.as_mut_slice().iter_mut().zip(m.as_slice()) {
            *o += v * *c;
        }
    }
    out
}

/// Odd (U) and even (V) parts of the degree-(len-1) Padé numerator.
fn pade_low(a: &ComplexMatrix, b: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.dim();
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(a);
    // powers[k] = A^{2k}
    let mut powers = vec![id, a2.clone()];
    while powers.len() < b.len() / 2 {
        let next = powers.last().unwrap().matmul(&a2);
        powers.push(next);
    }
    let mut u_inner = ComplexMatrix::zeros(n);
    let mut v = ComplexMatrix::zeros(n);
    for (k, p) in powers.iter().enumerate() {
        u_inner = &u_inner + &p.scale_real(b[2 * k + 1]);
        v = &v + &p.scale_real(b[2 * k]);
    }
    (a.matmul(&u_inner), v)
}

fn pade_13(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let b = &B13;
    let n = a.dim();
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let u_hi = lin_comb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let u_lo = lin_comb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &id)]);
    let u = a.matmul(&(&a6.matmul(&u_hi) + &u_lo));
    let v_hi = lin_comb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let v_lo = lin_comb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &id)]);
    let v = &a6.matmul(&v_hi) + &v_lo;
    (u, v)
}

fn solve_pade(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = v + u;
    let q = v - u;
    lu_solve(&q, &p)
}

/// Solve A X = B by LU with partial pivoting.
pub fn lu_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    assert_eq!(n, b.dim());
    let mut lu = a.as_slice().to_vec();
    let mut x = b.as_slice().to_vec();
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|r| (r, lu[r * n + k].norm()))
            .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if pmax == 0.0 || !pmax.is_finite() {
            return Err(Error::numerical("singular matrix in LU solve"));
        }
        if piv != k {
            for c in 0..n {
                lu.swap(k * n + c, piv * n + c);
                x.swap(k * n + c, piv * n + c);
            }
        }
        let pivot = lu[k * n + k];
        for r in k + 1..n {
            let f = lu[r * n + k] / pivot;
            if f == ZERO {
                continue;
            }
            lu[r * n + k] = f;
            for c in k + 1..n {
                let t = lu[k * n + c];
                lu[r * n + c] -= f * t;
            }
            for c in 0..n {
                let t = x[k * n + c];
                x[r * n + c] -= f * t;
            }
        }
    }
    for k in (0..n).rev() {
        let pivot = lu[k * n + k];
        for c in 0..n {
            let mut s: C64 = x[k * n + c];
            for j in k + 1..n {
                s -= lu[k * n + j] * x[j * n + c];
            }
            x[k * n + c] = s / pivot;
        }
    }
    ComplexMatrix::new(n, x)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{E, FRAC_PI_2};

    use super::*;
    use crate::numkernel::matrix::{pauli, I, ONE};

    #[test]
    fn zero_gives_identity() {
        let e = expm(&ComplexMatrix::zeros(4)).unwrap();
        assert_eq!(e, ComplexMatrix::identity(4));
    }

    #[test]
    fn pauli_x_quarter_turn() {
        let m = pauli::x().scale(I * FRAC_PI_2);
        let e = expm(&m).unwrap();
        let want = ComplexMatrix::from_rows(&[&[ZERO, I], &[I, ZERO]]);
        assert!((&e - &want).max_abs() < 1e-14, "{e:?}");
    }

    #[test]
    fn diagonal() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let e = expm(&m).unwrap();
        assert!((e[(0, 0)].re - E).abs() < 1e-14 * E);
        assert!((e[(1, 1)].re - E * E).abs() < 1e-14 * E * E);
        assert_eq!(e[(0, 1)], ZERO);
    }

    #[test]
    fn every_degree_branch_agrees_with_series() {
        // Nilpotent-free 2x2 with known closed form: exp(a σx) = cosh a I + sinh a σx.
        for a in [1e-3, 0.1, 0.5, 1.5, 4.0, 40.0] {
            let e = expm(&pauli::x().scale_real(a)).unwrap();
            let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
            assert!(rel(e[(0, 0)].re, a.cosh()) < 1e-13, "a={a}");
            assert!(rel(e[(0, 1)].re, a.sinh()) < 1e-13, "a={a}");
        }
    }

    #[test]
    fn non_finite_rejected() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(expm(&m), Err(Error::Input(_))));
    }

    #[test]
    fn lu_solve_recovers_rhs() {
        let a = ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, I]]);
        let b = ComplexMatrix::identity(2);
        let x = lu_solve(&a, &b).unwrap();
        assert!((&a.matmul(&x) - &b).max_abs() < 1e-15);
    }
}
