//! Seeded random operators for experiments and tests.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::lindblad::{DensityMatrix, Lindbladian};
use crate::numkernel::ComplexMatrix;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(r: &mut impl Rng) -> C64 {
    C64::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

/// Complex Ginibre matrix with entries of standard deviation `scale`.
pub fn random_matrix(r: &mut impl Rng, d: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |_, _| gauss(r) * (scale / 2f64.sqrt()))
}

/// Hermitian matrix from the GUE-like ensemble (M + M†)/2.
pub fn random_hermitian(r: &mut impl Rng, d: usize, scale: f64) -> ComplexMatrix {
    random_matrix(r, d, scale).hermitian_part()
}

/// Haar-ish unitary via Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary(r: &mut impl Rng, d: usize) -> ComplexMatrix {
    let g = random_matrix(r, d, 1.0);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for c in 0..d {
        let mut v: Vec<C64> = (0..d).map(|row| g[(row, c)]).collect();
        for _ in 0..2 {
            for u in &cols {
                let ip: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= ip * y;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= n);
        cols.push(v);
    }
    ComplexMatrix::from_fn(d, |row, c| cols[c][row])
}

/// Normalized random state vector.
pub fn random_ket(r: &mut impl Rng, d: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d).map(|_| gauss(r)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
    v
}

pub fn random_pure_state(r: &mut impl Rng, d: usize) -> DensityMatrix {
    let v = random_ket(r, d);
    DensityMatrix::new(ComplexMatrix::outer(&v, &v)).expect("pure state is a density matrix")
}

/// Mixed state G G† / Tr(G G†).
pub fn random_density(r: &mut impl Rng, d: usize) -> DensityMatrix {
    let g = random_matrix(r, d, 1.0);
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / t).hermitian_part()).expect("G G† is positive")
}

/// Random Lindbladian with a Hamiltonian of scale `h_scale` and `jumps` jump
/// operators of scale `jump_scale`.
pub fn random_lindbladian(
    r: &mut impl Rng,
    d: usize,
    jumps: usize,
    h_scale: f64,
    jump_scale: f64,
) -> Lindbladian {
    let h = random_hermitian(r, d, h_scale);
    let fs = (0..jumps).map(|_| random_matrix(r, d, jump_scale)).collect();
    Lindbladian::new(d, Some(h), fs).expect("random Lindbladian is well formed")
}

/// Random purely dissipative Lindbladian.
pub fn random_dissipative(r: &mut impl Rng, d: usize, jumps: usize, jump_scale: f64) -> Lindbladian {
    let fs = (0..jumps).map(|_| random_matrix(r, d, jump_scale)).collect();
    Lindbladian::new(d, None, fs).expect("random Lindbladian is well formed")
}
