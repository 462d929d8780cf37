//! Qubit Bloch-sphere geometry of purely dissipative generators.
//!
//! A qubit generator acts on Bloch vectors as ṙ = (S + [ω×]) r + c, with S
//! symmetric negative semidefinite. Writing each jump as F_j = a_j I + u_j·σ,
//!
//! ```text
//! S = 2 Σ_j (Re(u_j u_j†) − |u_j|² I₃),    ω = −2 Σ_j Im(a_j* u_j).
//! ```
//!
//! The drift c is read off numerically from 𝓛[I/2].

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{cptp_certificate, liouvillian, propagator, Lindbladian, Superoperator};
use crate::numkernel::{pauli, ComplexMatrix, RealMatrix};
use crate::tolerances;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// F = aI + u·σ with a = Tr(F)/2, u_k = Tr(σ_k F)/2.
pub fn pauli_split(f: &ComplexMatrix) -> Result<(C64, [C64; 3])> {
    if f.dim() != 2 {
        return Err(Error::input(format!(
            "pauli_split needs a 2x2 matrix, got {0}x{0}",
            f.dim()
        )));
    }
    let [x, y, z] = pauli::all();
    let half = |m: &ComplexMatrix| m.matmul(f).trace() * 0.5;
    Ok((f.trace() * 0.5, [half(&x), half(&y), half(&z)]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochAffine {
    pub s: Mat3,
    pub omega: Vec3,
    pub c: Vec3,
}

/// [ω×], so that [ω×] r = ω × r.
pub fn cross_matrix(w: Vec3) -> Mat3 {
    [[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]]
}

fn to_real(m: &Mat3) -> RealMatrix {
    RealMatrix::from_rows(*m)
}

fn norm3(v: Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl BlochAffine {
    pub fn zero() -> Self {
        Self {
            s: [[0.0; 3]; 3],
            omega: [0.0; 3],
            c: [0.0; 3],
        }
    }

    /// B = S + [ω×].
    pub fn generator(&self) -> Mat3 {
        let w = cross_matrix(self.omega);
        let mut b = self.s;
        for (r, row) in b.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v += w[r][c];
            }
        }
        b
    }

    pub fn trace_s(&self) -> f64 {
        self.s[0][0] + self.s[1][1] + self.s[2][2]
    }

    pub fn omega_norm(&self) -> f64 {
        norm3(self.omega)
    }

    /// Largest eigenvalue of S.
    pub fn s_max_eigenvalue(&self) -> f64 {
        *to_real(&self.s).sym_eigvals().last().unwrap()
    }

    pub fn s_spectral_norm(&self) -> f64 {
        to_real(&self.s).spectral_norm()
    }

    /// B r + c.
    pub fn apply(&self, r: Vec3) -> Vec3 {
        let b = self.generator();
        std::array::from_fn(|i| (0..3).map(|j| b[i][j] * r[j]).sum::<f64>() + self.c[i])
    }

    /// Componentwise sum; the Bloch form is linear in the generator.
    pub fn add(&self, other: &Self) -> Self {
        Self {
            s: std::array::from_fn(|r| std::array::from_fn(|c| self.s[r][c] + other.s[r][c])),
            omega: std::array::from_fn(|i| self.omega[i] + other.omega[i]),
            c: std::array::from_fn(|i| self.c[i] + other.c[i]),
        }
    }
}

/// Bloch vector of an arbitrary 2x2 matrix: r_k = Tr(σ_k X).
fn bloch_of(x: &ComplexMatrix) -> Vec3 {
    let p = pauli::all();
    std::array::from_fn(|k| p[k].matmul(x).trace().re)
}

fn state(r: Vec3) -> ComplexMatrix {
    let p = pauli::all();
    let mut m = ComplexMatrix::identity(2).scale_real(0.5);
    for k in 0..3 {
        m += &p[k].scale_real(0.5 * r[k]);
    }
    m
}

/// Affine form of a purely dissipative qubit Lindbladian.
pub fn bloch_affine(l: &Lindbladian) -> Result<BlochAffine> {
    if l.dim() != 2 {
        return Err(Error::input(format!(
            "Bloch form needs a qubit, got d = {}",
            l.dim()
        )));
    }
    if !l.is_purely_dissipative() {
        return Err(Error::input(
            "Bloch form is defined for purely dissipative generators",
        ));
    }
    let mut s = [[0.0; 3]; 3];
    let mut omega = [0.0; 3];
    for f in l.jumps() {
        let (a, u) = pauli_split(f)?;
        let u2: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        for r in 0..3 {
            for c in 0..3 {
                s[r][c] += 2.0 * (u[r] * u[c].conj()).re;
            }
            s[r][r] -= 2.0 * u2;
            omega[r] -= 2.0 * (a.conj() * u[r]).im;
        }
    }
    let gen = liouvillian(l)?;
    let c = bloch_of(&gen.apply(&ComplexMatrix::identity(2).scale_real(0.5))?);
    let b = BlochAffine { s, omega, c };
    let resid = affine_residual(&gen, &b)?;
    let scale = 1.0 + l.jumps().iter().map(|f| f.frobenius().powi(2)).sum::<f64>();
    if resid > tolerances::BLOCH_AFFINE * scale {
        return Err(Error::numerical(format!(
            "Bloch form disagrees with the generator by {resid:.3e}"
        )));
    }
    Ok(b)
}

/// max over {I/2, (I ± σ_k)/2} of |Bloch(𝓛ρ) − (B r + c)|.
pub fn affine_residual(gen: &Superoperator, b: &BlochAffine) -> Result<f64> {
    let mut probes = vec![[0.0; 3]];
    for k in 0..3 {
        for sgn in [1.0, -1.0] {
            let mut r = [0.0; 3];
            r[k] = sgn;
            probes.push(r);
        }
    }
    let mut worst: f64 = 0.0;
    for r in probes {
        let got = bloch_of(&gen.apply(&state(r))?);
        let want = b.apply(r);
        worst = worst.max(norm3(std::array::from_fn(|i| got[i] - want[i])));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    /// |ω|².
    pub lhs: f64,
    /// m C² (−Tr S).
    pub rhs: f64,
    pub pass: bool,
}

impl BudgetReport {
    /// lhs/rhs, or 0 when both vanish.
    pub fn saturation(&self) -> f64 {
        if self.rhs == 0.0 {
            if self.lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.lhs / self.rhs
        }
    }
}

/// |ω|² ≤ m C² (−Tr S): rotation costs radial decoherence.
pub fn budget_check(b: &BlochAffine, m: usize, c: f64) -> BudgetReport {
    let lhs = b.omega_norm().powi(2);
    let rhs = m as f64 * c * c * (-b.trace_s());
    BudgetReport {
        lhs,
        rhs,
        pass: lhs <= rhs + tolerances::BUDGET_SLACK,
    }
}

/// Linear part A and translation b of a qubit map in Bloch coordinates.
pub fn channel_bloch(p: &Superoperator) -> Result<(Mat3, Vec3)> {
    if p.dim() != 2 {
        return Err(Error::input("Bloch representation needs a qubit map"));
    }
    let sig = pauli::all();
    let mut a = [[0.0; 3]; 3];
    for j in 0..3 {
        let col = bloch_of(&p.apply(&sig[j])?);
        for i in 0..3 {
            a[i][j] = 0.5 * col[i];
        }
    }
    let bv = bloch_of(&p.apply(&ComplexMatrix::identity(2))?);
    Ok((a, std::array::from_fn(|i| 0.5 * bv[i])))
}

/// Rotation by `phi` about z.
pub fn rz(phi: f64) -> Mat3 {
    let (s, c) = phi.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDiagnostics {
    pub taus: Vec<f64>,
    pub a_tau: Vec<Mat3>,
    pub b_tau: Vec<Vec3>,
    /// Polygonal length of v(τ) = A_τ e_x on the sample grid.
    pub path_length: f64,
    pub singular_values_at_t: Vec3,
    pub det_at_t: f64,
    /// sup_τ ‖A_τ − R_z(ατ)‖_∞.
    pub rotation_deviation: f64,
    /// sup_τ |b_τ|.
    pub translation_sup: f64,
    /// Largest singular value of any sampled A_τ.
    pub max_singular_value: f64,
    pub min_choi_eigenvalue: f64,
    pub max_partial_trace_residual: f64,
}

/// Sample e^{τ𝓛_D} in Bloch coordinates for τ ∈ [0, T] against the target
/// rotation R_z(ατ), α = |ν|t/T, of H = (ν/2)σz.
pub fn trajectory_diagnostics(
    l_d: &Lindbladian,
    nu: f64,
    t: f64,
    big_t: f64,
    grid_n: usize,
) -> Result<TrajectoryDiagnostics> {
    if l_d.dim() != 2 {
        return Err(Error::input("trajectory diagnostics need a qubit Lindbladian"));
    }
    if !(big_t > 0.0) || !(t > 0.0) || grid_n == 0 {
        return Err(Error::input("T and t must be positive and grid_n at least 1"));
    }
    let gen = liouvillian(l_d)?;
    let rate = nu * t / big_t;
    let taus: Vec<f64> = (0..=grid_n).map(|k| big_t * k as f64 / grid_n as f64).collect();
    let samples: Vec<(Mat3, Vec3, f64, f64)> = taus
        .par_iter()
        .map(|&tau| {
            let p = propagator(&gen, tau)?;
            let cert = cptp_certificate(&p);
            let (a, b) = channel_bloch(&p)?;
            Ok((a, b, cert.min_choi_eigenvalue, cert.partial_trace_residual))
        })
        .collect::<Result<_>>()?;

    let mut path = 0.0;
    let mut rot_dev: f64 = 0.0;
    let mut trans: f64 = 0.0;
    let mut max_sv: f64 = 0.0;
    for (k, (a, b, _, _)) in samples.iter().enumerate() {
        if k > 0 {
            let prev = &samples[k - 1].0;
            path += norm3(std::array::from_fn(|i| a[i][0] - prev[i][0]));
        }
        let r = rz(rate * taus[k]);
        let diff = RealMatrix::from_fn(3, |i, j| a[i][j] - r[i][j]);
        rot_dev = rot_dev.max(diff.spectral_norm());
        trans = trans.max(norm3(*b));
        max_sv = max_sv.max(to_real(a).spectral_norm());
    }
    let last = samples.last().unwrap().0;
    let sv = to_real(&last).singular_values();
    Ok(TrajectoryDiagnostics {
        taus,
        a_tau: samples.iter().map(|s| s.0).collect(),
        b_tau: samples.iter().map(|s| s.1).collect(),
        path_length: path,
        singular_values_at_t: [sv[0], sv[1], sv[2]],
        det_at_t: to_real(&last).det(),
        rotation_deviation: rot_dev,
        translation_sup: trans,
        max_singular_value: max_sv,
        min_choi_eigenvalue: samples.iter().map(|s| s.2).fold(f64::INFINITY, f64::min),
        max_partial_trace_residual: samples.iter().map(|s| s.3).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateChecks {
    /// S ⪯ 0 and ‖S‖_∞ ≤ −Tr S.
    pub negative_semidefinite: bool,
    /// |ω|² ≤ mC²(−Tr S).
    pub budget: bool,
    /// −Tr S ≤ 6ε/T.
    pub contraction: bool,
    /// |ω| ≥ Θ/(8T).
    pub rotation_rate: bool,
    /// Singular values of A_T in [1 − ε, 1 + ε].
    pub singular_values: bool,
    /// Polygonal path length ≥ Θ/5.
    pub path_length: bool,
    /// det(A_T) = e^{T Tr S} to relative 1e−9.
    pub determinant: bool,
    /// T_achieved ≥ T_lower.
    pub time_bound: bool,
}

impl CertificateChecks {
    pub fn all(&self) -> bool {
        self.negative_semidefinite
            && self.budget
            && self.contraction
            && self.rotation_rate
            && self.singular_values
            && self.path_length
            && self.determinant
            && self.time_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCertificate {
    pub theta: f64,
    pub alpha: f64,
    pub m: usize,
    pub c: f64,
    pub epsilon: f64,
    pub t_achieved: f64,
    pub t_lower: f64,
    /// ε ≤ min{1, Θ}/100. The checks are evaluated either way, but only an
    /// applicable certificate can be contradicted.
    pub applicable: bool,
    pub checks: CertificateChecks,
}

impl LowerBoundCertificate {
    /// T_achieved / T_lower.
    pub fn ratio(&self) -> f64 {
        self.t_achieved / self.t_lower
    }

    /// An applicable certificate whose time bound fails. For a family that
    /// was verified to simulate within ε this cannot happen.
    pub fn contradicted(&self) -> bool {
        self.applicable && !self.checks.time_bound
    }
}

/// Evaluate the chained lower-bound inequalities for a candidate simulator
/// with Bloch form `b`, trajectory `diag`, m jumps of norm ≤ C, running for
/// time T to reproduce e^{−i(ν/2)σz t} within ε.
#[allow(clippy::too_many_arguments)]
pub fn lower_bound_certificate(
    b: &BlochAffine,
    diag: &TrajectoryDiagnostics,
    m: usize,
    c: f64,
    epsilon: f64,
    nu: f64,
    t: f64,
    big_t: f64,
) -> Result<LowerBoundCertificate> {
    let vals = [c, epsilon, nu, t, big_t];
    if vals.iter().any(|v| !v.is_finite()) || m == 0 || !(epsilon > 0.0) || !(big_t > 0.0) || !(c > 0.0) {
        return Err(Error::input(
            "certificate parameters must be finite, with m, C, ε, T positive",
        ));
    }
    let theta = nu.abs() * t;
    let t_lower = theta * theta / (384.0 * m as f64 * c * c * epsilon);
    let neg_tr = -b.trace_s();
    let nsd = b.s_max_eigenvalue() <= tolerances::BLOCH_NSD
        && b.s_spectral_norm() <= neg_tr + tolerances::BLOCH_NSD;
    let det_want = (big_t * b.trace_s()).exp();
    let checks = CertificateChecks {
        negative_semidefinite: nsd,
        budget: budget_check(b, m, c).pass,
        contraction: neg_tr <= 6.0 * epsilon / big_t,
        rotation_rate: b.omega_norm() >= theta / (8.0 * big_t),
        singular_values: diag
            .singular_values_at_t
            .iter()
            .all(|&s| s >= 1.0 - epsilon && s <= 1.0 + epsilon),
        path_length: diag.path_length >= theta / 5.0,
        determinant: (diag.det_at_t - det_want).abs() <= tolerances::BLOCH_DET * det_want.abs(),
        time_bound: big_t >= t_lower,
    };
    Ok(LowerBoundCertificate {
        theta,
        alpha: theta / big_t,
        m,
        c,
        epsilon,
        t_achieved: big_t,
        t_lower,
        applicable: epsilon <= theta.min(1.0) / 100.0,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::constructions::mimic_single;
    use crate::numkernel::{I, ONE, ZERO};
    use crate::random::{random_dissipative, random_matrix, rng};

    fn close3(a: Vec3, b: Vec3, tol: f64) -> bool {
        (0..3).all(|i| (a[i] - b[i]).abs() <= tol)
    }

    fn diag3(a: Mat3) -> Vec3 {
        [a[0][0], a[1][1], a[2][2]]
    }

    #[test]
    fn split_examples() {
        let (a, u) = pauli_split(&pauli::z()).unwrap();
        assert_eq!(a, ZERO);
        assert_eq!(u, [ZERO, ZERO, ONE]);
        let f = &ComplexMatrix::identity(2) - &pauli::z().scale(I * 0.05);
        let (a, u) = pauli_split(&f).unwrap();
        assert!((a - ONE).norm() < 1e-16);
        assert!((u[2] - C64::new(0.0, -0.05)).norm() < 1e-16);
        let g = random_matrix(&mut rng(1), 2, 1.0);
        let (a, u) = pauli_split(&g).unwrap();
        let mut back = ComplexMatrix::identity(2).scale(a);
        for (k, p) in pauli::all().iter().enumerate() {
            back += &p.scale(u[k]);
        }
        assert!((&back - &g).max_abs() < 1e-15);
        assert!(pauli_split(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn mimic_form() {
        let delta = 0.1;
        let l = mimic_single(&pauli::z().scale_real(0.5), delta)
            .unwrap()
            .into_lindbladian();
        let b = bloch_affine(&l).unwrap();
        assert!(close3(b.omega, [0.0, 0.0, delta], 1e-15));
        assert!(close3(
            diag3(b.s),
            [-delta * delta / 2.0, -delta * delta / 2.0, 0.0],
            1e-15
        ));
        assert!(close3(b.c, [0.0; 3], 1e-15));
        let c = l.jump_bound();
        assert!((c - (1.0 + delta * delta / 4.0).sqrt()).abs() < 1e-14);
        let rep = budget_check(&b, 1, c);
        assert!(rep.pass);
        assert!((rep.saturation() - 1.0 / (1.0 + delta * delta / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn shifted_jump_has_no_rotation() {
        let delta = 0.1;
        let h = pauli::z().scale_real(0.5);
        let bare = Lindbladian::dissipative(vec![h.scale(-I * delta)]).unwrap();
        assert!(norm3(bloch_affine(&bare).unwrap().omega) < 1e-16);
        let l = mimic_single(&h, delta).unwrap().into_lindbladian();
        assert!((bloch_affine(&l).unwrap().omega_norm() - delta).abs() < 1e-15);
    }

    #[test]
    fn amplitude_damping_form() {
        let g = 0.4;
        let l = Lindbladian::dissipative(vec![pauli::minus().scale_real(f64::sqrt(g))]).unwrap();
        let b = bloch_affine(&l).unwrap();
        assert!(close3(b.omega, [0.0; 3], 1e-15));
        assert!(close3(diag3(b.s), [-g / 2.0, -g / 2.0, -g], 1e-15));
        assert!(close3(b.c, [0.0, 0.0, g], 1e-15));
        let rep = budget_check(&b, 1, l.jump_bound());
        assert!(rep.pass && rep.lhs == 0.0);
    }

    #[test]
    fn empty_form() {
        let b = bloch_affine(&Lindbladian::empty(2)).unwrap();
        assert_eq!(b, BlochAffine::zero());
        assert!(budget_check(&b, 0, 0.0).pass);
        let closed = Lindbladian::closed(pauli::z()).unwrap();
        assert!(bloch_affine(&closed).is_err());
    }

    #[test]
    fn doubled_rotation_breaks_budget() {
        let l = mimic_single(&pauli::z().scale_real(0.5), 0.1)
            .unwrap()
            .into_lindbladian();
        let mut b = bloch_affine(&l).unwrap();
        b.omega = b.omega.map(|w| 2.0 * w);
        assert!(!budget_check(&b, 1, l.jump_bound()).pass);
    }

    fn mimic_run() -> (Lindbladian, f64, f64, f64) {
        let (nu, t, eps) = (1.0, 4.0, 0.02);
        let delta = eps / t;
        let l = mimic_single(&pauli::z().scale_real(nu / 2.0), delta)
            .unwrap()
            .into_lindbladian();
        (l, nu, t, t / delta)
    }

    #[test]
    fn mimic_trajectory() {
        let (l, nu, t, big_t) = mimic_run();
        let eps = 0.02;
        let d = trajectory_diagnostics(&l, nu, t, big_t, 128).unwrap();
        assert!(d.rotation_deviation <= eps);
        assert!(d.translation_sup <= eps);
        assert!(d
            .singular_values_at_t
            .iter()
            .all(|&s| (1.0 - eps..=1.0 + eps).contains(&s)));
        assert!(d.path_length >= nu * t / 5.0);
        assert!(d.max_singular_value <= 1.0 + 1e-9);
        let b = bloch_affine(&l).unwrap();
        let want = (big_t * b.trace_s()).exp();
        assert!((d.det_at_t - want).abs() <= 1e-9 * want);
        // Chord length never exceeds arc length (1 + ε)T(|ω| + ‖S‖).
        assert!(d.path_length <= (1.0 + eps) * big_t * (b.omega_norm() + b.s_spectral_norm()));
    }

    #[test]
    fn certificate_gate() {
        let (l, nu, t, big_t) = mimic_run();
        let b = bloch_affine(&l).unwrap();
        let d = trajectory_diagnostics(&l, nu, t, big_t, 64).unwrap();
        let cert = lower_bound_certificate(&b, &d, 1, l.jump_bound(), 0.02, nu, t, big_t).unwrap();
        assert!(!cert.applicable, "0.02 > min(1, 4)/100");
        assert!(cert.checks.all(), "{cert:?}");
        assert!(cert.ratio() > 100.0);
        let small = lower_bound_certificate(&b, &d, 1, l.jump_bound(), 0.01, 0.1, 1.0, big_t).unwrap();
        assert!(!small.applicable, "Θ = 0.1 < 100ε");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn random_generators_are_dissipative(seed in any::<u64>(), m in 1usize..4) {
            let l = random_dissipative(&mut rng(seed), 2, m, 1.0);
            let b = bloch_affine(&l).unwrap();
            prop_assert!(b.s_max_eigenvalue() <= 1e-10);
            prop_assert!(b.s_spectral_norm() <= -b.trace_s() + 1e-10);
            prop_assert!(budget_check(&b, m, l.jump_bound()).pass);
            let p = propagator(&liouvillian(&l).unwrap(), 0.9).unwrap();
            let (a, _) = channel_bloch(&p).unwrap();
            let want = (0.9 * b.trace_s()).exp();
            prop_assert!((to_real(&a).det() - want).abs() <= 1e-9 * want);
        }

        #[test]
        fn bloch_form_is_additive(seed in any::<u64>(), p in 0.0f64..1.0) {
            let mut r = rng(seed);
            let f1 = random_matrix(&mut r, 2, 1.0);
            let f2 = random_matrix(&mut r, 2, 1.0);
            let (w1, w2) = (p.sqrt(), (1.0 - p).sqrt());
            let both = Lindbladian::dissipative(vec![f1.scale_real(w1), f2.scale_real(w2)]).unwrap();
            let a = bloch_affine(&Lindbladian::dissipative(vec![f1.scale_real(w1)]).unwrap()).unwrap();
            let b = bloch_affine(&Lindbladian::dissipative(vec![f2.scale_real(w2)]).unwrap()).unwrap();
            let sum = a.add(&b);
            let tot = bloch_affine(&both).unwrap();
            for i in 0..3 {
                prop_assert!((sum.omega[i] - tot.omega[i]).abs() < 1e-12);
                prop_assert!((sum.c[i] - tot.c[i]).abs() < 1e-12);
                for j in 0..3 {
                    prop_assert!((sum.s[i][j] - tot.s[i][j]).abs() < 1e-12);
                }
            }
        }
    }
}
