//! State and channel distances.
//!
//! Trace distance carries the ½ factor. Diamond distances come from the
//! Choi matrix of the difference, either through a semidefinite program with
//! certified two-sided bounds or through the cheap bracket
//! `‖J‖₁/d ≤ ‖Φ‖⋄ ≤ ‖J‖₁`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{
    cptp_certificate, hamiltonian_generator, liouvillian, propagator, vec_index, DensityMatrix, Lindbladian,
    Superoperator,
};
use crate::numkernel::{hermitian_eigvals_unchecked, psd_sqrt, ComplexMatrix, RealMatrix};
use crate::sdp::{self, Entry, SdpOptions, SdpProblem};
use crate::tolerances;

/// ½‖ρ − σ‖₁.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::input(format!(
            "trace distance between {}x{} and {}x{} states",
            rho.dim(),
            rho.dim(),
            sigma.dim(),
            sigma.dim()
        )));
    }
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5
        * hermitian_eigvals_unchecked(&diff)
            .iter()
            .map(|x| x.abs())
            .sum::<f64>())
}

/// J(Φ) = Σ_jk E_jk ⊗ Φ(E_jk); the input factor comes first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub dim: usize,
    pub matrix: ComplexMatrix,
}

pub fn choi(s: &Superoperator) -> ChoiMatrix {
    let d = s.dim();
    let sm = s.matrix();
    let matrix = ComplexMatrix::from_fn(d * d, |r, c| {
        let (j, a) = (r / d, r % d);
        let (k, b) = (c / d, c % d);
        sm[(vec_index(d, a, b), vec_index(d, j, k))]
    });
    ChoiMatrix { dim: d, matrix }
}

/// Tr over the output (second) factor of a d²×d² matrix.
pub fn partial_trace_output(j: &ComplexMatrix, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |r, c| (0..d).map(|a| j[(r * d + a, c * d + a)]).sum())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiamondMethod {
    #[default]
    Sdp,
    Sandwich,
}

impl std::str::FromStr for DiamondMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sdp" => Ok(Self::Sdp),
            "sandwich" => Ok(Self::Sandwich),
            other => Err(Error::input(format!("unknown diamond method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub method: DiamondMethod,
    pub iterations: usize,
    /// The SDP was requested but could not certify a tight bracket.
    pub degraded: bool,
}

impl DistanceReport {
    fn zero(method: DiamondMethod) -> Self {
        Self {
            value: 0.0,
            lower_bound: 0.0,
            upper_bound: 0.0,
            method,
            iterations: 0,
            degraded: false,
        }
    }

    /// Width of the certified bracket.
    pub fn gap(&self) -> f64 {
        self.upper_bound - self.lower_bound
    }
}

/// ‖Φ₁ − Φ₂‖⋄.
pub fn diamond_distance(
    a: &Superoperator,
    b: &Superoperator,
    method: DiamondMethod,
) -> Result<DistanceReport> {
    if a.dim() != b.dim() {
        return Err(Error::input(format!(
            "diamond distance between maps on {} and {} levels",
            a.dim(),
            b.dim()
        )));
    }
    diamond_norm(&a.difference(b), method)
}

/// ‖Φ‖⋄ for a Hermiticity-preserving map.
pub fn diamond_norm(phi: &Superoperator, method: DiamondMethod) -> Result<DistanceReport> {
    let d = phi.dim();
    let j = choi(phi).matrix;
    if !j.is_finite() {
        return Err(Error::numerical("Choi matrix has non-finite entries"));
    }
    let (defect, r, c) = j.hermiticity_defect();
    if defect > tolerances::HERMITIAN_INPUT * j.max_abs().max(1.0) {
        return Err(Error::input(format!(
            "map is not Hermiticity-preserving: Choi defect {defect:.3e} at ({r},{c})"
        )));
    }
    let j = j.hermitian_part();
    let tn: f64 = hermitian_eigvals_unchecked(&j).iter().map(|x| x.abs()).sum();
    if tn == 0.0 {
        return Ok(DistanceReport::zero(method));
    }
    let sandwich = DistanceReport {
        value: tn,
        lower_bound: tn / d as f64,
        upper_bound: tn,
        method: DiamondMethod::Sandwich,
        iterations: 0,
        degraded: false,
    };
    match method {
        DiamondMethod::Sandwich => Ok(sandwich),
        DiamondMethod::Sdp => Ok(diamond_sdp(&j, d, tn).unwrap_or(DistanceReport {
            degraded: true,
            ..sandwich
        })),
    }
}

/// Hermitian basis of D×D matrices as sparse (row, col, value) lists.
fn hermitian_basis(n: usize) -> Vec<Vec<(usize, usize, C64)>> {
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        out.push(vec![(p, p, C64::new(1.0, 0.0))]);
    }
    for p in 0..n {
        for q in p + 1..n {
            out.push(vec![(p, q, C64::new(1.0, 0.0)), (q, p, C64::new(1.0, 0.0))]);
            out.push(vec![(p, q, C64::new(0.0, 1.0)), (q, p, C64::new(0.0, -1.0))]);
        }
    }
    out
}

/// Entries of the real embedding [[Re, −Im],[Im, Re]] of a sparse complex
/// matrix with complex size `n`, placed at complex offset `off`.
fn embed_entries(
    block: usize,
    n: usize,
    off: usize,
    sign: f64,
    m: &[(usize, usize, C64)],
    out: &mut Vec<Entry>,
) {
    for &(r, c, v) in m {
        let (r, c) = (r + off, c + off);
        if v.re != 0.0 {
            out.push((block, r, c, sign * v.re));
            out.push((block, r + n, c + n, sign * v.re));
        }
        if v.im != 0.0 {
            out.push((block, r, c + n, -sign * v.im));
            out.push((block, r + n, c, sign * v.im));
        }
    }
}

fn embed(m: &ComplexMatrix) -> RealMatrix {
    let n = m.dim();
    RealMatrix::from_fn(2 * n, |r, c| {
        let v = m[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => v.re,
            (true, false) => -v.im,
            (false, true) => v.im,
        }
    })
}

/// Complex matrix represented by (the projection of) a real 2n×2n block.
fn unembed(x: &RealMatrix) -> ComplexMatrix {
    let n = x.dim() / 2;
    ComplexMatrix::from_fn(n, |r, c| {
        C64::new(
            0.5 * (x[(r, c)] + x[(r + n, c + n)]),
            0.5 * (x[(r + n, c)] - x[(r, c + n)]),
        )
    })
}

fn density_from_block(x: &RealMatrix) -> Option<ComplexMatrix> {
    let m = unembed(x).hermitian_part();
    let s = crate::numkernel::hermitian_eig(&m).ok()?;
    let clipped = s.apply(|v| v.max(0.0));
    let tr = clipped.trace().re;
    (tr > 0.0 && tr.is_finite()).then(|| clipped.scale_real(1.0 / tr))
}

/// ‖(√ρ₀ ⊗ I) J (√ρ₁ ⊗ I)‖₁, a lower bound on ‖Φ‖⋄ for any pair of states.
fn state_pair_bound(j: &ComplexMatrix, d: usize, rho0: &ComplexMatrix, rho1: &ComplexMatrix) -> f64 {
    let id = ComplexMatrix::identity(d);
    let (Ok(s0), Ok(s1)) = (psd_sqrt(rho0), psd_sqrt(rho1)) else {
        return 0.0;
    };
    s0.kron(&id).matmul(j).matmul(&s1.kron(&id)).trace_norm()
}

/// Diamond norm of the map with Hermitian Choi matrix `j` by the dual SDP
///
/// min ½(‖Tr_out Y₀‖ + ‖Tr_out Y₁‖)  s.t.  [[Y₀, −J],[−J†, Y₁]] ⪰ 0,
///
/// written with epigraph variables a ≥ λ_max(Tr_out Y₀), b ≥ λ_max(Tr_out Y₁).
fn diamond_sdp(j: &ComplexMatrix, d: usize, scale: f64) -> Option<DistanceReport> {
    let dd = d * d;
    let jn = j.scale_real(1.0 / scale);
    let basis = hermitian_basis(dd);
    let nb = basis.len();
    let (n0, n2) = (d, 2 * dd);

    let mut a_rows: Vec<Vec<Entry>> = Vec::with_capacity(2 + 2 * nb);
    for blk in 0..2 {
        a_rows.push((0..2 * n0).map(|i| (blk, i, i, -1.0)).collect());
    }
    for which in 0..2 {
        for elem in &basis {
            let mut e = Vec::new();
            let traced: Vec<(usize, usize, C64)> = elem
                .iter()
                .filter(|(p, q, _)| p % d == q % d)
                .map(|&(p, q, v)| (p / d, q / d, v))
                .collect();
            embed_entries(which, n0, 0, 1.0, &traced, &mut e);
            embed_entries(2, n2, which * dd, -1.0, elem, &mut e);
            a_rows.push(e);
        }
    }
    let mut b = vec![0.0; a_rows.len()];
    b[0] = -0.5;
    b[1] = -0.5;

    let mut k0 = ComplexMatrix::zeros(n2);
    for r in 0..dd {
        for c in 0..dd {
            k0[(r, dd + c)] = -jn[(r, c)];
            k0[(dd + r, c)] = -jn[(c, r)].conj();
        }
    }
    let problem = SdpProblem {
        blocks: vec![2 * n0, 2 * n0, 2 * n2],
        c: vec![RealMatrix::zeros(2 * n0), RealMatrix::zeros(2 * n0), embed(&k0)],
        a: a_rows,
        b,
    };
    let sol = sdp::solve(&problem, &SdpOptions::default()).ok()?;

    // Certified upper bound: repair the dual point to exact feasibility.
    let rebuild = |offset: usize| {
        let mut y = ComplexMatrix::zeros(dd);
        for (k, elem) in basis.iter().enumerate() {
            let w = sol.y[offset + k];
            for &(p, q, v) in elem {
                y[(p, q)] += v * w;
            }
        }
        y
    };
    let mut y0 = rebuild(2);
    let mut y1 = rebuild(2 + nb);
    let mut k = k0.clone();
    for r in 0..dd {
        for c in 0..dd {
            k[(r, c)] = y0[(r, c)];
            k[(dd + r, dd + c)] = y1[(r, c)];
        }
    }
    let lmin = hermitian_eigvals_unchecked(&k)[0];
    let shift = (-lmin).max(0.0) + 64.0 * f64::EPSILON * k.frobenius();
    for i in 0..dd {
        y0[(i, i)] += shift;
        y1[(i, i)] += shift;
    }
    let top = |y: &ComplexMatrix| {
        *hermitian_eigvals_unchecked(&partial_trace_output(y, d))
            .last()
            .unwrap()
    };
    let upper = 0.5 * (top(&y0) + top(&y1)) * scale;

    // Certified lower bound from the primal multipliers of the two
    // epigraph blocks, which are (scaled) density matrices.
    let mut lower = scale / d as f64;
    if let (Some(r0), Some(r1)) = (density_from_block(&sol.x[0]), density_from_block(&sol.x[1])) {
        for (p, q) in [(&r0, &r1), (&r0.conj(), &r1.conj())] {
            lower = lower.max(state_pair_bound(j, d, p, q));
        }
    }
    let upper = upper.min(scale);
    if !(upper - lower <= tolerances::SDP_BRACKET) || !lower.is_finite() {
        return None;
    }
    let lower = lower.min(upper);
    Some(DistanceReport {
        value: 0.5 * (lower + upper),
        lower_bound: lower,
        upper_bound: upper,
        method: DiamondMethod::Sdp,
        iterations: sol.iterations,
        degraded: false,
    })
}

/// ‖𝓛₁ − 𝓛₂‖⋄ of two Liouvillians.
pub fn generator_distance(
    l1: &Lindbladian,
    l2: &Lindbladian,
    method: DiamondMethod,
) -> Result<DistanceReport> {
    diamond_distance(&liouvillian(l1)?, &liouvillian(l2)?, method)
}

/// Sup-over-grid error of simulating e^{s𝓛_H} by e^{(s/δ)𝓛_D}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformErrorReport {
    /// max_k of the per-sample diamond distance values.
    pub max_error: f64,
    /// max_k of the per-sample certified upper bounds.
    pub max_upper: f64,
    /// Bound on how far the true supremum can exceed the grid maximum.
    pub slack: f64,
    pub worst_s: f64,
    pub samples: Vec<f64>,
    pub degraded: bool,
    /// Smallest Choi eigenvalue over every propagator that was built.
    pub min_choi_eigenvalue: f64,
    /// Largest partial-trace residual over every propagator that was built.
    pub max_partial_trace_residual: f64,
}

impl UniformErrorReport {
    /// Certified upper bound on the supremum over [0, t].
    pub fn certified(&self) -> f64 {
        self.max_upper + self.slack
    }

    pub fn cptp_pass(&self) -> bool {
        self.min_choi_eigenvalue >= tolerances::CHOI_EIG_FLOOR
            && self.max_partial_trace_residual <= tolerances::PARTIAL_TRACE
    }
}

/// sup_{0≤s≤t} ‖e^{(s/δ)𝓛_D} − e^{s𝓛_H}‖⋄ on grid_n + 1 uniform samples.
///
/// The slack uses f(s + h) ≤ f(s) + f(h) for differences of channel
/// semigroups and f(h) ≤ h‖𝓛_D/δ − 𝓛_H‖⋄, so the true supremum lies in
/// [max, max + Δs·‖𝓛_D/δ − 𝓛_H‖⋄].
pub fn uniform_error(
    l_d: &Lindbladian,
    h: &ComplexMatrix,
    t: f64,
    delta: f64,
    grid_n: usize,
    method: DiamondMethod,
) -> Result<UniformErrorReport> {
    if grid_n < 8 {
        return Err(Error::input(format!("grid_n must be at least 8, got {grid_n}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::input(format!("t must be positive, got {t}")));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::input(format!("delta must be positive, got {delta}")));
    }
    if h.dim() != l_d.dim() {
        return Err(Error::input("Hamiltonian and Lindbladian dimensions differ"));
    }
    h.check_hermitian(tolerances::HERMITIAN_INPUT)?;
    uniform_error_generators(
        &liouvillian(l_d)?,
        &hamiltonian_generator(h),
        t,
        delta,
        grid_n,
        method,
    )
}

/// Same sweep as [`uniform_error`] with an arbitrary Lindbladian target:
/// compares `exp((s/δ) L_D)` against `exp(s L_target)`.
pub fn uniform_error_to(
    l_d: &Lindbladian,
    target: &Lindbladian,
    t: f64,
    delta: f64,
    grid_n: usize,
    method: DiamondMethod,
) -> Result<UniformErrorReport> {
    if target.dim() != l_d.dim() {
        return Err(Error::input("target and simulator dimensions differ"));
    }
    uniform_error_generators(
        &liouvillian(l_d)?,
        &liouvillian(target)?,
        t,
        delta,
        grid_n,
        method,
    )
}

fn uniform_error_generators(
    gen_d: &Superoperator,
    gen_h: &Superoperator,
    t: f64,
    delta: f64,
    grid_n: usize,
    method: DiamondMethod,
) -> Result<UniformErrorReport> {
    if grid_n < 8 {
        return Err(Error::input(format!("grid_n must be at least 8, got {grid_n}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::input(format!("t must be positive, got {t}")));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::input(format!("delta must be positive, got {delta}")));
    }
    let ds = t / grid_n as f64;

    let samples: Vec<(DistanceReport, f64, f64)> = (0..=grid_n)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 * ds;
            let pd = propagator(gen_d, s / delta)?;
            let ph = propagator(gen_h, s)?;
            let cd = cptp_certificate(&pd);
            let ch = cptp_certificate(&ph);
            let rep = diamond_distance(&pd, &ph, method)?;
            Ok((
                rep,
                cd.min_choi_eigenvalue.min(ch.min_choi_eigenvalue),
                cd.partial_trace_residual.max(ch.partial_trace_residual),
            ))
        })
        .collect::<Result<_>>()?;

    let rate = diamond_norm(&gen_d.lin_comb(1.0 / delta, gen_h, -1.0), method)?;
    let mut worst = 0;
    for (k, s) in samples.iter().enumerate() {
        if s.0.value > samples[worst].0.value {
            worst = k;
        }
    }
    Ok(UniformErrorReport {
        max_error: samples[worst].0.value,
        max_upper: samples.iter().map(|s| s.0.upper_bound).fold(0.0, f64::max),
        slack: ds * rate.upper_bound,
        worst_s: worst as f64 * ds,
        samples: samples.iter().map(|s| s.0.value).collect(),
        degraded: rate.degraded || samples.iter().any(|s| s.0.degraded),
        min_choi_eigenvalue: samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min),
        max_partial_trace_residual: samples.iter().map(|s| s.2).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    use proptest::prelude::*;

    use super::*;
    use crate::numkernel::{expm, pauli, I, ZERO};
    use crate::random::{random_dissipative, random_lindbladian, rng};

    fn rz_channel(theta: f64) -> Superoperator {
        let h = pauli::z().scale_real(0.5);
        let u = expm(&h.scale(-I * theta)).unwrap();
        Superoperator::new(2, u.conj().kron(&u), crate::lindblad::SuperKind::Propagator).unwrap()
    }

    fn depolarizing() -> Superoperator {
        // Φ(X) = Tr(X) I/2.
        let mut m = ComplexMatrix::zeros(4);
        for a in 0..2 {
            for j in 0..2 {
                m[(vec_index(2, a, a), vec_index(2, j, j))] = C64::new(0.5, 0.0);
            }
        }
        Superoperator::new(2, m, crate::lindblad::SuperKind::Propagator).unwrap()
    }

    #[test]
    fn trace_distance_examples() {
        let zero = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let one = DensityMatrix::from_bloch([0.0, 0.0, -1.0]).unwrap();
        let plus = DensityMatrix::from_bloch([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&zero, &plus).unwrap() - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn choi_examples() {
        let id = choi(&Superoperator::identity(2)).matrix;
        assert!((id.trace().re - 2.0).abs() < 1e-15);
        let omega = [C64::new(1.0, 0.0), ZERO, ZERO, C64::new(1.0, 0.0)];
        assert!((&id - &ComplexMatrix::outer(&omega, &omega)).max_abs() < 1e-15);
        let dep = choi(&depolarizing()).matrix;
        assert!((&dep - &ComplexMatrix::identity(4).scale_real(0.5)).max_abs() < 1e-15);
        let l1 = liouvillian(&random_lindbladian(&mut rng(1), 2, 2, 1.0, 1.0)).unwrap();
        let l2 = liouvillian(&random_lindbladian(&mut rng(2), 2, 2, 1.0, 1.0)).unwrap();
        assert!(choi(&l1.difference(&l2)).matrix.trace().norm() < 1e-12);
    }

    #[test]
    fn self_distance_is_zero() {
        let p = rz_channel(0.3);
        let rep = diamond_distance(&p, &p, DiamondMethod::Sdp).unwrap();
        assert!(rep.value.abs() < 1e-9);
    }

    #[test]
    fn rotation_distance_closed_form() {
        for theta in [FRAC_PI_8, FRAC_PI_4, FRAC_PI_2] {
            let rep = diamond_distance(
                &Superoperator::identity(2),
                &rz_channel(theta),
                DiamondMethod::Sdp,
            )
            .unwrap();
            let want = 2.0 * (theta / 2.0).sin();
            assert!(!rep.degraded);
            assert!((rep.value - want).abs() < 1e-6, "θ={theta}: {rep:?}");
            assert!(rep.lower_bound <= want + 1e-9 && want <= rep.upper_bound + 1e-9);
            assert!(rep.gap() <= 1e-7);
        }
    }

    #[test]
    fn depolarizing_distance() {
        let rep = diamond_distance(&Superoperator::identity(2), &depolarizing(), DiamondMethod::Sdp).unwrap();
        assert!((rep.value - 1.5).abs() < 1e-6, "{rep:?}");
        let sw = diamond_distance(
            &Superoperator::identity(2),
            &depolarizing(),
            DiamondMethod::Sandwich,
        )
        .unwrap();
        assert!((sw.lower_bound - 1.5).abs() < 1e-12 && (sw.upper_bound - 3.0).abs() < 1e-12);
    }

    #[test]
    fn commutator_map_norm() {
        // ‖−i[σz/2, ·]‖⋄ = 1: the extreme eigenvalue gap of σz/2.
        let h = pauli::z().scale_real(0.5);
        let l = Lindbladian::closed(h).unwrap();
        let sdp = generator_distance(&l, &Lindbladian::empty(2), DiamondMethod::Sdp).unwrap();
        let sw = generator_distance(&l, &Lindbladian::empty(2), DiamondMethod::Sandwich).unwrap();
        assert!((sdp.value - 1.0).abs() < 1e-6, "{sdp:?}");
        assert!(sw.lower_bound <= sdp.value + 1e-9 && sdp.value <= sw.upper_bound + 1e-9);
    }

    #[test]
    fn qutrit_sdp_converges() {
        let l1 = random_lindbladian(&mut rng(4), 3, 2, 1.0, 0.5);
        let l2 = random_lindbladian(&mut rng(5), 3, 2, 1.0, 0.5);
        let rep = generator_distance(&l1, &l2, DiamondMethod::Sdp).unwrap();
        assert!(!rep.degraded, "{rep:?}");
        assert!(rep.gap() <= 1e-7);
    }

    #[test]
    fn empty_uniform_error() {
        let rep = uniform_error(
            &Lindbladian::empty(2),
            &ComplexMatrix::zeros(2),
            1.0,
            0.1,
            8,
            DiamondMethod::Sdp,
        )
        .unwrap();
        assert_eq!(rep.max_error, 0.0);
        assert_eq!(rep.slack, 0.0);
        assert!(uniform_error(
            &Lindbladian::empty(2),
            &ComplexMatrix::zeros(2),
            1.0,
            0.1,
            4,
            DiamondMethod::Sdp
        )
        .is_err());
    }

    #[test]
    fn duhamel_on_dissipative_pair() {
        let mut r = rng(8);
        let l1 = random_dissipative(&mut r, 2, 2, 1.0);
        let l2 = random_dissipative(&mut r, 2, 2, 1.0);
        let g = generator_distance(&l1, &l2, DiamondMethod::Sdp).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let p1 = propagator(&liouvillian(&l1).unwrap(), t).unwrap();
            let p2 = propagator(&liouvillian(&l2).unwrap(), t).unwrap();
            let lhs = diamond_distance(&p1, &p2, DiamondMethod::Sdp).unwrap();
            assert!(lhs.value <= t * g.value + 1e-6);
        }
    }

    fn channel(seed: u64) -> Superoperator {
        let l = random_lindbladian(&mut rng(seed), 2, 2, 1.0, 1.0);
        propagator(&liouvillian(&l).unwrap(), 0.7).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn triangle_and_symmetry(s in any::<u64>()) {
            let (a, b, c) = (channel(s), channel(s ^ 1), channel(s ^ 2));
            let ab = diamond_distance(&a, &b, DiamondMethod::Sdp).unwrap().value;
            let ba = diamond_distance(&b, &a, DiamondMethod::Sdp).unwrap().value;
            let bc = diamond_distance(&b, &c, DiamondMethod::Sdp).unwrap().value;
            let ac = diamond_distance(&a, &c, DiamondMethod::Sdp).unwrap().value;
            prop_assert!((ab - ba).abs() <= 1e-7);
            prop_assert!(ac <= ab + bc + 1e-7);
        }

        #[test]
        fn composition_is_contractive(s in any::<u64>()) {
            let (a, b, f) = (channel(s), channel(s ^ 5), channel(s ^ 9));
            let before = diamond_distance(&a, &b, DiamondMethod::Sdp).unwrap().value;
            let after = diamond_distance(&f.compose(&a), &f.compose(&b), DiamondMethod::Sdp).unwrap().value;
            prop_assert!(after <= before + 1e-7);
        }

        #[test]
        fn sandwich_contains_sdp(s in any::<u64>()) {
            let (a, b) = (channel(s), channel(s ^ 3));
            let sdp = diamond_distance(&a, &b, DiamondMethod::Sdp).unwrap();
            let sw = diamond_distance(&a, &b, DiamondMethod::Sandwich).unwrap();
            prop_assert!(sw.lower_bound <= sdp.value + 1e-9);
            prop_assert!(sdp.value <= sw.upper_bound + 1e-9);
        }
    }
}
