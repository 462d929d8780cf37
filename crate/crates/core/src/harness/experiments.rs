use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::blochgeo::{
    bloch_affine, budget_check, lower_bound_certificate, trajectory_diagnostics, BlochAffine, BudgetReport,
    LowerBoundCertificate, Vec3,
};
use crate::constructions::{
    dissipate_lindbladian, freeze_jump, gauge_cost, gauge_optimize, gauge_transform, mimic_single,
    mimic_unitary, GaugeParams,
};
use crate::error::{Error, Result};
use crate::lindblad::{
    cptp_certificate, dissipator, hamiltonian_generator, liouvillian, propagator, vec_index, DensityMatrix,
    Lindbladian, SuperKind, Superoperator,
};
use crate::metrics::{
    diamond_distance, diamond_norm, trace_distance, uniform_error, uniform_error_to, DiamondMethod,
    UniformErrorReport,
};
use crate::numkernel::{pauli, ComplexMatrix, I};
use crate::random::{random_pure_state, random_unitary, rng};
use crate::rigidity::{
    default_deltas, first_order_fit, first_order_jump_constraint, neville_at_zero,
    zeroth_order_identity_check, FitStatus, SmoothFamily, ZerothOrderReport,
};
use crate::tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreezeState {
    pub label: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreezeReport {
    pub delta: f64,
    pub t: f64,
    pub states: Vec<FreezeState>,
    pub max_distance: f64,
    pub mean_distance: f64,
    /// 2δt‖H‖² + 1e−9.
    pub bound: f64,
    pub pass: bool,
    /// max ≤ 2·mean.
    pub state_independent: bool,
    /// Measured ‖𝓓_H‖⋄ and the 2‖H‖² it is checked against.
    pub dissipator_norm: f64,
    pub dissipator_norm_bound: f64,
    /// Largest displacement under e^{−iHt} alone.
    pub control_max_distance: f64,
    pub min_choi_eigenvalue: f64,
    pub max_partial_trace_residual: f64,
    pub note: String,
}

fn initial_states(d: usize, seed: u64) -> Result<Vec<(String, DensityMatrix)>> {
    let mut out = Vec::new();
    if d == 2 {
        for (k, axis) in ["x", "y", "z"].iter().enumerate() {
            for sign in [1.0, -1.0] {
                let mut r = [0.0; 3];
                r[k] = sign;
                let label = format!("{}{axis}", if sign > 0.0 { '+' } else { '-' });
                out.push((label, DensityMatrix::from_bloch(r)?));
            }
        }
    } else {
        for k in 0..d {
            let mut ket = vec![C64::new(0.0, 0.0); d];
            ket[k] = C64::new(1.0, 0.0);
            out.push((format!("basis_{k}"), DensityMatrix::pure(&ket)?));
        }
    }
    let mut r = rng(seed);
    for k in 0..10 {
        out.push((format!("random_{k}"), random_pure_state(&mut r, d)));
    }
    Ok(out)
}

fn displacements(p: &Superoperator, states: &[(String, DensityMatrix)]) -> Result<Vec<FreezeState>> {
    states
        .iter()
        .map(|(label, rho)| {
            let out = DensityMatrix::new(p.apply(rho.matrix())?)?;
            Ok(FreezeState {
                label: label.clone(),
                distance: trace_distance(rho, &out)?,
            })
        })
        .collect()
}

/// Evolve Pauli eigenstates and seeded random states under H plus the
/// freezing jump, and compare with the unfrozen evolution.
pub fn freeze_experiment(h: &ComplexMatrix, delta: f64, t: f64, seed: u64) -> Result<FreezeReport> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::input(format!("t must be positive, got {t}")));
    }
    let l = freeze_jump(h, delta)?;
    let states = initial_states(h.dim(), seed)?;
    let p = propagator(&liouvillian(&l)?, t)?;
    let control = propagator(&hamiltonian_generator(h), t)?;
    let cp = cptp_certificate(&p);
    let cc = cptp_certificate(&control);
    let frozen = displacements(&p, &states)?;
    let unfrozen = displacements(&control, &states)?;
    let max = frozen.iter().map(|s| s.distance).fold(0.0, f64::max);
    let mean = frozen.iter().map(|s| s.distance).sum::<f64>() / frozen.len() as f64;
    let hn = h.spectral_norm();
    let bound = 2.0 * delta * t * hn * hn + 1e-9;
    Ok(FreezeReport {
        delta,
        t,
        max_distance: max,
        mean_distance: mean,
        bound,
        pass: max <= bound,
        state_independent: max <= 2.0 * mean,
        dissipator_norm: diamond_norm(&dissipator(h), DiamondMethod::Sdp)?.value,
        dissipator_norm_bound: 2.0 * hn * hn,
        control_max_distance: unfrozen.iter().map(|s| s.distance).fold(0.0, f64::max),
        min_choi_eigenvalue: cp.min_choi_eigenvalue.min(cc.min_choi_eigenvalue),
        max_partial_trace_residual: cp.partial_trace_residual.max(cc.partial_trace_residual),
        states: frozen,
        note: "total generator is δ𝓓_H: every input state is slowed, not only a protected subspace".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvertReport {
    pub t: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub dissipator_norm: f64,
    pub uniform: UniformErrorReport,
    /// Sup over the grid of the diamond distance is at most ε.
    pub pass: bool,
}

/// Simulate e^{s𝓛} with the purely dissipative form at δ = ε/(t‖𝓓_H‖⋄).
pub fn convert_experiment(
    l: &Lindbladian,
    t: f64,
    epsilon: f64,
    grid_n: usize,
    method: DiamondMethod,
) -> Result<ConvertReport> {
    if !(t > 0.0) || !(epsilon > 0.0) {
        return Err(Error::input("t and epsilon must be positive"));
    }
    let dn = diamond_norm(&dissipator(&l.hamiltonian_or_zero()), method)?.value;
    if !(dn > 0.0) {
        return Err(Error::input("Lindbladian has no Hamiltonian part to dissipate"));
    }
    convert_with_delta(l, t, epsilon, (epsilon / (t * dn)).min(1.0), grid_n, method)
}

pub fn convert_with_delta(
    l: &Lindbladian,
    t: f64,
    epsilon: f64,
    delta: f64,
    grid_n: usize,
    method: DiamondMethod,
) -> Result<ConvertReport> {
    let lp = dissipate_lindbladian(l, delta)?;
    let uniform = uniform_error_to(&lp, l, t, delta, grid_n, method)?;
    Ok(ConvertReport {
        t,
        epsilon,
        delta,
        dissipator_norm: diamond_norm(&dissipator(&l.hamiltonian_or_zero()), method)?.value,
        pass: uniform.max_error <= epsilon,
        uniform,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeReport {
    pub delta: f64,
    pub cost_before: f64,
    /// Cost after the c = −1 shift, and δ‖H‖ + δ²‖H‖² for comparison.
    pub worked_cost: f64,
    pub worked_expected_cost: f64,
    /// ‖H′ − δH‖ and ‖F′ + iδH‖ after the c = −1 shift.
    pub worked_hamiltonian_residual: f64,
    pub worked_jump_residual: f64,
    pub optimized_cost: f64,
    pub optimized_shift: [f64; 2],
    pub history: Vec<f64>,
    pub stationary: bool,
    /// Seeded random (U, c) checked in addition to the two above.
    pub random_cases: usize,
    /// max ‖𝓛′ − 𝓛‖ over every transform applied.
    pub max_invariance_residual: f64,
}

fn invariance(l: &Lindbladian, g: &GaugeParams) -> Result<(Lindbladian, f64)> {
    let lp = gauge_transform(l, g)?;
    let r = (liouvillian(&lp)?.matrix() - liouvillian(l)?.matrix()).spectral_norm();
    Ok((lp, r))
}

pub fn gauge_experiment(h: &ComplexMatrix, delta: f64, budget: usize, seed: u64) -> Result<GaugeReport> {
    let l = mimic_single(h, delta)?.into_lindbladian();
    let (worked, mut max_r) = invariance(&l, &GaugeParams::shift(vec![C64::new(-1.0, 0.0)]))?;
    let dh = h.scale_real(delta);
    let hn = h.spectral_norm();
    let opt = gauge_optimize(&l, budget)?;
    let (_, r) = invariance(&l, &opt.params)?;
    max_r = max_r.max(r);
    let mut rg = rng(seed);
    let random_cases = 10;
    for _ in 0..random_cases {
        let u = random_unitary(&mut rg, 1);
        let c = vec![C64::new(rg.random_range(-2.0..2.0), rg.random_range(-2.0..2.0))];
        let (_, r) = invariance(&l, &GaugeParams::new(u, c)?)?;
        max_r = max_r.max(r);
    }
    Ok(GaugeReport {
        delta,
        cost_before: gauge_cost(&l),
        worked_cost: gauge_cost(&worked),
        worked_expected_cost: delta * hn + delta * delta * hn * hn,
        worked_hamiltonian_residual: (&worked.hamiltonian_or_zero() - &dh).spectral_norm(),
        worked_jump_residual: (&worked.jumps()[0] + &dh.scale(I)).spectral_norm(),
        optimized_cost: opt.cost,
        optimized_shift: [opt.params.c[0].re, opt.params.c[0].im],
        history: opt.history,
        stationary: opt.stationary,
        random_cases,
        max_invariance_residual: max_r,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub nu: f64,
    pub t: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub uniform: UniformErrorReport,
    /// The family reproduces e^{−i(ν/2)σz s} within ε on the grid, slack included.
    pub verified: bool,
    pub bloch: BlochAffine,
    pub budget: BudgetReport,
    pub saturation: f64,
    pub path_length: f64,
    pub singular_values_at_t: Vec3,
    pub det_at_t: f64,
    pub rotation_deviation: f64,
    pub certificate: LowerBoundCertificate,
    /// Verified, applicable, and below the time bound.
    pub contradicted: bool,
}

/// Run the Bloch-geometry certificate on the mimic family for
/// H = (ν/2)σz at δ = ε/t, T = t/δ.
pub fn certificate_experiment(
    nu: f64,
    t: f64,
    epsilon: f64,
    grid_n: usize,
    method: DiamondMethod,
) -> Result<CertificateReport> {
    if !(t > 0.0) || !(epsilon > 0.0) || !nu.is_finite() || nu == 0.0 {
        return Err(Error::input(
            "certificate needs t, epsilon > 0 and finite nonzero nu",
        ));
    }
    let h = pauli::z().scale_real(nu / 2.0);
    let delta = epsilon / t;
    let l = mimic_single(&h, delta)?.into_lindbladian();
    let uniform = uniform_error(&l, &h, t, delta, grid_n, method)?;
    let big_t = t / delta;
    let b = bloch_affine(&l)?;
    let c = l.jump_bound();
    let budget = budget_check(&b, l.jump_count(), c);
    let diag = trajectory_diagnostics(&l, nu, t, big_t, grid_n)?;
    let cert = lower_bound_certificate(&b, &diag, l.jump_count(), c, epsilon, nu, t, big_t)?;
    let verified = uniform.certified() <= epsilon;
    Ok(CertificateReport {
        nu,
        t,
        epsilon,
        delta,
        verified,
        contradicted: verified && cert.contradicted(),
        saturation: budget.saturation(),
        bloch: b,
        budget,
        path_length: diag.path_length,
        singular_values_at_t: diag.singular_values_at_t,
        det_at_t: diag.det_at_t,
        rotation_deviation: diag.rotation_deviation,
        certificate: cert,
        uniform,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub family: String,
    pub status: FitStatus,
    /// ‖M − 𝓛_H‖ for the extrapolated limit M, when a target exists.
    pub target_residual: Option<f64>,
    pub max_residual: f64,
    pub residual_slope: f64,
    pub scaled_norm_slope: f64,
    /// Normal-form checks on the extrapolated jump expansion.
    pub zeroth_order: Option<ZerothOrderReport>,
    pub first_order_constraint: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub fits: Vec<FitSummary>,
    pub control_rejected: bool,
    pub pass: bool,
}

type JumpSampler = fn(&ComplexMatrix, f64) -> Result<Lindbladian>;

fn summarize(name: &str, h: &ComplexMatrix, sample: JumpSampler) -> Result<FitSummary> {
    let hc = h.clone();
    let fam = SmoothFamily::new(h.dim(), default_deltas(), move |d| sample(&hc, d))?;
    let fit = first_order_fit(&fam)?;
    let target = hamiltonian_generator(h);
    // F_j(δ) = c_j I + δ G_j + O(δ²): extrapolate c_j, then G_j.
    let deltas = fam.deltas().to_vec();
    let samples: Vec<Lindbladian> = deltas.iter().map(|&d| fam.sample(d)).collect::<Result<_>>()?;
    let m = samples[0].jump_count();
    let mut f0 = Vec::with_capacity(m);
    let mut g = Vec::with_capacity(m);
    for j in 0..m {
        let fj: Vec<ComplexMatrix> = samples.iter().map(|l| l.jumps()[j].clone()).collect();
        let c = neville_at_zero(&deltas, &fj);
        let slopes: Vec<ComplexMatrix> = fj
            .iter()
            .zip(&deltas)
            .map(|(f, &d)| (f - &c).scale_real(1.0 / d))
            .collect();
        g.push(neville_at_zero(&deltas, &slopes));
        f0.push(c);
    }
    let zeroth = zeroth_order_identity_check(&f0)?;
    let constraint = first_order_jump_constraint(&zeroth.scalars, &g, h)?;
    Ok(FitSummary {
        family: name.into(),
        status: fit.status,
        target_residual: Some((fit.m.matrix() - target.matrix()).spectral_norm()),
        max_residual: fit.residuals.iter().cloned().fold(0.0, f64::max),
        residual_slope: fit.residual_slope,
        scaled_norm_slope: fit.scaled_norm_slope,
        zeroth_order: Some(zeroth),
        first_order_constraint: Some(constraint),
    })
}

/// First-order fits for the single-jump and unitary-jump mimic families,
/// with a constant-dissipator family as negative control.
pub fn rigidity_experiment(h: &ComplexMatrix) -> Result<RigidityReport> {
    let single = summarize("mimic_single", h, |h, d| {
        Ok(mimic_single(h, d)?.into_lindbladian())
    })?;
    let unitary = summarize("mimic_unitary", h, |h, d| {
        Ok(mimic_unitary(h, d)?.into_lindbladian())
    })?;
    let d = h.dim();
    let mut lower = ComplexMatrix::zeros(d);
    lower[(0, 1)] = C64::new(1.0, 0.0);
    let control_fam = SmoothFamily::new(d, default_deltas(), move |_| {
        Lindbladian::dissipative(vec![lower.clone()])
    })?;
    let cf = first_order_fit(&control_fam)?;
    let control = FitSummary {
        family: "constant_dissipator".into(),
        status: cf.status,
        target_residual: None,
        max_residual: cf.residuals.iter().cloned().fold(0.0, f64::max),
        residual_slope: cf.residual_slope,
        scaled_norm_slope: cf.scaled_norm_slope,
        zeroth_order: None,
        first_order_constraint: None,
    };
    let family_ok = |f: &FitSummary| {
        f.status == FitStatus::Consistent
            && f.target_residual.is_some_and(|r| r <= 1e-8)
            && f.zeroth_order.as_ref().is_some_and(|z| z.pass)
            && f.first_order_constraint.is_some_and(|r| r <= 1e-8)
    };
    let control_rejected = control.status == FitStatus::Divergent;
    let pass = family_ok(&single) && family_ok(&unitary) && control_rejected;
    Ok(RigidityReport {
        fits: vec![single, unitary, control],
        control_rejected,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiamondOracle {
    pub name: String,
    pub expected: f64,
    pub value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub iterations: usize,
    pub degraded: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiamondReport {
    pub method: DiamondMethod,
    pub oracles: Vec<DiamondOracle>,
    pub pass: bool,
}

fn depolarizing_qubit() -> Result<Superoperator> {
    let mut m = ComplexMatrix::zeros(4);
    for a in 0..2 {
        for j in 0..2 {
            m[(vec_index(2, a, a), vec_index(2, j, j))] = C64::new(0.5, 0.0);
        }
    }
    Superoperator::new(2, m, SuperKind::Propagator)
}

/// Closed-form channel distances: identity against z-rotations and against
/// the completely depolarizing qubit channel.
pub fn diamond_experiment(method: DiamondMethod) -> Result<DiamondReport> {
    let id = Superoperator::identity(2);
    let gen = hamiltonian_generator(&pauli::z().scale_real(0.5));
    let mut cases = Vec::new();
    for (name, theta) in [
        ("rz_pi_8", std::f64::consts::FRAC_PI_8),
        ("rz_pi_4", std::f64::consts::FRAC_PI_4),
        ("rz_pi_2", std::f64::consts::FRAC_PI_2),
    ] {
        cases.push((name, propagator(&gen, theta)?, 2.0 * (theta / 2.0).sin()));
    }
    cases.push(("depolarizing", depolarizing_qubit()?, 1.5));
    let oracles: Vec<DiamondOracle> = cases
        .into_iter()
        .map(|(name, ch, expected)| {
            let r = diamond_distance(&id, &ch, method)?;
            let pass = match method {
                DiamondMethod::Sdp => {
                    (r.value - expected).abs() <= 1e-6 && r.gap() <= tolerances::SDP_BRACKET
                }
                DiamondMethod::Sandwich => {
                    r.lower_bound <= expected + 1e-9 && expected <= r.upper_bound + 1e-9
                }
            };
            Ok(DiamondOracle {
                name: name.into(),
                expected,
                value: r.value,
                lower_bound: r.lower_bound,
                upper_bound: r.upper_bound,
                iterations: r.iterations,
                degraded: r.degraded,
                pass,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DiamondReport {
        method,
        pass: oracles.iter().all(|o| o.pass),
        oracles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sz2() -> ComplexMatrix {
        pauli::z().scale_real(0.5)
    }

    #[test]
    fn freeze_small_delta() {
        let r = freeze_experiment(&sz2(), 1e-3, 1.0, 7).unwrap();
        assert_eq!(r.states.len(), 16);
        assert!(r.pass && r.max_distance <= 2e-3);
        // Dephasing at rate δ/2 moves |+⟩ by (1 − e^{−δt/2})/2.
        let plus = r.states.iter().find(|s| s.label == "+x").unwrap();
        assert!((plus.distance - (1.0 - (-5e-4f64).exp()) / 2.0).abs() < 1e-12);
        assert!(r.state_independent);
        assert!(r.control_max_distance > 0.4);
        assert!(r.dissipator_norm <= r.dissipator_norm_bound + 1e-7);
    }

    #[test]
    fn freeze_is_seed_deterministic() {
        let a = freeze_experiment(&sz2(), 0.01, 1.0, 3).unwrap();
        let b = freeze_experiment(&sz2(), 0.01, 1.0, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gauge_worked_example() {
        let delta = 0.1;
        let r = gauge_experiment(&sz2(), delta, 40, 1).unwrap();
        assert!((r.cost_before - (1.0 + delta * delta / 4.0)).abs() < 1e-12);
        assert!((r.worked_cost - (delta / 2.0 + delta * delta / 4.0)).abs() < 1e-12);
        assert!(r.worked_hamiltonian_residual < 1e-15 && r.worked_jump_residual < 1e-15);
        assert!(r.optimized_cost <= r.worked_cost + 1e-9);
        assert!(r.max_invariance_residual <= 1e-11);
    }

    #[test]
    fn rigidity_passes_on_qubit() {
        let r = rigidity_experiment(&sz2()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn sandwich_oracles_bracket() {
        let r = diamond_experiment(DiamondMethod::Sandwich).unwrap();
        assert!(r.pass);
    }

    fn damped_qubit() -> Lindbladian {
        Lindbladian::new(2, Some(sz2()), vec![pauli::minus().scale_real(0.3f64.sqrt())]).unwrap()
    }

    #[test]
    fn convert_damped_qubit() {
        let r = convert_experiment(&damped_qubit(), 2.0, 0.05, 16, DiamondMethod::Sdp).unwrap();
        assert!(r.pass, "{}", r.uniform.max_error);
        assert!((r.delta - 0.05 / (2.0 * 0.5)).abs() < 1e-6);
        let half =
            convert_with_delta(&damped_qubit(), 2.0, 0.05, r.delta / 2.0, 16, DiamondMethod::Sdp).unwrap();
        let ratio = r.uniform.max_error / half.uniform.max_error;
        assert!((ratio / 2.0 - 1.0).abs() <= 0.15, "{ratio}");
    }

    #[test]
    fn convert_hamiltonian_only_matches_mimic() {
        let l = Lindbladian::closed(sz2()).unwrap();
        let r = convert_with_delta(&l, 2.0, 0.05, 0.025, 16, DiamondMethod::Sdp).unwrap();
        let fam = mimic_single(&sz2(), 0.025).unwrap();
        let u = uniform_error(fam.lindbladian(), &sz2(), 2.0, 0.025, 16, DiamondMethod::Sdp).unwrap();
        assert!((r.uniform.max_error - u.max_error).abs() < 1e-9);
    }

    #[test]
    fn convert_needs_hamiltonian() {
        let l = Lindbladian::dissipative(vec![pauli::minus()]).unwrap();
        assert!(matches!(
            convert_experiment(&l, 1.0, 0.05, 8, DiamondMethod::Sdp),
            Err(Error::Input(_))
        ));
    }
}
