//! First-order structure of smooth purely dissipative families.
//!
//! A family 𝓛_{D,δ} that reproduces e^{−iHt} uniformly must vanish at δ = 0
//! and satisfy 𝓛_{D,δ} = δ𝓛_H + O(δ²). These routines check the
//! consequences numerically from finitely many samples.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{dissipator, liouvillian, Lindbladian, SuperKind, Superoperator};
use crate::numkernel::{ComplexMatrix, I};
use crate::random::{random_ket, rng};
use crate::tolerances;

type Sampler = dyn Fn(f64) -> Result<Lindbladian> + Send + Sync;

/// δ ↦ 𝓛_{D,δ}, sampled at `deltas`.
pub struct SmoothFamily {
    sampler: Box<Sampler>,
    deltas: Vec<f64>,
    dim: usize,
}

impl std::fmt::Debug for SmoothFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothFamily")
            .field("deltas", &self.deltas)
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

/// 0.1 · 2^{−k} for k = 0..=5.
pub fn default_deltas() -> Vec<f64> {
    (0..6).map(|k| 0.1 * 0.5f64.powi(k)).collect()
}

impl SmoothFamily {
    pub fn new(
        dim: usize,
        deltas: Vec<f64>,
        sampler: impl Fn(f64) -> Result<Lindbladian> + Send + Sync + 'static,
    ) -> Result<Self> {
        if deltas.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return Err(Error::input("delta samples must be positive"));
        }
        if deltas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::input("delta samples must be strictly descending"));
        }
        Ok(Self {
            sampler: Box::new(sampler),
            deltas,
            dim,
        })
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sample(&self, delta: f64) -> Result<Lindbladian> {
        let l = (self.sampler)(delta)?;
        if l.dim() != self.dim {
            return Err(Error::input(format!(
                "sample at δ = {delta} acts on {} levels, expected {}",
                l.dim(),
                self.dim
            )));
        }
        if !l.is_purely_dissipative() {
            return Err(Error::input(format!(
                "sample at δ = {delta} has a Hamiltonian part"
            )));
        }
        Ok(l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitStatus {
    /// 𝓛_δ/δ converges and the residual shrinks at least linearly.
    Consistent,
    /// 𝓛_δ/δ blows up: the family does not vanish at δ = 0.
    Divergent,
    /// Neither; the raw residuals are reported.
    Degraded,
}

#[derive(Debug, Clone)]
pub struct FirstOrderFit {
    /// Extrapolated lim_{δ→0} 𝓛_δ/δ.
    pub m: Superoperator,
    pub deltas: Vec<f64>,
    /// ‖𝓛_δ/δ − M‖_∞ per sample.
    pub residuals: Vec<f64>,
    /// Least-squares slope of log residual against log δ.
    pub residual_slope: f64,
    /// Least-squares slope of log ‖𝓛_δ/δ‖ against log δ.
    pub scaled_norm_slope: f64,
    pub status: FitStatus,
}

fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(_, &v)| v > 0.0)
        .map(|(&a, &b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Least-squares slope of ln y against ln x, skipping non-positive y.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    log_slope(x, y)
}

/// Neville extrapolation of the samples (δ_k, X_k) to δ = 0.
pub(crate) fn neville_at_zero(deltas: &[f64], xs: &[ComplexMatrix]) -> ComplexMatrix {
    let mut p: Vec<ComplexMatrix> = xs.to_vec();
    let n = deltas.len();
    for level in 1..n {
        for i in 0..n - level {
            let (a, b) = (deltas[i], deltas[i + level]);
            // P(0) = (a·P_{i+1} − b·P_i)/(a − b).
            let w = a / (a - b);
            p[i] = &p[i + 1].scale_real(w) + &p[i].scale_real(1.0 - w);
        }
    }
    p.swap_remove(0)
}

pub fn first_order_fit(fam: &SmoothFamily) -> Result<FirstOrderFit> {
    let deltas = fam.deltas.clone();
    if deltas.len() < 3 {
        return Err(Error::input("first_order_fit needs at least 3 delta samples"));
    }
    if deltas[0] / deltas[deltas.len() - 1] < 10.0 * (1.0 - 1e-12) {
        return Err(Error::input("delta samples must span at least a decade"));
    }
    let scaled: Vec<ComplexMatrix> = deltas
        .par_iter()
        .map(|&d| Ok(liouvillian(&fam.sample(d)?)?.matrix().scale_real(1.0 / d)))
        .collect::<Result<_>>()?;
    let m = neville_at_zero(&deltas, &scaled);
    let residuals: Vec<f64> = scaled.iter().map(|x| (x - &m).spectral_norm()).collect();
    let norms: Vec<f64> = scaled.iter().map(ComplexMatrix::spectral_norm).collect();
    let residual_slope = log_slope(&deltas, &residuals);
    let scaled_norm_slope = log_slope(&deltas, &norms);
    let scale = norms.iter().cloned().fold(0.0, f64::max).max(1.0);
    let status = if scaled_norm_slope < -0.5 {
        FitStatus::Divergent
    } else if residuals.iter().all(|&r| r <= 1e-12 * scale)
        || residual_slope >= tolerances::RIGIDITY_MIN_SLOPE
    {
        FitStatus::Consistent
    } else {
        FitStatus::Degraded
    };
    Ok(FirstOrderFit {
        m: Superoperator::new(fam.dim, m, SuperKind::Generator)?,
        deltas,
        residuals,
        residual_slope,
        scaled_norm_slope,
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZerothOrderReport {
    /// Σ_j 𝓓_{F_j} vanishes to the gate tolerance.
    pub applicable: bool,
    pub hypothesis_residual: f64,
    /// ‖F_j − (Tr F_j/d) I‖_∞.
    pub deviations: Vec<f64>,
    /// Tr F_j / d.
    pub scalars: Vec<C64>,
    /// max over seeded pure states and jumps of ⟨F†F⟩ − |⟨F⟩|².
    pub max_variance: f64,
    pub pass: bool,
}

/// Check that jumps with vanishing total dissipator are multiples of I.
pub fn zeroth_order_identity_check(jumps: &[ComplexMatrix]) -> Result<ZerothOrderReport> {
    let Some(first) = jumps.first() else {
        return Err(Error::input(
            "zeroth_order_identity_check needs at least one jump",
        ));
    };
    let d = first.dim();
    if jumps.iter().any(|f| f.dim() != d) {
        return Err(Error::input("jumps have different dimensions"));
    }
    let mut total = ComplexMatrix::zeros(d * d);
    for f in jumps {
        total += dissipator(f).matrix();
    }
    let hyp = total.max_abs();
    let scalars: Vec<C64> = jumps.iter().map(|f| f.trace() / d as f64).collect();
    let deviations: Vec<f64> = jumps
        .iter()
        .zip(&scalars)
        .map(|(f, c)| (f - &ComplexMatrix::identity(d).scale(*c)).spectral_norm())
        .collect();
    let mut r = rng(0x5eed);
    let mut max_var: f64 = 0.0;
    for _ in 0..50 {
        let psi = random_ket(&mut r, d);
        for f in jumps {
            let fpsi = f.mul_vec(&psi);
            let mean: C64 = psi.iter().zip(&fpsi).map(|(a, b)| a.conj() * b).sum();
            let second: f64 = fpsi.iter().map(|z| z.norm_sqr()).sum();
            max_var = max_var.max(second - mean.norm_sqr());
        }
    }
    let applicable = hyp <= tolerances::RIGIDITY_GATE;
    let pass = applicable
        && deviations.iter().all(|&x| x <= tolerances::RIGIDITY_SCALAR)
        && max_var <= tolerances::RIGIDITY_VARIANCE;
    Ok(ZerothOrderReport {
        applicable,
        hypothesis_residual: hyp,
        deviations,
        scalars,
        max_variance: max_var,
        pass,
    })
}

/// ‖H − Σ_j (c_j G_j† − c_j* G_j)/(2i)‖_∞, where F_j = c_j I + δ G_j + O(δ²).
pub fn first_order_jump_constraint(c: &[C64], g: &[ComplexMatrix], h: &ComplexMatrix) -> Result<f64> {
    if c.len() != g.len() {
        return Err(Error::input(format!(
            "{} scalars but {} first-order jump terms",
            c.len(),
            g.len()
        )));
    }
    if g.iter().any(|x| x.dim() != h.dim()) {
        return Err(Error::input("first-order jump terms and H differ in dimension"));
    }
    let mut rhs = ComplexMatrix::zeros(h.dim());
    for (cj, gj) in c.iter().zip(g) {
        rhs += &(&gj.adjoint().scale(*cj) - &gj.scale(cj.conj()));
    }
    let rhs = rhs.scale(-I * 0.5);
    Ok((h - &rhs).spectral_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gauge_transform, mimic_local, mimic_single, mimic_unitary, GaugeParams};
    use crate::lindblad::hamiltonian_generator;
    use crate::numkernel::{pauli, ONE, ZERO};
    use crate::random::{random_hermitian, random_unitary};

    fn sz2() -> ComplexMatrix {
        pauli::z().scale_real(0.5)
    }

    #[test]
    fn mimic_single_fit() {
        let h = sz2();
        let fam = SmoothFamily::new(2, default_deltas(), move |d| {
            Ok(mimic_single(&h, d)?.into_lindbladian())
        })
        .unwrap();
        let fit = first_order_fit(&fam).unwrap();
        assert_eq!(fit.status, FitStatus::Consistent);
        let err = (fit.m.matrix() - hamiltonian_generator(&sz2()).matrix()).spectral_norm();
        assert!(err <= 1e-8, "{err}");
        assert!((fit.residual_slope - 1.0).abs() < 1e-6);
        // The residual is exactly δ𝓓_H.
        let dh = dissipator(&sz2()).spectral_norm();
        for (d, r) in fit.deltas.iter().zip(&fit.residuals) {
            assert!((r - d * dh).abs() < 1e-9);
        }
    }

    #[test]
    fn mimic_unitary_fit() {
        let h = random_hermitian(&mut rng(2), 3, 1.0);
        let hc = h.clone();
        let fam = SmoothFamily::new(3, default_deltas(), move |d| {
            Ok(mimic_unitary(&hc, d)?.into_lindbladian())
        })
        .unwrap();
        let fit = first_order_fit(&fam).unwrap();
        assert_eq!(fit.status, FitStatus::Consistent);
        let err = (fit.m.matrix() - hamiltonian_generator(&h).matrix()).spectral_norm();
        assert!(err <= 1e-8, "{err}");
    }

    #[test]
    fn constant_family_diverges() {
        let fam = SmoothFamily::new(2, default_deltas(), |_| {
            Lindbladian::dissipative(vec![pauli::minus()])
        })
        .unwrap();
        let fit = first_order_fit(&fam).unwrap();
        assert_eq!(fit.status, FitStatus::Divergent);
        assert!((fit.scaled_norm_slope + 1.0).abs() < 1e-9);
    }

    #[test]
    fn coarse_samples_rejected() {
        let h = sz2();
        let fam = SmoothFamily::new(2, vec![0.1, 0.08, 0.05], move |d| {
            Ok(mimic_single(&h, d)?.into_lindbladian())
        })
        .unwrap();
        assert!(first_order_fit(&fam).is_err());
        assert!(SmoothFamily::new(2, vec![0.1, 0.2], |_| Ok(Lindbladian::empty(2))).is_err());
    }

    #[test]
    fn gauge_mixed_family_has_same_limit() {
        let id = ComplexMatrix::identity(2);
        let terms = vec![
            pauli::z().kron(&id),
            id.kron(&pauli::x()),
            pauli::y().kron(&pauli::y()),
        ];
        let u = random_unitary(&mut rng(9), 3);
        let plain_terms = terms.clone();
        let plain = SmoothFamily::new(4, default_deltas(), move |d| {
            Ok(mimic_local(&plain_terms, d)?.into_lindbladian())
        })
        .unwrap();
        let mixed = SmoothFamily::new(4, default_deltas(), move |d| {
            let l = mimic_local(&terms, d)?.into_lindbladian();
            let g = GaugeParams::new(u.clone(), vec![ZERO; 3])?;
            let out = gauge_transform(&l, &g)?;
            Lindbladian::dissipative(out.jumps().to_vec())
        })
        .unwrap();
        let a = first_order_fit(&plain).unwrap();
        let b = first_order_fit(&mixed).unwrap();
        assert!((a.m.matrix() - b.m.matrix()).max_abs() <= 1e-9);
    }

    #[test]
    fn zeroth_order_examples() {
        let id = ComplexMatrix::identity(2);
        let rep = zeroth_order_identity_check(&[id.scale_real(2.0), id.scale(C64::new(1.0, 1.0))]).unwrap();
        assert!(rep.applicable && rep.pass);
        assert!((rep.scalars[0] - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((rep.scalars[1] - C64::new(1.0, 1.0)).norm() < 1e-15);
        assert!(rep.max_variance <= 1e-12);

        let rep = zeroth_order_identity_check(&[pauli::x()]).unwrap();
        assert!(!rep.applicable && !rep.pass);

        let z = pauli::z().scale_real(1e-3);
        let rep = zeroth_order_identity_check(&[&id + &z, &id - &z]).unwrap();
        assert!(!rep.applicable, "{rep:?}");
        assert!(rep.hypothesis_residual > 1e-10);
    }

    #[test]
    fn constraint_examples() {
        let h = random_hermitian(&mut rng(3), 3, 1.0);
        let g = h.scale(-I);
        assert!(first_order_jump_constraint(&[ONE], std::slice::from_ref(&g), &h).unwrap() < 1e-15);
        let r = first_order_jump_constraint(&[ZERO], &[g], &h).unwrap();
        assert!((r - h.spectral_norm()).abs() < 1e-14);
        // Normal form F_j = √γ_j (I − δA_j): c_j = √γ_j, G_j = −√γ_j A_j.
        let a = h.scale(I);
        let resid = first_order_jump_constraint(&[ONE], &[a.scale_real(-1.0)], &h).unwrap();
        assert!(resid < 1e-15);
        assert!(first_order_jump_constraint(&[ONE, ONE], std::slice::from_ref(&h), &h).is_err());
    }
}
