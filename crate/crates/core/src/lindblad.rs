//! Lindbladians, their Liouvillian superoperators, and propagation.
//!
//! Density matrices are vectorized by stacking columns, so that
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. The Kronecker formulas here and the Choi
//! construction in [`crate::metrics`] both rely on this convention.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::metrics;
use crate::numkernel::{expm, hermitian_eig, ComplexMatrix, I, ONE};
use crate::tolerances;

/// Vectorization conventions. Only column stacking is used in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vectorization {
    ColumnStacking,
}

/// The vectorization convention of every superoperator in this crate.
pub const VECTORIZATION: Vectorization = Vectorization::ColumnStacking;

/// Position of `X[row, col]` inside `vec(X)`.
#[inline]
pub fn vec_index(d: usize, row: usize, col: usize) -> usize {
    match VECTORIZATION {
        Vectorization::ColumnStacking => row + col * d,
    }
}

/// A GKSL generator: optional Hamiltonian plus jump operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Lindbladian {
    dim: usize,
    hamiltonian: Option<ComplexMatrix>,
    jumps: Vec<ComplexMatrix>,
    jump_bound: f64,
}

impl Lindbladian {
    pub fn new(dim: usize, hamiltonian: Option<ComplexMatrix>, jumps: Vec<ComplexMatrix>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("Lindbladian dimension must be positive"));
        }
        if let Some(h) = &hamiltonian {
            if h.dim() != dim {
                return Err(Error::input(format!(
                    "Hamiltonian is {}x{}, expected {dim}x{dim}",
                    h.dim(),
                    h.dim()
                )));
            }
            if !h.is_finite() {
                return Err(Error::input("Hamiltonian has non-finite entries"));
            }
            h.check_hermitian(tolerances::HERMITIAN_INPUT)?;
        }
        for (j, f) in jumps.iter().enumerate() {
            if f.dim() != dim {
                return Err(Error::input(format!(
                    "jump {j} is {}x{}, expected {dim}x{dim}",
                    f.dim(),
                    f.dim()
                )));
            }
            if !f.is_finite() {
                return Err(Error::input(format!("jump {j} has non-finite entries")));
            }
        }
        let jump_bound = jumps.iter().map(ComplexMatrix::spectral_norm).fold(0.0, f64::max);
        Ok(Self {
            dim,
            hamiltonian,
            jumps,
            jump_bound,
        })
    }

    /// Purely dissipative Lindbladian with the given jumps.
    pub fn dissipative(jumps: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = jumps
            .first()
            .map(ComplexMatrix::dim)
            .ok_or_else(|| Error::input("at least one jump is required to infer the dimension"))?;
        Self::new(dim, None, jumps)
    }

    /// Closed-system generator −i[H, ·].
    pub fn closed(h: ComplexMatrix) -> Result<Self> {
        Self::new(h.dim(), Some(h), Vec::new())
    }

    /// The zero generator on `dim` levels.
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            hamiltonian: None,
            jumps: Vec::new(),
            jump_bound: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> Option<&ComplexMatrix> {
        self.hamiltonian.as_ref()
    }

    pub fn jumps(&self) -> &[ComplexMatrix] {
        &self.jumps
    }

    /// Number of jump operators, m.
    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }

    /// C = max_j ‖F_j‖_∞.
    pub fn jump_bound(&self) -> f64 {
        self.jump_bound
    }

    /// True when there is no Hamiltonian term (or it is exactly zero).
    pub fn is_purely_dissipative(&self) -> bool {
        self.hamiltonian.as_ref().is_none_or(|h| h.max_abs() == 0.0)
    }

    /// The Hamiltonian, or the zero matrix when absent.
    pub fn hamiltonian_or_zero(&self) -> ComplexMatrix {
        self.hamiltonian
            .clone()
            .unwrap_or_else(|| ComplexMatrix::zeros(self.dim))
    }
}

/// What a superoperator represents; generators and propagators carry
/// different invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperKind {
    /// Trace-annihilating generator of a semigroup.
    Generator,
    /// e^{τ𝓛} for a generator 𝓛.
    Propagator,
    /// Any other linear map (differences, compositions).
    Map,
}

/// A linear map on d×d matrices, stored as a d²×d² matrix on vec(ρ).
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
    kind: SuperKind,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: ComplexMatrix, kind: SuperKind) -> Result<Self> {
        if matrix.dim() != dim * dim {
            return Err(Error::input(format!(
                "superoperator on {dim} levels must be {0}x{0}, got {1}x{1}",
                dim * dim,
                matrix.dim()
            )));
        }
        Ok(Self { dim, matrix, kind })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim * dim),
            kind: SuperKind::Propagator,
        }
    }

    pub fn zero_generator(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::zeros(dim * dim),
            kind: SuperKind::Generator,
        }
    }

    /// Hilbert-space dimension d (the matrix is d²×d²).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn kind(&self) -> SuperKind {
        self.kind
    }

    /// Φ(X).
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let v = vectorize_matrix(x);
        if v.len() != self.matrix.dim() {
            return Err(Error::input(format!(
                "cannot apply a superoperator on {} levels to a {}x{} matrix",
                self.dim,
                x.dim(),
                x.dim()
            )));
        }
        devectorize(&self.matrix.mul_vec(&v), self.dim)
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in compose");
        let kind = match (self.kind, other.kind) {
            (SuperKind::Propagator, SuperKind::Propagator) => SuperKind::Propagator,
            _ => SuperKind::Map,
        };
        Self {
            dim: self.dim,
            matrix: self.matrix.matmul(&other.matrix),
            kind,
        }
    }

    /// Linear combination, tagged as a generator when both operands are
    /// generators (the set of trace-annihilating maps is a vector space).
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in lin_comb");
        let kind = if self.kind == SuperKind::Generator && other.kind == SuperKind::Generator {
            SuperKind::Generator
        } else {
            SuperKind::Map
        };
        Self {
            dim: self.dim,
            matrix: &self.matrix.scale_real(a) + &other.matrix.scale_real(b),
            kind,
        }
    }

    /// self − other as a plain map.
    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.lin_comb(1.0, other, -1.0);
        if out.kind != SuperKind::Generator {
            out.kind = SuperKind::Map;
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.scale_real(s),
            kind: if self.kind == SuperKind::Generator {
                SuperKind::Generator
            } else {
                SuperKind::Map
            },
        }
    }

    /// max |vec(I)† · S| over columns; zero for trace-annihilating maps.
    pub fn trace_annihilation_defect(&self) -> f64 {
        let d = self.dim;
        let n = d * d;
        (0..n)
            .map(|c| {
                (0..d)
                    .map(|k| self.matrix[(vec_index(d, k, k), c)])
                    .sum::<C64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// Spectral norm of the d²×d² matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.matrix.spectral_norm()
    }
}

/// A validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_density(&m).map_err(Error::Input)?;
        Ok(Self(m))
    }

    /// |ψ⟩⟨ψ| for a normalized ket.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(ket, ket))
    }

    /// I/d.
    pub fn maximally_mixed(d: usize) -> Self {
        Self(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    /// Qubit state (I + r·σ)/2.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let [x, y, z] = r;
        Self::new(ComplexMatrix::from_rows(&[
            &[C64::new(0.5 * (1.0 + z), 0.0), C64::new(0.5 * x, -0.5 * y)],
            &[C64::new(0.5 * x, 0.5 * y), C64::new(0.5 * (1.0 - z), 0.0)],
        ]))
    }

    /// Bloch vector of a qubit state.
    pub fn bloch(&self) -> Option<[f64; 3]> {
        (self.0.dim() == 2).then(|| {
            let m = &self.0;
            [
                2.0 * m[(0, 1)].re,
                -2.0 * m[(0, 1)].im,
                (m[(0, 0)] - m[(1, 1)]).re,
            ]
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

fn check_density(m: &ComplexMatrix) -> std::result::Result<(), String> {
    if !m.is_finite() {
        return Err("density matrix has non-finite entries".into());
    }
    let (defect, r, c) = m.hermiticity_defect();
    if defect > tolerances::DENSITY_HERMITIAN {
        return Err(format!(
            "density matrix is not Hermitian at ({r},{c}): defect {defect:.3e}"
        ));
    }
    let tr = m.trace();
    if (tr - ONE).norm() > tolerances::DENSITY_TRACE {
        return Err(format!("density matrix trace is {tr}, expected 1"));
    }
    let min = crate::numkernel::hermitian_eigvals_unchecked(m)[0];
    if min < tolerances::DENSITY_EIG_FLOOR {
        return Err(format!("density matrix has eigenvalue {min:.3e} < 0"));
    }
    Ok(())
}

/// vec(ρ) under column stacking.
pub fn vectorize(rho: &DensityMatrix) -> Vec<C64> {
    vectorize_matrix(rho.matrix())
}

/// vec(X) for any square matrix.
pub fn vectorize_matrix(x: &ComplexMatrix) -> Vec<C64> {
    let d = x.dim();
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            v[vec_index(d, r, c)] = x[(r, c)];
        }
    }
    v
}

/// Inverse of [`vectorize_matrix`].
pub fn devectorize(v: &[C64], d: usize) -> Result<ComplexMatrix> {
    if v.len() != d * d {
        return Err(Error::input(format!(
            "vector of length {} cannot be devectorized to {d}x{d}",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(d, |r, c| v[vec_index(d, r, c)]))
}

/// 𝓛_H = −i[H, ·] as a superoperator: −i(I⊗H − Hᵀ⊗I).
pub fn hamiltonian_generator(h: &ComplexMatrix) -> Superoperator {
    let d = h.dim();
    let id = ComplexMatrix::identity(d);
    let comm = &id.kron(h) - &h.transpose().kron(&id);
    Superoperator {
        dim: d,
        matrix: comm.scale(-I),
        kind: SuperKind::Generator,
    }
}

/// 𝓓_F = F·F† − ½{F†F, ·}: conj(F)⊗F − ½(I⊗F†F + (F†F)ᵀ⊗I).
pub fn dissipator(f: &ComplexMatrix) -> Superoperator {
    let d = f.dim();
    let id = ComplexMatrix::identity(d);
    let fdf = f.adjoint().matmul(f);
    let mut m = f.conj().kron(f);
    let anti = &id.kron(&fdf) + &fdf.transpose().kron(&id);
    m -= &anti.scale_real(0.5);
    Superoperator {
        dim: d,
        matrix: m,
        kind: SuperKind::Generator,
    }
}

/// Liouvillian superoperator of a Lindbladian.
pub fn liouvillian(l: &Lindbladian) -> Result<Superoperator> {
    let d = l.dim();
    let mut out = match l.hamiltonian() {
        Some(h) => {
            h.check_hermitian(tolerances::HERMITIAN_INPUT)?;
            hamiltonian_generator(h).matrix
        }
        None => ComplexMatrix::zeros(d * d),
    };
    for f in l.jumps() {
        out += &dissipator(f).matrix;
    }
    Ok(Superoperator {
        dim: d,
        matrix: out,
        kind: SuperKind::Generator,
    })
}

/// e^{τ𝓛} for a generator 𝓛 and τ ≥ 0.
pub fn propagator(generator: &Superoperator, tau: f64) -> Result<Superoperator> {
    if generator.kind != SuperKind::Generator {
        return Err(Error::input("propagator requires a generator"));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::input(format!(
            "propagation time must be finite and non-negative, got {tau}"
        )));
    }
    if tau == 0.0 {
        return Ok(Superoperator::identity(generator.dim));
    }
    Ok(Superoperator {
        dim: generator.dim,
        matrix: expm(&generator.matrix.scale_real(tau))?,
        kind: SuperKind::Propagator,
    })
}

/// How [`evolve_grid_with`] advances the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    /// Full superoperator exponential at every sample time.
    Exact,
    /// Classical fourth-order Runge–Kutta with at most `max_step` per step.
    /// Only meant for cross-validating the exact path.
    Rk4 { max_step: f64 },
}

/// ρ(τ_k) for each requested time, by exact propagation.
pub fn evolve_grid(l: &Lindbladian, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    evolve_grid_with(l, rho0, times, Integrator::Exact)
}

pub fn evolve_grid_with(
    l: &Lindbladian,
    rho0: &DensityMatrix,
    times: &[f64],
    integrator: Integrator,
) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != l.dim() {
        return Err(Error::input(format!(
            "state is {0}x{0} but the Lindbladian acts on {1} levels",
            rho0.dim(),
            l.dim()
        )));
    }
    if times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::input("evolution times must be non-negative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::input("evolution times must be ascending"));
    }
    let gen = liouvillian(l)?;
    let v0 = vectorize(rho0);
    let d = l.dim();
    let mut out = Vec::with_capacity(times.len());
    let mut current = v0.clone();
    let mut t_prev = 0.0;
    for &t in times {
        let v = match integrator {
            Integrator::Exact => propagator(&gen, t)?.matrix.mul_vec(&v0),
            Integrator::Rk4 { max_step } => {
                current = rk4(&gen.matrix, &current, t - t_prev, max_step);
                t_prev = t;
                current.clone()
            }
        };
        let m = devectorize(&v, d)?;
        let state = check_density(&m)
            .map(|_| DensityMatrix(m))
            .map_err(|e| Error::numerical(format!("at t = {t}: {e}")))?;
        out.push(state);
    }
    Ok(out)
}

fn rk4(gen: &ComplexMatrix, v: &[C64], span: f64, max_step: f64) -> Vec<C64> {
    if span <= 0.0 {
        return v.to_vec();
    }
    let steps = (span / max_step).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let axpy =
        |a: &[C64], s: f64, b: &[C64]| -> Vec<C64> { a.iter().zip(b).map(|(x, y)| x + y * s).collect() };
    let mut y = v.to_vec();
    for _ in 0..steps {
        let k1 = gen.mul_vec(&y);
        let k2 = gen.mul_vec(&axpy(&y, h / 2.0, &k1));
        let k3 = gen.mul_vec(&axpy(&y, h / 2.0, &k2));
        let k4 = gen.mul_vec(&axpy(&y, h, &k3));
        for i in 0..y.len() {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    y
}

/// Complete positivity and trace preservation, via the Choi matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    pub min_choi_eigenvalue: f64,
    pub partial_trace_residual: f64,
    pub pass: bool,
}

/// Certify that a map is CPTP: Choi matrix PSD to −1e−9 and Tr_out J = I.
/// Never fails; a non-CPTP map yields `pass = false` with the offending numbers.
pub fn cptp_certificate(p: &Superoperator) -> CptpReport {
    cptp_certificate_with(p, tolerances::CHOI_EIG_FLOOR, tolerances::PARTIAL_TRACE)
}

pub fn cptp_certificate_with(p: &Superoperator, eig_floor: f64, trace_tol: f64) -> CptpReport {
    let j = metrics::choi(p);
    let min = match hermitian_eig(&j.matrix) {
        Ok(s) => s.min(),
        // A Choi matrix that is not even Hermitian is not CP.
        Err(_) => f64::NEG_INFINITY,
    };
    let residual = (&metrics::partial_trace_output(&j.matrix, p.dim()) - &ComplexMatrix::identity(p.dim()))
        .spectral_norm();
    CptpReport {
        min_choi_eigenvalue: min,
        partial_trace_residual: residual,
        pass: min >= eig_floor && residual <= trace_tol,
    }
}
