//! Experiment orchestration: configuration, scaling sweeps, the single-shot
//! experiments and flat-file output.
//!
//! ```
//! use dissim_core::harness::{ExperimentConfig, Experiment};
//!
//! let cfg = ExperimentConfig::from_json(
//!     r#"{"experiment": "freeze", "hamiltonian": "pauli_z_half", "t_values": [1.0], "delta": 1e-3}"#,
//! ).unwrap();
//! assert_eq!(cfg.experiment, Some(Experiment::Freeze));
//! assert_eq!(cfg.grid_n, 32);
//! ```

mod emit;
mod experiments;
mod sweep;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use emit::{emit, parse_csv, to_csv, to_json, to_svg, write_json, Format, CSV_HEADER};
pub use experiments::{
    certificate_experiment, convert_experiment, convert_with_delta, diamond_experiment, freeze_experiment,
    gauge_experiment, rigidity_experiment, CertificateReport, ConvertReport, DiamondOracle, DiamondReport,
    FitSummary, FreezeReport, FreezeState, GaugeReport, RigidityReport,
};
pub use sweep::{sweep_scaling, SweepFailure, SweepFit, SweepOptions, SweepRecord, SweepResult};

use crate::constructions::parity_hamiltonian;
use crate::error::{Error, Result};
use crate::lindblad::Lindbladian;
use crate::metrics::DiamondMethod;
use crate::numkernel::{pauli, ComplexMatrix};
use crate::tolerances::{self, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Sweep,
    Freeze,
    Convert,
    Gauge,
    Certificate,
    Rigidity,
    Diamond,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Self::Sweep,
        Self::Freeze,
        Self::Convert,
        Self::Gauge,
        Self::Certificate,
        Self::Rigidity,
        Self::Diamond,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Sweep => "sweep",
            Self::Freeze => "freeze",
            Self::Convert => "convert",
            Self::Gauge => "gauge",
            Self::Certificate => "certificate",
            Self::Rigidity => "rigidity",
            Self::Diamond => "diamond",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::input(format!("unknown experiment `{s}`")))
    }
}

/// Rows of `[re, im]` pairs.
pub type MatrixEntries = Vec<Vec<[f64; 2]>>;

/// A named preset or an explicit matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianSpec {
    Preset(String),
    Matrix(MatrixEntries),
}

impl Default for HamiltonianSpec {
    fn default() -> Self {
        Self::Preset("pauli_z_half".into())
    }
}

impl HamiltonianSpec {
    /// `pauli_z_half`, `tfim_2`, `parity:<bits>`, or explicit entries.
    pub fn resolve(&self) -> Result<ComplexMatrix> {
        let h = match self {
            Self::Preset(name) => match name.as_str() {
                "pauli_z_half" => pauli::z().scale_real(0.5),
                "tfim_2" => tfim_2(),
                other => match other.strip_prefix("parity:") {
                    Some(bits) => parity_hamiltonian(bits)?,
                    None => return Err(Error::input(format!("unknown Hamiltonian preset `{other}`"))),
                },
            },
            Self::Matrix(rows) => matrix_from_entries(rows)?,
        };
        h.check_hermitian(tolerances::HERMITIAN_INPUT)?;
        Ok(h)
    }
}

fn tfim_2() -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let mut h = pauli::z().kron(&id);
    h += &id.kron(&pauli::z());
    h += &pauli::x().kron(&pauli::x()).scale_real(0.5);
    h
}

pub fn matrix_from_entries(rows: &MatrixEntries) -> Result<ComplexMatrix> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::input("matrix entries must form a nonempty square array"));
    }
    let entries: Vec<C64> = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    let m = ComplexMatrix::new(d, entries)?;
    if !m.is_finite() {
        return Err(Error::input("matrix entries must be finite"));
    }
    Ok(m)
}

fn default_grid_n() -> usize {
    32
}

fn default_nu() -> f64 {
    1.0
}

fn default_budget() -> usize {
    40
}

fn default_timing() -> bool {
    true
}

/// JSON experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub hamiltonian: HamiltonianSpec,
    /// Extra jump operators for `convert`.
    #[serde(default)]
    pub jumps: Vec<MatrixEntries>,
    #[serde(default)]
    pub t_values: Vec<f64>,
    #[serde(default)]
    pub epsilon_values: Vec<f64>,
    /// δ for `freeze` and `gauge`; overrides the derived δ in `convert`.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Rotation rate for `certificate`.
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub method: DiamondMethod,
    #[serde(default = "default_budget")]
    pub gauge_budget: usize,
    /// Record wall-clock time per sweep cell; off gives byte-stable output.
    #[serde(default = "default_timing")]
    pub timing: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            hamiltonian: HamiltonianSpec::default(),
            jumps: Vec::new(),
            t_values: Vec::new(),
            epsilon_values: Vec::new(),
            delta: None,
            nu: default_nu(),
            grid_n: default_grid_n(),
            seed: 0,
            method: DiamondMethod::Sdp,
            gauge_budget: default_budget(),
            timing: true,
            output_dir: None,
            format: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::input(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Input(msg) => Error::Input(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, vals) in [
            ("t_values", &self.t_values),
            ("epsilon_values", &self.epsilon_values),
        ] {
            if let Some(v) = vals.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
                return Err(Error::input(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.grid_n < 8 {
            return Err(Error::input(format!(
                "grid_n must be at least 8, got {}",
                self.grid_n
            )));
        }
        if let Some(d) = self.delta {
            if !(d >= 0.0) || d > 1.0 {
                return Err(Error::input(format!("delta must lie in [0, 1], got {d}")));
            }
        }
        if !self.nu.is_finite() || self.nu == 0.0 {
            return Err(Error::input("nu must be finite and nonzero"));
        }
        self.hamiltonian.resolve().map(|_| ())
    }

    fn single(&self, name: &str, vals: &[f64]) -> Result<f64> {
        match vals {
            [v] => Ok(*v),
            _ => Err(Error::input(format!(
                "{name} needs exactly one value, got {}",
                vals.len()
            ))),
        }
    }

    pub fn single_t(&self) -> Result<f64> {
        self.single("t_values", &self.t_values)
    }

    pub fn single_epsilon(&self) -> Result<f64> {
        self.single("epsilon_values", &self.epsilon_values)
    }

    /// H plus the configured jumps.
    pub fn lindbladian(&self) -> Result<Lindbladian> {
        let h = self.hamiltonian.resolve()?;
        let jumps = self
            .jumps
            .iter()
            .map(matrix_from_entries)
            .collect::<Result<Vec<_>>>()?;
        Lindbladian::new(h.dim(), Some(h), jumps)
    }
}

/// Run `f` on a dedicated pool of `threads` workers, or the global pool.
pub fn with_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::input("thread count must be positive")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::numerical(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[allow(clippy::large_enum_variant)]
#[serde(tag = "experiment", content = "report", rename_all = "lowercase")]
pub enum Outcome {
    Sweep(SweepResult),
    Freeze(FreezeReport),
    Convert(ConvertReport),
    Gauge(GaugeReport),
    Certificate(CertificateReport),
    Rigidity(RigidityReport),
    Diamond(DiamondReport),
}

impl Outcome {
    /// Map the report onto the error classes used for exit codes: a
    /// contradicted certificate is an invariant violation; a failed CPTP
    /// check, degraded solver or failed pass criterion is numerical.
    pub fn check(&self, tol: &Tolerances) -> Result<()> {
        let cptp = |min_eig: f64, ptr: f64| min_eig >= tol.choi_eig_floor && ptr <= tol.partial_trace;
        let (ok, degraded, what) = match self {
            Self::Sweep(r) => (
                r.failures.is_empty() && cptp(r.min_choi_eigenvalue, r.max_partial_trace_residual),
                false,
                "sweep",
            ),
            Self::Freeze(r) => (
                r.pass && cptp(r.min_choi_eigenvalue, r.max_partial_trace_residual),
                false,
                "freeze",
            ),
            Self::Convert(r) => (
                r.pass
                    && cptp(
                        r.uniform.min_choi_eigenvalue,
                        r.uniform.max_partial_trace_residual,
                    ),
                r.uniform.degraded,
                "convert",
            ),
            Self::Gauge(r) => (r.max_invariance_residual <= tol.gauge_invariance, false, "gauge"),
            Self::Certificate(r) => {
                if r.contradicted {
                    return Err(Error::Invariant(format!(
                        "verified simulator with T = {} below the lower bound {}",
                        r.certificate.t_achieved, r.certificate.t_lower
                    )));
                }
                (
                    cptp(
                        r.uniform.min_choi_eigenvalue,
                        r.uniform.max_partial_trace_residual,
                    ),
                    r.uniform.degraded,
                    "certificate",
                )
            }
            Self::Rigidity(r) => (r.pass, false, "rigidity"),
            Self::Diamond(r) => (r.pass, r.oracles.iter().any(|o| o.degraded), "diamond"),
        };
        if degraded {
            return Err(Error::numerical(format!("{what}: diamond-norm solver degraded")));
        }
        if !ok {
            return Err(Error::numerical(format!("{what}: pass criteria not met")));
        }
        Ok(())
    }
}

/// Dispatch one experiment described by `cfg`.
pub fn run(cfg: &ExperimentConfig, experiment: Experiment, tol: &Tolerances) -> Result<Outcome> {
    if let Some(e) = cfg.experiment {
        if e != experiment {
            return Err(Error::input(format!("config is for `{e}`, not `{experiment}`")));
        }
    }
    cfg.validate()?;
    Ok(match experiment {
        Experiment::Sweep => {
            let opts = SweepOptions {
                grid_n: cfg.grid_n,
                method: cfg.method,
                timing: cfg.timing,
                bisection_steps: tol.bisection_steps,
            };
            Outcome::Sweep(sweep_scaling(
                &cfg.hamiltonian.resolve()?,
                &cfg.t_values,
                &cfg.epsilon_values,
                &opts,
            )?)
        }
        Experiment::Freeze => Outcome::Freeze(freeze_experiment(
            &cfg.hamiltonian.resolve()?,
            cfg.delta.unwrap_or(1e-3),
            cfg.single_t()?,
            cfg.seed,
        )?),
        Experiment::Convert => {
            let l = cfg.lindbladian()?;
            let (t, eps) = (cfg.single_t()?, cfg.single_epsilon()?);
            Outcome::Convert(match cfg.delta {
                Some(d) => convert_with_delta(&l, t, eps, d, cfg.grid_n, cfg.method)?,
                None => convert_experiment(&l, t, eps, cfg.grid_n, cfg.method)?,
            })
        }
        Experiment::Gauge => Outcome::Gauge(gauge_experiment(
            &cfg.hamiltonian.resolve()?,
            cfg.delta.unwrap_or(0.1),
            cfg.gauge_budget,
            cfg.seed,
        )?),
        Experiment::Certificate => Outcome::Certificate(certificate_experiment(
            cfg.nu,
            cfg.single_t()?,
            cfg.single_epsilon()?,
            cfg.grid_n,
            cfg.method,
        )?),
        Experiment::Rigidity => Outcome::Rigidity(rigidity_experiment(&cfg.hamiltonian.resolve()?)?),
        Experiment::Diamond => Outcome::Diamond(diamond_experiment(cfg.method)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        let h = HamiltonianSpec::Preset("pauli_z_half".into()).resolve().unwrap();
        assert_eq!(h, pauli::z().scale_real(0.5));
        let t = HamiltonianSpec::Preset("tfim_2".into()).resolve().unwrap();
        assert_eq!(t.dim(), 4);
        // Diagonal of σz⊗I + I⊗σz is (2, 0, 0, −2); σx⊗σx/2 couples |00⟩ and |11⟩.
        assert_eq!(t[(0, 0)].re, 2.0);
        assert_eq!(t[(3, 3)].re, -2.0);
        assert_eq!(t[(0, 3)].re, 0.5);
        assert_eq!(t[(1, 2)].re, 0.5);
        let p = HamiltonianSpec::Preset("parity:101".into()).resolve().unwrap();
        assert_eq!(p.dim(), 8);
        assert!(HamiltonianSpec::Preset("nope".into()).resolve().is_err());
    }

    #[test]
    fn explicit_matrix_must_be_hermitian() {
        let cfg = ExperimentConfig::from_json(r#"{"hamiltonian": [[[1,0],[0,-1]],[[0,-1],[0,0]]]}"#);
        assert!(matches!(cfg, Err(Error::Input(_))));
        let cfg = ExperimentConfig::from_json(r#"{"hamiltonian": [[[1,0],[0,-1]],[[0,1],[-1,0]]]}"#).unwrap();
        let h = cfg.hamiltonian.resolve().unwrap();
        assert_eq!(h[(0, 1)], C64::new(0.0, -1.0));
    }

    #[test]
    fn config_validation() {
        for bad in [
            r#"{"t_values": [1.0, -2.0]}"#,
            r#"{"epsilon_values": [0.0]}"#,
            r#"{"grid_n": 4}"#,
            r#"{"delta": 1.5}"#,
            r#"{"unknown_key": 1}"#,
            r#"{"experiment": "teleport"}"#,
            r#"not json"#,
        ] {
            assert!(
                matches!(ExperimentConfig::from_json(bad), Err(Error::Input(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn experiment_mismatch_is_input_error() {
        let cfg = ExperimentConfig::from_json(r#"{"experiment": "sweep"}"#).unwrap();
        let r = run(&cfg, Experiment::Freeze, &Tolerances::default());
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
    }

    #[test]
    fn contradicted_certificate_maps_to_exit_3() {
        let mut r = certificate_experiment(1.0, 4.0, 0.01, 8, DiamondMethod::Sdp).unwrap();
        let tol = Tolerances::default();
        assert!(Outcome::Certificate(r.clone()).check(&tol).is_ok());
        r.contradicted = true;
        let e = Outcome::Certificate(r).check(&tol).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn parity_sweep_is_quadratic() {
        let h = HamiltonianSpec::Preset("parity:101".into()).resolve().unwrap();
        let opts = SweepOptions {
            grid_n: 8,
            method: DiamondMethod::Sandwich,
            timing: false,
            ..SweepOptions::default()
        };
        let r = sweep_scaling(&h, &[1.0, 2.0, 4.0], &[0.05], &opts).unwrap();
        let s = r.fit.slope_t.unwrap();
        assert!((s - 2.0).abs() <= 0.2, "{s}");
    }

    #[test]
    fn zero_threads_rejected() {
        assert!(with_pool(Some(0), || ()).is_err());
        assert_eq!(with_pool(Some(2), rayon::current_num_threads).unwrap(), 2);
    }
}
