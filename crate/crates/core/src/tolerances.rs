//! Every numerical threshold used by the toolkit, in one table.
//!
//! The library reads the `const` values directly. The harness and CLI go
//! through [`Tolerances`], which starts from the same constants and may be
//! overridden from a JSON file named by the `DISSIM_TOL_TABLE` environment
//! variable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming an optional tolerance-table override file.
pub const TOL_TABLE_ENV: &str = "DISSIM_TOL_TABLE";

/// Relative Hermiticity tolerance for matrices flagged Hermitian.
pub const HERMITIAN_FLAG: f64 = 1e-12;
/// Relative Hermiticity tolerance accepted on input to eigensolvers and
/// Lindbladian constructors.
pub const HERMITIAN_INPUT: f64 = 1e-10;
/// Spectrum reconstruction and eigenvector orthonormality.
pub const EIG_RECONSTRUCTION: f64 = 1e-10;
/// Unitarity checks (U†U = I entrywise).
pub const UNITARITY: f64 = 1e-10;
/// Trace preservation row condition of a generator.
pub const TRACE_PRESERVATION: f64 = 1e-10;
/// Density-matrix trace deviation.
pub const DENSITY_TRACE: f64 = 1e-10;
/// Density-matrix Hermiticity deviation.
pub const DENSITY_HERMITIAN: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a density matrix.
pub const DENSITY_EIG_FLOOR: f64 = -1e-9;
/// Most negative Choi eigenvalue tolerated by the CPTP certificate.
pub const CHOI_EIG_FLOOR: f64 = -1e-9;
/// Partial-trace residual tolerated by the CPTP certificate.
pub const PARTIAL_TRACE: f64 = 1e-9;
/// Exact polynomial identities between generators.
pub const GENERATOR_IDENTITY: f64 = 1e-12;
/// Liouvillian invariance under a gauge transform.
pub const GAUGE_INVARIANCE: f64 = 1e-11;
/// Relative duality gap targeted by the interior-point solver.
pub const SDP_GAP: f64 = 1e-10;
/// Widest certified bracket accepted from the SDP path before the report
/// is downgraded to the sandwich bounds.
pub const SDP_BRACKET: f64 = 1e-7;
/// Iteration cap of the interior-point solver.
pub const SDP_MAX_ITER: usize = 120;
/// Slack on the budget inequality |ω|² ≤ mC²(−Tr S).
pub const BUDGET_SLACK: f64 = 1e-12;
/// Negative-semidefiniteness slack for the Bloch decoherence matrix.
pub const BLOCH_NSD: f64 = 1e-10;
/// Contractivity slack on Bloch linear parts.
pub const BLOCH_CONTRACTION: f64 = 1e-9;
/// Affine cross-check between printed Bloch formulas and the generator.
pub const BLOCH_AFFINE: f64 = 1e-11;
/// Relative tolerance for det(e^{TB}) = e^{T Tr S}.
pub const BLOCH_DET: f64 = 1e-9;
/// Scalar-identity deviation for zeroth-order jumps.
pub const RIGIDITY_SCALAR: f64 = 1e-9;
/// Gate on Σ_j D_{F_j} = 0 before the zeroth-order check applies.
pub const RIGIDITY_GATE: f64 = 1e-10;
/// Variance functional bound on pure states when the zeroth-order check passes.
pub const RIGIDITY_VARIANCE: f64 = 1e-12;
/// Minimum residual slope (in δ) for a first-order fit to count as consistent.
pub const RIGIDITY_MIN_SLOPE: f64 = 0.9;
/// Bisection steps used to locate the largest admissible δ.
pub const BISECTION_STEPS: usize = 12;

/// Runtime view of the tolerance table used by the harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub choi_eig_floor: f64,
    pub partial_trace: f64,
    pub generator_identity: f64,
    pub gauge_invariance: f64,
    pub sdp_bracket: f64,
    pub budget_slack: f64,
    pub bloch_det: f64,
    pub bisection_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            choi_eig_floor: CHOI_EIG_FLOOR,
            partial_trace: PARTIAL_TRACE,
            generator_identity: GENERATOR_IDENTITY,
            gauge_invariance: GAUGE_INVARIANCE,
            sdp_bracket: SDP_BRACKET,
            budget_slack: BUDGET_SLACK,
            bloch_det: BLOCH_DET,
            bisection_steps: BISECTION_STEPS,
        }
    }
}

impl Tolerances {
    /// Load a table from a JSON file; keys that are absent keep their defaults.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| Error::input(format!("tolerance table {}: {e}", path.display())))
    }

    /// Defaults, overridden by the file named in `DISSIM_TOL_TABLE` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(TOL_TABLE_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }
}
