use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::mimic_single;
use crate::error::{Error, Result};
use crate::lindblad::dissipator;
use crate::metrics::{diamond_norm, uniform_error, DiamondMethod, UniformErrorReport};
use crate::numkernel::ComplexMatrix;
use crate::rigidity::loglog_slope;
use crate::tolerances;

/// One (t, ε) cell of a scaling sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub t: f64,
    pub epsilon: f64,
    pub delta_star: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub achieved_error: f64,
    pub grid_slack: f64,
    pub wall_time_ms: u64,
}

/// A cell whose bisection never found a feasible δ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub t: f64,
    pub epsilon: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFit {
    /// Mean over fixed-ε groups with ≥ 3 distinct t of the slope of ln T on ln t.
    pub slope_t: Option<f64>,
    /// Mean over fixed-t groups with ≥ 3 distinct ε of the slope of ln T on ln(1/ε).
    pub slope_inv_eps: Option<f64>,
    /// T·ε/t² per record.
    pub prefactors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<SweepFailure>,
    pub fit: SweepFit,
    /// ‖𝓓_H‖⋄ as measured, with its certified lower bound.
    pub dissipator_norm: f64,
    pub dissipator_norm_lower: f64,
    pub min_choi_eigenvalue: f64,
    pub max_partial_trace_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub grid_n: usize,
    pub method: DiamondMethod,
    pub timing: bool,
    pub bisection_steps: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            grid_n: 32,
            method: DiamondMethod::Sdp,
            timing: true,
            bisection_steps: tolerances::BISECTION_STEPS,
        }
    }
}

struct Cell {
    record: Option<SweepRecord>,
    failure: Option<SweepFailure>,
    min_eig: f64,
    max_ptr: f64,
}

/// For every (t, ε), bisect for the largest δ whose mimic family reproduces
/// e^{−iHs} on s ∈ [0, t] with certified error ≤ ε, then fit ln T.
pub fn sweep_scaling(
    h: &ComplexMatrix,
    t_values: &[f64],
    epsilon_values: &[f64],
    opts: &SweepOptions,
) -> Result<SweepResult> {
    if t_values.is_empty() || epsilon_values.is_empty() {
        return Err(Error::input("sweep needs at least one t and one epsilon"));
    }
    if t_values
        .iter()
        .chain(epsilon_values)
        .any(|v| !(*v > 0.0) || !v.is_finite())
    {
        return Err(Error::input("sweep values must be positive and finite"));
    }
    let dn = diamond_norm(&dissipator(h), opts.method)?;
    if !(dn.lower_bound > 0.0) {
        return Err(Error::input("Hamiltonian has no dissipator to simulate (H ∝ I)"));
    }
    let mut cells: Vec<(f64, f64)> = t_values
        .iter()
        .flat_map(|&t| epsilon_values.iter().map(move |&e| (t, e)))
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    cells.dedup();

    let results: Vec<Cell> = cells
        .par_iter()
        .map(|&(t, eps)| run_cell(h, t, eps, dn.lower_bound, opts))
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut min_eig = f64::INFINITY;
    let mut max_ptr: f64 = 0.0;
    for c in results {
        min_eig = min_eig.min(c.min_eig);
        max_ptr = max_ptr.max(c.max_ptr);
        records.extend(c.record);
        failures.extend(c.failure);
    }
    let fit = fit_records(&records);
    Ok(SweepResult {
        records,
        failures,
        fit,
        dissipator_norm: dn.value,
        dissipator_norm_lower: dn.lower_bound,
        min_choi_eigenvalue: min_eig,
        max_partial_trace_residual: max_ptr,
    })
}

fn run_cell(h: &ComplexMatrix, t: f64, eps: f64, norm_lower: f64, opts: &SweepOptions) -> Result<Cell> {
    let start = Instant::now();
    let mut min_eig = f64::INFINITY;
    let mut max_ptr: f64 = 0.0;
    let mut eval = |delta: f64| -> Result<UniformErrorReport> {
        let fam = mimic_single(h, delta)?;
        let rep = uniform_error(fam.lindbladian(), h, t, delta, opts.grid_n, opts.method)?;
        min_eig = min_eig.min(rep.min_choi_eigenvalue);
        max_ptr = max_ptr.max(rep.max_partial_trace_residual);
        Ok(rep)
    };
    let mut hi = (2.0 * eps / (t * norm_lower)).min(1.0);
    let mut lo = 0.0;
    let mut best: Option<UniformErrorReport> = None;
    let top = eval(hi)?;
    if top.certified() <= eps {
        lo = hi;
        best = Some(top);
    } else {
        for _ in 0..opts.bisection_steps {
            let mid = 0.5 * (lo + hi);
            let rep = eval(mid)?;
            if rep.certified() <= eps {
                lo = mid;
                best = Some(rep);
            } else {
                hi = mid;
            }
        }
    }
    let wall_time_ms = if opts.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    Ok(match best {
        Some(rep) => Cell {
            record: Some(SweepRecord {
                t,
                epsilon: eps,
                delta_star: lo,
                big_t: t / lo,
                achieved_error: rep.max_error,
                grid_slack: rep.slack,
                wall_time_ms,
            }),
            failure: None,
            min_eig,
            max_ptr,
        },
        None => Cell {
            record: None,
            failure: Some(SweepFailure {
                t,
                epsilon: eps,
                reason: format!("no feasible delta above {hi:e}"),
            }),
            min_eig,
            max_ptr,
        },
    })
}

fn group_slopes(
    records: &[SweepRecord],
    key: impl Fn(&SweepRecord) -> f64,
    x: impl Fn(&SweepRecord) -> f64,
) -> Option<f64> {
    let mut keys: Vec<f64> = records.iter().map(&key).collect();
    keys.sort_by(f64::total_cmp);
    keys.dedup();
    let slopes: Vec<f64> = keys
        .iter()
        .filter_map(|&k| {
            let g: Vec<&SweepRecord> = records.iter().filter(|r| key(r) == k).collect();
            if g.len() < 3 {
                return None;
            }
            let xs: Vec<f64> = g.iter().map(|r| x(r)).collect();
            let ys: Vec<f64> = g.iter().map(|r| r.big_t).collect();
            Some(loglog_slope(&xs, &ys))
        })
        .collect();
    (!slopes.is_empty()).then(|| slopes.iter().sum::<f64>() / slopes.len() as f64)
}

fn fit_records(records: &[SweepRecord]) -> SweepFit {
    SweepFit {
        slope_t: group_slopes(records, |r| r.epsilon, |r| r.t),
        slope_inv_eps: group_slopes(records, |r| r.t, |r| 1.0 / r.epsilon),
        prefactors: records
            .iter()
            .map(|r| r.big_t * r.epsilon / (r.t * r.t))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::pauli;

    fn opts() -> SweepOptions {
        SweepOptions {
            grid_n: 8,
            timing: false,
            ..SweepOptions::default()
        }
    }

    #[test]
    fn records_respect_bounds() {
        let h = pauli::z().scale_real(0.5);
        let res = sweep_scaling(&h, &[1.0, 2.0], &[0.05], &opts()).unwrap();
        assert!(res.failures.is_empty());
        assert_eq!(res.records.len(), 2);
        for r in &res.records {
            assert!(r.achieved_error + r.grid_slack <= r.epsilon);
            assert_eq!(r.big_t, r.t / r.delta_star);
            // Duhamel: error ≤ t·δ·‖𝓓_H‖⋄ + slack.
            assert!(r.achieved_error <= r.t * r.delta_star * res.dissipator_norm + r.grid_slack + 1e-9);
        }
        // Two points on an axis do not produce a fit.
        assert_eq!(res.fit.slope_t, None);
    }

    #[test]
    fn ordering_is_by_t_then_epsilon() {
        let h = pauli::z().scale_real(0.5);
        let res = sweep_scaling(&h, &[2.0, 1.0], &[0.1, 0.05], &opts()).unwrap();
        let keys: Vec<(f64, f64)> = res.records.iter().map(|r| (r.t, r.epsilon)).collect();
        assert_eq!(keys, vec![(1.0, 0.05), (1.0, 0.1), (2.0, 0.05), (2.0, 0.1)]);
    }

    #[test]
    fn identity_hamiltonian_rejected() {
        let h = ComplexMatrix::identity(2);
        assert!(matches!(
            sweep_scaling(&h, &[1.0], &[0.1], &opts()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn fit_of_exact_power_law() {
        let recs: Vec<SweepRecord> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&t| SweepRecord {
                t,
                epsilon: 0.1,
                delta_star: 0.1 / t,
                big_t: t * t / 0.1,
                achieved_error: 0.0,
                grid_slack: 0.0,
                wall_time_ms: 0,
            })
            .collect();
        let fit = fit_records(&recs);
        assert!((fit.slope_t.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(fit.slope_inv_eps, None);
        assert!(fit.prefactors.iter().all(|p| (p - 1.0).abs() < 1e-12));
    }
}
