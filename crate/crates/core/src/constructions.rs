//! Jump-operator families: mimic jumps, local decompositions, freezing,
//! conversion of arbitrary Lindbladians, gauge transforms, and the
//! parity-walk Hamiltonian.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{dissipator, hamiltonian_generator, liouvillian, Lindbladian, Superoperator};
use crate::numkernel::{expm, ComplexMatrix, I, ONE, ZERO};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MimicKind {
    /// F = I − iδH.
    Single,
    /// F = I − δA.
    General,
    /// F = e^{−iδH}.
    Unitary,
    /// F_i = I − iδH_i.
    Local,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MimicBase {
    Hamiltonian(ComplexMatrix),
    Operator(ComplexMatrix),
    Terms(Vec<ComplexMatrix>),
}

/// A δ-parameterized purely dissipative Lindbladian targeting δ𝓛_H.
#[derive(Debug, Clone, PartialEq)]
pub struct MimicFamily {
    kind: MimicKind,
    base: MimicBase,
    delta: f64,
    lindbladian: Lindbladian,
}

impl MimicFamily {
    pub fn kind(&self) -> MimicKind {
        self.kind
    }

    pub fn base(&self) -> &MimicBase {
        &self.base
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn lindbladian(&self) -> &Lindbladian {
        &self.lindbladian
    }

    pub fn into_lindbladian(self) -> Lindbladian {
        self.lindbladian
    }

    /// The Hamiltonian whose dynamics the family reproduces at first order.
    pub fn target_hamiltonian(&self) -> ComplexMatrix {
        match &self.base {
            MimicBase::Hamiltonian(h) => h.clone(),
            MimicBase::Operator(a) => anti_hermitian_part(a),
            MimicBase::Terms(ts) => sum_terms(ts),
        }
    }

    /// δ𝓛_H + δ²Σ𝓓 for the exact families; `None` for the unitary jump,
    /// whose generator only matches to O(δ²).
    pub fn expected_generator(&self) -> Option<Superoperator> {
        let d = self.delta;
        let second: Vec<&ComplexMatrix> = match &self.base {
            MimicBase::Hamiltonian(h) if self.kind == MimicKind::Single => vec![h],
            MimicBase::Operator(a) => vec![a],
            MimicBase::Terms(ts) => ts.iter().collect(),
            MimicBase::Hamiltonian(_) => return None,
        };
        let mut out = hamiltonian_generator(&self.target_hamiltonian()).scaled(d);
        for x in second {
            out = out.lin_comb(1.0, &dissipator(x), d * d);
        }
        Some(out)
    }

    /// max |𝓛_F − (δ𝓛_H + δ²Σ𝓓)| entrywise, for the exact families.
    pub fn decomposition_residual(&self) -> Option<f64> {
        let expected = self.expected_generator()?;
        let actual = liouvillian(&self.lindbladian).ok()?;
        Some((actual.matrix() - expected.matrix()).max_abs())
    }
}

/// (A − A†)/(2i).
pub fn anti_hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a - &a.adjoint()).scale(C64::new(0.0, -0.5))
}

fn sum_terms(ts: &[ComplexMatrix]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(ts[0].dim());
    for t in ts {
        h += t;
    }
    h
}

fn check_delta(delta: f64, allow_zero: bool) -> Result<()> {
    let ok = delta.is_finite() && delta <= 1.0 && (delta > 0.0 || (allow_zero && delta == 0.0));
    if ok {
        Ok(())
    } else {
        Err(Error::input(format!("delta must lie in (0, 1], got {delta}")))
    }
}

fn check_h(h: &ComplexMatrix) -> Result<()> {
    if !h.is_finite() {
        return Err(Error::input("Hamiltonian has non-finite entries"));
    }
    h.check_hermitian(tolerances::HERMITIAN_INPUT)
}

/// I − iδH.
fn mimic_jump(h: &ComplexMatrix, delta: f64) -> ComplexMatrix {
    &ComplexMatrix::identity(h.dim()) - &h.scale(I * delta)
}

/// Single jump F = I − iδH, with 𝓛_F = δ𝓛_H + δ²𝓓_H exactly.
pub fn mimic_single(h: &ComplexMatrix, delta: f64) -> Result<MimicFamily> {
    check_h(h)?;
    check_delta(delta, false)?;
    let l = Lindbladian::dissipative(vec![mimic_jump(h, delta)])?;
    Ok(MimicFamily {
        kind: MimicKind::Single,
        base: MimicBase::Hamiltonian(h.clone()),
        delta,
        lindbladian: l,
    })
}

/// Single jump F = I − δA, with 𝓛_F = δ𝓛_H + δ²𝓓_A and H = (A − A†)/(2i).
pub fn mimic_general(a: &ComplexMatrix, delta: f64) -> Result<MimicFamily> {
    if !a.is_finite() {
        return Err(Error::input("operator has non-finite entries"));
    }
    check_delta(delta, false)?;
    let f = &ComplexMatrix::identity(a.dim()) - &a.scale_real(delta);
    Ok(MimicFamily {
        kind: MimicKind::General,
        base: MimicBase::Operator(a.clone()),
        delta,
        lindbladian: Lindbladian::dissipative(vec![f])?,
    })
}

/// Single unitary jump F = e^{−iδH}; matches δ𝓛_H up to O(δ²).
pub fn mimic_unitary(h: &ComplexMatrix, delta: f64) -> Result<MimicFamily> {
    check_h(h)?;
    check_delta(delta, true)?;
    let f = expm(&h.scale(-I * delta))?;
    Ok(MimicFamily {
        kind: MimicKind::Unitary,
        base: MimicBase::Hamiltonian(h.clone()),
        delta,
        lindbladian: Lindbladian::dissipative(vec![f])?,
    })
}

/// One jump I − iδH_i per term, with 𝓛 = δ𝓛_{ΣH_i} + δ²Σ𝓓_{H_i}.
pub fn mimic_local(terms: &[ComplexMatrix], delta: f64) -> Result<MimicFamily> {
    let first = terms
        .first()
        .ok_or_else(|| Error::input("mimic_local needs at least one term"))?;
    for (i, t) in terms.iter().enumerate() {
        if t.dim() != first.dim() {
            return Err(Error::input(format!("term {i} has a different dimension")));
        }
        check_h(t)?;
    }
    check_delta(delta, false)?;
    let jumps = terms.iter().map(|t| mimic_jump(t, delta)).collect();
    Ok(MimicFamily {
        kind: MimicKind::Local,
        base: MimicBase::Terms(terms.to_vec()),
        delta,
        lindbladian: Lindbladian::dissipative(jumps)?,
    })
}

/// H plus the jump δ^{−1/2}(I + iδH); the total generator is δ𝓓_H.
pub fn freeze_jump(h: &ComplexMatrix, delta: f64) -> Result<Lindbladian> {
    check_h(h)?;
    check_delta(delta, false)?;
    let f = (&ComplexMatrix::identity(h.dim()) + &h.scale(I * delta)).scale_real(delta.powf(-0.5));
    Lindbladian::new(h.dim(), Some(h.clone()), vec![f])
}

/// Purely dissipative form of `l`: jumps {I − iδH} ∪ {√δ F_i}, with
/// generator δ𝓛 + δ²𝓓_H.
pub fn dissipate_lindbladian(l: &Lindbladian, delta: f64) -> Result<Lindbladian> {
    check_delta(delta, false)?;
    let h = l.hamiltonian_or_zero();
    let mut jumps = vec![mimic_jump(&h, delta)];
    jumps.extend(l.jumps().iter().map(|f| f.scale_real(delta.sqrt())));
    Lindbladian::dissipative(jumps)
}

/// Unitary mixing of jumps plus identity shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeParams {
    pub u: ComplexMatrix,
    pub c: Vec<C64>,
}

impl GaugeParams {
    pub fn new(u: ComplexMatrix, c: Vec<C64>) -> Result<Self> {
        if u.dim() != c.len() {
            return Err(Error::input(format!(
                "gauge unitary is {0}x{0} but {1} shifts were given",
                u.dim(),
                c.len()
            )));
        }
        let defect = u.unitarity_defect();
        if defect > tolerances::UNITARITY {
            return Err(Error::input(format!(
                "gauge matrix is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(Self { u, c })
    }

    /// U = I, c = 0.
    pub fn identity(m: usize) -> Self {
        Self {
            u: ComplexMatrix::identity(m),
            c: vec![ZERO; m],
        }
    }

    /// U = I with the given shifts.
    pub fn shift(c: Vec<C64>) -> Self {
        Self {
            u: ComplexMatrix::identity(c.len()),
            c,
        }
    }

    /// The gauge that undoes this one: (U†, −U†c).
    pub fn inverse(&self) -> Self {
        let ud = self.u.adjoint();
        let c = ud.mul_vec(&self.c).into_iter().map(|z| -z).collect();
        Self { u: ud, c }
    }
}

/// F′_i = Σ_j U_ij F_j + c_i I and H′ = H − (i/2)Σ_i(c_i* F′_i − c_i F′_i†).
/// The Liouvillian is unchanged.
pub fn gauge_transform(l: &Lindbladian, g: &GaugeParams) -> Result<Lindbladian> {
    let m = l.jump_count();
    if g.c.len() != m || g.u.dim() != m {
        return Err(Error::input(format!(
            "gauge acts on {} jumps but the Lindbladian has {m}",
            g.c.len()
        )));
    }
    let defect = g.u.unitarity_defect();
    if defect > tolerances::UNITARITY {
        return Err(Error::input(format!(
            "gauge matrix is not unitary (defect {defect:.3e})"
        )));
    }
    let d = l.dim();
    let id = ComplexMatrix::identity(d);
    let mut h = l.hamiltonian_or_zero();
    let mut jumps = Vec::with_capacity(m);
    for i in 0..m {
        let mut f = id.scale(g.c[i]);
        for (j, fj) in l.jumps().iter().enumerate() {
            if g.u[(i, j)] != ZERO {
                f += &fj.scale(g.u[(i, j)]);
            }
        }
        let x = &f.scale(g.c[i].conj()) - &f.adjoint().scale(g.c[i]);
        h -= &x.scale(I * 0.5);
        jumps.push(f);
    }
    Lindbladian::new(d, Some(h.hermitian_part()), jumps)
}

/// ‖H‖_∞ + Σ_i‖F_i‖²_∞.
pub fn gauge_cost(l: &Lindbladian) -> f64 {
    let h = l.hamiltonian().map_or(0.0, ComplexMatrix::spectral_norm);
    h + l.jumps().iter().map(|f| f.spectral_norm().powi(2)).sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct GaugeOptimum {
    pub params: GaugeParams,
    pub lindbladian: Lindbladian,
    pub cost: f64,
    /// Cost after each sweep, starting with the input cost.
    pub history: Vec<f64>,
    /// No coordinate move improved the cost at the finest step.
    pub stationary: bool,
}

/// Derivative-free descent on the identity shifts c (U fixed to I).
///
/// Each sweep visits the real and imaginary part of every c_i, fits a
/// parabola through three probes and moves to the best improving point.
/// Steps that fail to improve are halved. The input is returned unchanged
/// when nothing improves.
pub fn gauge_optimize(l: &Lindbladian, budget: usize) -> Result<GaugeOptimum> {
    if budget == 0 {
        return Err(Error::input("gauge_optimize needs a budget of at least 1"));
    }
    let m = l.jump_count();
    let start = gauge_cost(l);
    let mut result = GaugeOptimum {
        params: GaugeParams::identity(m),
        lindbladian: l.clone(),
        cost: start,
        history: vec![start],
        stationary: m == 0,
    };
    if m == 0 {
        return Ok(result);
    }
    let cost_at = |x: &[f64]| -> Result<f64> {
        let c = (0..m).map(|i| C64::new(x[2 * i], x[2 * i + 1])).collect();
        Ok(gauge_cost(&gauge_transform(l, &GaugeParams::shift(c))?))
    };
    let scale = l.jump_bound().max(1e-3);
    let mut x = vec![0.0; 2 * m];
    let mut fx = start;
    let mut step = vec![0.5 * scale; 2 * m];
    let floor = 1e-8 * scale;
    for _ in 0..budget {
        let mut moved = false;
        for k in 0..2 * m {
            let h = step[k];
            if h < floor {
                continue;
            }
            let probe = |v: f64| -> Result<(f64, f64)> {
                let mut y = x.clone();
                y[k] = v;
                Ok((v, cost_at(&y)?))
            };
            let lo = probe(x[k] - h)?;
            let hi = probe(x[k] + h)?;
            let mut best = if lo.1 < hi.1 { lo } else { hi };
            let curv = lo.1 + hi.1 - 2.0 * fx;
            if curv > 0.0 {
                let shift = (0.5 * h * (lo.1 - hi.1) / curv).clamp(-4.0 * h, 4.0 * h);
                let v = probe(x[k] + shift)?;
                if v.1 < best.1 {
                    best = v;
                }
            }
            if best.1 < fx {
                let moved_by = (best.0 - x[k]).abs();
                x[k] = best.0;
                fx = best.1;
                moved = true;
                // Re-expand after a long move, contract after a short one.
                step[k] = if moved_by >= h { 2.0 * h } else { h.max(moved_by) };
            } else {
                step[k] = 0.5 * h;
            }
        }
        result.history.push(fx);
        if !moved && step.iter().all(|&s| s < floor) {
            result.stationary = true;
            break;
        }
    }
    if fx < start {
        let params = GaugeParams::shift((0..m).map(|i| C64::new(x[2 * i], x[2 * i + 1])).collect());
        result.lindbladian = gauge_transform(l, &params)?;
        result.params = params;
        result.cost = fx;
    }
    Ok(result)
}

/// Adjacency matrix of the parity walk: vertices (j, p) for j ∈ 0..=n and
/// p ∈ {0, 1}, stored at index 2j + p, with one unit edge per bit along the
/// path that starts at (0, 0) and tracks the running parity.
pub fn parity_hamiltonian(bits: &str) -> Result<ComplexMatrix> {
    let n = bits.len();
    if !(1..=10).contains(&n) {
        return Err(Error::input(format!(
            "parity string must have 1 to 10 bits, got {n}"
        )));
    }
    let mut h = ComplexMatrix::zeros(2 * (n + 1));
    let mut p = 0;
    for (j, b) in bits.chars().enumerate() {
        let bit = match b {
            '0' => 0,
            '1' => 1,
            other => {
                return Err(Error::input(format!(
                    "parity string has non-binary character `{other}`"
                )))
            }
        };
        let q = p ^ bit;
        let (u, v) = (2 * j + p, 2 * (j + 1) + q);
        h[(u, v)] = ONE;
        h[(v, u)] = ONE;
        p = q;
    }
    Ok(h)
}

/// Index of the vertex (n, parity(bits)) where the walk ends.
pub fn parity_target(bits: &str) -> usize {
    let parity = bits.chars().filter(|&c| c == '1').count() % 2;
    2 * bits.len() + parity
}
