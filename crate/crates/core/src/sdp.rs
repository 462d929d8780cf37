//! A small dense primal-dual interior-point solver for real block-diagonal
//! semidefinite programs in standard form:
//!
//! ```text
//! (P)  min ⟨C, X⟩   s.t. ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! (D)  max bᵀy      s.t. Σ y_i A_i + Z = C,  Z ⪰ 0
//! ```
//!
//! Search directions are HKM with a Mehrotra predictor-corrector step. The
//! constraint matrices are sparse and symmetric; the data and iterates are
//! dense per block.

use crate::error::{Error, Result};
use crate::numkernel::RealMatrix;

/// One nonzero of a constraint matrix: (block, row, col, value).
///
/// Entries are listed explicitly on both sides of the diagonal, so the list
/// must describe a symmetric matrix.
pub type Entry = (usize, usize, usize, f64);

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub c: Vec<RealMatrix>,
    pub a: Vec<Vec<Entry>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub step_fraction: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: crate::tolerances::SDP_GAP,
            max_iter: crate::tolerances::SDP_MAX_ITER,
            step_fraction: 0.98,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: Vec<RealMatrix>,
    pub y: Vec<f64>,
    pub z: Vec<RealMatrix>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

impl SdpProblem {
    fn validate(&self) -> Result<()> {
        if self.c.len() != self.blocks.len() {
            return Err(Error::input("SDP: one C block per block size is required"));
        }
        if self.a.len() != self.b.len() {
            return Err(Error::input("SDP: constraint count does not match b"));
        }
        for (k, (ck, &n)) in self.c.iter().zip(&self.blocks).enumerate() {
            if ck.dim() != n {
                return Err(Error::input(format!("SDP: C block {k} has the wrong size")));
            }
        }
        for (i, ai) in self.a.iter().enumerate() {
            for &(k, r, c, _) in ai {
                if k >= self.blocks.len() || r >= self.blocks[k] || c >= self.blocks[k] {
                    return Err(Error::input(format!("SDP: constraint {i} is out of range")));
                }
            }
        }
        Ok(())
    }

    /// ⟨A_i, K⟩ for every i.
    fn apply_a(&self, k: &[RealMatrix]) -> Vec<f64> {
        self.a
            .iter()
            .map(|ai| ai.iter().map(|&(b, r, c, v)| v * k[b][(r, c)]).sum())
            .collect()
    }

    /// Σ y_i A_i.
    fn apply_at(&self, y: &[f64]) -> Vec<RealMatrix> {
        let mut out: Vec<RealMatrix> = self.blocks.iter().map(|&n| RealMatrix::zeros(n)).collect();
        for (ai, &yi) in self.a.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            for &(b, r, c, v) in ai {
                out[b][(r, c)] += v * yi;
            }
        }
        out
    }

    fn a_frobenius(&self, i: usize) -> f64 {
        self.a[i].iter().map(|e| e.3 * e.3).sum::<f64>().sqrt()
    }
}

fn dot(a: &[RealMatrix], b: &[RealMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn frob(a: &[RealMatrix]) -> f64 {
    dot(a, a).sqrt()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest α with M + α·ΔM ⪰ 0, given the Cholesky factor of M.
fn max_step(chol: &[RealMatrix], dm: &[RealMatrix]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (l, d) in chol.iter().zip(dm) {
        let li = RealMatrix::lower_inverse(l);
        let s = li.matmul(d).matmul(&li.transpose()).symmetrize();
        let lmin = s.sym_eigvals()[0];
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

fn cholesky_blocks(m: &[RealMatrix]) -> Result<Vec<RealMatrix>> {
    m.iter().map(RealMatrix::cholesky).collect()
}

/// Schur complement M_ij = Tr(A_i X A_j Z⁻¹).
fn schur(p: &SdpProblem, x: &[RealMatrix], zinv: &[RealMatrix]) -> RealMatrix {
    let m = p.a.len();
    let mut out = RealMatrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            let mut s = 0.0;
            for &(bi, ri, ci, vi) in &p.a[i] {
                let (xb, wb) = (&x[bi], &zinv[bi]);
                for &(bj, rj, cj, vj) in &p.a[j] {
                    if bi == bj {
                        s += vi * vj * xb[(ci, rj)] * wb[(cj, ri)];
                    }
                }
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    out
}

fn factor_schur(m: &RealMatrix) -> Result<RealMatrix> {
    if let Ok(l) = m.cholesky() {
        return Ok(l);
    }
    let scale = (0..m.dim())
        .map(|i| m[(i, i)].abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut reg = 1e-15 * scale;
    for _ in 0..8 {
        let mut mm = m.clone();
        for i in 0..m.dim() {
            mm[(i, i)] += reg;
        }
        if let Ok(l) = mm.cholesky() {
            return Ok(l);
        }
        reg *= 100.0;
    }
    Err(Error::numerical("SDP: Schur complement is not positive definite"))
}

struct Direction {
    dx: Vec<RealMatrix>,
    dy: Vec<f64>,
    dz: Vec<RealMatrix>,
}

/// Solve the Newton system for a given complementarity target term `rcz`
/// (which stands for R_c Z⁻¹).
fn direction(
    p: &SdpProblem,
    x: &[RealMatrix],
    zinv: &[RealMatrix],
    schur_l: &RealMatrix,
    rp: &[f64],
    rd: &[RealMatrix],
    rcz: &[RealMatrix],
) -> Direction {
    let x_rd_w: Vec<RealMatrix> = x
        .iter()
        .zip(rd)
        .zip(zinv)
        .map(|((xk, rk), wk)| xk.matmul(rk).matmul(wk))
        .collect();
    let a1 = p.apply_a(rcz);
    let a2 = p.apply_a(&x_rd_w);
    let rhs: Vec<f64> = (0..rp.len()).map(|i| rp[i] - a1[i] + a2[i]).collect();
    let dy = RealMatrix::cholesky_solve(schur_l, &rhs);
    let at = p.apply_at(&dy);
    let dz: Vec<RealMatrix> = rd.iter().zip(&at).map(|(r, a)| r.sub(a)).collect();
    let dx = (0..x.len())
        .map(|k| rcz[k].sub(&x[k].matmul(&dz[k]).matmul(&zinv[k])).symmetrize())
        .collect();
    Direction { dx, dy, dz }
}

fn axpy_blocks(a: &[RealMatrix], s: f64, b: &[RealMatrix]) -> Vec<RealMatrix> {
    a.iter().zip(b).map(|(x, y)| x.axpy(s, y)).collect()
}

pub fn solve(p: &SdpProblem, opts: &SdpOptions) -> Result<SdpSolution> {
    p.validate()?;
    let n_total: usize = p.blocks.iter().sum();
    let nf = n_total as f64;
    let m = p.a.len();
    let c_norm = frob(&p.c);
    let b_norm = norm2(&p.b);

    // Infeasible starting point, scaled to the data.
    let mut xi: f64 = 10.0f64.max(nf.sqrt());
    let mut eta: f64 = 10.0f64.max(nf.sqrt()).max(c_norm);
    for i in 0..m {
        let af = p.a_frobenius(i);
        xi = xi.max(nf * (1.0 + p.b[i].abs()) / (1.0 + af));
        eta = eta.max(af);
    }
    let mut x: Vec<RealMatrix> = p
        .blocks
        .iter()
        .map(|&n| RealMatrix::identity(n).scale(xi))
        .collect();
    let mut z: Vec<RealMatrix> = p
        .blocks
        .iter()
        .map(|&n| RealMatrix::identity(n).scale(eta))
        .collect();
    let mut y = vec![0.0; m];

    let mut sol = SdpSolution {
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        primal_objective: f64::NAN,
        dual_objective: f64::NAN,
        iterations: 0,
        converged: false,
        relative_gap: f64::INFINITY,
        primal_infeasibility: f64::INFINITY,
        dual_infeasibility: f64::INFINITY,
    };

    for iter in 0..=opts.max_iter {
        let ax = p.apply_a(&x);
        let rp: Vec<f64> = (0..m).map(|i| p.b[i] - ax[i]).collect();
        let aty = p.apply_at(&y);
        let rd: Vec<RealMatrix> = (0..x.len()).map(|k| p.c[k].sub(&z[k]).sub(&aty[k])).collect();
        let pobj = dot(&p.c, &x);
        let dobj: f64 = p.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let pinf = norm2(&rp) / (1.0 + b_norm);
        let dinf = frob(&rd) / (1.0 + c_norm);
        let relgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

        sol = SdpSolution {
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            primal_objective: pobj,
            dual_objective: dobj,
            iterations: iter,
            converged: false,
            relative_gap: relgap,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
        };
        if relgap <= opts.tol && pinf <= opts.tol && dinf <= opts.tol {
            sol.converged = true;
            return Ok(sol);
        }
        if iter == opts.max_iter {
            break;
        }

        let mu = dot(&x, &z) / nf;
        let (Ok(lx), Ok(lz)) = (cholesky_blocks(&x), cholesky_blocks(&z)) else {
            break;
        };
        let zinv: Vec<RealMatrix> = lz
            .iter()
            .map(|l| {
                let li = RealMatrix::lower_inverse(l);
                li.transpose().matmul(&li)
            })
            .collect();
        let Ok(schur_l) = factor_schur(&schur(p, &x, &zinv)) else {
            break;
        };

        // Predictor: R_c = −XZ, so R_c Z⁻¹ = −X.
        let rcz_aff: Vec<RealMatrix> = x.iter().map(|xk| xk.scale(-1.0)).collect();
        let aff = direction(p, &x, &zinv, &schur_l, &rp, &rd, &rcz_aff);
        let ap = max_step(&lx, &aff.dx).min(1.0);
        let ad = max_step(&lz, &aff.dz).min(1.0);
        let mu_aff = dot(&axpy_blocks(&x, ap, &aff.dx), &axpy_blocks(&z, ad, &aff.dz)) / nf;
        let sigma = (mu_aff / mu).max(0.0).powi(3).min(1.0);

        // Corrector: R_c = σμI − XZ − ΔX_a ΔZ_a.
        let rcz: Vec<RealMatrix> = (0..x.len())
            .map(|k| {
                zinv[k]
                    .scale(sigma * mu)
                    .sub(&x[k])
                    .sub(&aff.dx[k].matmul(&aff.dz[k]).matmul(&zinv[k]))
            })
            .collect();
        let dir = direction(p, &x, &zinv, &schur_l, &rp, &rd, &rcz);
        let ap = (opts.step_fraction * max_step(&lx, &dir.dx)).min(1.0);
        let ad = (opts.step_fraction * max_step(&lz, &dir.dz)).min(1.0);
        if !(ap > 0.0 && ad > 0.0) {
            break;
        }
        x = axpy_blocks(&x, ap, &dir.dx);
        z = axpy_blocks(&z, ad, &dir.dz);
        for (yi, d) in y.iter_mut().zip(&dir.dy) {
            *yi += ad * d;
        }
        if x.iter()
            .chain(&z)
            .any(|b| !b.as_slice().iter().all(|v| v.is_finite()))
        {
            break;
        }
    }
    Ok(sol)
}
