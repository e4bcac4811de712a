//! Spatial operators of the semidiscrete scheme with `τ` eliminated.
//!
//! With `L = M⁻¹A` and the dual relation `M⁻¹ G⁻ᵀ M = -G⁺`:
//!
//! ```text
//! du/dt = G⁻ v
//! dv/dt = G⁺ τ(u) + μ G⁺ G⁻ v,     τ(u) = P_p[W'(u)] + γ L u
//! ```

use std::sync::Arc;

use crate::error::Result;
use crate::linalg::{folded_order, positions, BandedMatrix, BlockOperator};
use crate::mesh::Mesh1D;
use crate::model::ModelParams;
use crate::operators::{default_sigma, gradient_operator, GradientSide, PenaltyForm};
use crate::space::{legendre, BrokenField, QuadratureRule};

#[derive(Debug, Clone)]
pub struct Scheme {
    mesh: Arc<Mesh1D>,
    p: usize,
    params: ModelParams,
    penalty: PenaltyForm,
    gp: BlockOperator,
    gm: BlockOperator,
    lap: BlockOperator,
    gp_lap: BlockOperator,
    gp_gm: BlockOperator,
    rule: QuadratureRule,
    table: Vec<Vec<f64>>,
    pos: Vec<usize>,
    kl: usize,
    ku: usize,
}

impl Scheme {
    /// `sigma = None` selects the default penalty.
    pub fn new(mesh: Arc<Mesh1D>, p: usize, params: ModelParams, sigma: Option<f64>) -> Result<Self> {
        let sigma = sigma.unwrap_or_else(|| default_sigma(p));
        let penalty = PenaltyForm::assemble(&mesh, p, sigma)?;
        let gp = gradient_operator(&mesh, p, GradientSide::Plus);
        let gm = gradient_operator(&mesh, p, GradientSide::Minus);
        let mut lap = penalty.matrix().clone();
        let widths = mesh.widths().to_vec();
        lap.scale_rows(|i, k| (2 * k + 1) as f64 / widths[i]);
        let gp_lap = gp.compose(&lap);
        let gp_gm = gp.compose(&gm);
        let rule = QuadratureRule::for_degree(p);
        let table = rule.nodes.iter().map(|&xi| legendre::values(p, xi)).collect();
        let n = mesh.n_elements();
        let order = if mesh.is_periodic() {
            folded_order(n)
        } else {
            (0..n).collect()
        };
        let pos = positions(&order);
        let nb2 = 2 * (p + 1);
        let (mut kl, mut ku) = (0usize, 0usize);
        for op in [&gp, &gm, &gp_lap, &gp_gm] {
            for i in 0..n {
                for (j, _) in op.row(i) {
                    let (pi, pj) = (pos[i], pos[*j]);
                    if pi >= pj {
                        kl = kl.max((pi - pj) * nb2 + nb2 - 1);
                        ku = ku.max(nb2 - 1);
                    } else {
                        ku = ku.max((pj - pi) * nb2 + nb2 - 1);
                        kl = kl.max(nb2 - 1);
                    }
                }
            }
        }
        Ok(Self {
            mesh,
            p,
            params,
            penalty,
            gp,
            gm,
            lap,
            gp_lap,
            gp_gm,
            rule,
            table,
            pos,
            kl,
            ku,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn penalty(&self) -> &PenaltyForm {
        &self.penalty
    }

    pub fn gradient(&self, side: GradientSide) -> &BlockOperator {
        match side {
            GradientSide::Plus => &self.gp,
            GradientSide::Minus => &self.gm,
        }
    }

    /// Number of coefficients of one field.
    pub fn field_len(&self) -> usize {
        self.mesh.n_elements() * (self.p + 1)
    }

    /// `P_p[W'(u)]` coefficients.
    pub fn project_dw(&self, u: &[f64]) -> Vec<f64> {
        let nb = self.p + 1;
        let w = &self.params.energy;
        let mut out = vec![0.0; u.len()];
        for (ue, oe) in u.chunks(nb).zip(out.chunks_mut(nb)) {
            for (q, t) in self.table.iter().enumerate() {
                let uq: f64 = ue.iter().zip(t).map(|(a, b)| a * b).sum();
                let f = w.dw(uq) * self.rule.weights[q];
                for k in 0..nb {
                    oe[k] += f * t[k];
                }
            }
            for (k, c) in oe.iter_mut().enumerate() {
                *c *= (2 * k + 1) as f64 / 2.0;
            }
        }
        out
    }

    /// `τ(u) = P_p[W'(u)] + γ M⁻¹ A u` as raw coefficients.
    pub fn tau_coeffs(&self, u: &[f64]) -> Vec<f64> {
        let mut tau = self.project_dw(u);
        let lu = self.lap.apply(u);
        for (t, l) in tau.iter_mut().zip(lu) {
            *t += self.params.gamma * l;
        }
        tau
    }

    pub fn eliminate_tau(&self, u: &BrokenField) -> BrokenField {
        u.with_coeffs(self.tau_coeffs(u.coeffs()))
    }

    /// `(du/dt, dv/dt)` with `τ` eliminated.
    pub fn rhs(&self, u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let du = self.gm.apply(v);
        let tau = self.tau_coeffs(u);
        let mut dv = self.gp.apply(&tau);
        if self.params.mu != 0.0 {
            let visc = self.gp_gm.apply(v);
            for (a, b) in dv.iter_mut().zip(visc) {
                *a += self.params.mu * b;
            }
        }
        (du, dv)
    }

    /// Elementwise blocks of the derivative of `u ↦ P_p[W'(u)]`.
    fn dw_jacobian_blocks(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let nb = self.p + 1;
        let w = &self.params.energy;
        u.chunks(nb)
            .map(|ue| {
                let mut b = vec![0.0; nb * nb];
                for (q, t) in self.table.iter().enumerate() {
                    let uq: f64 = ue.iter().zip(t).map(|(a, b)| a * b).sum();
                    let f = w.ddw(uq) * self.rule.weights[q];
                    for k in 0..nb {
                        let fk = f * t[k] * (2 * k + 1) as f64 / 2.0;
                        for m in 0..nb {
                            b[k * nb + m] += fk * t[m];
                        }
                    }
                }
                b
            })
            .collect()
    }

    /// Global index of coefficient `k` of component `comp` (0 = u, 1 = v) on element `e`.
    #[inline]
    pub fn dof(&self, e: usize, comp: usize, k: usize) -> usize {
        let nb = self.p + 1;
        self.pos[e] * 2 * nb + comp * nb + k
    }

    /// Scatters `(u, v)` into the banded ordering.
    pub fn pack(&self, u: &[f64], v: &[f64], out: &mut [f64]) {
        let nb = self.p + 1;
        for e in 0..self.mesh.n_elements() {
            for k in 0..nb {
                out[self.dof(e, 0, k)] = u[e * nb + k];
                out[self.dof(e, 1, k)] = v[e * nb + k];
            }
        }
    }

    pub fn unpack(&self, x: &[f64], u: &mut [f64], v: &mut [f64]) {
        let nb = self.p + 1;
        for e in 0..self.mesh.n_elements() {
            for k in 0..nb {
                u[e * nb + k] = x[self.dof(e, 0, k)];
                v[e * nb + k] = x[self.dof(e, 1, k)];
            }
        }
    }

    /// `I - θ ∂F/∂(u, v)` at `u` in banded form.
    pub fn assemble_system(&self, u: &[f64], theta: f64) -> BandedMatrix {
        let nb = self.p + 1;
        let n = self.mesh.n_elements();
        let mut m = BandedMatrix::zeros(2 * n * nb, self.kl, self.ku);
        for g in 0..2 * n * nb {
            m.add(g, g, 1.0);
        }
        let mut put = |op: &BlockOperator, rc: usize, cc: usize, s: f64| {
            for i in 0..n {
                for (j, b) in op.row(i) {
                    for k in 0..nb {
                        for l in 0..nb {
                            let v = b[k * nb + l];
                            if v != 0.0 {
                                m.add(self.dof(i, rc, k), self.dof(*j, cc, l), s * v);
                            }
                        }
                    }
                }
            }
        };
        put(&self.gm, 0, 1, -theta);
        put(&self.gp_lap, 1, 0, -theta * self.params.gamma);
        if self.params.mu != 0.0 {
            put(&self.gp_gm, 1, 1, -theta * self.params.mu);
        }
        // G⁺ J_W, with J_W block diagonal
        let jw = self.dw_jacobian_blocks(u);
        let mut tmp = vec![0.0; nb * nb];
        for i in 0..n {
            for (j, b) in self.gp.row(i) {
                let c = &jw[*j];
                for k in 0..nb {
                    for l in 0..nb {
                        tmp[k * nb + l] = (0..nb).map(|r| b[k * nb + r] * c[r * nb + l]).sum();
                    }
                }
                for k in 0..nb {
                    for l in 0..nb {
                        m.add(self.dof(i, 1, k), self.dof(*j, 0, l), -theta * tmp[k * nb + l]);
                    }
                }
            }
        }
        m
    }

    /// Mass-weighted squared `L²` norm of a coefficient vector.
    pub fn mass_norm_sq(&self, c: &[f64]) -> f64 {
        let nb = self.p + 1;
        c.iter()
            .enumerate()
            .map(|(g, x)| self.mesh.width(g / nb) / (2 * (g % nb) + 1) as f64 * x * x)
            .sum()
    }

    /// `γ/2 A_h(u, u) + int W(u) + ½‖v‖²`.
    pub fn energy(&self, u: &BrokenField, v: &BrokenField) -> f64 {
        let au = self.penalty.apply(u);
        let a: f64 = au.iter().zip(u.coeffs()).map(|(x, y)| x * y).sum();
        let w = &self.params.energy;
        let mut pot = 0.0;
        let nb = self.p + 1;
        for (i, ue) in u.coeffs().chunks(nb).enumerate() {
            let h = self.mesh.width(i);
            for (q, t) in self.table.iter().enumerate() {
                let uq: f64 = ue.iter().zip(t).map(|(a, b)| a * b).sum();
                pot += 0.5 * h * self.rule.weights[q] * w.w(uq);
            }
        }
        0.5 * self.params.gamma * a + pot + 0.5 * v.l2_norm_sq()
    }

    /// Instantaneous dissipation rate `μ‖G⁻ v‖²`.
    pub fn dissipation_rate(&self, v: &BrokenField) -> f64 {
        if self.params.mu == 0.0 {
            return 0.0;
        }
        self.params.mu * self.mass_norm_sq(&self.gm.apply(v.coeffs()))
    }
}
