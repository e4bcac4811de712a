//! Per-level estimator terms from cached point data.
//!
//! Every time quotient appearing in the estimators is a fixed linear
//! combination of the newest levels, and so are their element residuals,
//! jumps and high derivatives of `W'(u_h)`. Each level is therefore sampled
//! once and the quotient terms are formed from weighted sums of the samples.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{compose, factorial};
use crate::mesh::Mesh1D;
use crate::model::EnergyDensity;
use crate::operators::{jumps, traces};
use crate::solver::{History, Scheme, SolverState};
use crate::space::{legendre, BrokenField, QuadratureRule};

use super::eta1::{face_sums, residual_rule, Eta1Parts};

/// Fixed data of one discretization needed to evaluate the estimators.
#[derive(Debug, Clone)]
pub struct EstimatorContext {
    pub gamma: f64,
    pub mu: f64,
    pub sigma: f64,
    pub p: usize,
    /// Global maximal element width, the bare `h` of the jump groups.
    pub h: f64,
    pub energy: Arc<dyn EnergyDensity>,
    mesh: Arc<Mesh1D>,
    rule: QuadratureRule,
    /// `table[q][m][k] = P_k^(m)(ξ_q)` for `m ≤ p + 1`.
    table: Vec<Vec<Vec<f64>>>,
    face_h: Vec<f64>,
}

impl EstimatorContext {
    pub fn new(mesh: Arc<Mesh1D>, p: usize, gamma: f64, mu: f64, sigma: f64, energy: Arc<dyn EnergyDensity>) -> Self {
        let rule = residual_rule(p);
        let table = rule
            .nodes
            .iter()
            .map(|&xi| legendre::values_and_derivatives(p, p + 1, xi))
            .collect();
        let face_h = mesh.faces().iter().map(|f| f.h).collect();
        Self {
            gamma,
            mu,
            sigma,
            p,
            h: mesh.max_width(),
            energy,
            mesh,
            rule,
            table,
            face_h,
        }
    }

    pub fn from_scheme(scheme: &Scheme) -> Self {
        let prm = scheme.params();
        Self::new(
            scheme.mesh().clone(),
            scheme.degree(),
            prm.gamma,
            prm.mu,
            scheme.penalty().sigma(),
            prm.energy.clone(),
        )
    }

    pub fn mesh(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    fn nq(&self) -> usize {
        self.rule.len()
    }
}

/// Point samples of one time level.
#[derive(Debug, Clone)]
pub struct LevelCache {
    pub t: f64,
    /// `W'(u_h)` at the quadrature nodes, element-major.
    dw: Vec<f64>,
    /// `∂_x^{p+1} W'(u_h)` at the quadrature nodes.
    dw_high: Vec<f64>,
    uxx: Vec<f64>,
    tau: Vec<f64>,
    dw_jump: Vec<f64>,
    u_jump: Vec<f64>,
    ux_jump: Vec<f64>,
    tau_jump: Vec<f64>,
    v_jump: Vec<f64>,
}

fn sample(field: &BrokenField, ctx: &EstimatorContext, order: usize) -> Vec<f64> {
    let mesh = field.mesh();
    let nq = ctx.nq();
    let tab: Vec<Vec<f64>> = ctx
        .rule
        .nodes
        .iter()
        .map(|&xi| legendre::values_and_derivatives(field.degree(), order, xi).swap_remove(order))
        .collect();
    let mut out = vec![0.0; mesh.n_elements() * nq];
    for i in 0..mesh.n_elements() {
        let c = field.element(i);
        let s = (2.0 / mesh.width(i)).powi(order as i32);
        for (q, row) in tab.iter().enumerate() {
            let d: f64 = c.iter().zip(row).map(|(a, b)| a * b).sum();
            out[i * nq + q] = d * s;
        }
    }
    out
}

impl LevelCache {
    pub fn new(state: &SolverState, ctx: &EstimatorContext) -> Result<Self> {
        let p = ctx.p;
        if state.u.degree() != p {
            return Err(Error::InvalidArgument(format!(
                "state degree {} does not match estimator degree {p}",
                state.u.degree()
            )));
        }
        let mesh = state.u.mesh();
        let nq = ctx.nq();
        let order = p + 1;
        let mut dw = vec![0.0; mesh.n_elements() * nq];
        let mut dw_high = vec![0.0; mesh.n_elements() * nq];
        let mut inner = vec![0.0; order + 1];
        let mut outer = vec![0.0; order + 1];
        for i in 0..mesh.n_elements() {
            let c = state.u.element(i);
            let s = 2.0 / mesh.width(i);
            for q in 0..nq {
                let tab = &ctx.table[q];
                let mut scale = 1.0;
                for (m, slot) in inner.iter_mut().enumerate() {
                    if m > 0 {
                        scale *= s / m as f64;
                    }
                    let d: f64 = c.iter().zip(&tab[m]).map(|(a, b)| a * b).sum();
                    *slot = d * scale;
                }
                for (j, o) in outer.iter_mut().enumerate() {
                    *o = ctx.energy.derivative(1 + j, inner[0])?;
                }
                let t = compose(&outer, &inner);
                dw[i * nq + q] = t[0];
                dw_high[i * nq + q] = t[order] * factorial(order);
            }
        }
        let mut dw_jump = Vec::with_capacity(mesh.faces().len());
        for tr in traces(&state.u) {
            dw_jump.push(ctx.energy.derivative(1, tr.minus)? - ctx.energy.derivative(1, tr.plus)?);
        }
        Ok(Self {
            t: state.t,
            dw,
            dw_high,
            uxx: sample(&state.u, ctx, 2),
            tau: sample(&state.tau, ctx, 0),
            dw_jump,
            u_jump: jumps(&state.u),
            ux_jump: jumps(&state.u.derivative()),
            tau_jump: jumps(&state.tau),
            v_jump: jumps(&state.v),
        })
    }
}

fn combine(levels: &[&LevelCache], weights: &[f64], pick: impl Fn(&LevelCache) -> &Vec<f64>) -> Vec<f64> {
    let n = pick(levels[0]).len();
    let mut out = vec![0.0; n];
    for (l, w) in levels.iter().zip(weights) {
        for (o, x) in out.iter_mut().zip(pick(l)) {
            *o += w * x;
        }
    }
    out
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn inv_h_sum(v: &[f64], face_h: &[f64]) -> f64 {
    v.iter().zip(face_h).map(|(x, h)| x * x / h).sum()
}

/// Quantities of one time combination `sum_j w_j (level j)`.
struct Combined {
    eta1: Eta1Parts,
    u_jump: Vec<f64>,
    tau_jump: Vec<f64>,
    dw_jump: Vec<f64>,
    v_jump: Vec<f64>,
    /// `sum_K h_K^{2p} |W'|²_{H^{p+1}(K)}`.
    sobolev: f64,
    /// The same with `h_K^{2p+2}`.
    sobolev_high: f64,
}

fn combined(levels: &[&LevelCache], weights: &[f64], ctx: &EstimatorContext) -> Combined {
    let mesh = &ctx.mesh;
    let nq = ctx.nq();
    let dw = combine(levels, weights, |l| &l.dw);
    let high = combine(levels, weights, |l| &l.dw_high);
    let uxx = combine(levels, weights, |l| &l.uxx);
    let tau = combine(levels, weights, |l| &l.tau);
    let mut residual = 0.0;
    let mut sobolev = 0.0;
    let mut sobolev_high = 0.0;
    for i in 0..mesh.n_elements() {
        let h = mesh.width(i);
        let (mut r, mut s) = (0.0, 0.0);
        for q in 0..nq {
            let k = i * nq + q;
            let f = (tau[k] - dw[k]) / ctx.gamma + uxx[k];
            r += ctx.rule.weights[q] * f * f;
            s += ctx.rule.weights[q] * high[k] * high[k];
        }
        residual += h * h * 0.5 * h * r;
        let weighted = h.powi(2 * ctx.p as i32) * 0.5 * h * s;
        sobolev += weighted;
        sobolev_high += h * h * weighted;
    }
    let u_jump = combine(levels, weights, |l| &l.u_jump);
    let ux_jump = combine(levels, weights, |l| &l.ux_jump);
    let (flux_jump, value_jump) = face_sums(&u_jump, &ux_jump, &ctx.face_h, ctx.sigma);
    Combined {
        eta1: Eta1Parts {
            residual,
            flux_jump,
            value_jump,
        },
        u_jump,
        tau_jump: combine(levels, weights, |l| &l.tau_jump),
        dw_jump: combine(levels, weights, |l| &l.dw_jump),
        v_jump: combine(levels, weights, |l| &l.v_jump),
        sobolev,
        sobolev_high,
    }
}

/// Raw estimator constituents at one time level; quotient terms are `None`
/// until enough levels exist.
///
/// Jump entries are squared skeleton norms, `eta1_*` are `Η₁` values (not
/// squared), `sobolev_w` carries the weight `h_K^{2p}` and the `*_high`
/// entries the weight `h_K^{2p+2}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LevelTerms {
    pub step: usize,
    pub t: f64,
    pub eta1_u: f64,
    pub jump_u_invh: f64,
    pub jump_u: f64,
    pub jump_tau: f64,
    pub jump_v_invh: f64,
    pub sobolev_w: f64,
    pub sobolev_w_high: f64,
    pub eta1_dt_u: Option<f64>,
    pub jump_dt_u_invh: Option<f64>,
    pub jump_dt_tau: Option<f64>,
    pub jump_dt_w: Option<f64>,
    pub jump_dt_v: Option<f64>,
    pub sobolev_dt_w_high: Option<f64>,
    pub eta1_dtt_u: Option<f64>,
    pub jump_dtt_tau: Option<f64>,
    pub jump_dtt_w: Option<f64>,
    pub sobolev_dtt_w_high: Option<f64>,
}

/// Names of the weighted addends of `𝔈_t²`, in the order of [`LevelTerms::full_terms`].
pub const FULL_TERM_NAMES: [&str; 16] = [
    "eta1_u_sq",
    "mu_eta1_dt_u_sq",
    "eta1_dtt_u_sq",
    "jump_u_invh",
    "mu_jump_dt_u_invh",
    "sobolev_w",
    "h_jump_tau",
    "h_jump_dtt_tau",
    "h_jump_u",
    "h_jump_dtt_w",
    "h_mu_jump_dt_tau",
    "h_mu_jump_dt_w",
    "h_jump_dt_v",
    "sobolev_dt_w_high",
    "sobolev_w_high",
    "sobolev_dtt_w_high",
];

/// Names of the addends of `Ẽ`.
pub const TILDE_TERM_NAMES: [&str; 3] = ["jump_u_invh", "mu_jump_dt_u_invh", "sobolev_w"];

/// Names of the addends of the time-integrated viscous bracket of `𝕳_R`.
pub const VISCOUS_TERM_NAMES: [&str; 3] = ["eta1_dt_u_sq", "h_jump_dt_w", "jump_v_invh"];

impl LevelTerms {
    /// Terms from cached levels, newest first; `dt` is the step.
    pub fn from_caches(levels: &[&LevelCache], dt: f64, step: usize, ctx: &EstimatorContext) -> Result<Self> {
        let Some(now) = levels.first() else {
            return Err(Error::InsufficientHistory {
                needed: 1,
                available: 0,
            });
        };
        let fh = &ctx.face_h;
        let c0 = combined(&levels[..1], &[1.0], ctx);
        let mut out = LevelTerms {
            step,
            t: now.t,
            eta1_u: c0.eta1.value(),
            jump_u_invh: inv_h_sum(&c0.u_jump, fh),
            jump_u: sum_sq(&c0.u_jump),
            jump_tau: sum_sq(&c0.tau_jump),
            jump_v_invh: inv_h_sum(&c0.v_jump, fh),
            sobolev_w: c0.sobolev,
            sobolev_w_high: c0.sobolev_high,
            ..Default::default()
        };
        if levels.len() >= 2 {
            let c1 = combined(&levels[..2], &[1.0 / dt, -1.0 / dt], ctx);
            out.eta1_dt_u = Some(c1.eta1.value());
            out.jump_dt_u_invh = Some(inv_h_sum(&c1.u_jump, fh));
            out.jump_dt_tau = Some(sum_sq(&c1.tau_jump));
            out.jump_dt_w = Some(sum_sq(&c1.dw_jump));
            out.jump_dt_v = Some(sum_sq(&c1.v_jump));
            out.sobolev_dt_w_high = Some(c1.sobolev_high);
        }
        if levels.len() >= 3 {
            let w = 1.0 / (dt * dt);
            let c2 = combined(&levels[..3], &[w, -2.0 * w, w], ctx);
            out.eta1_dtt_u = Some(c2.eta1.value());
            out.jump_dtt_tau = Some(sum_sq(&c2.tau_jump));
            out.jump_dtt_w = Some(sum_sq(&c2.dw_jump));
            out.sobolev_dtt_w_high = Some(c2.sobolev_high);
        }
        Ok(out)
    }

    /// `Ẽ` addends `[‖h^{-1/2}⟦u⟧‖², μ‖h^{-1/2}⟦∂_t u⟧‖², sum h^{2p}|W'|²_{H^{p+1}}]`.
    pub fn tilde_terms(&self, ctx: &EstimatorContext) -> [Option<f64>; 3] {
        [
            Some(self.jump_u_invh),
            self.jump_dt_u_invh.map(|j| ctx.mu * j),
            Some(self.sobolev_w),
        ]
    }

    /// `Ẽ`, present once the backward quotient exists.
    pub fn tilde(&self, ctx: &EstimatorContext) -> Option<f64> {
        sum_all(&self.tilde_terms(ctx))
    }

    /// Integrand of the viscous bracket of `𝕳_R`.
    pub fn viscous_terms(&self, ctx: &EstimatorContext) -> [Option<f64>; 3] {
        let g2 = ctx.gamma * ctx.gamma;
        [
            self.eta1_dt_u.map(|e| e * e),
            self.jump_dt_w.map(|j| ctx.h / g2 * j),
            Some(self.jump_v_invh),
        ]
    }

    pub fn viscous(&self, ctx: &EstimatorContext) -> Option<f64> {
        sum_all(&self.viscous_terms(ctx))
    }

    /// `Η₁[u_h]² + h/γ² (‖⟦τ_h⟧‖² + ‖⟦u_h⟧‖²)`, the instantaneous group of `𝕳_R`.
    pub fn instantaneous(&self, ctx: &EstimatorContext) -> f64 {
        self.eta1_u * self.eta1_u + ctx.h / (ctx.gamma * ctx.gamma) * (self.jump_tau + self.jump_u)
    }

    /// Weighted addends of `𝔈_t²` named by [`FULL_TERM_NAMES`].
    pub fn full_terms(&self, ctx: &EstimatorContext) -> [Option<f64>; 16] {
        let (mu, h) = (ctx.mu, ctx.h);
        let hg = h / (ctx.gamma * ctx.gamma);
        let ig = 1.0 / (ctx.gamma * ctx.gamma);
        let sq = |x: Option<f64>| x.map(|e| e * e);
        [
            Some(self.eta1_u * self.eta1_u),
            sq(self.eta1_dt_u).map(|e| mu * e),
            sq(self.eta1_dtt_u),
            Some(self.jump_u_invh),
            self.jump_dt_u_invh.map(|j| mu * j),
            Some(self.sobolev_w),
            Some(hg * self.jump_tau),
            self.jump_dtt_tau.map(|j| hg * j),
            Some(hg * self.jump_u),
            self.jump_dtt_w.map(|j| hg * j),
            self.jump_dt_tau.map(|j| h * mu * ig * j),
            self.jump_dt_w.map(|j| h * mu * ig * j),
            self.jump_dt_v.map(|j| h * j),
            self.sobolev_dt_w_high.map(|s| ig * s),
            Some(ig * self.sobolev_w_high),
            self.sobolev_dtt_w_high.map(|s| ig * s),
        ]
    }

    /// `𝔈_t²`, present once the second quotients exist.
    pub fn full_sq(&self, ctx: &EstimatorContext) -> Option<f64> {
        sum_all(&self.full_terms(ctx))
    }
}

fn sum_all(terms: &[Option<f64>]) -> Option<f64> {
    terms.iter().try_fold(0.0, |acc, t| t.map(|x| acc + x))
}

/// Levels of `history` sampled and combined into [`LevelTerms`].
pub fn level_terms(history: &History, step: usize, ctx: &EstimatorContext) -> Result<LevelTerms> {
    let caches: Vec<LevelCache> = (0..history.len().min(3))
        .map(|k| LevelCache::new(history.level(k)?, ctx))
        .collect::<Result<_>>()?;
    let refs: Vec<&LevelCache> = caches.iter().collect();
    LevelTerms::from_caches(&refs, history.dt(), step, ctx)
}

/// `Ẽ` at the newest level of `history`; needs two levels.
pub fn indicator_tilde(history: &History, ctx: &EstimatorContext) -> Result<f64> {
    let t = level_terms(history, 0, ctx)?;
    t.tilde(ctx).ok_or(Error::InsufficientHistory {
        needed: 2,
        available: history.len(),
    })
}

/// `𝔈_t` at the newest level of `history`; needs three levels.
pub fn estimator_full(history: &History, ctx: &EstimatorContext) -> Result<f64> {
    let t = level_terms(history, 0, ctx)?;
    t.full_sq(ctx).map(f64::sqrt).ok_or(Error::InsufficientHistory {
        needed: 3,
        available: history.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::eta1::eta1_parts;
    use crate::jet::ComposedField;
    use crate::mesh::BoundaryMode;
    use crate::model::{ModelParams, QuarticWell};
    use crate::space::project_l2;

    fn ctx(mesh: &Arc<Mesh1D>, p: usize, mu: f64) -> EstimatorContext {
        EstimatorContext::new(mesh.clone(), p, 1e-2, mu, 7.0, Arc::new(QuarticWell))
    }

    fn state(t: f64, u: BrokenField, v: BrokenField, tau: BrokenField) -> SolverState {
        SolverState { t, u, v, tau }
    }

    /// `(τ - W'(u))/γ` through the generic evaluable interface.
    struct Data<'a> {
        tau: &'a BrokenField,
        w: ComposedField<'a>,
        gamma: f64,
    }

    impl crate::jet::ElementwiseSmooth for Data<'_> {
        fn mesh(&self) -> &Mesh1D {
            self.tau.mesh()
        }

        fn derivative_at(&self, e: usize, xi: f64, order: usize) -> Result<f64> {
            use crate::jet::ElementwiseSmooth as S;
            Ok((S::derivative_at(self.tau, e, xi, order)? - self.w.derivative_at(e, xi, order)?) / self.gamma)
        }
    }

    #[test]
    fn constant_state_has_no_terms() {
        let mesh = Arc::new(Mesh1D::uniform((0.0, 1.0), 6, BoundaryMode::Periodic).unwrap());
        let c = ctx(&mesh, 2, 0.1);
        let u = BrokenField::constant(mesh.clone(), 2, 0.4);
        let tau = BrokenField::constant(mesh.clone(), 2, QuarticWell.dw(0.4));
        let s = state(0.0, u, BrokenField::zeros(mesh.clone(), 2), tau);
        let caches = [LevelCache::new(&s, &c).unwrap(), LevelCache::new(&s, &c).unwrap(), LevelCache::new(&s, &c).unwrap()];
        let refs: Vec<&LevelCache> = caches.iter().collect();
        let t = LevelTerms::from_caches(&refs, 0.01, 2, &c).unwrap();
        assert!(t.eta1_u < 1e-12);
        assert_eq!(t.tilde(&c).unwrap(), 0.0);
        assert!(t.full_sq(&c).unwrap() < 1e-20);
    }

    #[test]
    fn sobolev_term_of_linear_strain() {
        // p = 1, u = x: ∂_x² W'(u) = 24x, so each element contributes h^2 int_K (24x)²
        let mesh = Arc::new(Mesh1D::uniform((0.0, 1.0), 4, BoundaryMode::Natural).unwrap());
        let c = ctx(&mesh, 1, 0.0);
        let u = project_l2(|x| x, mesh.clone(), 1);
        let z = BrokenField::zeros(mesh.clone(), 1);
        let cache = LevelCache::new(&state(0.0, u, z.clone(), z), &c).unwrap();
        let t = LevelTerms::from_caches(&[&cache], 1.0, 0, &c).unwrap();
        let h: f64 = 0.25;
        let exact = h * h * 576.0 / 3.0;
        assert!((t.sobolev_w - exact).abs() < 1e-12 * exact);
        assert!((t.sobolev_w_high - h * h * exact).abs() < 1e-12 * exact);
        assert!(t.jump_u_invh < 1e-24);
        assert!(t.tilde(&c).is_none());
    }

    #[test]
    fn cached_eta1_matches_direct_evaluation() {
        let params = ModelParams::quartic(1e-2, 0.0, BoundaryMode::Natural, (-1.0, 1.0)).unwrap();
        let mesh = Arc::new(Mesh1D::uniform((-1.0, 1.0), 9, BoundaryMode::Natural).unwrap());
        for p in 1..=3 {
            let scheme = Scheme::new(mesh.clone(), p, params.clone(), None).unwrap();
            let c = EstimatorContext::from_scheme(&scheme);
            let u = project_l2(|x| (5.0 * x).tanh() + 0.1 * x * x, mesh.clone(), p);
            let tau = scheme.eliminate_tau(&u);
            let data = Data {
                tau: &tau,
                w: ComposedField::first_derivative(&u, params.energy.as_ref()),
                gamma: params.gamma,
            };
            let direct = eta1_parts(&u, &data, c.sigma, c.rule()).unwrap();
            let s = state(0.0, u.clone(), u.clone(), tau.clone());
            let cache = LevelCache::new(&s, &c).unwrap();
            let t = LevelTerms::from_caches(&[&cache], 1.0, 0, &c).unwrap();
            assert!((t.eta1_u - direct.value()).abs() < 1e-12 * direct.value());
        }
    }

    #[test]
    fn quotients_of_linear_motion() {
        // u^n = a + n δt b with τ ≡ 0 and linear W': ∂_t u is b and every
        // second quotient vanishes
        #[derive(Debug)]
        struct Harmonic;
        impl EnergyDensity for Harmonic {
            fn name(&self) -> &str {
                "harmonic"
            }
            fn max_order(&self) -> Option<usize> {
                None
            }
            fn derivative(&self, order: usize, u: f64) -> Result<f64> {
                Ok([0.5 * u * u, u, 1.0].get(order).copied().unwrap_or(0.0))
            }
        }
        let mesh = Arc::new(Mesh1D::uniform((0.0, 1.0), 5, BoundaryMode::Periodic).unwrap());
        let c = EstimatorContext::new(mesh.clone(), 1, 1e-2, 1.0, 7.0, Arc::new(Harmonic));
        let a = project_l2(|x| x, mesh.clone(), 1);
        let b = project_l2(|x| (6.0 * x).sin(), mesh.clone(), 1);
        let dt = 0.1;
        let z = BrokenField::zeros(mesh.clone(), 1);
        let levels: Vec<LevelCache> = (0..3)
            .rev()
            .map(|n| {
                let mut u = a.clone();
                u.axpy(n as f64 * dt, &b);
                LevelCache::new(&state(n as f64 * dt, u, z.clone(), z.clone()), &c).unwrap()
            })
            .collect();
        let refs: Vec<&LevelCache> = levels.iter().collect();
        let t = LevelTerms::from_caches(&refs, dt, 2, &c).unwrap();
        let faces = mesh.faces();
        let expect: f64 = crate::operators::jumps(&b)
            .iter()
            .zip(faces)
            .map(|(j, f)| j * j / f.h)
            .sum();
        assert!((t.jump_dt_u_invh.unwrap() - expect).abs() < 1e-10 * expect);
        assert!(t.eta1_dtt_u.unwrap() < 1e-8);
        assert!(t.jump_dtt_w.unwrap() < 1e-20);
    }
}
