//! Online evaluation of the indicators while the solver runs.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::Result;
use crate::model::Profile;
use crate::solver::{History, Scheme, StepObserver, StepStats};

use super::levels::{EstimatorContext, LevelCache, LevelTerms, FULL_TERM_NAMES, TILDE_TERM_NAMES, VISCOUS_TERM_NAMES};
use super::metrics::{error_modified, error_reduced, error_sample, estimator_initial, ErrorSample, InitialEstimate};

/// Trapezoid accumulation of `int_0^t g` from level values.
///
/// An integrand that only exists from some level on (a time quotient) is
/// extended back to `t = 0` by its first value.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TimeIntegral {
    last: Option<(f64, f64)>,
    total: f64,
}

impl TimeIntegral {
    pub fn push(&mut self, t: f64, value: Option<f64>) {
        let Some(v) = value else { return };
        match self.last {
            Some((t0, v0)) => self.total += 0.5 * (t - t0) * (v0 + v),
            None => self.total += t * v,
        }
        self.last = Some((t, v));
    }

    pub fn value(&self) -> f64 {
        self.total
    }
}

/// What the observer knows about the continuous problem.
#[derive(Debug, Clone, Default)]
pub struct ReferenceData {
    /// Time-independent exact `(u, v)`, enabling `e_R` and `e_M`.
    pub exact: Option<(Profile, Profile)>,
    /// Initial `(u₀, v₀)`, enabling `𝔈_0`.
    pub initial: Option<(Profile, Profile)>,
}

/// Everything computed at one time level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorRow {
    pub terms: LevelTerms,
    pub tilde: Option<f64>,
    pub viscous: Option<f64>,
    pub full_sq: Option<f64>,
    pub int_tilde: f64,
    pub int_viscous: f64,
    pub int_full_sq: f64,
    /// The three groups of `𝕳_R`.
    pub indicator_parts: [f64; 3],
    pub indicator: f64,
    pub errors: Option<ErrorSample>,
    /// `int_0^t |v - v_h|_dG` and `int_0^t |v - v_h|²_dG`.
    pub int_v_dg: f64,
    pub int_v_dg_sq: f64,
    pub error_reduced: Option<f64>,
    pub error_reduced_sq_variant: Option<f64>,
    pub error_modified: Option<f64>,
    /// `[𝔈_0 + int 𝔈_s²]^{1/2}`, when `𝔈_0` is known.
    pub full_bound: Option<f64>,
}

impl EstimatorRow {
    /// Flat `(name, value)` columns; `None` marks a term that does not exist yet.
    pub fn columns(&self) -> Vec<(String, Option<f64>)> {
        let t = &self.terms;
        let mut c: Vec<(String, Option<f64>)> = vec![
            ("step".into(), Some(t.step as f64)),
            ("t".into(), Some(t.t)),
            ("eta1_u".into(), Some(t.eta1_u)),
            ("eta1_dt_u".into(), t.eta1_dt_u),
            ("eta1_dtt_u".into(), t.eta1_dtt_u),
            ("jump_u_invh".into(), Some(t.jump_u_invh)),
            ("jump_dt_u_invh".into(), t.jump_dt_u_invh),
            ("jump_v_invh".into(), Some(t.jump_v_invh)),
            ("jump_u".into(), Some(t.jump_u)),
            ("jump_tau".into(), Some(t.jump_tau)),
            ("jump_dt_tau".into(), t.jump_dt_tau),
            ("jump_dtt_tau".into(), t.jump_dtt_tau),
            ("jump_dt_w".into(), t.jump_dt_w),
            ("jump_dtt_w".into(), t.jump_dtt_w),
            ("jump_dt_v".into(), t.jump_dt_v),
            ("sobolev_w".into(), Some(t.sobolev_w)),
            ("sobolev_w_high".into(), Some(t.sobolev_w_high)),
            ("sobolev_dt_w_high".into(), t.sobolev_dt_w_high),
            ("sobolev_dtt_w_high".into(), t.sobolev_dtt_w_high),
            ("e_tilde".into(), self.tilde),
            ("viscous_integrand".into(), self.viscous),
            ("full_sq".into(), self.full_sq),
            ("full".into(), self.full_sq.map(f64::sqrt)),
            ("int_e_tilde".into(), Some(self.int_tilde)),
            ("int_viscous".into(), Some(self.int_viscous)),
            ("int_full_sq".into(), Some(self.int_full_sq)),
            ("indicator_tilde_part".into(), Some(self.indicator_parts[0])),
            ("indicator_instant_part".into(), Some(self.indicator_parts[1])),
            ("indicator_viscous_part".into(), Some(self.indicator_parts[2])),
            ("indicator".into(), Some(self.indicator)),
        ];
        let e = self.errors;
        c.extend([
            ("err_u_dg".into(), e.map(|e| e.u_dg)),
            ("err_u_l2".into(), e.map(|e| e.u_l2)),
            ("err_v_l2".into(), e.map(|e| e.v_l2)),
            ("err_v_dg".into(), e.map(|e| e.v_dg)),
            ("int_err_v_dg".into(), e.map(|_| self.int_v_dg)),
            ("int_err_v_dg_sq".into(), e.map(|_| self.int_v_dg_sq)),
            ("error_reduced".into(), self.error_reduced),
            ("error_reduced_sq_variant".into(), self.error_reduced_sq_variant),
            ("error_modified".into(), self.error_modified),
            ("full_bound".into(), self.full_bound),
        ]);
        c
    }
}

/// Running maxima over every level and the final accumulations.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub n_elements: usize,
    pub degree: usize,
    pub gamma: f64,
    pub mu: f64,
    pub sigma: f64,
    pub h: f64,
    pub levels: usize,
    pub t_final: f64,
    pub max_indicator: f64,
    pub max_tilde: f64,
    pub max_full: f64,
    pub max_error_reduced: Option<f64>,
    pub max_error_reduced_sq_variant: Option<f64>,
    pub max_error_modified: Option<f64>,
    pub effectivity: Option<f64>,
    pub initial: Option<InitialEstimate>,
    pub int_tilde: f64,
    pub int_viscous: f64,
    pub int_full_sq: f64,
    /// Integrals of each named addend of `Ẽ`, the viscous bracket and `𝔈_t²`.
    pub tilde_integrals: Vec<(String, f64)>,
    pub viscous_integrals: Vec<(String, f64)>,
    pub full_integrals: Vec<(String, f64)>,
}

/// A [`StepObserver`] evaluating all indicators at every level and keeping
/// every `stride`-th row.
pub struct EstimatorObserver {
    ctx: EstimatorContext,
    reference: ReferenceData,
    stride: usize,
    step: usize,
    caches: VecDeque<LevelCache>,
    tilde_acc: [TimeIntegral; 3],
    viscous_acc: [TimeIntegral; 3],
    full_acc: [TimeIntegral; 16],
    v_dg_acc: TimeIntegral,
    v_dg_sq_acc: TimeIntegral,
    rows: Vec<EstimatorRow>,
    latest: Option<EstimatorRow>,
    summary: EstimatorSummary,
}

fn max_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl EstimatorObserver {
    pub fn new(scheme: &Scheme, reference: ReferenceData, stride: usize) -> Self {
        let ctx = EstimatorContext::from_scheme(scheme);
        let summary = EstimatorSummary {
            n_elements: scheme.mesh().n_elements(),
            degree: scheme.degree(),
            gamma: ctx.gamma,
            mu: ctx.mu,
            sigma: ctx.sigma,
            h: ctx.h,
            ..Default::default()
        };
        Self {
            ctx,
            reference,
            stride: stride.max(1),
            step: 0,
            caches: VecDeque::with_capacity(3),
            tilde_acc: Default::default(),
            viscous_acc: Default::default(),
            full_acc: Default::default(),
            v_dg_acc: Default::default(),
            v_dg_sq_acc: Default::default(),
            rows: Vec::new(),
            latest: None,
            summary,
        }
    }

    pub fn context(&self) -> &EstimatorContext {
        &self.ctx
    }

    /// The newest row, whether or not it was kept.
    pub fn latest(&self) -> Option<&EstimatorRow> {
        self.latest.as_ref()
    }

    /// Kept rows plus the newest one if it fell between strides.
    pub fn rows(&self) -> Vec<EstimatorRow> {
        let mut r = self.rows.clone();
        if let Some(l) = &self.latest {
            if r.last().map(|x| x.terms.step) != Some(l.terms.step) {
                r.push(l.clone());
            }
        }
        r
    }

    pub fn summary(&self) -> EstimatorSummary {
        let mut s = self.summary.clone();
        s.effectivity = s
            .max_error_reduced
            .filter(|e| *e > 0.0)
            .map(|e| s.max_indicator / e);
        let named = |names: &[&str], acc: &[TimeIntegral]| {
            names.iter().zip(acc).map(|(n, a)| (n.to_string(), a.value())).collect()
        };
        s.tilde_integrals = named(&TILDE_TERM_NAMES, &self.tilde_acc);
        s.viscous_integrals = named(&VISCOUS_TERM_NAMES, &self.viscous_acc);
        s.full_integrals = named(&FULL_TERM_NAMES, &self.full_acc);
        s
    }

    pub fn into_parts(self) -> (Vec<EstimatorRow>, EstimatorSummary) {
        let s = self.summary();
        (self.rows(), s)
    }

    fn evaluate(&mut self, history: &History) -> Result<EstimatorRow> {
        let state = history.current();
        self.caches.push_front(LevelCache::new(state, &self.ctx)?);
        self.caches.truncate(3);
        let refs: Vec<&LevelCache> = self.caches.iter().collect();
        let terms = LevelTerms::from_caches(&refs, history.dt(), self.step, &self.ctx)?;
        let t = terms.t;
        let ctx = &self.ctx;

        for (a, v) in self.tilde_acc.iter_mut().zip(terms.tilde_terms(ctx)) {
            a.push(t, v);
        }
        for (a, v) in self.viscous_acc.iter_mut().zip(terms.viscous_terms(ctx)) {
            a.push(t, v);
        }
        for (a, v) in self.full_acc.iter_mut().zip(terms.full_terms(ctx)) {
            a.push(t, v);
        }
        let int_tilde: f64 = self.tilde_acc.iter().map(TimeIntegral::value).sum();
        let int_viscous: f64 = self.viscous_acc.iter().map(TimeIntegral::value).sum();
        let int_full_sq: f64 = self.full_acc.iter().map(TimeIntegral::value).sum();
        let parts = [
            int_tilde.sqrt(),
            ctx.gamma.sqrt() * terms.instantaneous(ctx),
            0.5 * ctx.mu.sqrt() * int_viscous.sqrt(),
        ];

        if self.step == 0 {
            if let Some((u0, v0)) = &self.reference.initial {
                self.summary.initial = Some(estimator_initial(u0, v0, state, ctx)?);
            }
        }

        let errors = self
            .reference
            .exact
            .as_ref()
            .map(|(u, v)| error_sample(u, v, &state.u, &state.v));
        if let Some(e) = errors {
            self.v_dg_acc.push(t, Some(e.v_dg));
            self.v_dg_sq_acc.push(t, Some(e.v_dg * e.v_dg));
        }
        let (g, mu) = (ctx.gamma, ctx.mu);
        let row = EstimatorRow {
            tilde: terms.tilde(ctx),
            viscous: terms.viscous(ctx),
            full_sq: terms.full_sq(ctx),
            terms,
            int_tilde,
            int_viscous,
            int_full_sq,
            indicator_parts: parts,
            indicator: parts.iter().sum(),
            errors,
            int_v_dg: self.v_dg_acc.value(),
            int_v_dg_sq: self.v_dg_sq_acc.value(),
            error_reduced: errors.map(|e| error_reduced(&e, g, mu, self.v_dg_acc.value())),
            error_reduced_sq_variant: errors.map(|e| error_reduced(&e, g, mu, self.v_dg_sq_acc.value())),
            error_modified: errors.map(|e| error_modified(&e, g, mu, self.v_dg_acc.value())),
            full_bound: self.summary.initial.map(|i| (i.total + int_full_sq).sqrt()),
        };

        let s = &mut self.summary;
        s.levels += 1;
        s.t_final = t;
        s.max_indicator = s.max_indicator.max(row.indicator);
        s.max_tilde = s.max_tilde.max(row.tilde.unwrap_or(0.0));
        s.max_full = s.max_full.max(row.full_sq.map(f64::sqrt).unwrap_or(0.0));
        s.max_error_reduced = max_opt(s.max_error_reduced, row.error_reduced);
        s.max_error_reduced_sq_variant = max_opt(s.max_error_reduced_sq_variant, row.error_reduced_sq_variant);
        s.max_error_modified = max_opt(s.max_error_modified, row.error_modified);
        s.int_tilde = int_tilde;
        s.int_viscous = int_viscous;
        s.int_full_sq = int_full_sq;
        Ok(row)
    }
}

impl StepObserver for EstimatorObserver {
    fn observe(&mut self, history: &History, _stats: Option<&StepStats>) -> Result<()> {
        let row = self.evaluate(history)?;
        if self.step % self.stride == 0 {
            self.rows.push(row.clone());
        }
        self.latest = Some(row);
        self.step += 1;
        Ok(())
    }
}
