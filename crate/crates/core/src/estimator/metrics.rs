//! Error functionals against a known solution, the initial estimator, and the
//! EOC/EI harness.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Profile;
use crate::operators::norms::{dg_error_sq, l2_error_sq};
use crate::space::BrokenField;

use super::eta1::residual_rule;
use super::levels::{EstimatorContext, LevelCache, LevelTerms};

/// Pointwise distances of one level to the exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorSample {
    /// `‖u - u_h‖_dG`.
    pub u_dg: f64,
    /// `‖u - u_h‖_{L²}`.
    pub u_l2: f64,
    /// `‖v - v_h‖_{L²}`.
    pub v_l2: f64,
    /// `|v - v_h|_dG`, unsquared.
    pub v_dg: f64,
}

/// Distances of `(u_h, v_h)` to a time-independent `(u, v)`.
pub fn error_sample(u: &Profile, v: &Profile, u_h: &BrokenField, v_h: &BrokenField) -> ErrorSample {
    let rule = residual_rule(u_h.degree().max(2));
    ErrorSample {
        u_dg: dg_error_sq(|x| u.derivative(x), u_h, &rule).sqrt(),
        u_l2: l2_error_sq(|x| u.value(x), u_h, &rule).sqrt(),
        v_l2: l2_error_sq(|x| v.value(x), v_h, &rule).sqrt(),
        v_dg: dg_error_sq(|x| v.derivative(x), v_h, &rule).sqrt(),
    }
}

/// `e_R = √γ ‖u - u_h‖_dG + ‖v - v_h‖ + √(μ/4 · viscous_integral)`.
///
/// Pass `int |v - v_h|_dG` for the displayed form or `int |v - v_h|²_dG` for
/// the variant matching the dissipation in `η_R`.
pub fn error_reduced(sample: &ErrorSample, gamma: f64, mu: f64, viscous_integral: f64) -> f64 {
    gamma.sqrt() * sample.u_dg + sample.v_l2 + (0.25 * mu * viscous_integral).sqrt()
}

/// `e_M = e_R + ‖u - u_h‖_{L²}`.
pub fn error_modified(sample: &ErrorSample, gamma: f64, mu: f64, viscous_integral: f64) -> f64 {
    error_reduced(sample, gamma, mu, viscous_integral) + sample.u_l2
}

/// Addends of `𝔈_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialEstimate {
    pub u_dg_sq: f64,
    pub v_l2_sq: f64,
    /// `γ Η₁[u_h⁰, (τ_h⁰ - W'(u_h⁰))/γ]²`.
    pub eta1: f64,
    /// `h/γ² (‖⟦τ_h⁰⟧‖² + ‖⟦u_h⁰⟧‖²)`.
    pub jumps: f64,
    pub total: f64,
}

/// `𝔈_0` from the initial data and the first discrete level.
pub fn estimator_initial(
    u0: &Profile,
    v0: &Profile,
    level0: &crate::solver::SolverState,
    ctx: &EstimatorContext,
) -> Result<InitialEstimate> {
    let e = error_sample(u0, v0, &level0.u, &level0.v);
    let cache = LevelCache::new(level0, ctx)?;
    let t = LevelTerms::from_caches(&[&cache], 1.0, 0, ctx)?;
    let eta1 = ctx.gamma * t.eta1_u * t.eta1_u;
    let jumps = ctx.h / (ctx.gamma * ctx.gamma) * (t.jump_tau + t.jump_u);
    let (u_dg_sq, v_l2_sq) = (e.u_dg * e.u_dg, e.v_l2 * e.v_l2);
    Ok(InitialEstimate {
        u_dg_sq,
        v_l2_sq,
        eta1,
        jumps,
        total: u_dg_sq + v_l2_sq + eta1 + jumps,
    })
}

/// `log(a_{i+1}/a_i) / log(h_{i+1}/h_i)` for each consecutive pair.
pub fn eoc(values: &[f64], widths: &[f64]) -> Result<Vec<f64>> {
    if values.len() != widths.len() {
        return Err(Error::InvalidArgument(format!(
            "{} values but {} widths",
            values.len(),
            widths.len()
        )));
    }
    if let Some(a) = values.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidArgument(format!("EOC needs positive values, got {a}")));
    }
    if widths.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::InvalidArgument("EOC needs positive widths".into()));
    }
    Ok(values
        .windows(2)
        .zip(widths.windows(2))
        .map(|(a, h)| (a[1] / a[0]).ln() / (h[1] / h[0]).ln())
        .collect())
}

/// `EI = max_t 𝕳_R / max_t e_R`.
pub fn effectivity(indicator_max: f64, error_max: f64) -> Result<f64> {
    if !(error_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "effectivity needs a positive error, got {error_max}"
        )));
    }
    Ok(indicator_max / error_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eoc_of_powers() {
        let h = [1.0, 0.5, 0.25];
        assert!(eoc(&h, &h).unwrap().iter().all(|r| (r - 1.0).abs() < 1e-15));
        let a: Vec<f64> = h.iter().map(|x| x * x).collect();
        assert!(eoc(&a, &h).unwrap().iter().all(|r| (r - 2.0).abs() < 1e-15));
        assert!(eoc(&[1.0, 0.0], &[1.0, 0.5]).is_err());
        assert!(eoc(&[1.0, -1.0], &[1.0, 0.5]).is_err());
    }

    #[test]
    fn eoc_of_tabulated_errors() {
        let r = eoc(&[9.046446e-2, 4.513328e-2], &[2.0 / 512.0, 2.0 / 1024.0]).unwrap();
        assert!((r[0] - 1.003).abs() < 5e-4);
    }

    #[test]
    fn effectivity_of_tabulated_rows() {
        assert_eq!(effectivity(0.3, 0.3).unwrap(), 1.0);
        assert!((effectivity(6.124622e-1, 4.513328e-2).unwrap() - 13.57).abs() < 5e-3);
        assert!((effectivity(8.576527e-4, 2.010349e-5).unwrap() - 42.66).abs() < 5e-3);
        assert!(effectivity(1.0, 0.0).is_err());
    }

    #[test]
    fn modified_dominates_reduced() {
        let s = ErrorSample {
            u_dg: 0.2,
            u_l2: 0.05,
            v_l2: 0.1,
            v_dg: 0.3,
        };
        let r = error_reduced(&s, 0.01, 0.5, 2.0);
        assert!((r - (0.1 * 0.2 + 0.1 + 0.5)).abs() < 1e-15);
        assert!(error_modified(&s, 0.01, 0.5, 2.0) >= r);
    }
}
