//! Stability constants of the relative entropy bounds.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jet::ElementwiseSmooth;

use super::energy::{c_norm, EnergyDensity};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConstants {
    /// Sup-norm bound on the solutions involved.
    pub m_bar: f64,
    /// `‖W‖_{C³[-M̄, M̄]}`.
    pub w_bar: f64,
    /// `‖W‖_{C²[-M̄, M̄]}`.
    pub w_bbar: f64,
    /// Poincaré constant `L / (2π)`.
    pub c_p: f64,
}

impl StabilityConstants {
    /// Takes `M̄ = 1.1 * max_abs_u`.
    pub fn from_sup(max_abs_u: f64, energy: &dyn EnergyDensity, length: f64) -> Result<Self> {
        let m_bar = 1.1 * max_abs_u;
        Ok(Self {
            m_bar,
            w_bar: c_norm(energy, m_bar, 3, 2001)?,
            w_bbar: c_norm(energy, m_bar, 2, 2001)?,
            c_p: length / (2.0 * PI),
        })
    }
}

/// `K = max(2 C_P² W̄² / γ ‖∂_x û‖²_∞ + 2 W̄² / γ, 3/2)`.
pub fn stability_constant_k(grad_sup: f64, gamma: f64, c: &StabilityConstants) -> Result<f64> {
    if gamma <= 0.0 {
        return Err(Error::InvalidArgument("K requires gamma > 0".into()));
    }
    let w2 = c.w_bar * c.w_bar;
    Ok((2.0 * c.c_p * c.c_p * w2 / gamma * grad_sup * grad_sup + 2.0 * w2 / gamma).max(1.5))
}

/// `K̃ = max(4/(3μ) (W̿² + 1), 2)`; only defined for a positive viscosity.
pub fn stability_constant_ktilde(mu: f64, c: &StabilityConstants) -> Result<f64> {
    if mu <= 0.0 {
        return Err(Error::InvalidArgument(
            "the modified entropy constant requires mu > 0".into(),
        ));
    }
    Ok((4.0 / (3.0 * mu) * (c.w_bbar * c.w_bbar + 1.0)).max(2.0))
}

/// `‖∂_x f‖_∞` from `samples` equispaced points per element.
pub fn sup_derivative_sampled(f: &dyn ElementwiseSmooth, samples: usize) -> Result<f64> {
    let s = samples.max(2);
    let mut best: f64 = 0.0;
    for i in 0..f.mesh().n_elements() {
        for j in 0..s {
            let xi = -1.0 + 2.0 * j as f64 / (s - 1) as f64;
            best = best.max(f.derivative_at(i, xi, 1)?.abs());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts(w_bar: f64, w_bbar: f64, c_p: f64) -> StabilityConstants {
        StabilityConstants {
            m_bar: 1.0,
            w_bar,
            w_bbar,
            c_p,
        }
    }

    #[test]
    fn k_examples() {
        assert_eq!(stability_constant_k(3.0, 1.0, &consts(0.0, 0.0, 1.0)).unwrap(), 1.5);
        let c = consts(1.0, 1.0, 1.0 / (2.0 * PI));
        assert!((stability_constant_k(0.0, 1.0, &c).unwrap() - 2.0).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for g in [0.01, 0.1, 1.0, 10.0] {
            let k = stability_constant_k(2.0, g, &c).unwrap();
            assert!(k <= last);
            last = k;
        }
        assert!(stability_constant_k(1.0, 0.0, &c).is_err());
    }

    #[test]
    fn ktilde_examples() {
        assert_eq!(stability_constant_ktilde(1.0, &consts(0.0, 0.0, 1.0)).unwrap(), 2.0);
        let k = stability_constant_ktilde(0.1, &consts(1.0, 1.0, 1.0)).unwrap();
        assert!((k - 80.0 / 3.0).abs() < 1e-12);
        assert_eq!(stability_constant_ktilde(1e12, &consts(1.0, 1.0, 1.0)).unwrap(), 2.0);
        assert!(stability_constant_ktilde(0.0, &consts(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn quartic_norms() {
        let c = StabilityConstants::from_sup(1.0, &super::super::energy::QuarticWell, 2.0).unwrap();
        // on [-1.1, 1.1]: |W'''| = 24 * 1.1 dominates
        assert!((c.w_bar - 26.4).abs() < 1e-9);
        assert!(c.w_bar >= c.w_bbar);
    }
}
