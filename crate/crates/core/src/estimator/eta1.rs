//! Residual estimator `Η₁[w, f]` of the interior penalty discretization of `-∂_xx R = f`.

use serde::Serialize;

use crate::error::Result;
use crate::jet::ElementwiseSmooth;
use crate::operators::jumps;
use crate::space::{BrokenField, QuadratureRule};

/// The three sums making up `Η₁²`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Eta1Parts {
    /// `sum_K h_K² ‖f + ∂_xx w‖²_K`.
    pub residual: f64,
    /// `sum_e h_e ⟦∂_x w⟧²`.
    pub flux_jump: f64,
    /// `sum_e σ² h_e⁻¹ ⟦w⟧²`.
    pub value_jump: f64,
}

impl Eta1Parts {
    pub fn squared(&self) -> f64 {
        self.residual + self.flux_jump + self.value_jump
    }

    pub fn value(&self) -> f64 {
        self.squared().sqrt()
    }
}

/// Quadrature used for element residuals whose data contain `W'(u_h)` with `u_h` of degree `p`.
pub fn residual_rule(p: usize) -> QuadratureRule {
    QuadratureRule::gauss(3 * p + 2).expect("positive point count")
}

/// Face sums shared by every `Η₁` evaluation: `(sum h_e ⟦∂_x w⟧², sum σ² h_e⁻¹ ⟦w⟧²)`.
pub(crate) fn face_sums(value_jumps: &[f64], slope_jumps: &[f64], face_h: &[f64], sigma: f64) -> (f64, f64) {
    let mut flux = 0.0;
    let mut value = 0.0;
    for ((jv, js), h) in value_jumps.iter().zip(slope_jumps).zip(face_h) {
        flux += h * js * js;
        value += sigma * sigma / h * jv * jv;
    }
    (flux, value)
}

/// All parts of `Η₁[w, f]`; face terms are point values of the jumps.
pub fn eta1_parts(w: &BrokenField, f: &dyn ElementwiseSmooth, sigma: f64, rule: &QuadratureRule) -> Result<Eta1Parts> {
    let mesh = w.mesh();
    let d = w.derivative();
    let dd = d.derivative();
    let mut residual = 0.0;
    for i in 0..mesh.n_elements() {
        let h = mesh.width(i);
        let mut acc = 0.0;
        for (q, &xi) in rule.nodes.iter().enumerate() {
            let r = f.derivative_at(i, xi, 0)? + dd.eval_local(i, xi);
            acc += rule.weights[q] * r * r;
        }
        residual += h * h * 0.5 * h * acc;
    }
    let face_h: Vec<f64> = mesh.faces().iter().map(|f| f.h).collect();
    let (flux_jump, value_jump) = face_sums(&jumps(w), &jumps(&d), &face_h, sigma);
    Ok(Eta1Parts {
        residual,
        flux_jump,
        value_jump,
    })
}

/// `Η₁[w, f]`, the square root of the three sums.
pub fn eta1(w: &BrokenField, f: &dyn ElementwiseSmooth, sigma: f64, rule: &QuadratureRule) -> Result<f64> {
    Ok(eta1_parts(w, f, sigma, rule)?.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryMode, Mesh1D};
    use crate::space::project_l2;
    use std::sync::Arc;

    #[test]
    fn continuous_linear_with_zero_data_keeps_only_flux_jumps() {
        let mesh = Arc::new(Mesh1D::uniform((0.0, 1.0), 4, BoundaryMode::Natural).unwrap());
        // hat function peaking at x = 1/2, written elementwise in Legendre form
        let w = project_l2(|x: f64| 0.5 - (x - 0.5).abs(), mesh.clone(), 1);
        let zero = BrokenField::zeros(mesh, 0);
        let p = eta1_parts(&w, &zero, 10.0, &residual_rule(1)).unwrap();
        assert!(p.residual.abs() < 1e-28);
        assert!(p.value_jump < 1e-26);
        // one interior kink with slope jump 2 at h_e = 1/4
        assert!((p.flux_jump - 0.25 * 4.0).abs() < 1e-13);
    }

    #[test]
    fn constant_with_zero_data_vanishes() {
        for bc in [BoundaryMode::Natural, BoundaryMode::Periodic] {
            let mesh = Arc::new(Mesh1D::uniform((-1.0, 1.0), 5, bc).unwrap());
            let w = BrokenField::constant(mesh.clone(), 2, 3.0);
            let zero = BrokenField::zeros(mesh, 2);
            assert_eq!(eta1(&w, &zero, 40.0, &residual_rule(2)).unwrap(), 0.0);
        }
    }

    #[test]
    fn element_residual_by_hand() {
        // w = x² on two unit elements of [0, 2], f = 1: residual sum h² int (1 + 2)² = 18
        let mesh = Arc::new(Mesh1D::uniform((0.0, 2.0), 2, BoundaryMode::Natural).unwrap());
        let w = project_l2(|x| x * x, mesh.clone(), 2);
        let f = BrokenField::constant(mesh, 0, 1.0);
        let p = eta1_parts(&w, &f, 1.0, &residual_rule(2)).unwrap();
        assert!((p.residual - 18.0).abs() < 1e-11);
        assert!(p.flux_jump + p.value_jump < 1e-24);
    }
}
