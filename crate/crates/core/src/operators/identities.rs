//! Residuals of the elementwise integration and discrete duality identities.

use crate::space::BrokenField;

use super::gradient::{discrete_gradient, GradientSide};
use super::traces::traces;

/// Boundary contribution `(ψφ)(b) - (ψφ)(a)` that the skeleton misses in natural mode.
fn boundary_flux(psi: &BrokenField, phi: &BrokenField) -> f64 {
    let mesh = psi.mesh();
    if mesh.is_periodic() {
        return 0.0;
    }
    let n = mesh.n_elements();
    psi.right_trace(n - 1) * phi.right_trace(n - 1) - psi.left_trace(0) * phi.left_trace(0)
}

/// Largest residual of
/// `sum int ψ'φ = sum(-int ψφ' + int_∂K φψ n)` and
/// `sum int_∂K φψ n = int_E ⟦ψ⟧{φ} + ⟦φ⟧{ψ} = int_E ⟦ψφ⟧` (plus the boundary flux in natural mode).
pub fn elementwise_ibp_check(psi: &BrokenField, phi: &BrokenField) -> f64 {
    let n = psi.n_elements();
    let lhs = psi.derivative().inner(phi);
    let vol = -psi.inner(&phi.derivative());
    let boundary: f64 = (0..n)
        .map(|i| psi.right_trace(i) * phi.right_trace(i) - psi.left_trace(i) * phi.left_trace(i))
        .sum();
    let r1 = (lhs - (vol + boundary)).abs();
    let (tp, tf) = (traces(psi), traces(phi));
    let flux = boundary_flux(psi, phi);
    let mut avg_form = flux;
    let mut product_jump = flux;
    for (a, b) in tp.iter().zip(&tf) {
        avg_form += a.jump() * b.average() + b.jump() * a.average();
        product_jump += a.minus * b.minus - a.plus * b.plus;
    }
    let r2 = (boundary - avg_form).abs();
    let r3 = (boundary - product_jump).abs();
    r1.max(r2).max(r3)
}

/// `max_± |int G±[Ψ]Φ + int Ψ G∓[Φ]|`.
pub fn ibp_duality_check(psi: &BrokenField, phi: &BrokenField) -> f64 {
    let p = psi.degree().max(phi.degree());
    let mut worst: f64 = 0.0;
    for side in [GradientSide::Plus, GradientSide::Minus] {
        let gpsi = discrete_gradient(psi, side, p);
        let gphi = discrete_gradient(phi, side.dual(), p);
        worst = worst.max((gpsi.inner(phi) + psi.inner(&gphi)).abs());
    }
    worst
}
