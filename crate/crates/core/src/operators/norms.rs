use crate::error::Result;
use crate::jet::ElementwiseSmooth;
use crate::mesh::Mesh1D;
use crate::space::{BrokenField, QuadratureRule};

use super::traces::jumps;

/// `sum_E w(E) ⟦f⟧²` where `w` receives the face index.
pub fn weighted_jump_sq(field: &BrokenField, weight: impl Fn(usize) -> f64) -> f64 {
    jumps(field)
        .iter()
        .enumerate()
        .map(|(e, j)| weight(e) * j * j)
        .sum()
}

/// `‖√(h_E⁻¹) ⟦f⟧‖²` over the skeleton.
pub fn inv_h_jump_sq(field: &BrokenField) -> f64 {
    let faces = field.mesh().faces();
    weighted_jump_sq(field, |e| 1.0 / faces[e].h)
}

/// `‖⟦f⟧‖²` over the skeleton (point values in one dimension).
pub fn jump_sq(field: &BrokenField) -> f64 {
    weighted_jump_sq(field, |_| 1.0)
}

/// Squared broken seminorm `sum_K ‖u'‖² + ‖√(h_E⁻¹)⟦u⟧‖²`.
pub fn dg_seminorm_sq(u: &BrokenField) -> f64 {
    u.derivative().l2_norm_sq() + inv_h_jump_sq(u)
}

pub fn dg_seminorm(u: &BrokenField) -> f64 {
    dg_seminorm_sq(u).sqrt()
}

/// Squared dG norm of `u - u_h` for a smooth `u` given by its derivative: the
/// broken derivative difference by quadrature plus the jumps of `u_h` alone.
pub fn dg_error_sq(du: impl Fn(f64) -> f64, u_h: &BrokenField, rule: &QuadratureRule) -> f64 {
    let mesh = u_h.mesh();
    let d = u_h.derivative();
    let mut acc = 0.0;
    for i in 0..mesh.n_elements() {
        let h = mesh.width(i);
        for (q, &xi) in rule.nodes.iter().enumerate() {
            let diff = du(mesh.to_physical(i, xi)) - d.eval_local(i, xi);
            acc += 0.5 * h * rule.weights[q] * diff * diff;
        }
    }
    acc + inv_h_jump_sq(u_h)
}

/// Squared `L²` distance between a function and a field, by quadrature.
pub fn l2_error_sq(f: impl Fn(f64) -> f64, u_h: &BrokenField, rule: &QuadratureRule) -> f64 {
    let mesh = u_h.mesh();
    let mut acc = 0.0;
    for i in 0..mesh.n_elements() {
        let h = mesh.width(i);
        for (q, &xi) in rule.nodes.iter().enumerate() {
            let diff = f(mesh.to_physical(i, xi)) - u_h.eval_local(i, xi);
            acc += 0.5 * h * rule.weights[q] * diff * diff;
        }
    }
    acc
}

/// `|f|²_{H^k(K)} = int_K (∂_x^k f)²` at quadrature accuracy (the squared seminorm).
pub fn sobolev_seminorm_sq_element(
    f: &dyn ElementwiseSmooth,
    k: usize,
    element: usize,
    mesh: &Mesh1D,
    rule: &QuadratureRule,
) -> Result<f64> {
    let h = mesh.width(element);
    let mut acc = 0.0;
    for (q, &xi) in rule.nodes.iter().enumerate() {
        let v = f.derivative_at(element, xi, k)?;
        acc += 0.5 * h * rule.weights[q] * v * v;
    }
    Ok(acc)
}
