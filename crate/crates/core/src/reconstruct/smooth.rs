//! Globally `C¹` piecewise polynomials built by exact antidifferentiation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::ElementwiseSmooth;
use crate::mesh::{BoundaryMode, Mesh1D};
use crate::model::Profile;
use crate::space::{legendre, BrokenField};

/// Pointwise evaluation of a function and its first derivative at interior points.
pub trait PointFunction {
    fn value(&self, x: f64) -> f64;
    fn slope(&self, x: f64) -> f64;
}

impl PointFunction for Profile {
    fn value(&self, x: f64) -> f64 {
        Profile::value(self, x)
    }

    fn slope(&self, x: f64) -> f64 {
        self.derivative(x)
    }
}

fn locate_local(mesh: &Mesh1D, x: f64) -> (usize, f64) {
    let i = mesh.locate(x).unwrap_or(if x <= mesh.domain().0 { 0 } else { mesh.n_elements() - 1 });
    (i, mesh.to_reference(i, x))
}

impl PointFunction for BrokenField {
    fn value(&self, x: f64) -> f64 {
        let (i, xi) = locate_local(self.mesh(), x);
        self.eval_local(i, xi)
    }

    fn slope(&self, x: f64) -> f64 {
        let (i, xi) = locate_local(self.mesh(), x);
        let d = legendre::derivative(self.element(i));
        legendre::eval(&d, xi) * 2.0 / self.mesh().width(i)
    }
}

/// A `C¹` piecewise polynomial stored in the broken Legendre representation.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothField {
    field: BrokenField,
}

impl SmoothField {
    /// Wraps `field` after checking value and slope continuity to `tol`.
    pub fn new(field: BrokenField, tol: f64) -> Result<Self> {
        let s = Self { field };
        let (jv, js) = (s.max_value_jump(), s.max_slope_jump());
        if jv > tol || js > tol {
            return Err(Error::InvalidArgument(format!(
                "field is not C1: value jump {jv:e}, slope jump {js:e}"
            )));
        }
        Ok(s)
    }

    pub(crate) fn new_unchecked(field: BrokenField) -> Self {
        Self { field }
    }

    pub fn field(&self) -> &BrokenField {
        &self.field
    }

    pub fn into_field(self) -> BrokenField {
        self.field
    }

    pub fn mesh(&self) -> &Mesh1D {
        self.field.mesh()
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh1D> {
        self.field.mesh_arc()
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn integral(&self) -> f64 {
        self.field.integral()
    }

    pub fn mean(&self) -> f64 {
        self.field.mean()
    }

    pub fn derivative(&self) -> BrokenField {
        self.field.derivative()
    }

    pub fn second_derivative(&self) -> BrokenField {
        self.field.derivative().derivative()
    }

    /// Largest value jump over all faces (the wrap face included when periodic).
    pub fn max_value_jump(&self) -> f64 {
        self.field.max_jump()
    }

    pub fn max_slope_jump(&self) -> f64 {
        self.field.derivative().max_jump()
    }

    /// Difference quotient of two fields on the same mesh, padded to a common degree.
    pub fn quotient(now: &SmoothField, before: &SmoothField, dt: f64) -> SmoothField {
        let d = now.degree().max(before.degree());
        let a = now.field.with_degree(d);
        let b = before.field.with_degree(d);
        SmoothField::new_unchecked(a.sub(&b).scale(1.0 / dt))
    }
}

impl PointFunction for SmoothField {
    fn value(&self, x: f64) -> f64 {
        PointFunction::value(&self.field, x)
    }

    fn slope(&self, x: f64) -> f64 {
        PointFunction::slope(&self.field, x)
    }
}

impl ElementwiseSmooth for SmoothField {
    fn mesh(&self) -> &Mesh1D {
        self.field.mesh()
    }

    fn derivative_at(&self, element: usize, xi: f64, order: usize) -> Result<f64> {
        self.field.derivative_at(element, xi, order)
    }
}

/// `x ↦ int_a^x g` as a continuous field of one degree higher.
pub fn antiderivative(g: &BrokenField) -> BrokenField {
    let mesh = g.mesh_arc().clone();
    let mut prefix = 0.0;
    let mut out = BrokenField::zeros(mesh.clone(), g.degree() + 1);
    for i in 0..mesh.n_elements() {
        let h = mesh.width(i);
        let mut a = legendre::antiderivative(g.element(i));
        a.iter_mut().for_each(|c| *c *= 0.5 * h);
        a[0] += prefix;
        prefix = legendre::right_trace(&a);
        out.element_mut(i).copy_from_slice(&a);
    }
    out
}

/// Tolerance on `|int g|` relative to the size of `g`.
pub const SOLVABILITY_TOL: f64 = 1e-10;

fn check_solvable(g: &BrokenField) -> Result<f64> {
    let total = g.integral();
    let size = (g.l2_norm_sq() * g.mesh().length()).sqrt();
    if total.abs() > SOLVABILITY_TOL * size.max(1.0) {
        return Err(Error::Solvability { residual: total });
    }
    Ok(total)
}

/// Solves `R'' = g` with periodic or zero-Neumann closure and `int R = target`.
///
/// `g` must have zero integral up to roundoff; the roundoff part is removed
/// before integrating so the closure is exact.
pub fn solve_second_order(g: &BrokenField, target_integral: f64, bc: BoundaryMode) -> Result<SmoothField> {
    let total = check_solvable(g)?;
    let mesh = g.mesh_arc().clone();
    let len = mesh.length();
    let mut g0 = g.clone();
    for i in 0..mesh.n_elements() {
        g0.element_mut(i)[0] -= total / len;
    }
    let mut slope = antiderivative(&g0);
    if bc == BoundaryMode::Periodic {
        let c1 = -slope.integral() / len;
        for i in 0..mesh.n_elements() {
            slope.element_mut(i)[0] += c1;
        }
    }
    let mut r = antiderivative(&slope);
    let c0 = (target_integral - r.integral()) / len;
    for i in 0..mesh.n_elements() {
        r.element_mut(i)[0] += c0;
    }
    Ok(SmoothField::new_unchecked(r))
}

/// Solves `R' = q + c` with `c` closing the net flux and `int R = target`.
pub fn solve_first_order(q: &BrokenField, target_integral: f64) -> SmoothField {
    let mesh = q.mesh_arc().clone();
    let len = mesh.length();
    let c = -q.integral() / len;
    let mut q0 = q.clone();
    for i in 0..mesh.n_elements() {
        q0.element_mut(i)[0] += c;
    }
    let mut r = antiderivative(&q0);
    let c0 = (target_integral - r.integral()) / len;
    for i in 0..mesh.n_elements() {
        r.element_mut(i)[0] += c0;
    }
    SmoothField::new_unchecked(r)
}

/// Largest `|R'' - g|` over `samples` equispaced points per element.
pub fn second_order_residual(r: &SmoothField, g: &BrokenField, samples: usize) -> f64 {
    let d2 = r.second_derivative();
    let s = samples.max(2);
    let mut worst: f64 = 0.0;
    for i in 0..r.mesh().n_elements() {
        for j in 0..s {
            let xi = -1.0 + 2.0 * j as f64 / (s - 1) as f64;
            worst = worst.max((d2.eval_local(i, xi) - g.eval_local(i, xi)).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_by_hand_natural() {
        // R'' = 1 - 2x on [0, 1]: R' = x - x², R = x²/2 - x³/3 + c with int R = 0
        let m = Arc::new(Mesh1D::from_nodes(vec![0.0, 1.0], BoundaryMode::Natural).unwrap());
        let g = BrokenField::from_coeffs(m, 1, vec![0.0, -1.0]).unwrap();
        let r = solve_second_order(&g, 0.0, BoundaryMode::Natural).unwrap();
        let c = -(1.0 / 6.0 - 1.0 / 12.0);
        for &x in &[0.1, 0.5, 0.9] {
            let exact = x * x / 2.0 - x * x * x / 3.0 + c;
            assert!((PointFunction::value(&r, x) - exact).abs() < 1e-14);
            assert!((r.slope(x) - (x - x * x)).abs() < 1e-14);
        }
        assert!(r.integral().abs() < 1e-15);
    }

    #[test]
    fn periodic_closure_on_several_elements() {
        let m = Arc::new(Mesh1D::from_nodes(vec![0.0, 0.2, 0.5, 0.7, 1.0], BoundaryMode::Periodic).unwrap());
        let g = crate::space::project_l2(|x| (2.0 * std::f64::consts::PI * x).cos(), m, 5);
        let mut g0 = g.clone();
        let t = g.integral();
        for i in 0..4 {
            g0.element_mut(i)[0] -= t;
        }
        let r = solve_second_order(&g0, 0.3, BoundaryMode::Periodic).unwrap();
        assert!(r.max_value_jump() < 1e-13);
        assert!(r.max_slope_jump() < 1e-13);
        assert!((r.integral() - 0.3).abs() < 1e-14);
        assert!(second_order_residual(&r, &g0, 20) < 1e-10);
    }

    #[test]
    fn unsolvable_rhs_rejected() {
        let m = Arc::new(Mesh1D::uniform((0.0, 1.0), 3, BoundaryMode::Periodic).unwrap());
        let g = BrokenField::constant(m, 1, 1.0);
        assert!(matches!(
            solve_second_order(&g, 0.0, BoundaryMode::Periodic),
            Err(Error::Solvability { .. })
        ));
    }

    #[test]
    fn first_order_closure() {
        let m = Arc::new(Mesh1D::uniform((0.0, 2.0), 4, BoundaryMode::Periodic).unwrap());
        let q = crate::space::project_l2(|x| x * x, m, 2);
        let r = solve_first_order(&q, 1.0);
        assert!(r.max_value_jump() < 1e-13);
        assert!((r.integral() - 1.0).abs() < 1e-14);
        // R' - q is a constant equal to minus the mean of q
        let d = r.derivative().with_degree(2).sub(&q);
        assert!((d.mean() + q.mean()).abs() < 1e-13);
        assert!(d.coeffs().chunks(3).all(|c| c[1].abs() < 1e-13 && c[2].abs() < 1e-13));
    }
}
