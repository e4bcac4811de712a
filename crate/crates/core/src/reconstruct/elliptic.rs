//! Elliptic reconstructions `R₁`, `R₂` of the strain and `R[v_h]` of the velocity.

use crate::error::Result;
use crate::model::{EnergyDensity, ModelParams};
use crate::operators::{discrete_reconstruction, GradientSide};
use crate::space::{legendre, project_continuous_field, BrokenField, QuadratureRule};

use super::smooth::{solve_first_order, solve_second_order, SmoothField};

/// `L²` projection of `W^(shift)(u_h)` onto elementwise polynomials of degree `q`.
pub fn project_composed(u: &BrokenField, energy: &dyn EnergyDensity, shift: usize, q: usize) -> Result<BrokenField> {
    let rule = QuadratureRule::for_degree(q.max(3 * u.degree()));
    let p = u.degree();
    let tu: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| legendre::values(p, x)).collect();
    let tq: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| legendre::values(q, x)).collect();
    let mut out = BrokenField::zeros(u.mesh_arc().clone(), q);
    for i in 0..u.n_elements() {
        let ue = u.element(i).to_vec();
        let c = out.element_mut(i);
        for (qi, w) in rule.weights.iter().enumerate() {
            let uq: f64 = ue.iter().zip(&tu[qi]).map(|(a, b)| a * b).sum();
            let f = energy.derivative(shift, uq)? * w;
            for k in 0..=q {
                c[k] += f * tq[qi][k];
            }
        }
        for (k, ck) in c.iter_mut().enumerate() {
            *ck *= (2 * k + 1) as f64 / 2.0;
        }
    }
    Ok(out)
}

/// Degree used to represent `W'(u_h)`: exact for polynomial `W` up to quartic.
pub fn composed_degree(p: usize) -> usize {
    (3 * p).max(p + 1)
}

/// Right-hand side `(W'(u_h) - τ_h)/γ` of the `R₂` problem.
pub fn r2_rhs(u: &BrokenField, tau: &BrokenField, params: &ModelParams) -> Result<BrokenField> {
    let q = composed_degree(u.degree());
    let dw = project_composed(u, params.energy.as_ref(), 1, q)?;
    Ok(dw.sub(&tau.with_degree(q)).scale(1.0 / params.gamma))
}

/// Right-hand side `(P^C_{p+1}[W'(u_h)] - D⁺[τ_h])/γ` of the `R₁` problem.
pub fn r1_rhs(u: &BrokenField, tau: &BrokenField, params: &ModelParams) -> Result<BrokenField> {
    let p = u.degree();
    let dw = project_composed(u, params.energy.as_ref(), 1, composed_degree(p))?;
    let pc = project_continuous_field(&dw, p + 1)?;
    let dplus = discrete_reconstruction(tau, GradientSide::Plus);
    Ok(pc.field().sub(dplus.field()).scale(1.0 / params.gamma))
}

/// `γ ∂_xx R₂ = W'(u_h) - τ_h` with `int R₂ = int u_h`.
pub fn reconstruct_r2(u: &BrokenField, tau: &BrokenField, params: &ModelParams) -> Result<SmoothField> {
    let g = r2_rhs(u, tau, params)?;
    solve_second_order(&g, u.integral(), u.mesh().bc())
}

/// `γ ∂_xx R₁ = P^C_{p+1}[W'(u_h)] - D⁺[τ_h]` with `int R₁ = int u_h`.
pub fn reconstruct_r1(u: &BrokenField, tau: &BrokenField, params: &ModelParams) -> Result<SmoothField> {
    let g = r1_rhs(u, tau, params)?;
    solve_second_order(&g, u.integral(), u.mesh().bc())
}

/// `∂_xx R[v_h] = ∂_x ∂_t R₁` with `∂_t R₁ ≈ (R₁ⁿ - R₁ⁿ⁻¹)/δt` and `int R[v_h] = int v_h`.
pub fn reconstruct_rv(r1_now: &SmoothField, r1_prev: &SmoothField, dt: f64, v: &BrokenField) -> SmoothField {
    let q = SmoothField::quotient(r1_now, r1_prev, dt);
    solve_first_order(q.field(), v.integral())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryMode, Mesh1D};
    use crate::reconstruct::smooth::second_order_residual;
    use crate::solver::Scheme;
    use std::sync::Arc;

    fn scheme(bc: BoundaryMode, n: usize, p: usize) -> Scheme {
        let params = ModelParams::quartic(1e-2, 1e-2, bc, (-1.0, 1.0)).unwrap();
        let mesh = Arc::new(Mesh1D::uniform((-1.0, 1.0), n, bc).unwrap());
        Scheme::new(mesh, p, params, None).unwrap()
    }

    #[test]
    fn constant_state_reconstructs_to_constant() {
        for bc in [BoundaryMode::Periodic, BoundaryMode::Natural] {
            let s = scheme(bc, 5, 2);
            let u = BrokenField::constant(s.mesh().clone(), 2, 0.7);
            let tau = s.eliminate_tau(&u);
            for r in [
                reconstruct_r1(&u, &tau, s.params()).unwrap(),
                reconstruct_r2(&u, &tau, s.params()).unwrap(),
            ] {
                for i in 0..5 {
                    assert!((r.field().element(i)[0] - 0.7).abs() < 1e-12);
                    assert!(r.field().element(i)[1..].iter().all(|c| c.abs() < 1e-10));
                }
            }
            let r1 = reconstruct_r1(&u, &tau, s.params()).unwrap();
            let v = BrokenField::constant(s.mesh().clone(), 2, -0.2);
            let rv = reconstruct_rv(&r1, &r1, 0.01, &v);
            assert!((rv.mean() + 0.2).abs() < 1e-14);
            assert!(rv.derivative().coeffs().iter().all(|c| c.abs() < 1e-12));
        }
    }

    #[test]
    fn kink_reconstructions_are_c1_and_solve_their_equations() {
        for bc in [BoundaryMode::Periodic, BoundaryMode::Natural] {
            let s = scheme(bc, 16, 2);
            let k = (2.0f64 / 1e-2).sqrt();
            let u = crate::space::project_l2(|x| (k * x).tanh(), s.mesh().clone(), 2);
            let tau = s.eliminate_tau(&u);
            for (r, g) in [
                (reconstruct_r1(&u, &tau, s.params()).unwrap(), r1_rhs(&u, &tau, s.params()).unwrap()),
                (reconstruct_r2(&u, &tau, s.params()).unwrap(), r2_rhs(&u, &tau, s.params()).unwrap()),
            ] {
                let scale = g.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
                assert!(second_order_residual(&r, &g, 30) < 1e-10 * scale);
                assert!(r.max_value_jump() < 1e-10);
                assert!(r.max_slope_jump() < 1e-10 * scale);
                assert!((r.integral() - u.integral()).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn r1_rhs_has_zero_mean() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for bc in [BoundaryMode::Periodic, BoundaryMode::Natural] {
            for p in 1..=3 {
                let s = scheme(bc, 7, p);
                let c = (0..s.field_len()).map(|_| rng.random_range(-1.2..1.2)).collect();
                let u = BrokenField::from_coeffs(s.mesh().clone(), p, c).unwrap();
                let tau = s.eliminate_tau(&u);
                let g = r1_rhs(&u, &tau, s.params()).unwrap();
                assert!((g.integral() * s.params().gamma).abs() < 1e-10);
            }
        }
    }
}
