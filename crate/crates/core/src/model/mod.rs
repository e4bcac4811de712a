//! Problem data: energy density, parameters, benchmark profiles, energies and
//! stability constants.

pub mod constants;
pub mod data;
pub mod energy;

pub use constants::{
    stability_constant_k, stability_constant_ktilde, sup_derivative_sampled, StabilityConstants,
};
pub use data::{exact_steady, Benchmark, BumpVariant, ModelParams, Profile, TestCase};
pub use energy::{EnergyDensity, QuarticWell};

use crate::space::{BrokenField, QuadratureRule};

/// `int W(u) + γ/2 |∂_x u|² + ½ v²` with the broken derivative of `u`.
pub fn energy_continuous(
    u: &BrokenField,
    v: &BrokenField,
    params: &ModelParams,
    rule: &QuadratureRule,
) -> f64 {
    let mesh = u.mesh();
    let du = u.derivative();
    let mut acc = 0.0;
    for i in 0..mesh.n_elements() {
        let h = mesh.width(i);
        for (q, &xi) in rule.nodes.iter().enumerate() {
            let (uu, dd, vv) = (u.eval_local(i, xi), du.eval_local(i, xi), v.eval_local(i, xi));
            let density = params.energy.w(uu) + 0.5 * params.gamma * dd * dd + 0.5 * vv * vv;
            acc += 0.5 * h * rule.weights[q] * density;
        }
    }
    acc
}

/// The same functional for closed-form profiles, integrated on `cells` subintervals.
pub fn energy_of_profiles(
    u: &Profile,
    v: &Profile,
    params: &ModelParams,
    cells: usize,
    rule: &QuadratureRule,
) -> f64 {
    let (a, b) = params.domain;
    let h = (b - a) / cells as f64;
    (0..cells)
        .map(|c| {
            let l = a + c as f64 * h;
            rule.integrate_on(l, l + h, |x| {
                let d = u.derivative(x);
                let vv = v.value(x);
                params.energy.w(u.value(x)) + 0.5 * params.gamma * d * d + 0.5 * vv * vv
            })
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryMode, Mesh1D};
    use std::sync::Arc;

    #[test]
    fn well_bottom_and_top() {
        let m = Arc::new(Mesh1D::uniform((0.0, 1.0), 4, BoundaryMode::Periodic).unwrap());
        let params = ModelParams::quartic(0.5, 0.1, BoundaryMode::Periodic, (0.0, 1.0)).unwrap();
        let rule = QuadratureRule::for_degree(2);
        let one = BrokenField::constant(m.clone(), 2, 1.0);
        let zero = BrokenField::zeros(m, 2);
        assert_eq!(energy_continuous(&one, &zero, &params, &rule), 0.0);
        assert!((energy_continuous(&zero, &zero, &params, &rule) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn steady_energy_against_fine_quadrature() {
        let b = Benchmark::test1(1e-2, 1e-2);
        let params = ModelParams::quartic(b.gamma, b.mu, b.bc, b.domain).unwrap();
        let coarse = energy_of_profiles(&b.u0, &b.v0, &params, 64, &QuadratureRule::gauss(8).unwrap());
        let fine = energy_of_profiles(&b.u0, &b.v0, &params, 2048, &QuadratureRule::gauss(12).unwrap());
        assert!(coarse > 0.0);
        assert!((coarse - fine).abs() < 1e-10 * fine);
        // for the kink, int W(u) = γ/2 int u'^2, and the total is (4/3)√(2γ) up to the tail
        let expected = 4.0 / 3.0 * (2.0 * b.gamma).sqrt();
        assert!((fine - expected).abs() < 1e-9);
    }
}
