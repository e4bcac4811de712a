//! Reduced and modified relative entropies between two `(u, v)` pairs.

use serde::Serialize;

use crate::mesh::Mesh1D;
use crate::space::QuadratureRule;

use super::smooth::PointFunction;

/// Constituents of `η_R` and `η_M` kept separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyPair {
    /// `½ int (v - v̂)²`.
    pub kinetic: f64,
    /// `½ γ int (∂_x u - ∂_x û)²`.
    pub capillary: f64,
    /// `μ/4 int_0^t ‖v - v̂‖²_{H¹}`.
    pub dissipation: f64,
    /// `½ ‖u - û‖²`.
    pub strain: f64,
    pub eta_r: f64,
    pub eta_m: f64,
}

fn integrate(mesh: &Mesh1D, rule: &QuadratureRule, f: impl Fn(f64) -> f64) -> f64 {
    (0..mesh.n_elements())
        .map(|i| {
            let (a, b) = mesh.element_bounds(i);
            rule.integrate_on(a, b, &f)
        })
        .sum()
}

/// `‖a - b‖²_{H¹}` integrated on the elements of `mesh`, which must contain the
/// breakpoints of both functions.
pub fn h1_distance_sq(a: &dyn PointFunction, b: &dyn PointFunction, mesh: &Mesh1D, rule: &QuadratureRule) -> f64 {
    integrate(mesh, rule, |x| {
        let d = a.value(x) - b.value(x);
        let s = a.slope(x) - b.slope(x);
        d * d + s * s
    })
}

/// `η_R` between `(u_a, v_a)` and `(u_b, v_b)`; `dissipation_integral` is the
/// caller's running `int_0^t ‖v_a - v_b‖²_{H¹}`.
#[allow(clippy::too_many_arguments)]
pub fn relative_entropy_reduced(
    u_a: &dyn PointFunction,
    v_a: &dyn PointFunction,
    u_b: &dyn PointFunction,
    v_b: &dyn PointFunction,
    gamma: f64,
    mu: f64,
    dissipation_integral: f64,
    mesh: &Mesh1D,
    rule: &QuadratureRule,
) -> EntropyPair {
    let kinetic = 0.5
        * integrate(mesh, rule, |x| {
            let d = v_a.value(x) - v_b.value(x);
            d * d
        });
    let capillary = 0.5
        * gamma
        * integrate(mesh, rule, |x| {
            let d = u_a.slope(x) - u_b.slope(x);
            d * d
        });
    let strain = 0.5
        * integrate(mesh, rule, |x| {
            let d = u_a.value(x) - u_b.value(x);
            d * d
        });
    let dissipation = 0.25 * mu * dissipation_integral;
    let eta_r = kinetic + capillary + dissipation;
    EntropyPair {
        kinetic,
        capillary,
        dissipation,
        strain,
        eta_r,
        eta_m: eta_r + strain,
    }
}

/// `η_M = η_R + ½‖u_a - u_b‖²`; the returned pair carries both.
#[allow(clippy::too_many_arguments)]
pub fn relative_entropy_modified(
    u_a: &dyn PointFunction,
    v_a: &dyn PointFunction,
    u_b: &dyn PointFunction,
    v_b: &dyn PointFunction,
    gamma: f64,
    mu: f64,
    dissipation_integral: f64,
    mesh: &Mesh1D,
    rule: &QuadratureRule,
) -> EntropyPair {
    relative_entropy_reduced(u_a, v_a, u_b, v_b, gamma, mu, dissipation_integral, mesh, rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryMode;
    use crate::model::Profile;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit() -> (Mesh1D, QuadratureRule) {
        (
            Mesh1D::uniform((0.0, 1.0), 8, BoundaryMode::Periodic).unwrap(),
            QuadratureRule::gauss(8).unwrap(),
        )
    }

    #[test]
    fn identical_pairs_vanish() {
        let (m, r) = unit();
        let u = Profile::Sine {
            amplitude: 0.3,
            wavenumber: 5.0,
        };
        let v = Profile::Tanh { rate: 2.0 };
        let e = relative_entropy_modified(&u, &v, &u, &v, 0.1, 0.2, 0.0, &m, &r);
        assert_eq!((e.eta_r, e.eta_m), (0.0, 0.0));
    }

    #[test]
    fn unit_offsets() {
        let (m, r) = unit();
        let zero = Profile::zero();
        let one = Profile::Constant { value: 1.0 };
        let e = relative_entropy_reduced(&zero, &one, &zero, &zero, 0.3, 0.0, 5.0, &m, &r);
        assert!((e.eta_r - 0.5).abs() < 1e-14);
        let e2 = relative_entropy_modified(&one, &zero, &zero, &zero, 7.0, 0.0, 0.0, &m, &r);
        assert!((e2.eta_m - e2.eta_r - 0.5).abs() < 1e-14);
        assert_eq!(e2.eta_r, 0.0);
    }

    #[test]
    fn symmetric_and_ordered() {
        let (m, r) = unit();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let mut prof = || Profile::Sine {
                amplitude: rng.random_range(-1.0..1.0),
                wavenumber: rng.random_range(0.0..10.0),
            };
            let (ua, va, ub, vb) = (prof(), prof(), prof(), prof());
            let e = relative_entropy_modified(&ua, &va, &ub, &vb, 0.05, 0.1, 0.3, &m, &r);
            let f = relative_entropy_modified(&ub, &vb, &ua, &va, 0.05, 0.1, 0.3, &m, &r);
            assert!(e.eta_m >= e.eta_r);
            assert!(e.kinetic >= 0.0 && e.capillary >= 0.0 && e.strain >= 0.0);
            assert!((e.eta_r - f.eta_r).abs() < 1e-14);
        }
    }
}
