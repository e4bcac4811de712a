use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{folded_order, solve_triplets};
use crate::mesh::Mesh1D;
use crate::operators::penalty::PenaltyForm;

use super::field::{BrokenField, ContinuousField};
use super::legendre;
use super::quadrature::QuadratureRule;

/// Elementwise `L²` projection onto degree-`p` polynomials with the default rule.
pub fn project_l2(f: impl Fn(f64) -> f64, mesh: Arc<Mesh1D>, p: usize) -> BrokenField {
    project_l2_with_rule(f, mesh, p, &QuadratureRule::for_degree(p))
}

pub fn project_l2_with_rule(
    f: impl Fn(f64) -> f64,
    mesh: Arc<Mesh1D>,
    p: usize,
    rule: &QuadratureRule,
) -> BrokenField {
    let tables: Vec<Vec<f64>> = rule.nodes.iter().map(|&xi| legendre::values(p, xi)).collect();
    let mut out = BrokenField::zeros(mesh.clone(), p);
    for i in 0..mesh.n_elements() {
        let c = out.element_mut(i);
        for (q, &xi) in rule.nodes.iter().enumerate() {
            let fx = f(mesh.to_physical(i, xi)) * rule.weights[q];
            for k in 0..=p {
                c[k] += fx * tables[q][k];
            }
        }
        for (k, ck) in c.iter_mut().enumerate() {
            *ck *= (2 * k + 1) as f64 / 2.0;
        }
    }
    out
}

/// Layout of the hierarchical continuous basis: vertex hats then per-element bubbles.
struct ContinuousBasis {
    q: usize,
    n_vertices: usize,
    n_elements: usize,
    periodic: bool,
}

impl ContinuousBasis {
    fn new(mesh: &Mesh1D, q: usize) -> Self {
        let n = mesh.n_elements();
        let periodic = mesh.is_periodic();
        Self {
            q,
            n_vertices: if periodic { n } else { n + 1 },
            n_elements: n,
            periodic,
        }
    }

    fn n_dofs(&self) -> usize {
        self.n_vertices + self.n_elements * (self.q - 1)
    }

    /// Global dofs touching element `e`, paired with their local Legendre coefficients.
    fn local(&self, e: usize) -> Vec<(usize, Vec<f64>)> {
        let q = self.q;
        let right_vertex = if self.periodic {
            (e + 1) % self.n_elements
        } else {
            e + 1
        };
        let mut left = vec![0.0; q + 1];
        left[0] = 0.5;
        left[1] = -0.5;
        let mut right = vec![0.0; q + 1];
        right[0] = 0.5;
        right[1] = 0.5;
        let mut out = vec![(e, left), (right_vertex, right)];
        for j in 2..=q {
            let mut b = vec![0.0; q + 1];
            b[j] = 1.0;
            b[j - 2] = -1.0;
            out.push((self.n_vertices + e * (q - 1) + (j - 2), b));
        }
        out
    }

    /// Position of every dof in a banded ordering.
    fn permutation(&self) -> Vec<usize> {
        let q = self.q;
        let elem_order = if self.periodic {
            folded_order(self.n_elements)
        } else {
            (0..self.n_elements).collect()
        };
        let mut perm = vec![0; self.n_dofs()];
        let mut next = 0;
        for &e in &elem_order {
            perm[e] = next;
            next += 1;
            for j in 0..q - 1 {
                perm[self.n_vertices + e * (q - 1) + j] = next;
                next += 1;
            }
        }
        if !self.periodic {
            perm[self.n_elements] = next;
        }
        perm
    }
}

/// Global `L²` projection onto continuous piecewise polynomials of degree `q`,
/// applied to a broken field of any degree (only its first `q + 1` modes matter).
pub fn project_continuous_field(f: &BrokenField, q: usize) -> Result<ContinuousField> {
    if q == 0 {
        return Err(Error::InvalidArgument(
            "continuous projection needs degree at least 1".into(),
        ));
    }
    let mesh = f.mesh_arc().clone();
    let basis = ContinuousBasis::new(&mesh, q);
    let n = basis.n_dofs();
    let mut triplets = Vec::with_capacity(mesh.n_elements() * (q + 1) * (q + 1));
    let mut rhs = vec![0.0; n];
    for e in 0..mesh.n_elements() {
        let h = mesh.width(e);
        let fe = f.element(e);
        let local = basis.local(e);
        for (ga, a) in &local {
            let load: f64 = (0..=q.min(f.degree()))
                .map(|k| h / (2 * k + 1) as f64 * fe[k] * a[k])
                .sum();
            rhs[*ga] += load;
            for (gb, b) in &local {
                let m: f64 = (0..=q).map(|k| h / (2 * k + 1) as f64 * a[k] * b[k]).sum();
                if m != 0.0 {
                    triplets.push((*ga, *gb, m));
                }
            }
        }
    }
    let perm = basis.permutation();
    let sol = solve_triplets(n, &triplets, &perm, &rhs)?;
    let mut mass_residual = rhs.clone();
    for &(i, j, v) in &triplets {
        mass_residual[i] -= v * sol[j];
    }
    let res = mass_residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let scale = rhs.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if res > 1e-12 * scale.max(1.0) {
        return Err(Error::Singular(format!(
            "continuous mass system residual {res:e}"
        )));
    }
    let out = BrokenField::from_elements(mesh.clone(), q, |e| {
        let mut c = vec![0.0; q + 1];
        for (g, a) in basis.local(e) {
            for k in 0..=q {
                c[k] += sol[g] * a[k];
            }
        }
        c
    });
    Ok(ContinuousField::new_unchecked(out))
}

/// Continuous projection of a function, through an exact-for-degree-`q` load.
pub fn project_continuous(
    f: impl Fn(f64) -> f64,
    mesh: Arc<Mesh1D>,
    q: usize,
) -> Result<ContinuousField> {
    let broken = project_l2(f, mesh, q);
    project_continuous_field(&broken, q)
}

/// Ritz projection for the interior-penalty form with the mean of `u0` imposed
/// through one Lagrange multiplier.
pub fn ritz_project(
    u0: &dyn Fn(f64) -> f64,
    du0: &dyn Fn(f64) -> f64,
    form: &PenaltyForm,
    mesh: Arc<Mesh1D>,
) -> Result<BrokenField> {
    let p = form.degree();
    let nb = p + 1;
    let n = mesh.n_elements() * nb;
    let a = form.matrix().to_dense();
    let rule = QuadratureRule::for_degree(p);
    let mean_weights: Vec<f64> = (0..n)
        .map(|g| if g % nb == 0 { mesh.width(g / nb) } else { 0.0 })
        .collect();
    form.check_coercive(&a, &mean_weights)?;
    let rhs = form.smooth_load(du0, &mesh, &rule);
    let target_integral: f64 = (0..mesh.n_elements())
        .map(|i| {
            let (l, r) = mesh.element_bounds(i);
            rule.integrate_on(l, r, u0)
        })
        .sum();
    let mut big = DMatrix::zeros(n + 1, n + 1);
    big.view_mut((0, 0), (n, n)).copy_from(&a);
    for g in 0..n {
        big[(g, n)] = mean_weights[g];
        big[(n, g)] = mean_weights[g];
    }
    let mut b = DVector::zeros(n + 1);
    b.rows_mut(0, n).copy_from_slice(&rhs);
    b[n] = target_integral;
    let sol = big
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Singular("Ritz system".into()))?;
    BrokenField::from_coeffs(mesh, p, sol.rows(0, n).iter().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryMode;

    fn unit(n: usize, bc: BoundaryMode) -> Arc<Mesh1D> {
        Arc::new(Mesh1D::uniform((0.0, 1.0), n, bc).unwrap())
    }

    #[test]
    fn l2_mean_of_identity() {
        let m = Arc::new(Mesh1D::from_nodes(vec![0.0, 1.0], BoundaryMode::Natural).unwrap());
        let f = project_l2(|x| x, m, 0);
        assert!((f.coeffs()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn l2_idempotent_on_polynomials() {
        let m = unit(5, BoundaryMode::Periodic);
        let f = project_l2(|x| 1.0 - 3.0 * x + x * x * x, m.clone(), 3);
        let g = project_l2_with_rule(
            |x| {
                let i = m.locate(x).unwrap();
                f.eval_local(i, m.to_reference(i, x))
            },
            m.clone(),
            3,
            &QuadratureRule::for_degree(3),
        );
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn continuous_of_indicator_periodic() {
        let m = unit(2, BoundaryMode::Periodic);
        let ind = BrokenField::from_coeffs(m, 0, vec![1.0, 0.0]).unwrap();
        let c = project_continuous_field(&ind, 1).unwrap();
        // symmetry of the two-node ring forces the constant 1/2
        for i in 0..2 {
            assert!((c.element(i)[0] - 0.5).abs() < 1e-14);
            assert!(c.element(i)[1].abs() < 1e-14);
        }
    }

    #[test]
    fn continuous_of_indicator_natural() {
        // 3x3 hat mass system with h = 1/2: nodal values (5/4, 1/2, -1/4)
        let m = unit(2, BoundaryMode::Natural);
        let ind = BrokenField::from_coeffs(m, 0, vec![1.0, 0.0]).unwrap();
        let c = project_continuous_field(&ind, 1).unwrap();
        assert!((c.left_trace(0) - 1.25).abs() < 1e-14);
        assert!((c.right_trace(0) - 0.5).abs() < 1e-14);
        assert!((c.right_trace(1) + 0.25).abs() < 1e-14);
        assert!(c.max_jump() < 1e-14);
    }

    #[test]
    fn continuous_preserves_mean_and_constants() {
        let m = unit(7, BoundaryMode::Periodic);
        let f = project_l2(|x| (6.0 * x).sin() + x * x, m.clone(), 3);
        for q in 1..=4 {
            let c = project_continuous_field(&f, q).unwrap();
            assert!((c.integral() - f.integral()).abs() < 1e-13);
            assert!(c.max_jump() < 1e-13);
        }
        let one = project_continuous(|_| 1.0, m, 2).unwrap();
        for i in 0..7 {
            assert!((one.element(i)[0] - 1.0).abs() < 1e-14);
        }
    }
}
