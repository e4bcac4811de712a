//! Symmetric interior penalty form
//! `A_h(u, z) = sum_K int u' z' - sum_E (⟦u⟧{z'} + ⟦z⟧{u'}) + sum_E σ/h_E ⟦u⟧⟦z⟧`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::BlockOperator;
use crate::mesh::Mesh1D;
use crate::space::{legendre, BrokenField, QuadratureRule};

use super::gradient::derivative_matrix;
use super::traces::traces;

/// Default penalty `10 (p + 1)^2`.
pub fn default_sigma(p: usize) -> f64 {
    10.0 * ((p + 1) * (p + 1)) as f64
}

#[derive(Debug, Clone)]
pub struct PenaltyForm {
    sigma: f64,
    degree: usize,
    matrix: BlockOperator,
}

/// Linear functionals giving the value and derivative of a basis function at one end.
fn end_functionals(p: usize, h: f64, right_end: bool) -> (Vec<f64>, Vec<f64>) {
    let mut value = vec![0.0; p + 1];
    let mut slope = vec![0.0; p + 1];
    for m in 0..=p {
        let mm = (m * (m + 1)) as f64 / 2.0;
        if right_end {
            value[m] = 1.0;
            slope[m] = 2.0 / h * mm;
        } else {
            value[m] = if m % 2 == 0 { 1.0 } else { -1.0 };
            slope[m] = 2.0 / h * if m % 2 == 0 { -mm } else { mm };
        }
    }
    (value, slope)
}

impl PenaltyForm {
    pub fn assemble(mesh: &Mesh1D, p: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("penalty must be positive, got {sigma}")));
        }
        let nb = p + 1;
        let n = mesh.n_elements();
        let mut op = BlockOperator::zeros(n, nb, nb);
        let dref = derivative_matrix(p);
        for i in 0..n {
            let h = mesh.width(i);
            let b = op.block_mut(i, i);
            for k in 0..nb {
                for m in 0..nb {
                    let mut acc = 0.0;
                    for j in 0..nb {
                        acc += dref[j * nb + k] * dref[j * nb + m] / (2 * j + 1) as f64;
                    }
                    b[k * nb + m] += 4.0 / h * acc;
                }
            }
        }
        for f in mesh.faces() {
            let (vl, sl) = end_functionals(p, mesh.width(f.left), true);
            let (vr, sr) = end_functionals(p, mesh.width(f.right), false);
            // jump = vl·u_L - vr·u_R, average slope = (sl·u_L + sr·u_R) / 2
            let parts = [(f.left, vl, sl, 1.0), (f.right, vr, sr, -1.0)];
            let pen = sigma / f.h;
            for (ea, va, sa, ja) in &parts {
                for (eb, vb, sb, jb) in &parts {
                    let b = op.block_mut(*ea, *eb);
                    for k in 0..nb {
                        for m in 0..nb {
                            let jk = ja * va[k];
                            let jm = jb * vb[m];
                            let ak = 0.5 * sa[k];
                            let am = 0.5 * sb[m];
                            b[k * nb + m] += -(jk * am + jm * ak) + pen * jk * jm;
                        }
                    }
                }
            }
        }
        Ok(Self {
            sigma,
            degree: p,
            matrix: op,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Stiffness matrix (not mass-inverted).
    pub fn matrix(&self) -> &BlockOperator {
        &self.matrix
    }

    /// `A_h(u, ·)` tested against every basis function.
    pub fn apply(&self, u: &BrokenField) -> Vec<f64> {
        self.matrix.apply(u.coeffs())
    }

    /// `A_h(u0, φ_g)` for a smooth, jump-free `u0` given through its derivative.
    pub fn smooth_load(
        &self,
        du0: &dyn Fn(f64) -> f64,
        mesh: &Mesh1D,
        rule: &QuadratureRule,
    ) -> Vec<f64> {
        let p = self.degree;
        let nb = p + 1;
        let mut rhs = vec![0.0; mesh.n_elements() * nb];
        let tables: Vec<Vec<Vec<f64>>> = rule
            .nodes
            .iter()
            .map(|&xi| legendre::values_and_derivatives(p, 1, xi))
            .collect();
        for i in 0..mesh.n_elements() {
            for (q, &xi) in rule.nodes.iter().enumerate() {
                let g = du0(mesh.to_physical(i, xi)) * rule.weights[q];
                for k in 0..nb {
                    // (h/2) * (2/h) P_k'(ξ)
                    rhs[i * nb + k] += g * tables[q][1][k];
                }
            }
        }
        for f in mesh.faces() {
            let g = du0(f.position);
            for k in 0..nb {
                rhs[f.left * nb + k] -= g;
                rhs[f.right * nb + k] += g * if k % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
        rhs
    }

    /// Rejects the form unless `A + m m^T` is positive definite, i.e. `A` is
    /// positive semidefinite with only constants in its kernel.
    pub fn check_coercive(&self, dense: &DMatrix<f64>, mean_weights: &[f64]) -> Result<()> {
        let n = dense.nrows();
        let scale = dense.diagonal().amax().max(1.0);
        let total: f64 = mean_weights.iter().sum();
        let s = scale / (total * total).max(f64::MIN_POSITIVE);
        let mut shifted = dense.clone();
        for i in 0..n {
            for j in 0..n {
                shifted[(i, j)] += s * mean_weights[i] * mean_weights[j];
            }
        }
        match shifted.cholesky() {
            Some(_) => Ok(()),
            None => Err(Error::NonCoercive { sigma: self.sigma }),
        }
    }

    /// Smallest ratio `A_h(Φ,Φ) / ‖Φ‖²_dG` over non-constant `Φ` (dense generalized eigenproblem).
    pub fn coercivity_constant(&self, mesh: &Mesh1D) -> Result<f64> {
        let p = self.degree;
        let nb = p + 1;
        let n = mesh.n_elements() * nb;
        let a = self.matrix.to_dense();
        let b = dg_gram(mesh, p);
        let m: Vec<f64> = (0..n)
            .map(|g| if g % nb == 0 { mesh.width(g / nb) } else { 0.0 })
            .collect();
        // constants become an eigenvector with a large, irrelevant eigenvalue
        let big = 1e8 * a.diagonal().amax().max(1.0);
        let mut ash = a.clone();
        let mut bsh = b.clone();
        for i in 0..n {
            for j in 0..n {
                ash[(i, j)] += big * m[i] * m[j];
                bsh[(i, j)] += m[i] * m[j];
            }
        }
        let chol = bsh
            .cholesky()
            .ok_or_else(|| Error::Singular("dG Gram matrix".into()))?;
        let l = chol.l();
        let linv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("dG Gram factor".into()))?;
        let c = &linv * ash * linv.transpose();
        let c = 0.5 * (&c + c.transpose());
        let eig = SymmetricEigen::new(c);
        Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
    }
}

/// Gram matrix of the dG seminorm `sum_K int u'z' + sum_E ⟦u⟧⟦z⟧ / h_E`.
pub fn dg_gram(mesh: &Mesh1D, p: usize) -> DMatrix<f64> {
    let nb = p + 1;
    let n = mesh.n_elements() * nb;
    let dref = derivative_matrix(p);
    let mut g = DMatrix::zeros(n, n);
    for i in 0..mesh.n_elements() {
        let h = mesh.width(i);
        for k in 0..nb {
            for m in 0..nb {
                let mut acc = 0.0;
                for j in 0..nb {
                    acc += dref[j * nb + k] * dref[j * nb + m] / (2 * j + 1) as f64;
                }
                g[(i * nb + k, i * nb + m)] += 4.0 / h * acc;
            }
        }
    }
    for f in mesh.faces() {
        let (vl, _) = end_functionals(p, mesh.width(f.left), true);
        let (vr, _) = end_functionals(p, mesh.width(f.right), false);
        let mut row = vec![(0usize, 0.0f64); 2 * nb];
        for k in 0..nb {
            row[k] = (f.left * nb + k, vl[k]);
            row[nb + k] = (f.right * nb + k, -vr[k]);
        }
        for &(a, va) in &row {
            for &(b, vb) in &row {
                g[(a, b)] += va * vb / f.h;
            }
        }
    }
    g
}

/// `A_h(u, z)` for broken fields of any degrees.
pub fn ip_form(u: &BrokenField, z: &BrokenField, sigma: f64) -> f64 {
    let du = u.derivative();
    let dz = z.derivative();
    let mut acc = du.inner(&dz);
    let (tu, tz) = (traces(u), traces(z));
    let (tdu, tdz) = (traces(&du), traces(&dz));
    for (e, f) in u.mesh().faces().iter().enumerate() {
        let (ju, jz) = (tu[e].jump(), tz[e].jump());
        acc -= ju * tdz[e].average() + jz * tdu[e].average();
        acc += sigma / f.h * ju * jz;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryMode;
    use std::sync::Arc;

    #[test]
    fn matrix_matches_direct_form() {
        for bc in [BoundaryMode::Periodic, BoundaryMode::Natural] {
            let m = Arc::new(Mesh1D::from_nodes(vec![0.0, 0.2, 0.5, 0.6, 1.0], bc).unwrap());
            for p in 0..=3 {
                let sigma = default_sigma(p);
                let form = PenaltyForm::assemble(&m, p, sigma).unwrap();
                let nb = p + 1;
                let u = BrokenField::from_coeffs(
                    m.clone(),
                    p,
                    (0..4 * nb).map(|k| (k as f64 * 1.3).sin()).collect(),
                )
                .unwrap();
                let z = BrokenField::from_coeffs(
                    m.clone(),
                    p,
                    (0..4 * nb).map(|k| (k as f64 * 0.7).cos()).collect(),
                )
                .unwrap();
                let au = form.apply(&u);
                let via_matrix: f64 = au.iter().zip(z.coeffs()).map(|(a, b)| a * b).sum();
                let direct = ip_form(&u, &z, sigma);
                assert!((via_matrix - direct).abs() < 1e-11 * direct.abs().max(1.0));
                assert!((ip_form(&z, &u, sigma) - direct).abs() < 1e-11 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn hat_energy() {
        let n = 8;
        let h = 1.0 / n as f64;
        let m = Arc::new(Mesh1D::uniform((0.0, 1.0), n, BoundaryMode::Periodic).unwrap());
        // hat of height 1 at x = 1/2
        let hat = crate::space::project_l2(|x: f64| (1.0 - (x - 0.5).abs() / h).max(0.0), m, 1);
        let a = ip_form(&hat, &hat, 40.0);
        assert!((a - 2.0 / h).abs() < 1e-10);
        let one = BrokenField::constant(hat.mesh_arc().clone(), 1, 1.0);
        assert!(ip_form(&hat, &one, 40.0).abs() < 1e-12);
    }

    #[test]
    fn default_penalty_is_coercive_small_one_is_not() {
        let m = Mesh1D::uniform((0.0, 1.0), 6, BoundaryMode::Periodic).unwrap();
        for p in 1..=3 {
            let c = PenaltyForm::assemble(&m, p, default_sigma(p))
                .unwrap()
                .coercivity_constant(&m)
                .unwrap();
            assert!(c > 0.0, "p={p} c={c}");
        }
        let bad = PenaltyForm::assemble(&m, 1, 0.01).unwrap();
        assert!(bad.coercivity_constant(&m).unwrap() < 0.0);
        let nb = 2;
        let w: Vec<f64> = (0..6 * nb).map(|g| if g % nb == 0 { 1.0 / 6.0 } else { 0.0 }).collect();
        assert!(bad.check_coercive(&bad.matrix().to_dense(), &w).is_err());
    }
}
