//! Continuous discrete reconstructions `D±`.
//!
//! On each element `D±[Ψ]` has degree `p + 1`, shares the first `p` Legendre
//! modes with `Ψ`, and takes at every node the trace of `Ψ` from the side
//! opposite to the sign: `D+ = Ψ^-`, `D- = Ψ^+`. In natural mode `D+` uses the
//! interior trace at the two boundary points and `D-` vanishes there, mirroring
//! the boundary treatment of `G±`.

use crate::space::{BrokenField, ContinuousField};

use super::gradient::GradientSide;

/// Nodal values `D±[Ψ](x_i)`, `i = 0..=N`.
fn nodal_values(psi: &BrokenField, side: GradientSide) -> Vec<f64> {
    let mesh = psi.mesh();
    let n = mesh.n_elements();
    let mut vals = vec![0.0; n + 1];
    for f in mesh.faces() {
        vals[f.node] = match side {
            GradientSide::Plus => psi.right_trace(f.left),
            GradientSide::Minus => psi.left_trace(f.right),
        };
    }
    if mesh.is_periodic() {
        vals[n] = vals[0];
    } else if side == GradientSide::Plus {
        vals[0] = psi.left_trace(0);
        vals[n] = psi.right_trace(n - 1);
    }
    vals
}

pub fn discrete_reconstruction(psi: &BrokenField, side: GradientSide) -> ContinuousField {
    let p = psi.degree();
    let nodes = nodal_values(psi, side);
    let out = BrokenField::from_elements(psi.mesh_arc().clone(), p + 1, |i| {
        let c = psi.element(i);
        let mut d = vec![0.0; p + 2];
        d[..p].copy_from_slice(&c[..p]);
        // right end: sum of all modes; left end: alternating sum
        let s1: f64 = d[..p].iter().sum();
        let s2: f64 = d[..p]
            .iter()
            .enumerate()
            .map(|(m, v)| if m % 2 == 0 { *v } else { -*v })
            .sum();
        let (alpha, beta) = (nodes[i], nodes[i + 1]);
        let sum = beta - s1;
        let sp = if p % 2 == 0 { 1.0 } else { -1.0 };
        let diff = sp * (alpha - s2);
        d[p] = 0.5 * (sum + diff);
        d[p + 1] = 0.5 * (sum - diff);
        d
    });
    ContinuousField::new_unchecked(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryMode, Mesh1D};
    use crate::operators::gradient::discrete_gradient;
    use std::sync::Arc;

    #[test]
    fn indicator_hat() {
        let m = Arc::new(Mesh1D::uniform((0.0, 1.0), 2, BoundaryMode::Periodic).unwrap());
        let psi = BrokenField::from_coeffs(m, 0, vec![1.0, 0.0]).unwrap();
        let d = discrete_reconstruction(&psi, GradientSide::Plus);
        assert_eq!(d.degree(), 1);
        assert!((d.left_trace(0) - 0.0).abs() < 1e-15);
        assert!((d.right_trace(0) - 1.0).abs() < 1e-15);
        assert!((d.right_trace(1) - 0.0).abs() < 1e-15);
        let slope = d.derivative();
        let g = discrete_gradient(&psi, GradientSide::Plus, 0);
        assert_eq!(slope.coeffs(), g.coeffs());
    }

    #[test]
    fn continuous_input_reproduced() {
        let m = Arc::new(Mesh1D::uniform((0.0, 1.0), 5, BoundaryMode::Periodic).unwrap());
        let psi = crate::space::project_continuous(|x| (2.0 * std::f64::consts::PI * x).sin(), m, 2)
            .unwrap()
            .into_field();
        for side in [GradientSide::Plus, GradientSide::Minus] {
            let d = discrete_reconstruction(&psi, side);
            for i in 0..5 {
                let (a, b) = (psi.element(i), d.element(i));
                for k in 0..3 {
                    assert!((a[k] - b[k]).abs() < 1e-13);
                }
                assert!(b[3].abs() < 1e-13);
            }
        }
    }
}
