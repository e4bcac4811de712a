//! One-sided discrete gradients.
//!
//! `int G±[ψ] Φ = sum_K int_K ψ' Φ - sum_E int_E ⟦ψ⟧ Φ^±`. In natural mode
//! `G+` drops the boundary points, while `G-` keeps them with a zero exterior
//! trace (the velocity vanishes weakly there). With that choice
//! `int G+[Ψ] Φ = -int Ψ G-[Φ]` holds on either boundary mode.

use crate::linalg::BlockOperator;
use crate::mesh::Mesh1D;
use crate::space::{legendre, BrokenField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientSide {
    Plus,
    Minus,
}

impl GradientSide {
    pub fn dual(self) -> Self {
        match self {
            GradientSide::Plus => GradientSide::Minus,
            GradientSide::Minus => GradientSide::Plus,
        }
    }
}

#[inline]
fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `G±[ψ]` as a field of degree `out_degree`, for `ψ` of any degree.
pub fn discrete_gradient(psi: &BrokenField, side: GradientSide, out_degree: usize) -> BrokenField {
    let mesh = psi.mesh();
    let n = mesh.n_elements();
    let d = psi.derivative();
    let mut out = BrokenField::from_elements(psi.mesh_arc().clone(), out_degree, |i| {
        d.element(i).to_vec()
    });
    // face moment -⟦ψ⟧ Φ^± lifted through the diagonal mass matrix
    let lift = |out: &mut BrokenField, i: usize, amount: f64, at_left_end: bool| {
        let h = mesh.width(i);
        for (k, c) in out.element_mut(i).iter_mut().enumerate() {
            let trace = if at_left_end { sign(k) } else { 1.0 };
            *c -= (2 * k + 1) as f64 / h * amount * trace;
        }
    };
    for f in mesh.faces() {
        let jump = psi.right_trace(f.left) - psi.left_trace(f.right);
        match side {
            GradientSide::Plus => lift(&mut out, f.right, jump, true),
            GradientSide::Minus => lift(&mut out, f.left, jump, false),
        }
    }
    if !mesh.is_periodic() && side == GradientSide::Minus {
        lift(&mut out, n - 1, psi.right_trace(n - 1), false);
        lift(&mut out, 0, -psi.left_trace(0), true);
    }
    out
}

/// Matrix of `G±` on degree-`p` coefficients (mass matrix already inverted).
pub fn gradient_operator(mesh: &Mesh1D, p: usize, side: GradientSide) -> BlockOperator {
    let n = mesh.n_elements();
    let nb = p + 1;
    let mut op = BlockOperator::zeros(n, nb, nb);
    let dref = derivative_matrix(p);
    for i in 0..n {
        let s = 2.0 / mesh.width(i);
        let b = op.block_mut(i, i);
        for k in 0..nb {
            for m in 0..nb {
                b[k * nb + m] += s * dref[k * nb + m];
            }
        }
    }
    let mut face = |row: usize, col: usize, row_left_end: bool, col_left_end: bool, sgn: f64| {
        let h = mesh.width(row);
        let b = op.block_mut(row, col);
        for k in 0..nb {
            let tk = if row_left_end { sign(k) } else { 1.0 };
            for m in 0..nb {
                let tm = if col_left_end { sign(m) } else { 1.0 };
                b[k * nb + m] += sgn * (2 * k + 1) as f64 / h * tk * tm;
            }
        }
    };
    for f in mesh.faces() {
        match side {
            // -⟦ψ⟧ Φ^+ with ⟦ψ⟧ = ψ_L(right end) - ψ_R(left end), Φ^+ on the right element
            GradientSide::Plus => {
                face(f.right, f.left, true, false, -1.0);
                face(f.right, f.right, true, true, 1.0);
            }
            GradientSide::Minus => {
                face(f.left, f.left, false, false, -1.0);
                face(f.left, f.right, false, true, 1.0);
            }
        }
    }
    if !mesh.is_periodic() && side == GradientSide::Minus {
        face(n - 1, n - 1, false, false, -1.0);
        face(0, 0, true, true, 1.0);
    }
    op
}

/// Reference-element derivative matrix: `P_m' = sum_k D[k][m] P_k`.
pub fn derivative_matrix(p: usize) -> Vec<f64> {
    let nb = p + 1;
    let mut d = vec![0.0; nb * nb];
    for m in 0..nb {
        let mut e = vec![0.0; nb];
        e[m] = 1.0;
        for (k, v) in legendre::derivative(&e).into_iter().enumerate() {
            if k < nb {
                d[k * nb + m] = v;
            }
        }
    }
    d
}

pub fn apply_gradient(op: &BlockOperator, psi: &BrokenField) -> BrokenField {
    psi.with_coeffs(op.apply(psi.coeffs()))
}
