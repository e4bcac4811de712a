//! Direct solvers for the small, banded systems that arise in one dimension.

pub mod banded;
pub mod block;

pub use banded::{BandedLu, BandedMatrix};
pub use block::BlockOperator;

use crate::error::{Error, Result};

/// Orders elements so that a ring of neighbours becomes banded: `0, N-1, 1, N-2, ...`.
/// Elements at ring distance `d` end up at most `2d` positions apart.
pub fn folded_order(n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0usize, n);
    while lo < hi {
        order.push(lo);
        lo += 1;
        if lo < hi {
            hi -= 1;
            order.push(hi);
        }
    }
    order
}

/// Inverse permutation: `position[element]`.
pub fn positions(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (p, &e) in order.iter().enumerate() {
        pos[e] = p;
    }
    pos
}

/// Solves a sparse system given as triplets by permuting it into band form.
/// `perm[i]` is the row/column position of unknown `i`.
pub fn solve_triplets(
    n: usize,
    triplets: &[(usize, usize, f64)],
    perm: &[usize],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    if perm.len() != n || rhs.len() != n {
        return Err(Error::InvalidArgument("dimension mismatch in sparse solve".into()));
    }
    let (mut kl, mut ku) = (0usize, 0usize);
    for &(i, j, _) in triplets {
        let (pi, pj) = (perm[i], perm[j]);
        if pi > pj {
            kl = kl.max(pi - pj);
        } else {
            ku = ku.max(pj - pi);
        }
    }
    let mut band = BandedMatrix::zeros(n, kl, ku);
    for &(i, j, v) in triplets {
        band.add(perm[i], perm[j], v);
    }
    let lu = band.factor()?;
    let mut b = vec![0.0; n];
    for i in 0..n {
        b[perm[i]] = rhs[i];
    }
    lu.solve_in_place(&mut b);
    Ok((0..n).map(|i| b[perm[i]]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folded_ring_is_banded() {
        for n in 2..12 {
            let order = folded_order(n);
            let pos = positions(&order);
            let mut seen = order.clone();
            seen.sort();
            assert_eq!(seen, (0..n).collect::<Vec<_>>());
            for e in 0..n {
                let nb = (e + 1) % n;
                assert!(pos[e].abs_diff(pos[nb]) <= 2);
            }
        }
    }

    #[test]
    fn periodic_laplacian_plus_identity() {
        let n = 9;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 3.0));
            t.push((i, (i + 1) % n, -1.0));
            t.push(((i + 1) % n, i, -1.0));
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let mut rhs = vec![0.0; n];
        for &(i, j, v) in &t {
            rhs[i] += v * x_true[j];
        }
        let order = folded_order(n);
        let pos = positions(&order);
        let x = solve_triplets(n, &t, &pos, &rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
