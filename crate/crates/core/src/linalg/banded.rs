//! Banded LU with partial pivoting (the unblocked LAPACK `gbtf2`/`gbtrs` pair).
//!
//! Storage is column-major with leading dimension `2 kl + ku + 1`; the top
//! `kl` rows hold fill-in created by row interchanges.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i + self.ku >= j && j + self.kl >= i, "({i}, {j}) outside band");
        (self.kl + self.ku + i - j) + j * self.ldab
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i + self.ku >= j && j + self.kl >= i
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.ab[self.index(i, j)]
        } else {
            0.0
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.index(i, j);
        self.ab[k] += v;
    }

    pub fn clear(&mut self) {
        self.ab.iter_mut().for_each(|x| *x = 0.0);
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.ab[self.index(i, j)] * x[j];
            }
        }
        y
    }

    /// Factors in place, consuming the matrix.
    pub fn factor(mut self) -> Result<BandedLu> {
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        let kv = ku + kl;
        let ab = &mut self.ab;
        let at = |r: usize, c: usize| r + c * ldab;
        let mut ipiv = vec![0usize; n];
        // fill-in rows start out zero because `zeros` allocated them
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            // pivot search in column j, rows kv..=kv+km of the band
            let mut jp = 0;
            let mut best = ab[at(kv, j)].abs();
            for t in 1..=km {
                let v = ab[at(kv + t, j)].abs();
                if v > best {
                    best = v;
                    jp = t;
                }
            }
            ipiv[j] = j + jp;
            if ab[at(kv + jp, j)] == 0.0 {
                return Err(Error::Singular(format!("zero pivot in column {j}")));
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for t in 0..=(ju - j) {
                    ab.swap(at(kv + jp - t, j + t), at(kv - t, j + t));
                }
            }
            if km > 0 {
                let inv = 1.0 / ab[at(kv, j)];
                for t in 1..=km {
                    ab[at(kv + t, j)] *= inv;
                }
                for c in 1..=(ju - j) {
                    let y = ab[at(kv - c, j + c)];
                    if y != 0.0 {
                        for r in 1..=km {
                            let x = ab[at(kv + r, j)];
                            ab[at(kv + r - c, j + c)] -= x * y;
                        }
                    }
                }
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            ldab,
            ab: self.ab,
            ipiv,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandedLu {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        let kv = kl + ku;
        let ab = &self.ab;
        let at = |r: usize, c: usize| r + c * ldab;
        if kl > 0 {
            for j in 0..n.saturating_sub(1) {
                let lm = kl.min(n - 1 - j);
                let l = self.ipiv[j];
                if l != j {
                    b.swap(l, j);
                }
                let bj = b[j];
                if bj != 0.0 {
                    for t in 1..=lm {
                        b[j + t] -= ab[at(kv + t, j)] * bj;
                    }
                }
            }
        }
        for j in (0..n).rev() {
            if b[j] != 0.0 {
                b[j] /= ab[at(kv, j)];
                let tmp = b[j];
                let lo = j.saturating_sub(kv);
                for i in lo..j {
                    b[i] -= tmp * ab[at(kv + i - j, j)];
                }
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_from(b: &BandedMatrix) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(b.n(), b.n(), |i, j| b.get(i, j))
    }

    #[test]
    fn tridiagonal_solve() {
        let n = 6;
        let mut a = BandedMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
                a.add(i - 1, i, -1.0);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| i as f64 + 1.0).collect();
        let b = a.matvec(&x_true);
        let x = a.factor().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn random_pivoting_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(n, kl, ku) in &[(20, 3, 2), (15, 0, 4), (12, 5, 0), (30, 7, 9)] {
            let mut a = BandedMatrix::zeros(n, kl, ku);
            for i in 0..n {
                for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                    // weak diagonal forces row interchanges
                    let v: f64 = rng.random_range(-1.0..1.0);
                    a.add(i, j, if i == j { 0.1 * v } else { v });
                }
            }
            let dense = dense_from(&a);
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = nalgebra::DVector::from_vec(a.factor().unwrap().solve(&b));
            let r = &dense * &x - nalgebra::DVector::from_vec(b);
            // triangular cases cannot pivot, so measure backward error
            let scale = dense.amax() * x.amax() * n as f64;
            assert!(r.amax() < 1e-13 * scale.max(1.0), "n={n} residual {}", r.amax());
        }
    }

    #[test]
    fn singular_detected() {
        let a = BandedMatrix::zeros(3, 1, 1);
        assert!(a.factor().is_err());
    }
}
