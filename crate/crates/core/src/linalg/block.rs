/// Element-block sparse operator acting on element-major coefficient vectors.
///
/// Row element `i` owns a list of `(column element, block)` pairs; blocks are
/// dense `rows_nb x cols_nb`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    n_elements: usize,
    rows_nb: usize,
    cols_nb: usize,
    rows: Vec<Vec<(usize, Vec<f64>)>>,
}

impl BlockOperator {
    pub fn zeros(n_elements: usize, rows_nb: usize, cols_nb: usize) -> Self {
        Self {
            n_elements,
            rows_nb,
            cols_nb,
            rows: vec![Vec::new(); n_elements],
        }
    }

    /// Block-diagonal operator from per-element blocks.
    pub fn block_diagonal(blocks: Vec<Vec<f64>>, nb: usize) -> Self {
        let n = blocks.len();
        let mut op = Self::zeros(n, nb, nb);
        for (i, b) in blocks.into_iter().enumerate() {
            assert_eq!(b.len(), nb * nb);
            op.rows[i].push((i, b));
        }
        op
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn rows_nb(&self) -> usize {
        self.rows_nb
    }

    pub fn cols_nb(&self) -> usize {
        self.cols_nb
    }

    pub fn row(&self, i: usize) -> &[(usize, Vec<f64>)] {
        &self.rows[i]
    }

    /// Mutable access to block `(i, j)`, inserting a zero block if absent.
    pub fn block_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let size = self.rows_nb * self.cols_nb;
        let row = &mut self.rows[i];
        let pos = match row.iter().position(|(c, _)| *c == j) {
            Some(p) => p,
            None => {
                row.push((j, vec![0.0; size]));
                row.len() - 1
            }
        };
        &mut row[pos].1
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&[f64]> {
        self.rows[i]
            .iter()
            .find(|(c, _)| *c == j)
            .map(|(_, b)| b.as_slice())
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let (rn, cn) = (self.rows_nb, self.cols_nb);
        debug_assert_eq!(x.len(), self.n_elements * cn);
        debug_assert_eq!(y.len(), self.n_elements * rn);
        for (i, row) in self.rows.iter().enumerate() {
            let yi = &mut y[i * rn..(i + 1) * rn];
            yi.iter_mut().for_each(|v| *v = 0.0);
            for (j, b) in row {
                let xj = &x[j * cn..(j + 1) * cn];
                for r in 0..rn {
                    let br = &b[r * cn..(r + 1) * cn];
                    yi[r] += br.iter().zip(xj).map(|(a, c)| a * c).sum::<f64>();
                }
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_elements * self.rows_nb];
        self.apply_into(x, &mut y);
        y
    }

    /// `self * other`.
    pub fn compose(&self, other: &BlockOperator) -> BlockOperator {
        assert_eq!(self.cols_nb, other.rows_nb);
        let (rn, mn, cn) = (self.rows_nb, self.cols_nb, other.cols_nb);
        let mut out = BlockOperator::zeros(self.n_elements, rn, cn);
        for (i, row) in self.rows.iter().enumerate() {
            for (m, a) in row {
                for (j, b) in &other.rows[*m] {
                    let dst = out.block_mut(i, *j);
                    for r in 0..rn {
                        for k in 0..mn {
                            let arm = a[r * mn + k];
                            if arm == 0.0 {
                                continue;
                            }
                            for c in 0..cn {
                                dst[r * cn + c] += arm * b[k * cn + c];
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Multiplies row `k` of every block in element row `i` by `f(i, k)`.
    pub fn scale_rows(&mut self, f: impl Fn(usize, usize) -> f64) {
        let cn = self.cols_nb;
        for (i, row) in self.rows.iter_mut().enumerate() {
            for (_, b) in row.iter_mut() {
                for (r, chunk) in b.chunks_mut(cn).enumerate() {
                    let s = f(i, r);
                    chunk.iter_mut().for_each(|v| *v *= s);
                }
            }
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &BlockOperator) -> BlockOperator {
        assert_eq!((self.rows_nb, self.cols_nb), (other.rows_nb, other.cols_nb));
        let mut out = self.clone();
        for (i, row) in other.rows.iter().enumerate() {
            for (j, b) in row {
                let dst = out.block_mut(i, *j);
                for (d, v) in dst.iter_mut().zip(b) {
                    *d += s * v;
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> BlockOperator {
        let mut out = self.clone();
        for row in out.rows.iter_mut() {
            for (_, b) in row.iter_mut() {
                b.iter_mut().for_each(|v| *v *= s);
            }
        }
        out
    }

    pub fn transpose(&self) -> BlockOperator {
        let (rn, cn) = (self.rows_nb, self.cols_nb);
        let mut out = BlockOperator::zeros(self.n_elements, cn, rn);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, b) in row {
                let dst = out.block_mut(*j, i);
                for r in 0..rn {
                    for c in 0..cn {
                        dst[c * rn + r] += b[r * cn + c];
                    }
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let (rn, cn) = (self.rows_nb, self.cols_nb);
        let mut m = nalgebra::DMatrix::zeros(self.n_elements * rn, self.n_elements * cn);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, b) in row {
                for r in 0..rn {
                    for c in 0..cn {
                        m[(i * rn + r, j * cn + c)] += b[r * cn + c];
                    }
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BlockOperator {
        let mut a = BlockOperator::zeros(3, 2, 2);
        for i in 0..3 {
            a.block_mut(i, i).copy_from_slice(&[2.0, 1.0, 0.0, 3.0]);
            a.block_mut(i, (i + 1) % 3).copy_from_slice(&[-1.0, 0.5, 0.25, 0.0]);
        }
        a
    }

    #[test]
    fn apply_matches_dense() {
        let a = sample();
        let x: Vec<f64> = (0..6).map(|k| k as f64 - 2.5).collect();
        let y = a.apply(&x);
        let yd = a.to_dense() * nalgebra::DVector::from_vec(x);
        for (u, v) in y.iter().zip(yd.iter()) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn compose_and_transpose_match_dense() {
        let a = sample();
        let b = a.transpose();
        let c = a.compose(&b);
        let cd = a.to_dense() * a.to_dense().transpose();
        assert!((c.to_dense() - cd).amax() < 1e-14);
        let s = a.add_scaled(-2.0, &a.scaled(0.5));
        assert!(s.to_dense().amax() < 1e-15);
    }
}
