//! Legendre polynomials on the reference interval `[-1, 1]`.
//!
//! Every element carries the basis `P_0, ..., P_p` mapped affinely, so the
//! element mass matrix is `diag(h / (2k + 1))` and one-sided traces are
//! `P_k(1) = 1`, `P_k(-1) = (-1)^k`.

/// Values `P_0(xi) .. P_n(xi)` written into `out[..=n]`.
pub fn values_into(n: usize, xi: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if n == 0 {
        return;
    }
    out[1] = xi;
    for k in 1..n {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * xi * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

pub fn values(n: usize, xi: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    values_into(n, xi, &mut out);
    out
}

/// `table[m][k] = d^m P_k / d xi^m (xi)` for `m <= n_derivs`, `k <= n`.
pub fn values_and_derivatives(n: usize, n_derivs: usize, xi: f64) -> Vec<Vec<f64>> {
    let mut table = vec![vec![0.0; n + 1]; n_derivs + 1];
    values_into(n, xi, &mut table[0]);
    // P^{(m)}_{k+1} = P^{(m)}_{k-1} + (2k + 1) P^{(m-1)}_k
    for m in 1..=n_derivs {
        for k in 0..n {
            let below = if k >= 1 { table[m][k - 1] } else { 0.0 };
            table[m][k + 1] = below + (2 * k + 1) as f64 * table[m - 1][k];
        }
    }
    table
}

/// Evaluates `sum_k c_k P_k(xi)`.
pub fn eval(coeffs: &[f64], xi: f64) -> f64 {
    match coeffs.len() {
        0 => 0.0,
        1 => coeffs[0],
        _ => {
            let (mut p0, mut p1) = (1.0, xi);
            let mut acc = coeffs[0] + coeffs[1] * xi;
            for (k, c) in coeffs.iter().enumerate().skip(2) {
                let kf = (k - 1) as f64;
                let p2 = ((2.0 * kf + 1.0) * xi * p1 - kf * p0) / (kf + 1.0);
                acc += c * p2;
                p0 = p1;
                p1 = p2;
            }
            acc
        }
    }
}

/// Value at `xi = 1`.
#[inline]
pub fn right_trace(coeffs: &[f64]) -> f64 {
    coeffs.iter().sum()
}

/// Value at `xi = -1`.
#[inline]
pub fn left_trace(coeffs: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { *c } else { -*c })
        .sum()
}

/// Coefficients of `d/dxi` of a Legendre series (one degree lower, at least length 1).
pub fn derivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    if n <= 1 {
        return vec![0.0];
    }
    // P_n' = sum_{j < n, n - j odd} (2j + 1) P_j; accumulate from the top.
    let mut out = vec![0.0; n - 1];
    let (mut odd_sum, mut even_sum) = (0.0, 0.0);
    for j in (0..n - 1).rev() {
        // contributions from c_{j+1}, c_{j+3}, ...
        if (j + 1) % 2 == 0 {
            even_sum += coeffs[j + 1];
            out[j] = (2 * j + 1) as f64 * even_sum;
        } else {
            odd_sum += coeffs[j + 1];
            out[j] = (2 * j + 1) as f64 * odd_sum;
        }
    }
    out
}

/// Coefficients of `xi -> int_{-1}^{xi} sum_k c_k P_k`, one degree higher.
pub fn antiderivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut out = vec![0.0; n + 1];
    for (k, &c) in coeffs.iter().enumerate() {
        if k == 0 {
            // int P_0 = xi + 1
            out[0] += c;
            out[1] += c;
        } else {
            let s = c / (2 * k + 1) as f64;
            out[k + 1] += s;
            out[k - 1] -= s;
        }
    }
    out
}

/// `int_{-1}^{1} P_k^2 = 2 / (2k + 1)`.
#[inline]
pub fn norm_sq(k: usize) -> f64 {
    2.0 / (2 * k + 1) as f64
}
