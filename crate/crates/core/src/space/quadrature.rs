use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn gauss(n_points: usize) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
        }
        let n = n_points;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess followed by Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_and_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    /// Default rule for degree-`p` fields: `2p + 4` points, exact through degree `4p + 7`.
    pub fn for_degree(p: usize) -> Self {
        Self::gauss(2 * p + 4).expect("positive point count")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn exactness_degree(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    /// `int_{-1}^{1} f`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `int_a^b f` by the affine map.
    pub fn integrate_on(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (c, s) = (0.5 * (a + b), 0.5 * (b - a));
        s * self.integrate(|xi| f(c + s * xi))
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let pm1 = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_rules() {
        let r1 = QuadratureRule::gauss(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert!((r1.weights[0] - 2.0).abs() < 1e-15);
        let r2 = QuadratureRule::gauss(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r2.nodes[0] + s).abs() < 1e-15 && (r2.nodes[1] - s).abs() < 1e-15);
        assert!((r2.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x4_with_three_points() {
        let r = QuadratureRule::gauss(3).unwrap();
        assert!((r.integrate(|x| x.powi(4)) - 0.4).abs() < 1e-14);
    }

    #[test]
    fn monomials_up_to_exactness() {
        for n in 1..=14 {
            let r = QuadratureRule::gauss(n).unwrap();
            for d in 0..=r.exactness_degree() {
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d + 1) as f64 };
                let got = r.integrate(|x| x.powi(d as i32));
                assert!((got - exact).abs() <= 1e-13 * exact.abs().max(1.0), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn rejects_zero_points() {
        assert!(QuadratureRule::gauss(0).is_err());
    }
}
