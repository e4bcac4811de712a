use crate::error::{Error, Result};

/// Stored energy density `W` with derivatives on demand.
pub trait EnergyDensity: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &str;

    /// Highest derivative order available, `None` when every order is.
    fn max_order(&self) -> Option<usize>;

    /// `W^(order)(u)`.
    fn derivative(&self, order: usize, u: f64) -> Result<f64>;

    fn is_polynomial(&self) -> bool {
        false
    }

    fn w(&self, u: f64) -> f64 {
        self.derivative(0, u).expect("W itself is always available")
    }

    fn dw(&self, u: f64) -> f64 {
        self.derivative(1, u).expect("W' is always available")
    }

    fn ddw(&self, u: f64) -> f64 {
        self.derivative(2, u).expect("W'' is always available")
    }
}

/// `W(u) = (u² - 1)²`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuarticWell;

impl EnergyDensity for QuarticWell {
    fn name(&self) -> &str {
        "quartic"
    }

    fn max_order(&self) -> Option<usize> {
        None
    }

    fn derivative(&self, order: usize, u: f64) -> Result<f64> {
        let u2 = u * u;
        Ok(match order {
            0 => (u2 - 1.0) * (u2 - 1.0),
            1 => 4.0 * u * (u2 - 1.0),
            2 => 12.0 * u2 - 4.0,
            3 => 24.0 * u,
            4 => 24.0,
            _ => 0.0,
        })
    }

    fn is_polynomial(&self) -> bool {
        true
    }
}

/// Wraps a density and hides derivatives above a cutoff, for exercising error paths.
#[derive(Debug, Clone)]
pub struct Truncated<W> {
    pub inner: W,
    pub max_order: usize,
}

impl<W: EnergyDensity> EnergyDensity for Truncated<W> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn max_order(&self) -> Option<usize> {
        Some(self.max_order)
    }

    fn derivative(&self, order: usize, u: f64) -> Result<f64> {
        if order > self.max_order {
            return Err(Error::MissingDerivative(order));
        }
        self.inner.derivative(order, u)
    }

    fn is_polynomial(&self) -> bool {
        self.inner.is_polynomial()
    }
}

/// `max_{|u| <= m} |W^(j)(u)|` over `j = 0..=order`, by dense sampling.
pub fn c_norm(w: &dyn EnergyDensity, m: f64, order: usize, samples: usize) -> Result<f64> {
    let s = samples.max(2);
    let mut best: f64 = 0.0;
    for j in 0..=order {
        for i in 0..s {
            let u = -m + 2.0 * m * i as f64 / (s - 1) as f64;
            best = best.max(w.derivative(j, u)?.abs());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quartic_values() {
        let w = QuarticWell;
        assert_eq!((w.w(1.0), w.dw(1.0)), (0.0, 0.0));
        assert_eq!((w.w(0.0), w.dw(0.0), w.ddw(0.0)), (1.0, 0.0, -4.0));
        assert_eq!((w.w(2.0), w.dw(2.0)), (9.0, 24.0));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let w = QuarticWell;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let u: f64 = rng.random_range(-3.0..3.0);
            for j in 0..4 {
                let e = 1e-5;
                let fd = (w.derivative(j, u + e).unwrap() - w.derivative(j, u - e).unwrap()) / (2.0 * e);
                let exact = w.derivative(j + 1, u).unwrap();
                assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0));
            }
        }
    }

    #[test]
    fn truncated_reports_missing_order() {
        let w = Truncated {
            inner: QuarticWell,
            max_order: 3,
        };
        assert!(matches!(w.derivative(4, 0.0), Err(Error::MissingDerivative(4))));
    }
}
