//! Truncated Taylor arithmetic for derivatives of compositions such as `W'(u_h)`.

use crate::error::Result;
use crate::mesh::Mesh1D;
use crate::model::energy::EnergyDensity;
use crate::space::{legendre, BrokenField};

/// Anything whose `x`-derivatives can be evaluated inside an element.
pub trait ElementwiseSmooth {
    fn mesh(&self) -> &Mesh1D;
    fn derivative_at(&self, element: usize, xi: f64, order: usize) -> Result<f64>;
}

/// Taylor coefficients `f^(m)(x) / m!`, `m = 0..=order`, of a field inside element `i`.
pub fn field_taylor(field: &BrokenField, i: usize, xi: f64, order: usize) -> Vec<f64> {
    let p = field.degree();
    let table = legendre::values_and_derivatives(p, order, xi);
    let c = field.element(i);
    let s = 2.0 / field.mesh().width(i);
    let mut out = vec![0.0; order + 1];
    let mut scale = 1.0;
    let mut fact = 1.0;
    for (m, o) in out.iter_mut().enumerate() {
        if m > 0 {
            scale *= s;
            fact *= m as f64;
        }
        let d: f64 = c.iter().zip(&table[m]).map(|(a, b)| a * b).sum();
        *o = d * scale / fact;
    }
    out
}

/// Taylor coefficients of `g ∘ u` given `outer[j] = g^(j)(u_0)` and the Taylor
/// coefficients of `u` (with `inner[0] = u_0`), truncated at `inner.len() - 1`.
pub fn compose(outer: &[f64], inner: &[f64]) -> Vec<f64> {
    let n = inner.len() - 1;
    let mut delta = inner.to_vec();
    delta[0] = 0.0;
    let mut out = vec![0.0; n + 1];
    let mut power = vec![0.0; n + 1];
    power[0] = 1.0;
    let mut fact = 1.0;
    for (j, &g) in outer.iter().enumerate().take(n + 1) {
        if j > 0 {
            fact *= j as f64;
            let mut next = vec![0.0; n + 1];
            for a in 0..=n {
                if power[a] == 0.0 {
                    continue;
                }
                for b in 1..=(n - a) {
                    next[a + b] += power[a] * delta[b];
                }
            }
            power = next;
        }
        let c = g / fact;
        for (o, pw) in out.iter_mut().zip(&power) {
            *o += c * pw;
        }
    }
    out
}

impl ElementwiseSmooth for BrokenField {
    fn mesh(&self) -> &Mesh1D {
        BrokenField::mesh(self)
    }

    fn derivative_at(&self, element: usize, xi: f64, order: usize) -> Result<f64> {
        let t = field_taylor(self, element, xi, order);
        Ok(t[order] * factorial(order))
    }
}

/// `W^(shift)(u_h)` as an elementwise smooth function.
pub struct ComposedField<'a> {
    pub field: &'a BrokenField,
    pub energy: &'a dyn EnergyDensity,
    pub shift: usize,
}

impl<'a> ComposedField<'a> {
    /// `W'(u_h)`.
    pub fn first_derivative(field: &'a BrokenField, energy: &'a dyn EnergyDensity) -> Self {
        Self {
            field,
            energy,
            shift: 1,
        }
    }

    /// All derivatives `∂_x^m W^(shift)(u_h)`, `m = 0..=order`, at one point.
    pub fn derivatives_at(&self, element: usize, xi: f64, order: usize) -> Result<Vec<f64>> {
        let inner = field_taylor(self.field, element, xi, order);
        let mut outer = Vec::with_capacity(order + 1);
        for j in 0..=order {
            outer.push(self.energy.derivative(self.shift + j, inner[0])?);
        }
        let t = compose(&outer, &inner);
        Ok(t.iter()
            .enumerate()
            .map(|(m, v)| v * factorial(m))
            .collect())
    }
}

impl ElementwiseSmooth for ComposedField<'_> {
    fn mesh(&self) -> &Mesh1D {
        self.field.mesh()
    }

    fn derivative_at(&self, element: usize, xi: f64, order: usize) -> Result<f64> {
        Ok(self.derivatives_at(element, xi, order)?[order])
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
