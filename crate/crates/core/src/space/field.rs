use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;

use super::legendre;

/// Which one-sided limit to take when evaluating at a mesh node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    LeftLimit,
    RightLimit,
    /// Only valid away from mesh nodes.
    Interior,
}

/// Piecewise polynomial of degree `p` in the per-element Legendre basis.
///
/// Coefficients are stored element-major: element `i` owns
/// `coeffs[i * (p + 1) .. (i + 1) * (p + 1)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrokenField {
    mesh: Arc<Mesh1D>,
    degree: usize,
    coeffs: Vec<f64>,
}

impl BrokenField {
    pub fn zeros(mesh: Arc<Mesh1D>, degree: usize) -> Self {
        let len = mesh.n_elements() * (degree + 1);
        Self {
            mesh,
            degree,
            coeffs: vec![0.0; len],
        }
    }

    pub fn constant(mesh: Arc<Mesh1D>, degree: usize, value: f64) -> Self {
        let mut f = Self::zeros(mesh, degree);
        let nb = degree + 1;
        for i in 0..f.mesh.n_elements() {
            f.coeffs[i * nb] = value;
        }
        f
    }

    pub fn from_coeffs(mesh: Arc<Mesh1D>, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = mesh.n_elements() * (degree + 1);
        if coeffs.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "expected {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            mesh,
            degree,
            coeffs,
        })
    }

    /// Builds a field element by element from Legendre coefficient slices (padded or truncated to `degree`).
    pub fn from_elements<F>(mesh: Arc<Mesh1D>, degree: usize, mut per_element: F) -> Self
    where
        F: FnMut(usize) -> Vec<f64>,
    {
        let mut f = Self::zeros(mesh, degree);
        for i in 0..f.n_elements() {
            let c = per_element(i);
            let dst = f.element_mut(i);
            for (d, s) in dst.iter_mut().zip(c.iter()) {
                *d = *s;
            }
        }
        f
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_elements(&self) -> usize {
        self.mesh.n_elements()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn element(&self, i: usize) -> &[f64] {
        let nb = self.degree + 1;
        &self.coeffs[i * nb..(i + 1) * nb]
    }

    pub fn element_mut(&mut self, i: usize) -> &mut [f64] {
        let nb = self.degree + 1;
        &mut self.coeffs[i * nb..(i + 1) * nb]
    }

    /// Same mesh and degree, new coefficients.
    pub fn with_coeffs(&self, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), self.coeffs.len());
        Self {
            mesh: self.mesh.clone(),
            degree: self.degree,
            coeffs,
        }
    }

    /// Value at reference coordinate `xi` of element `i`.
    #[inline]
    pub fn eval_local(&self, i: usize, xi: f64) -> f64 {
        legendre::eval(self.element(i), xi)
    }

    /// Value at the left end of element `i` (the right limit at `x_i`).
    #[inline]
    pub fn left_trace(&self, i: usize) -> f64 {
        legendre::left_trace(self.element(i))
    }

    /// Value at the right end of element `i` (the left limit at `x_{i+1}`).
    #[inline]
    pub fn right_trace(&self, i: usize) -> f64 {
        legendre::right_trace(self.element(i))
    }

    pub fn eval(&self, x: f64, side: Side) -> Result<f64> {
        let (a, b) = self.mesh.domain();
        if x < a || x > b {
            return Err(Error::OutOfDomain { x, a, b });
        }
        let nodes = self.mesh.nodes();
        let n = self.n_elements();
        let node = nodes.binary_search_by(|y| y.partial_cmp(&x).unwrap()).ok();
        let Some(k) = node else {
            let i = self.mesh.locate(x).expect("inside domain");
            return Ok(self.eval_local(i, self.mesh.to_reference(i, x)));
        };
        let periodic = self.mesh.is_periodic();
        match side {
            Side::Interior => {
                if !periodic && (k == 0 || k == n) {
                    Ok(if k == 0 {
                        self.left_trace(0)
                    } else {
                        self.right_trace(n - 1)
                    })
                } else {
                    Err(Error::AmbiguousEvaluation { x })
                }
            }
            Side::LeftLimit => {
                if k == 0 {
                    if periodic {
                        Ok(self.right_trace(n - 1))
                    } else {
                        Err(Error::InvalidArgument(format!(
                            "no left limit at the domain boundary x = {x}"
                        )))
                    }
                } else {
                    Ok(self.right_trace(k - 1))
                }
            }
            Side::RightLimit => {
                if k == n {
                    if periodic {
                        Ok(self.left_trace(0))
                    } else {
                        Err(Error::InvalidArgument(format!(
                            "no right limit at the domain boundary x = {x}"
                        )))
                    }
                } else {
                    Ok(self.left_trace(k))
                }
            }
        }
    }

    /// Exact elementwise derivative, degree `max(p - 1, 0)`.
    pub fn derivative(&self) -> BrokenField {
        let out_degree = self.degree.saturating_sub(1);
        let mut out = BrokenField::zeros(self.mesh.clone(), out_degree);
        for i in 0..self.n_elements() {
            let scale = 2.0 / self.mesh.width(i);
            let d = legendre::derivative(self.element(i));
            for (o, v) in out.element_mut(i).iter_mut().zip(d) {
                *o = v * scale;
            }
        }
        out
    }

    /// Re-expresses the field with degree `q`, padding with zeros or truncating (L² projection).
    pub fn with_degree(&self, q: usize) -> BrokenField {
        BrokenField::from_elements(self.mesh.clone(), q, |i| self.element(i).to_vec())
    }

    /// Degree-wise elevation to the larger of the two degrees, for binary operations.
    fn aligned(&self, other: &BrokenField) -> (BrokenField, BrokenField) {
        let q = self.degree.max(other.degree);
        (self.with_degree(q), other.with_degree(q))
    }

    pub fn add(&self, other: &BrokenField) -> BrokenField {
        let (mut a, b) = self.aligned(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &BrokenField) -> BrokenField {
        let (mut a, b) = self.aligned(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        a
    }

    pub fn scale(&self, s: f64) -> BrokenField {
        let mut a = self.clone();
        a.coeffs.iter_mut().for_each(|c| *c *= s);
        a
    }

    /// `self += s * other` for fields of equal degree.
    pub fn axpy(&mut self, s: f64, other: &BrokenField) {
        assert_eq!(self.degree, other.degree);
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += s * y;
        }
    }

    /// `int_K self` for element `i`.
    pub fn element_integral(&self, i: usize) -> f64 {
        self.element(i)[0] * self.mesh.width(i)
    }

    pub fn integral(&self) -> f64 {
        (0..self.n_elements()).map(|i| self.element_integral(i)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.integral() / self.mesh.length()
    }

    /// Exact `L²` inner product over the domain.
    pub fn inner(&self, other: &BrokenField) -> f64 {
        let q = self.degree.min(other.degree);
        let mut acc = 0.0;
        for i in 0..self.n_elements() {
            let h = self.mesh.width(i);
            let (a, b) = (self.element(i), other.element(i));
            for k in 0..=q {
                acc += h / (2 * k + 1) as f64 * a[k] * b[k];
            }
        }
        acc
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Squared `L²(K_i)` norm.
    pub fn element_l2_sq(&self, i: usize) -> f64 {
        let h = self.mesh.width(i);
        self.element(i)
            .iter()
            .enumerate()
            .map(|(k, c)| h / (2 * k + 1) as f64 * c * c)
            .sum()
    }

    /// Max of `|self|` over `samples` equispaced points per element (endpoints included).
    pub fn max_abs_sampled(&self, samples: usize) -> f64 {
        let s = samples.max(2);
        let mut m: f64 = 0.0;
        for i in 0..self.n_elements() {
            for j in 0..s {
                let xi = -1.0 + 2.0 * j as f64 / (s - 1) as f64;
                m = m.max(self.eval_local(i, xi).abs());
            }
        }
        m
    }

    /// Largest one-sided trace difference over the skeleton.
    pub fn max_jump(&self) -> f64 {
        self.mesh
            .faces()
            .iter()
            .map(|f| (self.right_trace(f.left) - self.left_trace(f.right)).abs())
            .fold(0.0, f64::max)
    }

    /// Recovers a field from `p + 1` point values per element at the given reference points.
    pub fn interpolate_local(
        mesh: Arc<Mesh1D>,
        degree: usize,
        points: &[f64],
        values: impl Fn(usize, f64) -> f64,
    ) -> Result<BrokenField> {
        let nb = degree + 1;
        if points.len() != nb {
            return Err(Error::InvalidArgument(format!(
                "need {nb} interpolation points, got {}",
                points.len()
            )));
        }
        let vander = nalgebra::DMatrix::from_fn(nb, nb, |r, c| legendre::values(degree, points[r])[c]);
        let lu = vander.lu();
        let mut out = BrokenField::zeros(mesh, degree);
        for i in 0..out.n_elements() {
            let rhs = nalgebra::DVector::from_fn(nb, |r, _| values(i, points[r]));
            let sol = lu
                .solve(&rhs)
                .ok_or_else(|| Error::Singular("interpolation points coincide".into()))?;
            out.element_mut(i).copy_from_slice(sol.as_slice());
        }
        Ok(out)
    }
}

/// A broken field whose traces agree at every skeleton face.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousField(BrokenField);

impl ContinuousField {
    /// Wraps a field after checking its jumps against `tol` relative to its size.
    pub fn new(field: BrokenField, tol: f64) -> Result<Self> {
        let scale = field.max_abs_sampled(3).max(1.0);
        let jump = field.max_jump();
        if jump > tol * scale {
            return Err(Error::InvalidArgument(format!(
                "field has a face jump of {jump:e}"
            )));
        }
        Ok(Self(field))
    }

    pub(crate) fn new_unchecked(field: BrokenField) -> Self {
        Self(field)
    }

    pub fn field(&self) -> &BrokenField {
        &self.0
    }

    pub fn into_field(self) -> BrokenField {
        self.0
    }
}

impl std::ops::Deref for ContinuousField {
    type Target = BrokenField;
    fn deref(&self) -> &BrokenField {
        &self.0
    }
}
