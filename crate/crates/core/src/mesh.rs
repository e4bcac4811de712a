//! One-dimensional partitions and their face skeleton.
//!
//! Elements are `K_i = [x_i, x_{i+1}]`. Faces carry the one-sided widths
//! `h_E^-` (element to the left), `h_E^+` (element to the right) and their
//! mean `h_E`. In periodic mode `x_0` and `x_N` are identified and an explicit
//! wrap-around face joins element `N-1` to element `0`; in natural mode the
//! two boundary points are not part of the skeleton.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    Periodic,
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Grading {
    Uniform,
    /// Interior nodes moved by `strength * h * U(-1, 1)` with a seeded generator.
    RandomPerturbed { seed: u64, strength: f64 },
}

/// A skeleton face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    /// Index of the mesh node at which the face sits (0 for the wrap face).
    pub node: usize,
    pub position: f64,
    pub left: usize,
    pub right: usize,
    /// Mean width `(h_minus + h_plus) / 2`.
    pub h: f64,
    pub h_minus: f64,
    pub h_plus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    bc: BoundaryMode,
    widths: Vec<f64>,
    faces: Vec<Face>,
    /// `left_face[i]`: face at `x_i` seen from element `i`, if part of the skeleton.
    left_face: Vec<Option<usize>>,
    right_face: Vec<Option<usize>>,
}

impl Mesh1D {
    /// Builds a mesh of `[a, b]` with the requested grading.
    pub fn build(
        domain: (f64, f64),
        n_elements: usize,
        grading: Grading,
        bc: BoundaryMode,
    ) -> Result<Self> {
        let (a, b) = domain;
        if n_elements < 2 {
            return Err(Error::InvalidMesh(format!(
                "need at least 2 elements, got {n_elements}"
            )));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidMesh(format!("bad domain [{a}, {b}]")));
        }
        let h = (b - a) / n_elements as f64;
        let mut nodes: Vec<f64> = (0..=n_elements).map(|i| a + i as f64 * h).collect();
        nodes[n_elements] = b;
        if let Grading::RandomPerturbed { seed, strength } = grading {
            if !(0.0..0.5).contains(&strength) {
                return Err(Error::InvalidMesh(format!(
                    "perturbation strength {strength} must lie in [0, 1/2)"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for x in nodes.iter_mut().take(n_elements).skip(1) {
                *x += strength * h * rng.random_range(-1.0..1.0);
            }
        }
        Self::from_nodes(nodes, bc)
    }

    pub fn uniform(domain: (f64, f64), n_elements: usize, bc: BoundaryMode) -> Result<Self> {
        Self::build(domain, n_elements, Grading::Uniform, bc)
    }

    /// Mesh from explicit nodes. Unlike [`Mesh1D::build`] a single element is allowed.
    pub fn from_nodes(nodes: Vec<f64>, bc: BoundaryMode) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMesh("need at least two nodes".into()));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMesh("non-finite node".into()));
        }
        let widths: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(i) = widths.iter().position(|&h| h <= 0.0) {
            return Err(Error::InvalidMesh(format!(
                "nodes not strictly increasing at element {i} (node collision)"
            )));
        }
        let n = widths.len();
        let mut faces = Vec::with_capacity(n);
        let mut left_face = vec![None; n];
        let mut right_face = vec![None; n];
        let mut push = |node: usize, left: usize, right: usize, position: f64| {
            let idx = faces.len();
            faces.push(Face {
                node,
                position,
                left,
                right,
                h: 0.5 * (widths[left] + widths[right]),
                h_minus: widths[left],
                h_plus: widths[right],
            });
            right_face[left] = Some(idx);
            left_face[right] = Some(idx);
        };
        if bc == BoundaryMode::Periodic {
            push(0, n - 1, 0, nodes[0]);
        }
        for node in 1..n {
            push(node, node - 1, node, nodes[node]);
        }
        Ok(Self {
            nodes,
            bc,
            widths,
            faces,
            left_face,
            right_face,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.widths.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn bc(&self) -> BoundaryMode {
        self.bc
    }

    pub fn is_periodic(&self) -> bool {
        self.bc == BoundaryMode::Periodic
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    pub fn length(&self) -> f64 {
        let (a, b) = self.domain();
        b - a
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn width(&self, element: usize) -> f64 {
        self.widths[element]
    }

    pub fn max_width(&self) -> f64 {
        self.widths.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_width(&self) -> f64 {
        self.widths.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `max h_i / min h_i`.
    pub fn quasi_uniformity(&self) -> f64 {
        self.max_width() / self.min_width()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Skeleton face at the left end of `element`, if any.
    pub fn left_face(&self, element: usize) -> Option<usize> {
        self.left_face[element]
    }

    pub fn right_face(&self, element: usize) -> Option<usize> {
        self.right_face[element]
    }

    /// `(x_i, x_{i+1})` of an element.
    pub fn element_bounds(&self, element: usize) -> (f64, f64) {
        (self.nodes[element], self.nodes[element + 1])
    }

    /// Maps a reference coordinate in `[-1, 1]` to physical space.
    #[inline]
    pub fn to_physical(&self, element: usize, xi: f64) -> f64 {
        let (l, r) = self.element_bounds(element);
        0.5 * (l + r) + 0.5 * (r - l) * xi
    }

    #[inline]
    pub fn to_reference(&self, element: usize, x: f64) -> f64 {
        let (l, r) = self.element_bounds(element);
        (2.0 * x - l - r) / (r - l)
    }

    /// Element containing `x` (the left-most one at a node).
    pub fn locate(&self, x: f64) -> Option<usize> {
        let (a, b) = self.domain();
        if x < a || x > b {
            return None;
        }
        let n = self.n_elements();
        let idx = self.nodes.partition_point(|&node| node <= x);
        Some(idx.saturating_sub(1).min(n - 1))
    }

    /// Short content hash of nodes and boundary mode, used to tag serialized fields.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for x in &self.nodes {
            hasher.update(x.to_le_bytes());
        }
        hasher.update(match self.bc {
            BoundaryMode::Periodic => b"periodic".as_slice(),
            BoundaryMode::Natural => b"natural".as_slice(),
        });
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
