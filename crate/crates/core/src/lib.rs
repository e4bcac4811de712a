//! Discontinuous Galerkin discretization of 1D viscosity–capillarity
//! elastodynamics with reduced relative entropy a posteriori indicators.

pub mod cli;
pub mod error;
pub mod estimator;
pub mod jet;
pub mod linalg;
pub mod mesh;
pub mod model;
pub mod operators;
pub mod reconstruct;
pub mod solver;
pub mod space;

pub use error::{Error, Result};
