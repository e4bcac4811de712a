//! Broken polynomial spaces: Legendre modal basis, Gauss quadrature, fields and projections.

pub mod field;
pub mod io;
pub mod legendre;
pub mod projection;
pub mod quadrature;

pub use field::{BrokenField, ContinuousField, Side};
pub use projection::{
    project_continuous, project_continuous_field, project_l2, project_l2_with_rule, ritz_project,
};
pub use quadrature::QuadratureRule;
