//! Elliptic and velocity reconstructions and relative entropy functionals.

pub mod elliptic;
pub mod entropy;
pub mod smooth;

pub use elliptic::{
    project_composed, r1_rhs, r2_rhs, reconstruct_r1, reconstruct_r2, reconstruct_rv,
};
pub use entropy::{h1_distance_sq, relative_entropy_modified, relative_entropy_reduced, EntropyPair};
pub use smooth::{
    antiderivative, second_order_residual, solve_first_order, solve_second_order, PointFunction,
    SmoothField,
};
