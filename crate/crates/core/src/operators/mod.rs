//! Skeleton calculus on broken fields: traces, discrete gradients and
//! reconstructions, the interior penalty form, and norms.

pub mod gradient;
pub mod identities;
pub mod norms;
pub mod penalty;
pub mod reconstruction;
pub mod traces;

pub use gradient::{discrete_gradient, gradient_operator, GradientSide};
pub use identities::{elementwise_ibp_check, ibp_duality_check};
pub use norms::{dg_seminorm, dg_seminorm_sq, inv_h_jump_sq, jump_sq, sobolev_seminorm_sq_element};
pub use penalty::{default_sigma, ip_form, PenaltyForm};
pub use reconstruction::discrete_reconstruction;
pub use traces::{jumps, traces, FaceTracePair};
