//! Numerical laboratory for the conformally singular metric
//! `ds² = σ^{-2γ} |dx|²` on the unit disc and its radial models.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigensolver;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod hardy;
pub mod mesh;
pub mod perturbation;
pub mod quadrature;
pub mod reduction;

pub use error::{Error, Result};
pub use fit::RateFit;
pub use geometry::ModelParams;
pub use mesh::{Grading, Mesh};
