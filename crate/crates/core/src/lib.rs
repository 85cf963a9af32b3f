//! Numerical laboratory for the bilinear triangle averaging operator
//! `T(f, g)(x) = ∫_M f(x − u) g(x − v) dμ(u, v)` on R^d.

pub mod decomposition;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod operator;
pub mod par;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use quadrature::Estimate;
