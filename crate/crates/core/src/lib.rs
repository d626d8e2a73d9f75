//! Finsler geometry of finite-dimensional unitary groups under the bi-invariant
//! metrics induced by p-Schatten norms: distances and geodesics, numerical
//! convexity checks, circumcenters of finite point sets, geodesic subspaces,
//! and conjugator recovery for near-equivalent finite group representations.

pub mod error;
pub mod matrix;
pub mod circumcenter;
pub mod cli;
pub mod convexity;
pub mod metrics;
pub mod report;
pub mod rigidity;
pub mod scenarios;
pub mod subspaces;

pub use error::{Error, Result};
