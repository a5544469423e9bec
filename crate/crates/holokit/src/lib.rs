//! Reconstruction of non-Abelian holonomies of transported subspaces from
//! adjacent-frame overlap matrices.
//!
//! The estimator unitarizes each overlap by polar decomposition, forms the
//! ordered product of the resulting transports, identifies the loop
//! endpoint, and reports gauge-invariant diagnostics (eigenphases, Wilson
//! traces, conditioning). On top of that sit gauge-covariance checks,
//! left/right feed-forward gate correction, and reproducible convergence
//! and noise studies driven by the `holokit` binary.
//!
//! The numerical core is generic over the real scalar type; [`Matrix64`]
//! and [`Matrix32`] are the concrete entry points.

pub mod cli;
pub mod correction;
pub mod error;
pub mod gauge;
pub mod io;
pub mod linalg;
pub mod models;
pub mod studies;
pub mod transport;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Scalar};

/// Double-precision complex matrix, the default working type.
pub type Matrix64 = linalg::ComplexMatrix<f64>;
/// Single-precision complex matrix.
pub type Matrix32 = linalg::ComplexMatrix<f32>;
/// Double-precision frame.
pub type Frame64 = transport::Frame<f64>;
/// Double-precision frame path.
pub type FramePath64 = transport::FramePath<f64>;
/// Double-precision holonomy estimate.
pub type HolonomyEstimate64 = transport::HolonomyEstimate<f64>;
