//! Stability and scalability analysis for n-th order consensus on weighted
//! directed graphs.
//!
//! * [`graph`]: graphs, Laplacians, structural facts and growing graph families.
//! * [`spectral`]: Laplacian spectra, algebraic connectivity and its upper bounds.
//! * [`stability`]: complex Routh–Hurwitz analysis per Laplacian mode, plus a
//!   dense closed-loop eigenvalue oracle.
//! * [`scaling`]: sweeps over network size to find the critical size `N̄`.
//! * [`sim`]: fixed-step RK4 integration of the closed loop.

pub mod error;
pub mod graph;
mod linalg;
pub mod scaling;
pub mod sim;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
pub use linalg::monic_roots;
