//! Correlation kernels of planar symplectic (Pfaffian) random-matrix ensembles:
//! finite-N kernels for the elliptic and disk-confined Ginibre ensembles, their
//! limiting Wronskian kernels, Christoffel–Darboux checks, a Metropolis sampler
//! and a convergence-rate harness.

pub mod converge;
pub mod ensembles;
pub mod error;
pub mod finite_kernel;
pub mod identities;
pub mod limit_kernel;
pub mod numfmt;
pub mod pfaffian;
pub mod quad;
pub mod sampler;
pub mod skewop;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Library version, echoed in output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
