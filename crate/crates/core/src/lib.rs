//! Reflection-positive Euclidean Green functions, the physical Hilbert-space
//! inner product by quadrature, and scattering observables computed from
//! Euclidean data.

pub mod cli;
pub mod config;
pub mod error;
pub mod evolve;
pub mod green_models;
pub mod hilbert;
pub mod io;
pub mod linalg;
pub mod quadrature;
pub mod scatter;
pub mod spin;

pub use error::{Error, Result};
