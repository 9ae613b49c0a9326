//! Pseudo-spectral solver and verification harness for the two-dimensional
//! electroconvection system
//!
//! ```text
//! dq/dt + u . grad q + Lambda q = 0
//! du/dt + u . grad u + grad p - Delta u = -q R q,   div u = 0
//! ```
//!
//! on a periodic box `[-L, L)^2`, with the diagnostics needed to measure
//! its long-time decay against the linear evolutions.

pub mod acceptance;
pub mod checks;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod integrator;
pub mod io;
pub mod model;
pub mod semigroups;
pub mod spectral;

pub use error::{Error, Result};
