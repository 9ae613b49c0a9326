//! Periodic grid, transforms and exact Fourier-multiplier operators.

mod field;
mod grid;
mod norms;
mod ops;

pub(crate) use field::{forward_many, inverse_many};
pub use field::{transform, Direction, Field, PhysicalScalar, SpectralScalar, SpectralVector};
pub use grid::{make_grid, Grid, MAX_N, MIN_N};
pub use norms::{l2, norm, sobolev_inhomogeneous, vector_norm, NormKind};
pub use ops::{
    dealias, divergence, divergence_defect, fractional_laplacian, gradient, leray_project, partial, riesz, Dealias,
    MEAN_TOLERANCE,
};
pub(crate) use ops::{lambda_pow_mean_free, riesz_unchecked};
