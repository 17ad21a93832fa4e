//! Periodic-box fields, transforms and spectral operators.

pub(crate) mod fft;
pub mod field;
pub mod grid;
pub mod ops;
pub mod snapshot;

pub use field::{transform, Direction, Representation, Samples, ScalarField, Transform, VectorField};
pub use grid::{GridSpec, SpectralMask, Wavenumbers, TWO_THIRDS};
pub use ops::{
    apply_mask, dealias, divergence, gradient, laplacian, leray_project, partial, vector_laplacian,
    Dealias,
};
