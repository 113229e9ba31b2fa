//! Multimode Gaussian states, canonical transforms, loss channels,
//! homodyne conditioning and Wigner-function sampling.

mod homodyne;
mod loss;
pub mod random;
mod schmidt;
mod state;
mod symplectic;

pub use homodyne::{sample_quadratures, sample_quadratures_sequential, HomodyneRecord, SAMPLE_BLOCK};
pub use loss::LossChannel;
pub use schmidt::{default_schmidt_cutoff, schmidt_coefficients, SCHMIDT_TAIL_WEIGHT};
pub use state::{GaussianState, Quadrature};
pub use symplectic::{omega, symplectic_eigenvalues, SymplecticTransform};

/// Slack allowed when checking that every symplectic eigenvalue is at least 1.
///
/// Scaled by the largest covariance entry: a symplectic eigenvalue of a
/// state squeezed by `r` can only be resolved to about `ε·e^{2r}` in f64.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Relative tolerance for covariance symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;
