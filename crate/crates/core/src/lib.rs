//! Continuous-variable EPR toolkit.
//!
//! Gaussian optical states live in [`gaussian`]; the EPR, Duan and PPT
//! criteria in [`criteria`]; the discrete spin (Bohm) criterion for
//! two-qubit density matrices in [`spin`]; and QKD, teleportation and
//! entanglement-swapping figures of merit in [`protocols`].
//!
//! Quadratures are scaled so that the vacuum variance is 1, i.e.
//! `Δx Δp ≥ 1`. Phase-space vectors are ordered `(x₁, p₁, x₂, p₂, …)`.
//!
//! ```
//! use eprkit::criteria::evaluate;
//! use eprkit::GaussianState;
//!
//! let state = GaussianState::two_mode_squeezed(1.0)?
//!     .apply_loss(0, 0.9, false)?
//!     .apply_loss(1, 0.8, false)?;
//! let report = evaluate(&state, 0, 1)?;
//! assert!(report.epsilon_sq < 1.0 && report.duan_d < 0.5);
//! # Ok::<(), eprkit::Error>(())
//! ```

pub mod criteria;
pub mod error;
pub mod gaussian;
pub mod protocols;
pub mod spin;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, LossChannel, Quadrature, SymplecticTransform};
