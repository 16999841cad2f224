//! Pseudospectral simulation of the thin-film epitaxy equation with slope
//! selection on the `2π`-periodic torus,
//!
//! ```text
//! ∂ₜh = ∇·((|∇h|² − 1)∇h) − νΔ²h,
//! ```
//!
//! together with its no-slope-selection and fractional-dissipation variants,
//! the exact linear propagators `e^{−νt|∇|^γ}`, real-line kernel constants,
//! the initial-data families used to probe gradient bounds, and experiment
//! drivers that turn simulations into structured [`Verdict`]s.
//!
//! Module map:
//!
//! * [`spectral`]: grids, transforms, derivatives, dealiased products, norms.
//! * [`semigroup`]: Fourier-multiplier propagators and the kernel constants
//!   `C_{d,γ}` and `A₁`.
//! * [`dynamics`]: models, energy, exponential integrators, adaptive evolution
//!   and checkpoints.
//! * [`datagen`]: initial-data constructors.
//! * [`experiments`]: drivers producing [`Verdict`]s.

pub mod datagen;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod fit;
pub mod semigroup;
pub mod spectral;

pub use dynamics::{EnergyBreakdown, ModelSpec, Trajectory, Variant};
pub use error::{Error, Result};
pub use experiments::{Outcome, Verdict};
pub use spectral::{Field, TorusGrid};

pub use num_complex::Complex64;
