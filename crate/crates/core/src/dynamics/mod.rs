//! Model variants, energy, exponential integrators, adaptive evolution and
//! checkpoints.

pub mod checkpoint;
mod evolve;
pub mod integrators;
mod model;

pub use checkpoint::Checkpoint;
pub use evolve::{evolve, evolve_from, EvolveControls, Evolver, StepReport, Trajectory};
pub use integrators::{integrate_fixed, phi123, step_etdrk4, step_imex, Etd2, Etdrk4, Scheme};
pub use model::{
    energy, energy_spectral, rhs, rhs_spectral, CahnHilliard, EnergyBreakdown, LinearPart,
    ModelSpec, Semilinear, Variant, Workspace,
};
