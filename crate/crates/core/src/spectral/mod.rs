//! Grids, transforms, derivatives, dealiased products and norms on `𝕋^d`.
//!
//! Fourier convention: `f̂(k) = (2π/n)^d Σ_j f(x_j) e^{−ik·x_j}`, the grid
//! quadrature of `∫ f e^{−ik·x} dx`, with inverse
//! `f(x_j) = (2π)^{−d} Σ_k f̂(k) e^{ik·x_j}`. Coefficients of a band-limited
//! function are therefore independent of the grid resolution.

mod fft;
mod field;
mod grid;
pub mod norms;
mod ops;

pub use field::Field;
pub use grid::TorusGrid;
pub use norms::{norms, NormReport};
pub use ops::{
    apply_symbol, dealiased_cubic, grad_sup_norm, gradient, project_nyquist, spectral_derivative,
    transform_forward, transform_inverse, Padded,
};
