use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::{fft, TorusGrid};
use crate::{Error, Result};

/// Real grid function on a [`TorusGrid`] with lazily computed Fourier
/// coefficients.
///
/// A `Field` is immutable once built. The coefficient array is computed on first
/// request and cached behind a `OnceLock`, so sharing a field between threads is
/// safe and always yields the same coefficients.
#[derive(Clone, Debug)]
pub struct Field {
    grid: TorusGrid,
    values: Arc<Vec<f64>>,
    spectral: Arc<OnceLock<Vec<Complex64>>>,
    mean_zero: bool,
}

impl Field {
    /// Builds a field from grid values, rejecting non-finite entries.
    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values for grid {grid}, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self::from_values_unchecked(grid, values))
    }

    pub(crate) fn from_values_unchecked(grid: TorusGrid, values: Vec<f64>) -> Self {
        let mean_zero = mean_is_zero(&values);
        Self {
            grid,
            values: Arc::new(values),
            spectral: Arc::new(OnceLock::new()),
            mean_zero,
        }
    }

    /// Builds a field from Fourier coefficients in this crate's convention.
    ///
    /// The coefficients are assumed Hermitian; only the real part of the
    /// synthesized values is kept, and the stored spectrum is recomputed from
    /// those values so both representations stay consistent.
    pub fn from_spectral(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients for grid {grid}, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let values = fft::inverse_real(&coeffs, grid);
        Field::from_values(grid, values)
    }

    /// Samples `f` at every grid point. Coordinates are in `[0, 2π)^d`.
    pub fn from_fn(grid: TorusGrid, f: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Field::from_values(grid, values)
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::from_values_unchecked(grid, vec![0.0; grid.len()])
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        Self::from_values_unchecked(grid, vec![c; grid.len()])
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        Arc::try_unwrap(self.values).unwrap_or_else(|shared| (*shared).clone())
    }

    /// Fourier coefficients `f̂(k) = (2π/n)^d Σ_j f(x_j) e^{−ik·x_j}`.
    pub fn spectral(&self) -> &[Complex64] {
        self.spectral
            .get_or_init(|| fft::forward_real(&self.values, self.grid))
    }

    /// Whether the grid mean vanishes to roundoff (relative to the l2 size).
    pub fn mean_zero(&self) -> bool {
        self.mean_zero
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Value at grid point `flat`.
    pub fn at(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    /// `self + s · other`.
    pub fn axpy(&self, s: f64, other: &Field) -> Result<Field> {
        self.grid.ensure_same(&other.grid)?;
        let v = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a + s * b)
            .collect();
        Ok(Field::from_values_unchecked(self.grid, v))
    }

    pub fn scaled(&self, s: f64) -> Field {
        Field::from_values_unchecked(self.grid, self.values.iter().map(|v| s * v).collect())
    }

    /// Copy with the grid mean removed.
    pub fn without_mean(&self) -> Field {
        let m = self.mean();
        Field::from_values_unchecked(self.grid, self.values.iter().map(|v| v - m).collect())
    }

    /// Largest pointwise difference to `other`.
    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

fn mean_is_zero(values: &[f64]) -> bool {
    let n = values.len() as f64;
    let sum: f64 = values.iter().sum();
    let l2 = (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    (sum / n).abs() <= 1e-12 * l2.max(f64::MIN_POSITIVE)
        || values.iter().all(|&v| v == 0.0)
}
