use num_complex::Complex64;

use super::{fft, Field, TorusGrid};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Fourier coefficients of `field` (see [`Field::spectral`] for the convention).
pub fn transform_forward(field: &Field) -> Result<Vec<Complex64>> {
    if let Some((index, &value)) = field
        .values()
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite())
    {
        return Err(Error::NonFinite { index, value });
    }
    Ok(field.spectral().to_vec())
}

/// Real grid values synthesized from coefficients.
pub fn transform_inverse(grid: TorusGrid, coeffs: &[Complex64]) -> Result<Field> {
    Field::from_spectral(grid, coeffs.to_vec())
}

/// Multiplies every coefficient by `symbol(k)` and synthesizes the result.
pub fn apply_symbol(field: &Field, symbol: impl Fn([i64; 3]) -> Complex64) -> Field {
    let grid = field.grid();
    let coeffs: Vec<Complex64> = field
        .spectral()
        .iter()
        .enumerate()
        .map(|(i, c)| c * symbol(grid.wavevector(i)))
        .collect();
    Field::from_values_unchecked(grid, fft::inverse_real(&coeffs, grid))
}

/// `∂^order / ∂x_axis^order` by Fourier multiplication with `(i k_axis)^order`.
/// The Nyquist plane is dropped for odd orders.
pub fn spectral_derivative(field: &Field, axis: usize, order: u32) -> Result<Field> {
    let grid = field.grid();
    if axis >= grid.dim() {
        return Err(Error::param(
            "axis",
            format!("{axis} out of range for dimension {}", grid.dim()),
        ));
    }
    if order == 0 {
        return Err(Error::param("order", "must be at least 1"));
    }
    let nyq = (grid.n() / 2) as i64;
    let odd = order % 2 == 1;
    Ok(apply_symbol(field, |k| {
        let ka = k[axis];
        if odd && ka == nyq {
            ZERO
        } else {
            Complex64::new(0.0, ka as f64).powu(order)
        }
    }))
}

/// All first partial derivatives.
pub fn gradient(field: &Field) -> Vec<Field> {
    (0..field.grid().dim())
        .map(|a| spectral_derivative(field, a, 1).expect("axis in range"))
        .collect()
}

/// Drops every mode that touches a Nyquist plane.
pub fn project_nyquist(field: &Field) -> Field {
    let grid = field.grid();
    let coeffs: Vec<Complex64> = field
        .spectral()
        .iter()
        .enumerate()
        .map(|(i, &c)| if grid.touches_nyquist(i) { ZERO } else { c })
        .collect();
    Field::from_values_unchecked(grid, fft::inverse_real(&coeffs, grid))
}

/// Index map between a grid and its 2× zero-padded refinement.
///
/// Coefficients are grid-independent in this crate's convention, so padding is
/// a plain copy and truncation a plain restriction. Modes on the coarse
/// Nyquist planes are never transferred.
#[derive(Clone, Debug)]
pub struct Padded {
    coarse: TorusGrid,
    fine: TorusGrid,
    map: Vec<Option<usize>>,
}

impl Padded {
    pub fn new(coarse: TorusGrid) -> Self {
        let fine = coarse.refined(2);
        let m = fine.n() as i64;
        let map = (0..coarse.len())
            .map(|i| {
                if coarse.touches_nyquist(i) {
                    return None;
                }
                let k = coarse.wavevector(i);
                let mut idx = [0usize; 3];
                for a in 0..coarse.dim() {
                    idx[a] = k[a].rem_euclid(m) as usize;
                }
                Some(fine.flat_index(idx))
            })
            .collect();
        Self { coarse, fine, map }
    }

    pub fn coarse(&self) -> TorusGrid {
        self.coarse
    }

    pub fn fine(&self) -> TorusGrid {
        self.fine
    }

    /// Coarse coefficients placed into a zeroed fine spectrum.
    pub fn pad(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.fine.len()];
        for (c, slot) in coeffs.iter().zip(&self.map) {
            if let Some(j) = slot {
                out[*j] = *c;
            }
        }
        out
    }

    /// Fine-grid values of the band-limited interpolant of `coeffs`.
    pub fn values(&self, coeffs: &[Complex64]) -> Vec<f64> {
        fft::inverse_real(&self.pad(coeffs), self.fine)
    }

    /// Values on the fine grid of `symbol(k)·ĉ(k)`.
    pub fn values_with(
        &self,
        coeffs: &[Complex64],
        symbol: impl Fn([i64; 3]) -> Complex64,
    ) -> Vec<f64> {
        let mut out = vec![ZERO; self.fine.len()];
        for (i, (c, slot)) in coeffs.iter().zip(&self.map).enumerate() {
            if let Some(j) = slot {
                out[*j] = c * symbol(self.coarse.wavevector(i));
            }
        }
        fft::inverse_real(&out, self.fine)
    }

    /// Coarse coefficients of fine-grid values, Nyquist planes zeroed.
    pub fn truncate(&self, fine_values: &[f64]) -> Vec<Complex64> {
        let spec = fft::forward_real(fine_values, self.fine);
        self.map
            .iter()
            .map(|slot| slot.map_or(ZERO, |j| spec[j]))
            .collect()
    }

    /// `∫ g dx` for fine-grid samples of `g`.
    pub fn integrate(&self, fine_values: &[f64]) -> f64 {
        fine_values.iter().sum::<f64>() * self.fine.cell_volume()
    }
}

/// Pointwise `a·b·c` computed alias-free on the 2× padded grid.
pub fn dealiased_cubic(a: &Field, b: &Field, c: &Field) -> Result<Field> {
    let grid = a.grid();
    grid.ensure_same(&b.grid())?;
    grid.ensure_same(&c.grid())?;
    let pad = Padded::new(grid);
    let fa = pad.values(a.spectral());
    let fb = pad.values(b.spectral());
    let fc = pad.values(c.spectral());
    let prod: Vec<f64> = fa
        .iter()
        .zip(&fb)
        .zip(&fc)
        .map(|((x, y), z)| x * y * z)
        .collect();
    let coeffs = pad.truncate(&prod);
    Ok(Field::from_values_unchecked(
        grid,
        fft::inverse_real(&coeffs, grid),
    ))
}

/// `max_x |∇h(x)|` over grid points using spectral derivatives.
pub fn grad_sup_norm(field: &Field) -> f64 {
    let grads = gradient(field);
    let n = field.grid().len();
    (0..n)
        .map(|i| grads.iter().map(|g| g.at(i) * g.at(i)).sum::<f64>())
        .fold(0.0, f64::max)
        .sqrt()
}
