//! Fourier-multiplier propagators `e^{−νt|∇|^γ}` and the real-line kernel
//! constants.

pub mod kernel;
pub mod quadrature;

use num_complex::Complex64;

use crate::fit::{loglog_fit, PowerFit};
use crate::spectral::{apply_symbol, norms, spectral_derivative, Field, TorusGrid};
use crate::{Error, Result};

pub use kernel::{
    constant_record, kernel_derivative, kernel_evaluate, kernel_evaluate_estimate,
    kernel_l1_constant, kernel_second_derivative_l1, ConstantRecord, KernelTable, L1Estimate,
    Profile,
};

/// `|k|^γ` for a lattice vector.
#[inline]
pub fn symbol_power(k: [i64; 3], gamma: f64) -> f64 {
    let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
    if gamma == 4.0 {
        k2 * k2
    } else if gamma == 2.0 {
        k2
    } else {
        k2.powf(0.5 * gamma)
    }
}

/// The dissipative semigroup `e^{−νt|∇|^γ}` on one grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propagator {
    grid: TorusGrid,
    nu: f64,
    gamma: f64,
}

impl Propagator {
    pub fn new(grid: TorusGrid, nu: f64, gamma: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::param("nu", format!("{nu} must be positive")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::param("gamma", format!("{gamma} must be positive")));
        }
        Ok(Self { grid, nu, gamma })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// Per-mode multipliers `e^{−νt|k|^γ}` in spectral storage order.
    pub fn multiplier(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t)?;
        Ok((0..self.grid.len())
            .map(|i| (-self.nu * t * symbol_power(self.grid.wavevector(i), self.gamma)).exp())
            .collect())
    }

    pub fn apply(&self, field: &Field, t: f64) -> Result<Field> {
        self.grid.ensure_same(&field.grid())?;
        check_time(t)?;
        if t == 0.0 {
            return Ok(field.clone());
        }
        let (nu, gamma) = (self.nu, self.gamma);
        Ok(apply_symbol(field, |k| {
            Complex64::new((-nu * t * symbol_power(k, gamma)).exp(), 0.0)
        }))
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::param("t", format!("{t} must be finite and non-negative")));
    }
    Ok(())
}

/// `e^{−νt|∇|^γ} field`.
pub fn apply_propagator(field: &Field, nu: f64, gamma: f64, t: f64) -> Result<Field> {
    Propagator::new(field.grid(), nu, gamma)?.apply(field, t)
}

/// `‖∂ₓ^m e^{−νt|∇|^γ} f‖_∞ / ‖f‖_∞` along axis 0 for each `t`.
pub fn smoothing_ratios(f: &Field, m: u32, nu: f64, gamma: f64, ts: &[f64]) -> Result<Vec<f64>> {
    let prop = Propagator::new(f.grid(), nu, gamma)?;
    let base = norms::sup(f);
    if base == 0.0 {
        return Err(Error::param("f", "zero field has no smoothing ratio"));
    }
    ts.iter()
        .map(|&t| {
            let g = prop.apply(f, t)?;
            Ok(norms::sup(&spectral_derivative(&g, 0, m)?) / base)
        })
        .collect()
}

/// Log-log fit of [`smoothing_ratios`] against `t`.
pub fn smoothing_exponent(
    f: &Field,
    m: u32,
    nu: f64,
    gamma: f64,
    ts: &[f64],
) -> Result<PowerFit> {
    let ratios = smoothing_ratios(f, m, nu, gamma, ts)?;
    loglog_fit(ts, &ratios).ok_or_else(|| Error::param("ts", "need two positive times"))
}

/// `L¹(𝕋)` norm of the periodic heat-type kernel `e^{−t|∇|^γ}δ`, sampled on
/// `grid` and integrated by the grid rule. For small `t` this approaches the
/// real-line constant `C_{d,γ}`.
pub fn torus_kernel_l1(grid: TorusGrid, gamma: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    let coeffs = (0..grid.len())
        .map(|i| Complex64::new((-t * symbol_power(grid.wavevector(i), gamma)).exp(), 0.0))
        .collect();
    let field = Field::from_spectral(grid, coeffs)?;
    Ok(norms::lp(&field, 1.0))
}
