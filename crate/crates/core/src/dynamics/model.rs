use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::semigroup::symbol_power;
use crate::spectral::{grad_sup_norm, Field, Padded, TorusGrid};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Equation variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `∂ₜh = ∇·((|∇h|² − 1)∇h) − νΔ²h`.
    SlopeSelection,
    /// `∂ₜh = −∇·(∇h/(1 + |∇h|²)) − νΔ²h`.
    NoSlopeSelection,
    /// Slope-selection nonlinearity with dissipation `−ν|∇|^γ h`, `γ > 2`.
    Fractional,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::SlopeSelection => "slope_selection",
            Variant::NoSlopeSelection => "no_slope_selection",
            Variant::Fractional => "fractional",
        })
    }
}

/// Equation variant together with its dissipation strength and order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: Variant,
    pub nu: f64,
    pub gamma: f64,
}

impl ModelSpec {
    pub fn new(variant: Variant, nu: f64, gamma: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::param("nu", format!("{nu} must be positive")));
        }
        match variant {
            Variant::Fractional if !(gamma > 2.0) || !gamma.is_finite() => {
                return Err(Error::param(
                    "gamma",
                    format!("fractional dissipation needs gamma > 2, got {gamma}"),
                ))
            }
            Variant::SlopeSelection | Variant::NoSlopeSelection if gamma != 4.0 => {
                return Err(Error::param(
                    "gamma",
                    format!("{variant} uses gamma = 4, got {gamma}"),
                ))
            }
            _ => {}
        }
        Ok(Self { variant, nu, gamma })
    }

    /// Re-checks a spec that was built field by field (e.g. deserialized).
    pub fn validated(&self) -> Result<Self> {
        Self::new(self.variant, self.nu, self.gamma)
    }

    pub fn slope_selection(nu: f64) -> Result<Self> {
        Self::new(Variant::SlopeSelection, nu, 4.0)
    }

    pub fn no_slope_selection(nu: f64) -> Result<Self> {
        Self::new(Variant::NoSlopeSelection, nu, 4.0)
    }

    pub fn fractional(nu: f64, gamma: f64) -> Result<Self> {
        Self::new(Variant::Fractional, nu, gamma)
    }
}

/// Energy split of one state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// Slope term, `¼∫(|∇h|² − 1)²` (or `−½∫ln(1 + |∇h|²)` without slope
    /// selection).
    pub dirichlet: f64,
    /// Dissipation term, `(ν/2)∫||∇|^{γ/2}h|²`.
    pub biharmonic: f64,
    pub total: f64,
    /// `‖∂ₜh‖²` in the flow's metric.
    pub dissipation: f64,
}

/// A semilinear evolution `∂ₜû = L(k)û + N̂(û)` with `L ≤ 0`.
pub trait Semilinear {
    /// Linear symbol `L(k)`.
    fn linear_symbol(&self, k: [i64; 3]) -> f64;

    /// Nonlinear part in spectral form. Modes on Nyquist planes must be zero.
    fn nonlinear(&self, ws: &Workspace, coeffs: &[Complex64]) -> Vec<Complex64>;

    /// Energy split of the state, without the dissipation entry.
    fn energy_terms(&self, ws: &Workspace, coeffs: &[Complex64]) -> (f64, f64);

    /// Squared norm of a time derivative in the metric of the gradient flow.
    fn metric_norm_sq(&self, ws: &Workspace, dt_coeffs: &[Complex64]) -> f64 {
        l2_sq(ws.grid(), dt_coeffs)
    }

    /// Slope diagnostic recorded along trajectories, `‖∇h‖_∞` by default.
    fn slope_sup(&self, field: &Field) -> f64 {
        grad_sup_norm(field)
    }
}

/// Per-grid precomputation shared by all evaluations of one equation.
#[derive(Clone, Debug)]
pub struct Workspace {
    pad: Padded,
    linear: Vec<f64>,
}

impl Workspace {
    pub fn new(grid: TorusGrid, eq: &impl Semilinear) -> Self {
        let linear = (0..grid.len())
            .map(|i| eq.linear_symbol(grid.wavevector(i)))
            .collect();
        Self {
            pad: Padded::new(grid),
            linear,
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.pad.coarse()
    }

    pub fn padded(&self) -> &Padded {
        &self.pad
    }

    /// `L(k)` per mode in storage order.
    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    /// Fine-grid gradient components of a coarse state.
    fn gradient_fine(&self, coeffs: &[Complex64]) -> Vec<Vec<f64>> {
        (0..self.grid().dim())
            .map(|a| {
                self.pad
                    .values_with(coeffs, |k| Complex64::new(0.0, k[a] as f64))
            })
            .collect()
    }

    /// `Σ_a i k_a · P[flux_a]` where `P` is the truncation of fine-grid values.
    fn divergence(&self, flux: &[Vec<f64>]) -> Vec<Complex64> {
        let grid = self.grid();
        let mut out = vec![ZERO; grid.len()];
        for (a, f) in flux.iter().enumerate() {
            let spec = self.pad.truncate(f);
            for (i, (o, s)) in out.iter_mut().zip(spec).enumerate() {
                *o += Complex64::new(0.0, grid.wavevector(i)[a] as f64) * s;
            }
        }
        out
    }
}

/// `(2π)^{−d} Σ |ĉ(k)|²`, the squared `L²` norm by Parseval.
pub(crate) fn l2_sq(grid: TorusGrid, coeffs: &[Complex64]) -> f64 {
    coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / grid.volume()
}

/// `(ν/2)(2π)^{−d} Σ |k|^γ |ĉ(k)|²`.
fn dissipative_energy(grid: TorusGrid, coeffs: &[Complex64], nu: f64, gamma: f64) -> f64 {
    let s: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| symbol_power(grid.wavevector(i), gamma) * c.norm_sqr())
        .sum();
    0.5 * nu * s / grid.volume()
}

fn grad_sq(grads: &[Vec<f64>]) -> Vec<f64> {
    let mut g2 = vec![0.0; grads[0].len()];
    for g in grads {
        for (s, v) in g2.iter_mut().zip(g) {
            *s += v * v;
        }
    }
    g2
}

impl Semilinear for ModelSpec {
    fn linear_symbol(&self, k: [i64; 3]) -> f64 {
        -self.nu * symbol_power(k, self.gamma)
    }

    fn nonlinear(&self, ws: &Workspace, coeffs: &[Complex64]) -> Vec<Complex64> {
        let grads = ws.gradient_fine(coeffs);
        let g2 = grad_sq(&grads);
        let factor: Vec<f64> = match self.variant {
            Variant::SlopeSelection | Variant::Fractional => g2.iter().map(|s| s - 1.0).collect(),
            Variant::NoSlopeSelection => g2.iter().map(|s| -1.0 / (1.0 + s)).collect(),
        };
        let flux: Vec<Vec<f64>> = grads
            .iter()
            .map(|g| g.iter().zip(&factor).map(|(v, f)| v * f).collect())
            .collect();
        ws.divergence(&flux)
    }

    fn energy_terms(&self, ws: &Workspace, coeffs: &[Complex64]) -> (f64, f64) {
        let g2 = grad_sq(&ws.gradient_fine(coeffs));
        let density: Vec<f64> = match self.variant {
            Variant::SlopeSelection | Variant::Fractional => {
                g2.iter().map(|s| 0.25 * (s - 1.0) * (s - 1.0)).collect()
            }
            Variant::NoSlopeSelection => g2.iter().map(|s| -0.5 * s.ln_1p()).collect(),
        };
        let dirichlet = ws.pad.integrate(&density);
        let bi = dissipative_energy(ws.grid(), coeffs, self.nu, self.gamma);
        (dirichlet, bi)
    }
}

/// Only the linear part of another equation; its flow is the exact semigroup.
#[derive(Clone, Copy, Debug)]
pub struct LinearPart<E>(pub E);

impl<E: Semilinear> Semilinear for LinearPart<E> {
    fn linear_symbol(&self, k: [i64; 3]) -> f64 {
        self.0.linear_symbol(k)
    }

    fn nonlinear(&self, ws: &Workspace, _coeffs: &[Complex64]) -> Vec<Complex64> {
        vec![ZERO; ws.grid().len()]
    }

    fn energy_terms(&self, ws: &Workspace, coeffs: &[Complex64]) -> (f64, f64) {
        self.0.energy_terms(ws, coeffs)
    }

    fn metric_norm_sq(&self, ws: &Workspace, dt_coeffs: &[Complex64]) -> f64 {
        self.0.metric_norm_sq(ws, dt_coeffs)
    }

    fn slope_sup(&self, field: &Field) -> f64 {
        self.0.slope_sup(field)
    }
}

/// `∂ₜu = Δ(u³ − u) − νΔ²u`, the equation satisfied by `u = ∂ₓh` in one
/// dimension. Gradient flow in `H⁻¹` of `∫¼(u² − 1)² + (ν/2)|∇u|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CahnHilliard {
    pub nu: f64,
}

impl Semilinear for CahnHilliard {
    fn linear_symbol(&self, k: [i64; 3]) -> f64 {
        -self.nu * symbol_power(k, 4.0)
    }

    fn nonlinear(&self, ws: &Workspace, coeffs: &[Complex64]) -> Vec<Complex64> {
        let grid = ws.grid();
        let u = ws.pad.values(coeffs);
        let w: Vec<f64> = u.iter().map(|v| v * v * v - v).collect();
        let spec = ws.pad.truncate(&w);
        spec.iter()
            .enumerate()
            .map(|(i, s)| -grid.k_squared(i) * s)
            .collect()
    }

    fn energy_terms(&self, ws: &Workspace, coeffs: &[Complex64]) -> (f64, f64) {
        let u = ws.pad.values(coeffs);
        let density: Vec<f64> = u
            .iter()
            .map(|v| 0.25 * (v * v - 1.0) * (v * v - 1.0))
            .collect();
        let bulk = ws.pad.integrate(&density);
        let grad = dissipative_energy(ws.grid(), coeffs, self.nu, 2.0);
        (bulk, grad)
    }

    fn metric_norm_sq(&self, ws: &Workspace, dt_coeffs: &[Complex64]) -> f64 {
        let grid = ws.grid();
        dt_coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| grid.k_squared(*i) > 0.0)
            .map(|(i, c)| c.norm_sqr() / grid.k_squared(i))
            .sum::<f64>()
            / grid.volume()
    }

    /// The state already is a slope, so its own sup norm is recorded.
    fn slope_sup(&self, field: &Field) -> f64 {
        crate::spectral::norms::sup(field)
    }
}

/// `L(k)ĉ + N̂(ĉ)` in spectral form.
pub fn rhs_spectral(eq: &impl Semilinear, ws: &Workspace, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut n = eq.nonlinear(ws, coeffs);
    for ((r, l), c) in n.iter_mut().zip(ws.linear()).zip(coeffs) {
        *r += l * c;
    }
    n
}

/// Energy split including the dissipation rate.
pub fn energy_spectral(
    eq: &impl Semilinear,
    ws: &Workspace,
    coeffs: &[Complex64],
) -> EnergyBreakdown {
    let (dirichlet, biharmonic) = eq.energy_terms(ws, coeffs);
    let rate = rhs_spectral(eq, ws, coeffs);
    EnergyBreakdown {
        dirichlet,
        biharmonic,
        total: dirichlet + biharmonic,
        dissipation: eq.metric_norm_sq(ws, &rate),
    }
}

/// Full right-hand side of the evolution for `field`.
pub fn rhs(field: &Field, model: &ModelSpec) -> Field {
    let ws = Workspace::new(field.grid(), model);
    let r = rhs_spectral(model, &ws, field.spectral());
    Field::from_spectral(field.grid(), r).expect("finite rhs of finite field")
}

/// Energy split of `field` under `model`.
pub fn energy(field: &Field, model: &ModelSpec) -> EnergyBreakdown {
    let ws = Workspace::new(field.grid(), model);
    energy_spectral(model, &ws, field.spectral())
}
