//! Data whose slope touches 1 at the origin through `x − ηx⁵`, continued
//! smoothly and periodically with slope strictly inside `(−1, 1)`.
//!
//! The slope profile on `[−π, π]` is
//!
//! ```text
//! s(x) = χ(x)·(a₀ − 5ηx⁴) − m·(1 − χ(x))·κ(x)
//! ```
//!
//! where `χ` is a plateau of half-width `c₁` around the origin and `κ` a wide
//! plateau that switches the negative branch off near `±π`. The constant
//! `m > 0` is fixed by `∫₀^π s = 0`, so the antiderivative `w₀` is odd,
//! periodic and mean-free. The perturbation subtracts `δ·(a·x)·φ(|x|)` with a
//! plateau `φ` that is identically one wherever `|∇w₀|` can approach 1.

use crate::spectral::{Field, TorusGrid};
use crate::{Error, Result};

use super::window::{cumulative, gl_integrate, plateau, plateau_prime};

const SIGMA_INNER: f64 = 0.08;
const SIGMA_OUTER: f64 = 0.1;
const SIGMA_CUT: f64 = 0.1;
const OUTER_GAP: f64 = 0.5;
/// Required slope margin away from the origin.
pub const BETA: f64 = 0.05;

#[derive(Clone, Copy, Debug)]
struct SlopeProfile {
    a0: f64,
    eta: f64,
    c_inner: f64,
    c_outer: f64,
    m: f64,
}

impl SlopeProfile {
    fn new(a0: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::param("eta", format!("{eta} must be positive")));
        }
        let c_inner = (eta + 0.4).max(0.5);
        if 5.0 * eta * c_inner.powi(4) >= 0.5 * a0 {
            return Err(Error::Construction(format!(
                "eta = {eta} is too large: the quintic term dominates the plateau"
            )));
        }
        let mut p = SlopeProfile {
            a0,
            eta,
            c_inner,
            c_outer: std::f64::consts::PI - OUTER_GAP,
            m: 0.0,
        };
        let pi = std::f64::consts::PI;
        let pos = gl_integrate(&|x| p.inner(x) * (p.a0 - 5.0 * eta * x.powi(4)), 0.0, pi, 0.01);
        let neg = gl_integrate(&|x| (1.0 - p.inner(x)) * p.outer(x), 0.0, pi, 0.01);
        p.m = pos / neg;
        Ok(p)
    }

    fn inner(&self, x: f64) -> f64 {
        plateau(x, self.c_inner, SIGMA_INNER)
    }

    fn outer(&self, x: f64) -> f64 {
        plateau(x, self.c_outer, SIGMA_OUTER)
    }

    fn slope(&self, x: f64) -> f64 {
        let chi = self.inner(x);
        chi * (self.a0 - 5.0 * self.eta * x.powi(4)) - self.m * (1.0 - chi) * self.outer(x)
    }

    /// Radius past which the inner plateau has fully switched off.
    fn settled(&self) -> f64 {
        self.c_inner + 4.5 * SIGMA_INNER
    }

    /// Odd antiderivative sampled at the centered per-axis coordinates of a
    /// grid with `n` points; the value at `π` is exactly zero.
    fn sample_axis(&self, grid: TorusGrid) -> Vec<f64> {
        let n = grid.n();
        let h = grid.spacing();
        let xs: Vec<f64> = (1..=n / 2).map(|k| k as f64 * h).collect();
        let w = cumulative(&|x| self.slope(x), &xs, 0.01);
        (0..n)
            .map(|i| {
                let k = grid.wavenumber(i);
                match k {
                    0 => 0.0,
                    k if k as usize == n / 2 => 0.0,
                    k if k > 0 => w[k as usize - 1],
                    k => -w[(-k) as usize - 1],
                }
            })
            .collect()
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::param("delta", format!("{delta} not in [0, 0.5)")));
    }
    Ok(())
}

/// Allowed slope bound for the perturbed data.
fn slope_bound(delta: f64) -> f64 {
    if delta > 0.0 {
        1.0 - delta.min(0.5 * BETA)
    } else {
        1.0
    }
}

/// One-dimensional data `w₀ − δ·x·φ(x)` with `w₀(x) = x − ηx⁵` near the origin.
pub fn make_thm3(eta: f64, delta: f64, grid: TorusGrid) -> Result<Field> {
    check_delta(delta)?;
    if grid.dim() != 1 {
        return Err(Error::param("grid", "one-dimensional data needs a 1-D grid"));
    }
    let p = SlopeProfile::new(1.0, eta)?;
    let c_cut = p.c_inner + 0.7;
    let vprime = |x: f64| {
        p.slope(x) - delta * (plateau(x, c_cut, SIGMA_CUT) + x * plateau_prime(x, c_cut, SIGMA_CUT))
    };
    // certify on a dense sample of [0, π]
    let samples = 20_000;
    let mut off_window = 0.0f64;
    let mut overall = 0.0f64;
    for i in 0..=samples {
        let x = std::f64::consts::PI * i as f64 / samples as f64;
        if x >= eta {
            off_window = off_window.max(p.slope(x).abs());
        }
        overall = overall.max(vprime(x).abs());
    }
    if off_window >= 1.0 {
        return Err(Error::Construction(format!(
            "continuation slope reaches {off_window} off the window"
        )));
    }
    let bound = slope_bound(delta);
    if overall > bound + 1e-12 {
        return Err(Error::Construction(format!(
            "perturbed slope {overall} exceeds {bound}; delta too large"
        )));
    }
    let base = p.sample_axis(grid);
    let values = (0..grid.len())
        .map(|i| {
            let x = grid.centered_point(i)[0];
            base[i] - delta * x * plateau(x, c_cut, SIGMA_CUT)
        })
        .collect();
    Field::from_values(grid, values)
}

/// Multidimensional data `Σⱼ u(xⱼ) − δ(a·x)φ(|x|)` with `a = d^{−1/2}(1,…,1)`.
pub fn make_cor4(eta: f64, delta: f64, grid: TorusGrid) -> Result<Field> {
    check_delta(delta)?;
    let d = grid.dim();
    if !(2..=3).contains(&d) {
        return Err(Error::param("grid", "multidimensional data needs d = 2 or 3"));
    }
    let a0 = 1.0 / (d as f64).sqrt();
    let p = SlopeProfile::new(a0, eta)?;
    let c_cut = (d as f64).sqrt() * p.settled() + 0.35;
    if c_cut + 5.0 * SIGMA_CUT >= p.c_outer {
        return Err(Error::Construction("cutoff plateau does not fit the torus".into()));
    }
    let axis = p.sample_axis(grid);
    let n = grid.n();
    let mut values = Vec::with_capacity(grid.len());
    let mut sup_grad = 0.0f64;
    for i in 0..grid.len() {
        let idx = grid.axis_indices(i);
        let x = grid.centered_point(i);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let ax: f64 = x.iter().take(d).sum::<f64>() * a0;
        let phi = plateau(r, c_cut, SIGMA_CUT);
        let w: f64 = (0..d).map(|j| axis[idx[j] % n]).sum();
        values.push(w - delta * ax * phi);
        // analytic gradient for the certificate
        let dphi = plateau_prime(r, c_cut, SIGMA_CUT);
        let g2: f64 = (0..d)
            .map(|j| {
                let radial = if r > 0.0 { dphi * x[j] / r } else { 0.0 };
                let g = p.slope(x[j].abs()) - delta * (a0 * phi + ax * radial);
                g * g
            })
            .sum();
        sup_grad = sup_grad.max(g2);
    }
    let sup_grad = sup_grad.sqrt();
    let bound = slope_bound(delta);
    if sup_grad > bound + 1e-12 {
        return Err(Error::Construction(format!(
            "gradient {sup_grad} exceeds {bound}; delta or eta too large"
        )));
    }
    Field::from_values(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grad_sup_norm;

    #[test]
    fn profile_balances() {
        let p = SlopeProfile::new(1.0, 0.1).unwrap();
        let pi = std::f64::consts::PI;
        assert!(gl_integrate(&|x| p.slope(x), 0.0, pi, 0.01).abs() < 1e-13);
        assert!(p.m > 0.1 && p.m < 0.5);
        assert!((p.slope(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thm3_slopes() {
        let g = TorusGrid::new(1, 512).unwrap();
        let h = make_thm3(0.1, 0.0, g).unwrap();
        assert!((grad_sup_norm(&h) - 1.0).abs() < 1e-10);
        assert!(h.mean().abs() < 1e-12);
        let h = make_thm3(0.1, 0.01, g).unwrap();
        assert!((grad_sup_norm(&h) - 0.99).abs() < 1e-10);
    }

    #[test]
    fn eta_too_large() {
        let g = TorusGrid::new(1, 64).unwrap();
        assert!(make_thm3(0.6, 0.0, g).is_err());
    }
}
