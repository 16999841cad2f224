//! Norms on the torus.
//!
//! Lebesgue norms use the grid quadrature `(2π/n)^d Σ_j`. Sobolev norms are
//! lattice sums with the Parseval weight `(2π)^{−d}`, so that
//! `hdot_s(f, 0) == l2(f)` for every field.

use serde::{Deserialize, Serialize};

use super::Field;

pub fn l2(f: &Field) -> f64 {
    (f.values().iter().map(|v| v * v).sum::<f64>() * f.grid().cell_volume()).sqrt()
}

pub fn lp(f: &Field, p: f64) -> f64 {
    if p.is_infinite() {
        return sup(f);
    }
    (f.values().iter().map(|v| v.abs().powf(p)).sum::<f64>() * f.grid().cell_volume())
        .powf(1.0 / p)
}

pub fn sup(f: &Field) -> f64 {
    f.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn sobolev(f: &Field, weight: impl Fn(f64) -> f64) -> f64 {
    let grid = f.grid();
    let sum: f64 = f
        .spectral()
        .iter()
        .enumerate()
        .map(|(i, c)| weight(grid.k_squared(i)) * c.norm_sqr())
        .sum();
    (sum / grid.volume()).sqrt()
}

/// Inhomogeneous `H^s` norm with weight `1 + |k|^{2s}`.
pub fn h_s(f: &Field, s: f64) -> f64 {
    sobolev(f, |k2| 1.0 + k2.powf(s))
}

/// Homogeneous `Ḣ^s` seminorm with weight `|k|^{2s}` (zero mode excluded for `s > 0`).
pub fn hdot_s(f: &Field, s: f64) -> f64 {
    if s == 0.0 {
        return sobolev(f, |_| 1.0);
    }
    sobolev(f, |k2| if k2 == 0.0 { 0.0 } else { k2.powf(s) })
}

/// Bundle of the common norms of one field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub lp: f64,
    pub p: f64,
    pub sup: f64,
    pub h_s: f64,
    pub hdot_s: f64,
    pub s: f64,
}

pub fn norms(f: &Field, p: f64, s: f64) -> NormReport {
    NormReport {
        l2: l2(f),
        lp: lp(f, p),
        p,
        sup: sup(f),
        h_s: h_s(f, s),
        hdot_s: hdot_s(f, s),
        s,
    }
}
