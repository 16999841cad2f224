use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform discretization of the torus `𝕋^d = ℝ^d / 2πℤ^d` with the same
/// number of points on every axis.
///
/// Grid point `x_j = j · 2π/n` along each axis, `j = 0..n`. Flattened arrays
/// are stored with axis 0 varying fastest: `index = i₀ + n·i₁ + n²·i₂`.
/// Wavenumbers follow the usual FFT ordering, `k ∈ {−n/2+1, …, n/2}`, with the
/// Nyquist mode stored as `+n/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and at least 8, got {n}"
            )));
        }
        Ok(Self { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Quadrature weight of one grid cell, `(2π/n)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Volume of the torus, `(2π)^d`.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32)
    }

    /// Signed wavenumber of per-axis index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Per-axis integer wavenumbers in storage order.
    pub fn wavenumbers(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Per-axis indices of a flat index. Unused axes are zero.
    #[inline]
    pub fn axis_indices(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        let mut out = [0; 3];
        let mut rest = flat;
        for slot in out.iter_mut().take(self.dim) {
            *slot = rest % n;
            rest /= n;
        }
        out
    }

    /// Flat index from per-axis indices.
    #[inline]
    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        let n = self.n;
        idx[0] + n * (idx[1] + n * idx[2])
    }

    /// Coordinates of grid point `flat` in `[0, 2π)^d`.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let h = self.spacing();
        let idx = self.axis_indices(flat);
        [idx[0] as f64 * h, idx[1] as f64 * h, idx[2] as f64 * h]
    }

    /// Coordinates of grid point `flat` folded into `(−π, π]^d`.
    pub fn centered_point(&self, flat: usize) -> [f64; 3] {
        let h = self.spacing();
        let idx = self.axis_indices(flat);
        let mut out = [0.0; 3];
        for a in 0..self.dim {
            out[a] = self.wavenumber(idx[a]) as f64 * h;
        }
        out
    }

    /// Wavevector of flat spectral index `flat`.
    pub fn wavevector(&self, flat: usize) -> [i64; 3] {
        let idx = self.axis_indices(flat);
        let mut k = [0; 3];
        for a in 0..self.dim {
            k[a] = self.wavenumber(idx[a]);
        }
        k
    }

    /// `|k|²` of flat spectral index `flat`.
    pub fn k_squared(&self, flat: usize) -> f64 {
        self.wavevector(flat)
            .iter()
            .map(|&k| (k * k) as f64)
            .sum()
    }

    /// Whether any axis of the flat spectral index sits on the Nyquist mode.
    pub fn touches_nyquist(&self, flat: usize) -> bool {
        let idx = self.axis_indices(flat);
        (0..self.dim).any(|a| self.is_nyquist(idx[a]))
    }

    /// Grid with `factor` times as many points per axis.
    pub fn refined(&self, factor: usize) -> TorusGrid {
        TorusGrid {
            dim: self.dim,
            n: self.n * factor,
        }
    }

    pub(crate) fn ensure_same(&self, other: &TorusGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.n, self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(TorusGrid::new(0, 16).is_err());
        assert!(TorusGrid::new(4, 16).is_err());
        assert!(TorusGrid::new(1, 6).is_err());
        assert!(TorusGrid::new(1, 15).is_err());
        assert!(TorusGrid::new(3, 8).is_ok());
    }

    #[test]
    fn lattice_invariants() {
        for dim in 1..=3 {
            let g = TorusGrid::new(dim, 16).unwrap();
            assert_eq!(g.len(), 16usize.pow(dim as u32));
            assert!((g.spacing() * 16.0 - 2.0 * PI).abs() < 1e-15);
            let ks = g.wavenumbers();
            assert_eq!(ks[0], 0);
            assert_eq!(*ks.iter().max().unwrap(), 8);
            assert_eq!(*ks.iter().min().unwrap(), -7);
        }
    }

    #[test]
    fn flat_index_roundtrip() {
        let g = TorusGrid::new(3, 8).unwrap();
        for flat in 0..g.len() {
            assert_eq!(g.flat_index(g.axis_indices(flat)), flat);
        }
        // axis 0 fastest
        assert_eq!(g.axis_indices(1), [1, 0, 0]);
        assert_eq!(g.axis_indices(8), [0, 1, 0]);
    }
}
