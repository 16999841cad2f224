//! Seeded band-limited random data.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectral::{grad_sup_norm, Field, TorusGrid};
use crate::{Error, Result};

/// Real part of a random trigonometric polynomial with `0 < |k|_∞ ≤ bandwidth`
/// and standard normal coefficients, rescaled so `sup|∇h| = amplitude`.
pub fn make_random_smooth(
    seed: u64,
    bandwidth: usize,
    amplitude: f64,
    grid: TorusGrid,
) -> Result<Field> {
    if bandwidth == 0 || 2 * bandwidth >= grid.n() {
        return Err(Error::param(
            "bandwidth",
            format!("{bandwidth} must lie in [1, {})", grid.n() / 2),
        ));
    }
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(Error::param("amplitude", format!("{amplitude} must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = bandwidth as i64;
    let coeffs: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let k = grid.wavevector(i);
            let kmax = k.iter().map(|c| c.abs()).max().unwrap_or(0);
            // draw for every mode so the stream does not depend on the band
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if kmax == 0 || kmax > b {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(re, im)
            }
        })
        .collect();
    let raw = Field::from_spectral(grid, coeffs)?;
    let g = grad_sup_norm(&raw);
    if !(g > 0.0) {
        return Err(Error::Construction("random field has zero gradient".into()));
    }
    Ok(raw.scaled(amplitude / g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_scaled() {
        let g = TorusGrid::new(2, 32).unwrap();
        let a = make_random_smooth(7, 4, 0.8, g).unwrap();
        let b = make_random_smooth(7, 4, 0.8, g).unwrap();
        assert_eq!(a.values(), b.values());
        assert!((grad_sup_norm(&a) - 0.8).abs() < 1e-12);
        assert!(a.mean().abs() < 1e-12);
        let c = make_random_smooth(8, 4, 0.8, g).unwrap();
        assert_ne!(a.values(), c.values());
    }
}
