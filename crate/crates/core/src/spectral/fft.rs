//! Thin multi-dimensional wrapper over `rustfft` with a process-wide plan cache.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftDirection, FftPlanner};

use super::TorusGrid;

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((n, inverse))
        .or_insert_with(|| {
            let dir = if inverse {
                FftDirection::Inverse
            } else {
                FftDirection::Forward
            };
            FftPlanner::new().plan_fft(n, dir)
        })
        .clone()
}

struct RealPlans {
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

fn real_plan(n: usize) -> Arc<RealPlans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<RealPlans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = RealFftPlanner::new();
            Arc::new(RealPlans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Unnormalized in-place DFT over every axis of `grid`.
pub(crate) fn fft_nd(data: &mut [Complex64], grid: TorusGrid, inverse: bool) {
    let n = grid.n();
    debug_assert_eq!(data.len(), grid.len());
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    // axis 0: contiguous rows
    fft.process_with_scratch(data, &mut scratch);

    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 1..grid.dim() {
        let stride = n.pow(axis as u32);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    data[start + j * stride] = *v;
                }
            }
        }
    }
}

/// Coefficients `f̂(k) = (2π/n)^d Σ_j f(x_j) e^{−ik·x_j}`.
pub(crate) fn forward_real(values: &[f64], grid: TorusGrid) -> Vec<Complex64> {
    if grid.dim() == 1 {
        return forward_real_1d(values, grid);
    }
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut data, grid, false);
    let w = grid.cell_volume();
    data.iter_mut().for_each(|c| *c *= w);
    data
}

/// Values `f(x_j) = (2π)^{−d} Σ_k f̂(k) e^{ik·x_j}` (real part).
pub(crate) fn inverse_real(coeffs: &[Complex64], grid: TorusGrid) -> Vec<f64> {
    if grid.dim() == 1 {
        return inverse_real_1d(coeffs, grid);
    }
    let mut data = coeffs.to_vec();
    fft_nd(&mut data, grid, true);
    let w = 1.0 / grid.volume();
    data.iter().map(|c| c.re * w).collect()
}

fn forward_real_1d(values: &[f64], grid: TorusGrid) -> Vec<Complex64> {
    let n = grid.n();
    let plans = real_plan(n);
    let mut input = values.to_vec();
    let mut half = plans.forward.make_output_vec();
    plans
        .forward
        .process(&mut input, &mut half)
        .expect("buffer sizes match the plan");
    let w = grid.cell_volume();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, c) in half.iter().enumerate() {
        out[k] = c * w;
        if k > 0 && k < n / 2 {
            out[n - k] = c.conj() * w;
        }
    }
    out
}

/// The real part of a general synthesis equals the synthesis of the
/// Hermitian part `(ĉ(k) + conj ĉ(−k))/2`, which the real transform takes.
fn inverse_real_1d(coeffs: &[Complex64], grid: TorusGrid) -> Vec<f64> {
    let n = grid.n();
    let plans = real_plan(n);
    let mut half: Vec<Complex64> = (0..=n / 2)
        .map(|k| 0.5 * (coeffs[k] + coeffs[(n - k) % n].conj()))
        .collect();
    half[0].im = 0.0;
    half[n / 2].im = 0.0;
    let mut out = plans.inverse.make_output_vec();
    plans
        .inverse
        .process(&mut half, &mut out)
        .expect("buffer sizes match the plan");
    let w = 1.0 / grid.volume();
    out.iter_mut().for_each(|v| *v *= w);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_path_matches_complex_path() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let values: Vec<f64> = (0..16).map(|i| ((i * 7 % 5) as f64).sin() + 0.3 * i as f64).collect();
        let fast = forward_real(&values, grid);
        let mut slow: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_nd(&mut slow, grid, false);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b * grid.cell_volume()).norm() < 1e-13);
        }
        // a non-Hermitian input keeps only the real part of its synthesis
        let mut coeffs = fast.clone();
        coeffs[3] += Complex64::new(0.7, -0.2);
        let fast = inverse_real(&coeffs, grid);
        let mut slow = coeffs.clone();
        fft_nd(&mut slow, grid, true);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b.re / grid.volume()).abs() < 1e-13);
        }
    }
}
