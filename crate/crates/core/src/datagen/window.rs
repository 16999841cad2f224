//! Smooth plateau functions and a Gauss–Legendre cumulative integrator.

use std::sync::OnceLock;

use crate::semigroup::quadrature::gauss_legendre;

/// `½[erf((x + c)/σ) − erf((x − c)/σ)]`: ≈ 1 on `|x| < c`, ≈ 0 beyond, with
/// transitions of width `σ`.
#[inline]
pub fn plateau(x: f64, c: f64, sigma: f64) -> f64 {
    0.5 * (libm::erf((x + c) / sigma) - libm::erf((x - c) / sigma))
}

/// Derivative of [`plateau`] in `x`.
#[inline]
pub fn plateau_prime(x: f64, c: f64, sigma: f64) -> f64 {
    let g = |u: f64| (-(u * u)).exp();
    (g((x + c) / sigma) - g((x - c) / sigma)) / (sigma * std::f64::consts::PI.sqrt())
}

fn rule16() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(16))
}

/// `∫_a^b f` by 16-point Gauss–Legendre on panels no wider than `h`.
pub fn gl_integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, h: f64) -> f64 {
    let (x, w) = rule16();
    let panels = (((b - a).abs() / h).ceil() as usize).max(1);
    let step = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = a + step * p as f64;
        let mid = lo + 0.5 * step;
        let half = 0.5 * step;
        sum += x
            .iter()
            .zip(w)
            .map(|(xi, wi)| wi * f(mid + half * xi))
            .sum::<f64>()
            * half;
    }
    sum
}

/// Values of `∫₀^{x_i} f` at increasing non-negative abscissae `xs`.
pub fn cumulative(f: &impl Fn(f64) -> f64, xs: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &x in xs {
        acc += gl_integrate(f, prev, x, h);
        prev = x;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_shape() {
        assert!((plateau(0.0, 1.0, 0.05) - 1.0).abs() < 1e-15);
        assert!(plateau(2.0, 1.0, 0.05) < 1e-15);
        assert!((plateau(1.0, 1.0, 0.05) - 0.5).abs() < 1e-12);
        let h = 1e-6;
        let fd = (plateau(0.97 + h, 1.0, 0.05) - plateau(0.97 - h, 1.0, 0.05)) / (2.0 * h);
        assert!((fd - plateau_prime(0.97, 1.0, 0.05)).abs() < 1e-6);
    }

    #[test]
    fn cumulative_matches_closed_form() {
        let xs = [0.3, 1.0, 2.5];
        let c = cumulative(&|x: f64| x.cos(), &xs, 0.1);
        for (x, v) in xs.iter().zip(c) {
            assert!((v - x.sin()).abs() < 1e-14);
        }
    }
}
