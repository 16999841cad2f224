//! Quadrature rules: adaptive Gauss–Kronrod (7/15), tanh-sinh for complex
//! integrands, and Gauss–Legendre nodes.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Value with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod panel with the embedded 7-point Gauss difference as
/// error estimate.
pub fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Estimate<f64> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Estimate {
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// Globally adaptive Gauss–Kronrod on `[a, b]` to absolute tolerance `tol`.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Estimate<f64>> {
    const MAX_PANELS: usize = 4000;
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let first = gk15(&mut f, a, b);
    let mut panels = vec![(a, b, first)];
    let mut total_err = first.error;
    while total_err > tol {
        if panels.len() >= MAX_PANELS {
            return Err(Error::Quadrature {
                achieved: total_err,
                requested: tol,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .expect("non-empty");
        let (lo, hi, est) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Quadrature {
                achieved: total_err,
                requested: tol,
            });
        }
        let left = gk15(&mut f, lo, mid);
        let right = gk15(&mut f, mid, hi);
        total_err += left.error + right.error - est.error;
        panels.push((lo, mid, left));
        panels.push((mid, hi, right));
    }
    let value = panels.iter().map(|p| p.2.value).sum();
    let error = panels.iter().map(|p| p.2.error).sum();
    Ok(Estimate { value, error })
}

/// [`integrate`] over consecutive panels of width at most `width`; keeps
/// oscillatory integrands from fooling the initial error estimate.
pub fn integrate_panels(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    width: f64,
    tol: f64,
) -> Result<Estimate<f64>> {
    let count = (((b - a) / width).ceil() as usize).max(1);
    let h = (b - a) / count as f64;
    let per = tol / count as f64;
    let mut out = Estimate {
        value: 0.0,
        error: 0.0,
    };
    for i in 0..count {
        let lo = a + h * i as f64;
        let hi = if i + 1 == count { b } else { lo + h };
        let e = integrate(&mut f, lo, hi, per)?;
        out.value += e.value;
        out.error += e.error;
    }
    Ok(out)
}

/// Tanh-sinh (double exponential) rule for a smooth complex integrand on
/// `[a, b]`, halving the step until successive levels agree to `tol`.
pub fn tanh_sinh(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Estimate<Complex64>> {
    const T_MAX: f64 = 3.5;
    let half = 0.5 * (b - a);
    let node = |t: f64| -> Complex64 {
        let s = 0.5 * PI * t.sinh();
        let ch = s.cosh();
        let w = 0.5 * PI * t.cosh() / (ch * ch);
        // 1 − tanh(s) computed without cancellation
        let one_minus = 1.0 / (ch * ch * (1.0 + s.tanh()));
        let x = if t >= 0.0 {
            b - half * one_minus
        } else {
            a + half * (1.0 / (ch * ch * (1.0 - s.tanh())))
        };
        if x <= a || x >= b {
            return Complex64::new(0.0, 0.0);
        }
        f(x) * w
    };
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut k = 1;
    while k as f64 * h <= T_MAX {
        let t = k as f64 * h;
        sum += node(t) + node(-t);
        k += 1;
    }
    let mut prev = sum * h * half;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            let t = k as f64 * h;
            sum += node(t) + node(-t);
            k += 2;
        }
        let cur = sum * h * half;
        let err = (cur - prev).norm();
        if err <= tol {
            return Ok(Estimate {
                value: cur,
                error: err,
            });
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        achieved: f64::NAN,
        requested: tol,
    })
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_exact() {
        let e = gk15(&mut |x| x.powi(20), -1.0, 1.0);
        assert!((e.value - 2.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_oscillatory() {
        let e = integrate(|x| (50.0 * x).cos(), 0.0, PI, 1e-13).unwrap();
        assert!((e.value - (50.0 * PI).sin() / 50.0).abs() < 1e-12);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        let e = tanh_sinh(|x| Complex64::new(1.0 / x.sqrt(), x), 0.0, 1.0, 1e-12).unwrap();
        assert!((e.value.re - 2.0).abs() < 1e-10);
        assert!((e.value.im - 0.5).abs() < 1e-12);
    }

    #[test]
    fn legendre_moments() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m14: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m14 - 2.0 / 15.0).abs() < 1e-14);
    }
}
