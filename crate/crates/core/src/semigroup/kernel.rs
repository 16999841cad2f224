//! The real-line kernel `f = F⁻¹(e^{−|ξ|^γ})` on `ℝ^d`, its zero table and its
//! `L¹` constants.
//!
//! Every quantity is computed along two routes that share no quadrature:
//!
//! * the real axis, with adaptive Gauss–Kronrod on half-period panels, and
//! * a ray `ξ = r·e^{iθ}` rotated into the upper half plane where `e^{iξx}`
//!   decays, integrated with tanh-sinh.
//!
//! The `L¹` norms sum signed lobe integrals between consecutive zeros. Route one
//! integrates the profile itself on each lobe; route two differences a closed
//! antiderivative (the mass inside a ball) at the zeros. Both use the same zero
//! table, which is harmless because the lobe sum is stationary in the zero
//! positions.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, integrate_panels, tanh_sinh, Estimate};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Absolute tolerance for single kernel evaluations.
const EVAL_TOL: f64 = 1e-13;
/// Sample spacing of the zero search.
const SAMPLE_STEP: f64 = 0.02;
/// Zero refinement target.
const ZERO_TOL: f64 = 1e-10;
/// Weighted profile magnitude below which the tail is considered negligible.
const TAIL_CUT: f64 = 1e-13;
/// Sign changes are only trusted above this magnitude.
const NOISE_FLOOR: f64 = 1e-15;
/// Agreement required between the two routes for the `L¹` constants.
pub const CROSS_TOL: f64 = 1e-6;

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 2.0) || !gamma.is_finite() {
        return Err(Error::param("gamma", format!("{gamma} must be finite and ≥ 2")));
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if !(1..=3).contains(&d) {
        return Err(Error::param("d", format!("{d} not in 1..=3")));
    }
    Ok(())
}

/// Cutoff where `e^{−ξ^γ} < e^{−50}` on the real axis.
fn xi_max(gamma: f64) -> f64 {
    50f64.powf(1.0 / gamma)
}

fn is_even_integer(gamma: f64) -> bool {
    gamma.fract() == 0.0 && (gamma as i64) % 2 == 0
}

/// `(1/π)∫₀^Ξ e^{−ξ^γ} Re[(iξ)^m e^{iξx}] dξ`, the `m`-th derivative of the 1-D
/// kernel along the real axis.
fn real_axis_1d(gamma: f64, x: f64, m: u32) -> Result<Estimate<f64>> {
    let xm = xi_max(gamma);
    let shift = m as f64 * 0.5 * PI;
    let e = integrate_panels(
        |xi| (-xi.powf(gamma)).exp() * xi.powi(m as i32) * (xi * x + shift).cos(),
        0.0,
        xm,
        PI / x.abs().max(1.0),
        EVAL_TOL,
    )?;
    Ok(Estimate {
        value: e.value / PI,
        error: e.error / PI,
    })
}

/// `∫₀^∞ e^{−z^γ} g(z) dz` along the ray `z = r e^{iθ}`, `θ = π/(4γ)`.
fn ray_integral(gamma: f64, g: impl Fn(Complex64) -> Complex64) -> Result<Estimate<Complex64>> {
    let theta = PI / (4.0 * gamma);
    let rot = Complex64::from_polar(1.0, theta);
    let rot_gamma = Complex64::from_polar(1.0, gamma * theta);
    // |e^{−z^γ}| = e^{−r^γ cos(π/4)} < e^{−50} beyond r_max
    let r_max = (50.0 * 2f64.sqrt()).powf(1.0 / gamma);
    tanh_sinh(
        |r| {
            let z = rot * r;
            (-(rot_gamma * r.powf(gamma))).exp() * g(z) * rot
        },
        0.0,
        r_max,
        EVAL_TOL,
    )
}

/// `(e^w − 1)/w`, accurate for small `|w|`.
fn expm1_over(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..=18 {
            term *= w / k as f64;
            sum += term;
        }
        sum
    } else {
        (w.exp() - 1.0) / w
    }
}

/// `(e^{iu}(1 − iu) − 1)/u`, accurate for small `|u|`.
fn ball3_over(u: Complex64) -> Complex64 {
    if u.norm() < 0.5 {
        // Σ_{n≥2} (1−n)(iu)^n/n!, divided by u
        let iu = I * u;
        let mut pow = iu; // (iu)^{n−1}
        let mut fact = 1.0;
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 2..=20 {
            fact *= n as f64;
            pow *= iu;
            sum += pow * ((1.0 - n as f64) / fact);
        }
        sum / u
    } else {
        ((I * u).exp() * (1.0 - I * u) - 1.0) / u
    }
}

/// The profile whose lobes are summed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Profile {
    /// Radial profile of the kernel on `ℝ^d`.
    Radial { dim: usize },
    /// Second derivative of the one-dimensional kernel.
    SecondDerivative,
}

impl Profile {
    fn dim(self) -> usize {
        match self {
            Profile::Radial { dim } => dim,
            Profile::SecondDerivative => 1,
        }
    }

    /// Measure of the sphere of radius `r` (2 on the line, counting ±r).
    fn weight(self, r: f64) -> f64 {
        match self.dim() {
            1 => 2.0,
            2 => 2.0 * PI * r,
            _ => 4.0 * PI * r * r,
        }
    }

    /// Real-axis evaluation at radius `r ≥ 0`.
    fn real_axis(self, gamma: f64, r: f64) -> Result<Estimate<f64>> {
        let xm = xi_max(gamma);
        let width = PI / r.max(1.0);
        match self {
            Profile::SecondDerivative => real_axis_1d(gamma, r, 2),
            Profile::Radial { dim: 1 } => real_axis_1d(gamma, r, 0),
            Profile::Radial { dim: 2 } => {
                let e = integrate_panels(
                    |rho| (-rho.powf(gamma)).exp() * libm::j0(rho * r) * rho,
                    0.0,
                    xm,
                    width,
                    EVAL_TOL,
                )?;
                Ok(scale(e, 1.0 / (2.0 * PI)))
            }
            Profile::Radial { .. } => {
                let e = integrate_panels(
                    |rho| {
                        let s = if r == 0.0 {
                            rho
                        } else {
                            (rho * r).sin() / r
                        };
                        (-rho.powf(gamma)).exp() * rho * s
                    },
                    0.0,
                    xm,
                    width,
                    EVAL_TOL,
                )?;
                Ok(scale(e, 1.0 / (2.0 * PI * PI)))
            }
        }
    }

    /// Contour evaluation at radius `r`, where one exists (not for `d = 2`).
    fn contour(self, gamma: f64, r: f64) -> Option<Result<Estimate<f64>>> {
        match self {
            Profile::Radial { dim: 1 } => Some(
                ray_integral(gamma, |z| (I * z * r).exp()).map(|e| re_scaled(e, 1.0 / PI)),
            ),
            Profile::SecondDerivative => Some(
                ray_integral(gamma, |z| -(z * z) * (I * z * r).exp())
                    .map(|e| re_scaled(e, 1.0 / PI)),
            ),
            Profile::Radial { dim: 3 } if r > 0.0 => Some(
                ray_integral(gamma, |z| z * (I * z * r).exp())
                    .map(|e| im_scaled(e, 1.0 / (2.0 * PI * PI * r))),
            ),
            _ => None,
        }
    }

    /// Preferred low-noise evaluation used for sampling.
    fn sample(self, gamma: f64, r: f64) -> Result<f64> {
        match self.contour(gamma, r) {
            Some(res) => res.map(|e| e.value),
            None => self.real_axis(gamma, r).map(|e| e.value),
        }
    }

    /// Antiderivative used by route two, normalized so that the lobe integral of
    /// `weight · profile` over `[a, b]` equals `primitive(b) − primitive(a)`,
    /// with `primitive(0) = 0` and `primitive(∞)` given by [`Self::total`].
    fn primitive(self, gamma: f64, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        match self {
            // ∫_{−R}^{R} f = (2/π) Im ∫ e^{−z^γ}(e^{izR} − 1)/z dz
            Profile::Radial { dim: 1 } => ray_integral(gamma, |z| I * r * expm1_over(I * z * r))
                .map(|e| 2.0 / PI * e.value.im),
            // mass in the disc: R ∫ e^{−ρ^γ} J₁(ρR) dρ
            Profile::Radial { dim: 2 } => integrate_panels(
                |rho| (-rho.powf(gamma)).exp() * libm::j1(rho * r),
                0.0,
                xi_max(gamma),
                PI / r.max(1.0),
                EVAL_TOL,
            )
            .map(|e| r * e.value),
            // mass in the ball: (2/π) Im ∫ e^{−z^γ}(e^{izR}(1 − izR) − 1)/z dz
            Profile::Radial { .. } => {
                ray_integral(gamma, |z| r * ball3_over(z * r)).map(|e| 2.0 / PI * e.value.im)
            }
            // 2 f′(R)
            Profile::SecondDerivative => ray_integral(gamma, |z| I * z * (I * z * r).exp())
                .map(|e| 2.0 / PI * e.value.re),
        }
    }

    /// `primitive(∞)`.
    fn total(self) -> f64 {
        match self {
            Profile::Radial { .. } => 1.0,
            Profile::SecondDerivative => 0.0,
        }
    }

    /// Leading algebraic tail `profile(r) ≈ coef · r^{−power}` for `γ` not an
    /// even integer. `None` when the tail decays faster than any power.
    fn algebraic_tail(self, gamma: f64) -> Option<(f64, f64)> {
        if is_even_integer(gamma) {
            return None;
        }
        let d = self.dim() as f64;
        let a1 = 2f64.powf(gamma)
            * libm::tgamma(0.5 * (d + gamma))
            * libm::tgamma(1.0 + 0.5 * gamma)
            * (0.5 * PI * gamma).sin()
            / PI.powf(0.5 * d + 1.0);
        Some(match self {
            Profile::Radial { .. } => (a1, d + gamma),
            Profile::SecondDerivative => (a1 * (1.0 + gamma) * (2.0 + gamma), 3.0 + gamma),
        })
    }

    /// `∫_X^∞ weight(r) · coef · r^{−power} dr`.
    fn tail_integral(self, x: f64, coef: f64, power: f64) -> f64 {
        let (c, p) = match self.dim() {
            1 => (2.0, power),
            2 => (2.0 * PI, power - 1.0),
            _ => (4.0 * PI, power - 2.0),
        };
        c * coef * x.powf(1.0 - p) / (p - 1.0)
    }
}

fn scale(e: Estimate<f64>, s: f64) -> Estimate<f64> {
    Estimate {
        value: e.value * s,
        error: e.error * s.abs(),
    }
}

fn re_scaled(e: Estimate<Complex64>, s: f64) -> Estimate<f64> {
    Estimate {
        value: e.value.re * s,
        error: e.error * s.abs(),
    }
}

fn im_scaled(e: Estimate<Complex64>, s: f64) -> Estimate<f64> {
    Estimate {
        value: e.value.im * s,
        error: e.error * s.abs(),
    }
}

/// Kernel value at `x` with an error estimate covering both routes.
pub fn kernel_evaluate_estimate(gamma: f64, x: f64) -> Result<Estimate<f64>> {
    check_gamma(gamma)?;
    let x = x.abs();
    let a = real_axis_1d(gamma, x, 0)?;
    let b = Profile::Radial { dim: 1 }
        .contour(gamma, x)
        .expect("1-D contour exists")?;
    let gap = (a.value - b.value).abs();
    if gap > 1e-10 {
        return Err(Error::CrossCheck {
            first: a.value,
            second: b.value,
            tolerance: 1e-10,
        });
    }
    Ok(Estimate {
        value: b.value,
        error: gap.max(a.error).max(b.error),
    })
}

/// `f(x) = (1/2π)∫ e^{−|ξ|^γ} e^{iξx} dξ`, cross-validated to `1e−10`.
pub fn kernel_evaluate(gamma: f64, x: f64) -> Result<f64> {
    kernel_evaluate_estimate(gamma, x).map(|e| e.value)
}

/// `m`-th derivative of the one-dimensional kernel (real-axis route only).
pub fn kernel_derivative(gamma: f64, x: f64, m: u32) -> Result<f64> {
    check_gamma(gamma)?;
    let v = real_axis_1d(gamma, x.abs(), m)?.value;
    Ok(if m % 2 == 1 && x < 0.0 { -v } else { v })
}

/// Sampled profile with its sign-change table.
///
/// Only `x ≥ 0` is stored: every profile here is even (radial).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelTable {
    gamma: f64,
    profile: Profile,
    xs: Vec<f64>,
    values: Vec<f64>,
    zeros: Vec<f64>,
    x_max: f64,
    /// Leading tail model beyond `x_max` when the decay is algebraic.
    tail: Option<(f64, f64)>,
}

impl KernelTable {
    /// Table of the one-dimensional kernel.
    pub fn build(gamma: f64) -> Result<Self> {
        Self::build_profile(gamma, Profile::Radial { dim: 1 })
    }

    pub fn build_profile(gamma: f64, profile: Profile) -> Result<Self> {
        check_gamma(gamma)?;
        check_dim(profile.dim())?;
        let mut table = KernelTable {
            gamma,
            profile,
            xs: vec![],
            values: vec![],
            zeros: vec![],
            x_max: 0.0,
            tail: profile.algebraic_tail(gamma),
        };
        table.sample_to(10.0)?;
        const CHUNK: f64 = 5.0;
        const LIMIT: f64 = 400.0;
        loop {
            let end = table.sampled_to();
            if table.tail_reached(end - CHUNK) {
                table.x_max = end;
                break;
            }
            if end >= LIMIT {
                return Err(Error::Quadrature {
                    achieved: table.chunk_max(end - CHUNK),
                    requested: TAIL_CUT,
                });
            }
            table.sample_to(end + CHUNK)?;
        }
        table.find_zeros()?;
        Ok(table)
    }

    fn sampled_to(&self) -> f64 {
        self.xs.last().copied().unwrap_or(0.0)
    }

    fn sample_to(&mut self, x_end: f64) -> Result<()> {
        let mut i = self.xs.len();
        loop {
            let x = i as f64 * SAMPLE_STEP;
            if x > x_end + 1e-12 {
                break;
            }
            self.xs.push(x);
            self.values.push(self.profile.sample(self.gamma, x)?);
            i += 1;
        }
        Ok(())
    }

    fn chunk_max(&self, from: f64) -> f64 {
        self.xs
            .iter()
            .zip(&self.values)
            .filter(|(x, _)| **x >= from)
            .map(|(x, v)| (v * self.profile.weight(*x)).abs())
            .fold(0.0, f64::max)
    }

    /// Whether samples beyond `from` are negligible, or follow the algebraic
    /// tail without further sign changes.
    fn tail_reached(&self, from: f64) -> bool {
        match self.tail {
            None => self.chunk_max(from) < TAIL_CUT,
            Some((coef, power)) => self
                .xs
                .iter()
                .zip(&self.values)
                .filter(|(x, _)| **x >= from)
                .all(|(x, v)| {
                    let model = coef * x.powf(-power);
                    (v / model - 1.0).abs() < 1e-4
                }),
        }
    }

    fn find_zeros(&mut self) -> Result<()> {
        let mut zeros = vec![];
        let mut last_sign = 0.0;
        let mut last_idx = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if self.xs[i] > self.x_max {
                break;
            }
            if v.abs() <= NOISE_FLOOR {
                continue;
            }
            let s = v.signum();
            if last_sign != 0.0 && s != last_sign {
                zeros.push(self.refine_zero(self.xs[last_idx], self.xs[i], last_sign)?);
            }
            last_sign = s;
            last_idx = i;
        }
        self.zeros = zeros;
        Ok(())
    }

    fn refine_zero(&self, mut lo: f64, mut hi: f64, sign_lo: f64) -> Result<f64> {
        while hi - lo > ZERO_TOL {
            let mid = 0.5 * (lo + hi);
            let v = self.profile.sample(self.gamma, mid)?;
            if v.signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Ordered positive sign-change abscissae.
    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn samples(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.values)
    }

    /// Makes sure at least `count` zeros are tabulated, or that the table
    /// covers `x` if the profile has fewer zeros in its significant range.
    pub fn extend_to(&mut self, x: f64) -> Result<()> {
        if x <= self.x_max {
            return Ok(());
        }
        self.sample_to(x)?;
        self.x_max = x;
        self.find_zeros()
    }

    /// Sign of the profile at `|x|`. The profile is positive at the origin and
    /// flips at each tabulated zero; beyond the table the last sign is held.
    pub fn sign_at(&self, x: f64) -> f64 {
        let x = x.abs();
        let flips = self.zeros.partition_point(|&z| z <= x);
        let origin = self.values.first().copied().unwrap_or(1.0).signum();
        if flips % 2 == 0 {
            origin
        } else {
            -origin
        }
    }

    /// `∫_{|x| < r} |profile|` from antiderivative differences between the
    /// tabulated zeros below `r`.
    pub fn window_mass(&self, r: f64) -> Result<f64> {
        let r = r.abs();
        let mut cuts = vec![0.0];
        cuts.extend(self.zeros.iter().copied().take_while(|&z| z < r));
        cuts.push(r);
        let mut prev = 0.0;
        let mut sum = 0.0;
        for &c in &cuts[1..] {
            let p = self.profile.primitive(self.gamma, c)?;
            sum += (p - prev).abs();
            prev = p;
        }
        Ok(sum)
    }

    /// Lobe boundaries `0, z₁, …, z_k, x_max`.
    fn lobes(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        b.extend_from_slice(&self.zeros);
        if self.x_max > *b.last().unwrap() {
            b.push(self.x_max);
        }
        b
    }

    /// Route one: `Σ |∫_lobe weight · profile|` on the real axis plus the tail.
    fn l1_by_lobes(&self) -> Result<Estimate<f64>> {
        let mut value = 0.0;
        let mut error = 0.0;
        for w in self.lobes().windows(2) {
            let mut failure = None;
            let e = integrate(
                |r| match self.profile.real_axis(self.gamma, r) {
                    Ok(v) => v.value * self.profile.weight(r),
                    Err(err) => {
                        failure.get_or_insert(err);
                        0.0
                    }
                },
                w[0],
                w[1],
                1e-10,
            )?;
            if let Some(err) = failure {
                return Err(err);
            }
            value += e.value.abs();
            error += e.error;
        }
        let tail = self.tail_contribution();
        Ok(Estimate {
            value: value + tail.value,
            error: error + tail.error,
        })
    }

    fn tail_contribution(&self) -> Estimate<f64> {
        match self.tail {
            Some((coef, power)) => {
                let t = self.profile.tail_integral(self.x_max, coef, power).abs();
                Estimate {
                    value: t,
                    error: 1e-4 * t,
                }
            }
            None => Estimate {
                value: 0.0,
                error: TAIL_CUT,
            },
        }
    }

    /// Route two: `Σ |P(z_{i+1}) − P(z_i)|` with the closed antiderivative `P`,
    /// the last lobe running to infinity.
    fn l1_by_primitive(&self) -> Result<f64> {
        let mut points = vec![0.0];
        points.extend_from_slice(&self.zeros);
        let prims = points
            .iter()
            .map(|&r| self.profile.primitive(self.gamma, r))
            .collect::<Result<Vec<f64>>>()?;
        let mut sum: f64 = prims.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        sum += (self.profile.total() - prims.last().unwrap()).abs();
        Ok(sum)
    }

    /// `∫ |profile| dx` over `ℝ^d` by both routes, failing when they disagree
    /// by more than [`CROSS_TOL`].
    pub fn l1_norm(&self) -> Result<L1Estimate> {
        let a = self.l1_by_lobes()?;
        let b = self.l1_by_primitive()?;
        let gap = (a.value - b).abs();
        if gap > CROSS_TOL {
            return Err(Error::CrossCheck {
                first: a.value,
                second: b,
                tolerance: CROSS_TOL,
            });
        }
        Ok(L1Estimate {
            value: b,
            lobes: a.value,
            primitive: b,
            error: gap.max(a.error),
        })
    }
}

/// An `L¹` constant from both routes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct L1Estimate {
    pub value: f64,
    /// Route one (lobe integrals on the real axis).
    pub lobes: f64,
    /// Route two (antiderivative differences).
    pub primitive: f64,
    pub error: f64,
}

type Memo = Mutex<HashMap<(u64, Profile), L1Estimate>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

fn l1_memoized(gamma: f64, profile: Profile) -> Result<L1Estimate> {
    let key = (gamma.to_bits(), profile);
    if let Some(hit) = memo().lock().expect("memo poisoned").get(&key) {
        return Ok(*hit);
    }
    let est = KernelTable::build_profile(gamma, profile)?.l1_norm()?;
    memo().lock().expect("memo poisoned").insert(key, est);
    Ok(est)
}

/// `C_{d,γ} = ‖F⁻¹(e^{−|ξ|^γ})‖_{L¹(ℝ^d)}`.
pub fn kernel_l1_constant(d: usize, gamma: f64) -> Result<L1Estimate> {
    check_dim(d)?;
    check_gamma(gamma)?;
    l1_memoized(gamma, Profile::Radial { dim: d })
}

/// `A₁ = ‖f″‖_{L¹(ℝ)}` for the one-dimensional kernel.
pub fn kernel_second_derivative_l1(gamma: f64) -> Result<L1Estimate> {
    check_gamma(gamma)?;
    l1_memoized(gamma, Profile::SecondDerivative)
}

/// Exported row of the constants table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantRecord {
    pub gamma: f64,
    pub d: usize,
    pub c_const: f64,
    /// Only defined on the line; `None` for `d > 1`.
    pub a1_const: Option<f64>,
    pub err_estimate: f64,
}

pub fn constant_record(d: usize, gamma: f64) -> Result<ConstantRecord> {
    let c = kernel_l1_constant(d, gamma)?;
    let a1 = if d == 1 {
        Some(kernel_second_derivative_l1(gamma)?)
    } else {
        None
    };
    Ok(ConstantRecord {
        gamma,
        d,
        c_const: c.value,
        a1_const: a1.map(|a| a.value),
        err_estimate: c.error.max(a1.map_or(0.0, |a| a.error)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_at_origin() {
        let v = kernel_evaluate(2.0, 0.0).unwrap();
        assert!((v - 0.5 / PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gaussian_off_origin() {
        for x in [0.5, 2.0, 7.0] {
            let v = kernel_evaluate(2.0, x).unwrap();
            let want = (-x * x / 4.0f64).exp() / (2.0 * PI.sqrt());
            assert!((v - want).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn quartic_at_origin() {
        let v = kernel_evaluate(4.0, 0.0).unwrap();
        assert!((v - libm::tgamma(1.25) / PI).abs() < 1e-12);
    }

    #[test]
    fn gaussian_second_derivative() {
        for x in [0.0, 1.0, 3.0] {
            let v = kernel_derivative(2.0, x, 2).unwrap();
            let f = (-x * x / 4.0f64).exp() / (2.0 * PI.sqrt());
            assert!((v - f * (x * x / 4.0 - 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn small_argument_series() {
        let w = Complex64::new(0.3, -0.2);
        let direct = (w.exp() - 1.0) / w;
        assert!((expm1_over(w) - direct).norm() < 1e-15);
        let u = Complex64::new(0.45, 0.1);
        let direct = ((I * u).exp() * (1.0 - I * u) - 1.0) / u;
        assert!((ball3_over(u) - direct).norm() < 1e-14);
    }

    #[test]
    fn algebraic_tail_matches_line_asymptotics() {
        // (1/π) Γ(1+γ) sin(πγ/2) on the line
        let g = 3.0;
        let (c, p) = Profile::Radial { dim: 1 }.algebraic_tail(g).unwrap();
        let want = libm::tgamma(1.0 + g) * (0.5 * PI * g).sin() / PI;
        assert!((c - want).abs() < 1e-12 * want.abs());
        assert_eq!(p, 4.0);
    }

    #[test]
    fn window_mass_limits() {
        // heat kernel: mass of [−r, r] is erf(r/2)
        let t = KernelTable::build(2.0).unwrap();
        for r in [0.5, 2.0, 5.0] {
            assert!((t.window_mass(r).unwrap() - libm::erf(r / 2.0)).abs() < 1e-10);
        }
        let t = KernelTable::build(4.0).unwrap();
        let c1 = kernel_l1_constant(1, 4.0).unwrap().value;
        assert!((t.window_mass(t.x_max()).unwrap() - c1).abs() < 1e-8);
        assert!(t.window_mass(3.0).unwrap() < c1);
    }
}
