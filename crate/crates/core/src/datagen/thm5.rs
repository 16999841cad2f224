//! Sign-profile data: slope `±1` following the sign of the kernel at the
//! parabolic scale, so that one linear step concentrates `‖f‖_{L¹}` into the
//! slope at the origin.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::semigroup::kernel::KernelTable;
use crate::semigroup::quadrature::gauss_legendre;
use crate::spectral::{Field, TorusGrid};
use crate::{Error, Result};

/// Exponent of the mollifier `ψ(u) ∝ (1 − u²)^p`.
const BUMP_POWER: i32 = 8;

/// Normalization of `(1 − u²)^8` on `[−1, 1]`: `2·(16!!)/(17!!)`.
fn bump_mass() -> f64 {
    let mut num = 1.0;
    let mut den = 1.0;
    for k in 1..=BUMP_POWER {
        num *= 2.0 * k as f64;
        den *= 2.0 * k as f64 + 1.0;
    }
    2.0 * num / den
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - u * u).powi(BUMP_POWER) / bump_mass()
    }
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    // degree 2p + 1 integrands are integrated exactly
    R.get_or_init(|| gauss_legendre(BUMP_POWER as usize + 2))
}

/// Odd piecewise-linear profile given by its breakpoints on `x ≥ 0`.
#[derive(Clone, Debug)]
struct PiecewiseLinear {
    /// Breakpoints `0 = b₀ < b₁ < …`; beyond the last one the profile is 0.
    knots: Vec<f64>,
    /// Values at the knots.
    values: Vec<f64>,
}

impl PiecewiseLinear {
    fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        let last = *self.knots.last().expect("non-empty");
        if ax >= last {
            return 0.0;
        }
        let j = self.knots.partition_point(|&k| k <= ax) - 1;
        let (x0, x1) = (self.knots[j], self.knots[j + 1]);
        let (y0, y1) = (self.values[j], self.values[j + 1]);
        let v = y0 + (y1 - y0) * (ax - x0) / (x1 - x0);
        if x < 0.0 {
            -v
        } else {
            v
        }
    }

    /// All kinks on the real line (both signs).
    fn kinks(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.knots.iter().skip(1).map(|&x| -x).rev().collect();
        k.extend(self.knots.iter().copied());
        k
    }

    /// `(ψ_δ ∗ F)(x)`, exact up to roundoff: the integrand is a polynomial on
    /// each piece between kinks.
    fn mollified(&self, x: f64, delta: f64, kinks: &[f64]) -> f64 {
        let (gx, gw) = rule();
        // u ∈ [−1, 1], evaluation point x − δu; kinks at u = (x − k)/δ
        let mut cuts: Vec<f64> = vec![-1.0, 1.0];
        let lo = kinks.partition_point(|&k| k < x - delta);
        let hi = kinks.partition_point(|&k| k <= x + delta);
        cuts.extend(kinks[lo..hi].iter().map(|&k| (x - k) / delta));
        cuts.sort_by(f64::total_cmp);
        let mut sum = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for (xi, wi) in gx.iter().zip(gw) {
                let u = mid + half * xi;
                sum += wi * half * bump(u) * self.eval(x - delta * u);
            }
        }
        sum
    }
}

/// Parabolic length `(νt)^{1/4}` and window `t^{1/5}` of the construction.
pub fn thm5_scales(nu: f64, t: f64) -> (f64, f64) {
    ((nu * t).powf(0.25), t.powf(0.2))
}

/// Time `t₁` solving `2C³·A·ν^{−1/2}·2t₁^{1/2} = ε/3`.
pub fn thm5_t1(nu: f64, eps: f64, c1: f64, a1: f64) -> f64 {
    let s = eps / (12.0 * c1.powi(3) * a1);
    s * s * nu
}

/// Default mollification width and a grid size resolving it.
pub fn thm5_resolution(nu: f64, t: f64) -> (f64, usize) {
    let (l, _) = thm5_scales(nu, t);
    let delta = 0.1 * l;
    let min_n = (2.0 * PI * 8.0 / delta).ceil() as usize;
    (delta, min_n.next_power_of_two().max(8))
}

fn check(nu: f64, t: f64, delta: f64) -> Result<()> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::param("nu", format!("{nu} must be positive")));
    }
    if !(t > 0.0 && t <= 0.5) {
        return Err(Error::param("t", format!("{t} not in (0, 1/2]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("{delta} not in (0, 1)")));
    }
    Ok(())
}

/// `(1 − δ)·ψ_δ ∗ F̃` with `F̃′ = sgn f(x/(νt)^{1/4})` on `|x| ≤ t^{1/5}`,
/// closed by a unit-slope ramp back to zero.
pub fn make_thm5(
    nu: f64,
    t: f64,
    delta: f64,
    grid: TorusGrid,
    kernel: &KernelTable,
) -> Result<Field> {
    check(nu, t, delta)?;
    if grid.dim() != 1 {
        return Err(Error::param("grid", "sign-profile data is one-dimensional"));
    }
    let (l, w) = thm5_scales(nu, t);
    let reach = w / l;
    let extended;
    let table = if reach > kernel.x_max() {
        let mut k = kernel.clone();
        k.extend_to(reach)?;
        extended = k;
        &extended
    } else {
        kernel
    };
    // breakpoints of the sign profile inside the window
    let mut knots = vec![0.0];
    knots.extend(
        table
            .zeros()
            .iter()
            .map(|z| z * l)
            .take_while(|&x| x < w),
    );
    knots.push(w);
    let mut values = vec![0.0];
    let mut acc = 0.0;
    for seg in knots.windows(2) {
        let mid = 0.5 * (seg[0] + seg[1]);
        acc += table.sign_at(mid / l) * (seg[1] - seg[0]);
        values.push(acc);
    }
    // ramp back to zero with unit slope
    let end = w + acc.abs();
    if end + delta >= PI {
        return Err(Error::Construction(format!(
            "window {w} plus closure {} leaves the period",
            acc.abs()
        )));
    }
    if acc != 0.0 {
        knots.push(end);
        values.push(0.0);
    }
    let profile = PiecewiseLinear { knots, values };
    let kinks = profile.kinks();
    let vals = (0..grid.len())
        .map(|i| {
            let x = grid.centered_point(i)[0];
            if x.abs() > end + delta {
                0.0
            } else {
                (1.0 - delta) * profile.mollified(x, delta, &kinks)
            }
        })
        .collect();
    Field::from_values(grid, vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_has_unit_mass() {
        let (x, w) = gauss_legendre(20);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * bump(*x)).sum();
        assert!((m - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mollifier_preserves_linear_pieces() {
        let p = PiecewiseLinear {
            knots: vec![0.0, 1.0, 2.0],
            values: vec![0.0, 1.0, 0.0],
        };
        let kinks = p.kinks();
        // away from kinks a symmetric mollifier reproduces linear functions
        assert!((p.mollified(0.5, 0.1, &kinks) - 0.5).abs() < 1e-14);
        assert!((p.mollified(-1.5, 0.1, &kinks) + 0.5).abs() < 1e-14);
        // at the peak it rounds the corner down
        assert!(p.mollified(1.0, 0.1, &kinks) < 1.0);
    }

    #[test]
    fn budget_time() {
        let t1 = thm5_t1(1.0, 0.1, 1.2372943854593752, 0.5523291200409981);
        assert!((t1 - 6.4e-5).abs() < 1e-5);
    }
}
