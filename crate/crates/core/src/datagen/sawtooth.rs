//! Triangle-wave data with slope `±1` and smoothed tips.

use std::f64::consts::PI;

use crate::spectral::{Field, TorusGrid};
use crate::{Error, Result};

/// `∫₀^w P` for the quintic smoothstep `P(w) = 6w⁵ − 15w⁴ + 10w³`.
fn smoothstep_integral(w: f64) -> f64 {
    w.powi(4) * (w * (w - 3.0) + 2.5)
}

/// Triangle wave `∫₀ˣ sgn(sin L₀τ) dτ` with its tips replaced on `|x − tip| < δ`
/// by a cap whose slope follows a quintic smoothstep (slope is `C²`), minus the
/// grid mean.
pub fn make_sawtooth_cap(l0: u32, delta: f64, grid: TorusGrid) -> Result<Field> {
    if l0 < 3 {
        return Err(Error::param("l0", format!("{l0} teeth; at least 3 are required")));
    }
    let tooth = PI / l0 as f64;
    if !(delta > 0.0) || delta >= 0.5 * tooth {
        return Err(Error::param(
            "delta",
            format!("{delta} must lie in (0, {}) for l0 = {l0}", 0.5 * tooth),
        ));
    }
    if grid.dim() != 1 {
        return Err(Error::param("grid", "sawtooth data is one-dimensional"));
    }
    let value = |x: f64| {
        let j = (x / tooth).round();
        let y = x - j * tooth;
        // tips alternate: even j minima (value 0), odd j maxima (value tooth)
        let (tip, dir) = if (j as i64).rem_euclid(2) == 0 {
            (0.0, -1.0)
        } else {
            (tooth, 1.0)
        };
        if y.abs() >= delta {
            tip - dir * y.abs()
        } else {
            let w = 0.5 * (y / delta + 1.0);
            tip + dir * (-delta - delta * (4.0 * smoothstep_integral(w) - 2.0 * w))
        }
    };
    let raw: Vec<f64> = (0..grid.len()).map(|i| value(grid.point(i)[0])).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    Field::from_values(grid, raw.into_iter().map(|v| v - mean).collect())
}

/// Grid size with spacing at most `δ/16`, enough for spectral smoothness of
/// the caps.
pub fn sawtooth_resolution(delta: f64) -> usize {
    ((2.0 * PI * 16.0 / delta).ceil() as usize)
        .next_power_of_two()
        .max(64)
}
