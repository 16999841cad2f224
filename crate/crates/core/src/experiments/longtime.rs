use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{
    check_resume, half_grid, rel_change, track, track_from, Outcome, Report, Series, Tracked,
    Verdict,
};
use crate::datagen::DataFamily;
use crate::dynamics::{Checkpoint, EvolveControls, ModelSpec};
use crate::spectral::{norms, Field, TorusGrid};
use crate::{Error, Result};

/// Allowed plateau excess over 1 for even data.
const PLATEAU_TOL: f64 = 0.05;
/// Steady-state residual `‖∂ₜh‖₂` required at the end of the run.
const RESIDUAL_TOL: f64 = 1e-6;
const MONOTONE_TOL: f64 = 1e-10;
const REFINEMENT_TOL: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LongtimeParams {
    pub data: DataFamily,
    pub nu: f64,
    pub t_long: f64,
    pub n: usize,
    pub controls: EvolveControls,
    pub resolution_check: bool,
}

impl Default for LongtimeParams {
    fn default() -> Self {
        LongtimeParams {
            data: DataFamily::Sine {
                amplitude: 1.0,
                mode: 1,
            },
            nu: 0.05,
            t_long: 30.0,
            n: 128,
            controls: EvolveControls {
                dt_initial: 1e-4,
                dt_max: 0.05,
                record_every: 10,
                ..EvolveControls::default()
            },
            resolution_check: true,
        }
    }
}

/// A point `x₀` with `h(x₀ + x) = h(x₀ − x)` up to `1e−10` relative, searched
/// among grid points and grid midpoints; `None` if the field is not even
/// about any of them.
pub fn reflection_center(h: &Field) -> Option<f64> {
    let g = h.grid();
    if g.dim() != 1 {
        return None;
    }
    let n = g.n();
    let v = h.values();
    let tol = 1e-10 * (1.0 + norms::sup(h));
    // center index c/2: pairs (c − j, j) reflect onto each other
    (0..2 * n).find_map(|c| {
        let even = (0..n).all(|j| {
            let mirror = (c + 2 * n - j) % n;
            (v[j] - v[mirror]).abs() <= tol
        });
        even.then(|| c as f64 * PI / n as f64)
    })
}

fn run(p: &LongtimeParams, grid: TorusGrid) -> Result<(Field, Tracked)> {
    let model = ModelSpec::slope_selection(p.nu)?;
    let h0 = p.data.generate(grid)?;
    let tracked = track(&h0, &model, p.t_long, &p.controls, None)?;
    Ok((h0, tracked))
}

/// Max over recorded values with `t ≥ 0.9·t_long`.
fn plateau(tr: &Tracked, t_long: f64) -> f64 {
    let traj = &tr.trajectory;
    traj.times
        .iter()
        .zip(&traj.grad_sup)
        .filter(|(t, _)| **t >= 0.9 * t_long)
        .map(|(_, g)| *g)
        .fold(0.0, f64::max)
}

/// Evolves one-dimensional data for a long time and reports the slope
/// plateau; for data even about some point the plateau must not exceed 1.
pub fn longtime_1d(p: &LongtimeParams) -> Result<Report> {
    relax(p, None)
}

/// Continues the main run of [`longtime_1d`] from a snapshot, without the
/// refinement sub-run. Evenness is judged on the snapshot state.
pub fn longtime_1d_resume(p: &LongtimeParams, from: &Checkpoint) -> Result<Report> {
    relax(p, Some(from))
}

fn relax(p: &LongtimeParams, from: Option<&Checkpoint>) -> Result<Report> {
    if !(p.t_long > 0.0) {
        return Err(Error::param("t_long", "must be positive"));
    }
    let model = ModelSpec::slope_selection(p.nu)?;
    let grid = TorusGrid::new(1, p.n)?;
    if let Some(c) = from {
        check_resume(c, grid, &model, p.t_long)?;
    }
    let mut v = Verdict::new(
        "longtime_1d",
        "prop5.3: limsup of the slope is at most 1 for even data",
        grid,
        &model,
    );
    if let DataFamily::RandomSmooth { seed, .. } = p.data {
        v.seed = Some(seed);
    }
    let (h0, main) = match from {
        Some(c) => {
            v.witness("resumed_from", c.t);
            let tr = track_from(&c.field, c.t, &model, p.t_long, &p.controls, None)?;
            (c.field.clone(), tr)
        }
        None => run(p, grid)?,
    };
    let center = reflection_center(&h0);
    let traj = &main.trajectory;
    let k0 = plateau(&main, p.t_long);
    let last = traj.energy.last().copied().unwrap_or_default();
    let residual = last.dissipation.max(0.0).sqrt();
    let increase = traj.max_energy_increase();
    let min_energy = traj.energy.iter().map(|e| e.total).fold(f64::INFINITY, f64::min);
    v.flag("even_data", center.is_some())
        .witness("grad_sup_initial", traj.grad_sup[0])
        .witness("plateau_grad_sup", k0)
        .witness("peak_grad_sup", main.peak)
        .witness("dt_h_l2_final", residual)
        .witness("energy_final", last.total)
        .witness("energy_min", min_energy)
        .witness("max_energy_increase", increase)
        .witness("accepted_steps", traj.accepted_steps as f64);
    if let Some(c) = center {
        v.witness("reflection_center", c);
    }

    let mut refinement = None;
    if p.resolution_check && from.is_none() {
        let (_, coarse) = run(p, half_grid(grid)?)?;
        let kc = plateau(&coarse, p.t_long);
        let change = rel_change(kc, k0);
        v.witness("half_res_plateau_grad_sup", kc)
            .witness("refinement_change", change);
        refinement = Some(change);
    }

    let energy_ok = increase <= MONOTONE_TOL && min_energy >= 0.0;
    let (outcome, reason) = if residual > RESIDUAL_TOL {
        (
            Outcome::Inconclusive,
            Some(format!("not yet stationary: |dt h|_2 = {residual:.3e}")),
        )
    } else if refinement.is_some_and(|c| c > REFINEMENT_TOL) {
        (
            Outcome::Inconclusive,
            Some("plateau changes by more than 1% at half resolution".into()),
        )
    } else if !energy_ok {
        (
            Outcome::Violated,
            Some(format!("energy not monotone and non-negative (increase {increase:.3e})")),
        )
    } else if center.is_some() && k0 > 1.0 + PLATEAU_TOL {
        (
            Outcome::Violated,
            Some(format!("plateau {k0:.6} above {}", 1.0 + PLATEAU_TOL)),
        )
    } else if center.is_none() {
        (
            Outcome::Confirmed,
            Some("data not even; plateau reported as K0 without a threshold".into()),
        )
    } else {
        (Outcome::Confirmed, None)
    };
    let series = vec![Series::linear(
        "grad_sup",
        "t",
        "sup |grad h|",
        traj.times.clone(),
        traj.grad_sup.clone(),
    )
    .with_reference(1.0)];
    let mut report = Report::new(v.conclude(outcome, reason));
    report.trajectory = Some(main.trajectory);
    report.series = series;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_centers() {
        let g = TorusGrid::new(1, 64).unwrap();
        let s = Field::from_fn(g, |x| x[0].sin()).unwrap();
        let c = reflection_center(&s).unwrap();
        assert!((c - PI / 2.0).abs() < 1e-12);
        let shifted = Field::from_fn(g, |x| (x[0] - PI / 64.0).cos()).unwrap();
        assert!((reflection_center(&shifted).unwrap() - PI / 64.0).abs() < 1e-12);
        let odd = Field::from_fn(g, |x| x[0].sin() + 0.3 * (2.0 * x[0]).sin()).unwrap();
        assert!(reflection_center(&odd).is_none());
    }
}
