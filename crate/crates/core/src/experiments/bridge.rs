use serde::{Deserialize, Serialize};

use super::{half_grid, Outcome, Report, Series, Verdict};
use crate::datagen::DataFamily;
use crate::dynamics::{evolve, CahnHilliard, EvolveControls, ModelSpec, Scheme, Trajectory};
use crate::spectral::{norms, spectral_derivative, TorusGrid};
use crate::{Error, Result};

/// Agreement required between `u(T)` and `∂ₓh(T)`, relative to `1 + ‖u‖_∞`.
const AGREEMENT_TOL: f64 = 1e-5;
const MEAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BridgeParams {
    pub data: DataFamily,
    pub nu: f64,
    pub t_end: f64,
    pub n: usize,
    /// Fixed step shared by both runs.
    pub dt: f64,
    pub scheme: Scheme,
    pub resolution_check: bool,
}

impl Default for BridgeParams {
    fn default() -> Self {
        BridgeParams {
            data: DataFamily::Sine {
                amplitude: 1.0,
                mode: 1,
            },
            nu: 0.1,
            t_end: 1.0,
            n: 128,
            dt: 1e-3,
            scheme: Scheme::Etdrk4,
            resolution_check: true,
        }
    }
}

struct Twin {
    h: Trajectory,
    u: Trajectory,
    gap: f64,
    u_sup: f64,
}

fn twin(p: &BridgeParams, grid: TorusGrid) -> Result<Twin> {
    let model = ModelSpec::slope_selection(p.nu)?;
    let h0 = p.data.generate(grid)?;
    let u0 = spectral_derivative(&h0, 0, 1)?;
    // identical fixed step sequences so both runs see the same rounding of t
    let controls = EvolveControls {
        dt_initial: p.dt,
        dt_max: p.dt,
        dt_min: p.dt.min(EvolveControls::default().dt_min),
        adaptive: false,
        scheme: p.scheme,
        record_every: ((0.01 / p.dt).round() as usize).max(1),
        ..EvolveControls::default()
    };
    let h = evolve(&h0, &model, p.t_end, &controls)?;
    let u = evolve(&u0, &CahnHilliard { nu: p.nu }, p.t_end, &controls)?;
    let dh = spectral_derivative(&h.final_state, 0, 1)?;
    let gap = dh.max_abs_diff(&u.final_state)?;
    let u_sup = norms::sup(&u.final_state);
    Ok(Twin { h, u, gap, u_sup })
}

/// Evolves `h` and its slope `u = ∂ₓh` under their own equations with the
/// same integrator and step sequence, and compares `u(T)` with `∂ₓh(T)`.
pub fn cahn_hilliard_bridge(p: &BridgeParams) -> Result<Report> {
    if !(p.dt > 0.0) || !(p.t_end > 0.0) {
        return Err(Error::param("dt", "dt and t_end must be positive"));
    }
    let model = ModelSpec::slope_selection(p.nu)?;
    let grid = TorusGrid::new(1, p.n)?;
    let mut v = Verdict::new(
        "cahn_hilliard_bridge",
        "sec1: the slope u = dh/dx solves the Cahn-Hilliard equation",
        grid,
        &model,
    );
    if let DataFamily::RandomSmooth { seed, .. } = p.data {
        v.seed = Some(seed);
    }
    let main = twin(p, grid)?;
    let scaled = main.gap / (1.0 + main.u_sup);
    let mean0 = main.u.mean_h[0];
    let drift = main
        .u
        .mean_h
        .iter()
        .map(|m| (m - mean0).abs())
        .fold(0.0, f64::max);
    v.witness("sup_difference", main.gap)
        .witness("u_sup_final", main.u_sup)
        .witness("relative_difference", scaled)
        .witness("u_mean_initial", mean0)
        .witness("u_mean_drift", drift)
        .witness("steps", main.h.accepted_steps as f64);
    if p.resolution_check {
        let coarse = twin(p, half_grid(grid)?)?;
        v.witness("half_res_relative_difference", coarse.gap / (1.0 + coarse.u_sup));
    }
    let (outcome, reason) = if scaled > AGREEMENT_TOL {
        (
            Outcome::Violated,
            Some(format!("runs diverge: {scaled:.3e} > {AGREEMENT_TOL:e}")),
        )
    } else if drift > MEAN_TOL {
        (Outcome::Violated, Some(format!("mean of u drifts by {drift:.3e}")))
    } else {
        (Outcome::Confirmed, None)
    };
    let gaps: Vec<f64> = main
        .h
        .times
        .iter()
        .zip(&main.h.grad_sup)
        .zip(&main.u.grad_sup)
        .map(|((_, a), b)| (a - b).abs())
        .collect();
    let series = vec![Series::linear(
        "slope_sup_gap",
        "t",
        "| sup|dh/dx| - sup|u| |",
        main.h.times.clone(),
        gaps,
    )];
    let mut report = Report::new(v.conclude(outcome, reason));
    report.trajectory = Some(main.h);
    report.series = series;
    Ok(report)
}

