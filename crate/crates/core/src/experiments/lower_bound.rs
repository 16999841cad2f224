use serde::{Deserialize, Serialize};

use super::{half_grid, rel_change, track, Outcome, Report, Series, Verdict};
use crate::datagen::{make_thm5, thm5_resolution, thm5_scales, thm5_t1};
use crate::dynamics::{EvolveControls, ModelSpec};
use crate::semigroup::{
    apply_propagator, kernel_l1_constant, kernel_second_derivative_l1, KernelTable,
};
use crate::spectral::{grad_sup_norm, norms, spectral_derivative, Field, TorusGrid};
use crate::{Error, Result};

const REFINEMENT_TOL: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowerBoundParams {
    pub nu: f64,
    pub eps: f64,
    /// Evaluation time; defaults to the budget time `t₁`.
    pub t: Option<f64>,
    /// Mollification width; defaults to a tenth of the parabolic length.
    pub delta: Option<f64>,
    /// Grid size; defaults to eight points per mollification width.
    pub n: Option<usize>,
    /// Also run the full equation up to `t`.
    pub nonlinear: bool,
    /// Fixed number of steps for the nonlinear run.
    pub steps: usize,
    pub resolution_check: bool,
}

impl Default for LowerBoundParams {
    fn default() -> Self {
        LowerBoundParams {
            nu: 1e-3,
            eps: 0.1,
            t: None,
            delta: None,
            n: None,
            nonlinear: true,
            steps: 20,
            resolution_check: true,
        }
    }
}

fn linear_slope_at_origin(f: &Field, nu: f64, t: f64) -> Result<(f64, f64)> {
    let d = spectral_derivative(&apply_propagator(f, nu, 4.0, t)?, 0, 1)?;
    Ok((d.at(0), norms::sup(&d)))
}

/// Builds sign-profile data for the quartic kernel and checks that the linear
/// flow, and then the full equation, push the slope above `C₁ − ε/3` and
/// `C₁ − ε` respectively.
pub fn thm5_lower_bound(p: &LowerBoundParams) -> Result<Report> {
    let model = ModelSpec::slope_selection(p.nu)?;
    let c1 = kernel_l1_constant(1, 4.0)?.value;
    let a1 = kernel_second_derivative_l1(4.0)?.value;
    if !(p.eps > 0.0 && p.eps < c1 - 1.0) {
        return Err(Error::param(
            "eps",
            format!("{} not in (0, C1 - 1) = (0, {})", p.eps, c1 - 1.0),
        ));
    }
    let t1 = thm5_t1(p.nu, p.eps, c1, a1);
    let t = p.t.unwrap_or(t1);
    if !(t > 0.0 && t <= t1) {
        return Err(Error::param("t", format!("{t} not in (0, t1 = {t1:e}]")));
    }
    let (delta_default, n_default) = thm5_resolution(p.nu, t);
    let delta = p.delta.unwrap_or(delta_default);
    let grid = TorusGrid::new(1, p.n.unwrap_or(n_default))?;
    let mut v = Verdict::new(
        "thm5_lower_bound",
        "thm5: slope exceeds C1 - eps from data with slope below 1",
        grid,
        &model,
    );
    let (l, w) = thm5_scales(p.nu, t);
    v.witness("c1", c1)
        .witness("a1", a1)
        .witness("t1", t1)
        .witness("t", t)
        .witness("delta", delta)
        .witness("parabolic_length", l)
        .witness("window", w);

    let table = KernelTable::build(4.0)?;
    let f = make_thm5(p.nu, t, delta, grid, &table)?;
    v.witness("grad_sup_initial", grad_sup_norm(&f));

    // before mollification the linear slope at the origin is the kernel mass
    // over the window
    let ideal = table.window_mass(w / l)?;
    let (lin0, lin_sup) = linear_slope_at_origin(&f, p.nu, t)?;
    let linear_target = c1 - p.eps / 3.0;
    let linear_ok = lin0 > linear_target;
    v.witness("unmollified_value", ideal)
        .witness("unmollified_target", c1 - p.eps / 4.0)
        .witness("linear_slope_origin", lin0)
        .witness("linear_sup", lin_sup)
        .witness("linear_target", linear_target)
        .flag("linear_ok", linear_ok);

    let mut refinement = None;
    if p.resolution_check {
        let coarse = half_grid(grid)?;
        let fc = make_thm5(p.nu, t, delta, coarse, &table)?;
        let (c0, _) = linear_slope_at_origin(&fc, p.nu, t)?;
        let change = rel_change(c0, lin0);
        v.witness("half_res_linear_slope_origin", c0)
            .witness("refinement_change", change);
        refinement = Some(change);
    }

    let mut report_traj = None;
    let mut nonlinear_ok = None;
    let mut series = vec![];
    if p.nonlinear {
        let steps = p.steps.max(1);
        let controls = EvolveControls {
            dt_initial: t / steps as f64,
            dt_max: t / steps as f64,
            ..EvolveControls::default()
        };
        let run = track(&f, &model, t, &controls, None)?;
        let target = c1 - p.eps;
        let ok = run.peak > target;
        let lin_field = spectral_derivative(&apply_propagator(&f, p.nu, 4.0, t)?, 0, 1)?;
        let full = spectral_derivative(&run.trajectory.final_state, 0, 1)?;
        let bound = a1 * 2.0 * (t / p.nu).sqrt() * 2.0 * c1.powi(3);
        v.witness("nonlinear_peak", run.peak)
            .witness("nonlinear_peak_time", run.peak_time)
            .witness("nonlinear_target", target)
            .flag("nonlinear_ok", ok)
            .witness("duhamel_difference", full.max_abs_diff(&lin_field)?)
            .witness("duhamel_bound", bound);
        series.push(
            Series::linear(
                "grad_sup",
                "t",
                "sup |grad h|",
                run.trajectory.times.clone(),
                run.trajectory.grad_sup.clone(),
            )
            .with_reference(target),
        );
        nonlinear_ok = Some(ok);
        report_traj = Some(run.trajectory);
    }

    let (outcome, reason) = if !linear_ok {
        (
            Outcome::Inconclusive,
            Some(format!(
                "linear slope {lin0:.8} not above {linear_target:.8}; resolution-limited"
            )),
        )
    } else if refinement.is_some_and(|c| c > REFINEMENT_TOL) {
        (
            Outcome::Inconclusive,
            Some("linear witness changes by more than 1% at half resolution".into()),
        )
    } else {
        match nonlinear_ok {
            Some(false) => (
                Outcome::Violated,
                Some("full equation stays below C1 - eps".into()),
            ),
            Some(true) => (Outcome::Confirmed, None),
            None => (
                Outcome::Confirmed,
                Some("linear check only; nonlinear run skipped".into()),
            ),
        }
    };
    let mut report = Report::new(v.conclude(outcome, reason));
    report.trajectory = report_traj;
    report.series = series;
    Ok(report)
}
