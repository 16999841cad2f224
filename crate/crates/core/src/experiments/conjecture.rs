use serde::{Deserialize, Serialize};

use super::{
    check_resume, half_grid, rel_change, track, track_from, Outcome, Report, Series, Tracked,
    Verdict,
};
use crate::datagen::make_thm3;
use crate::dynamics::{rhs, Checkpoint, EvolveControls, ModelSpec};
use crate::spectral::{spectral_derivative, TorusGrid};
use crate::Result;

/// Slope threshold whose crossing is sought.
const THRESHOLD: f64 = 1.0;
/// Allowed relative change of witnesses under grid refinement.
const REFINEMENT_TOL: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Conjecture1Params {
    pub eta: f64,
    pub delta: f64,
    pub nu: f64,
    pub n: usize,
    pub t_end: f64,
    pub controls: EvolveControls,
    /// Repeat the run at half resolution and with half the step bound.
    pub resolution_check: bool,
}

impl Default for Conjecture1Params {
    fn default() -> Self {
        Conjecture1Params {
            eta: 0.1,
            delta: 0.01,
            nu: 0.1,
            n: 512,
            t_end: 0.05,
            controls: EvolveControls {
                dt_initial: 1e-6,
                dt_max: 1e-3,
                ..EvolveControls::default()
            },
            resolution_check: true,
        }
    }
}

fn run_once(p: &Conjecture1Params, grid: TorusGrid, controls: &EvolveControls) -> Result<Tracked> {
    let model = ModelSpec::slope_selection(p.nu)?;
    let h0 = make_thm3(p.eta, p.delta, grid)?;
    track(&h0, &model, p.t_end, controls, Some(THRESHOLD))
}

/// Evolves the polynomial-window data from slope below one and looks for the
/// first time the slope exceeds one.
pub fn conjecture1_falsification(p: &Conjecture1Params) -> Result<Report> {
    falsify(p, None)
}

/// Continues the main run of [`conjecture1_falsification`] from a snapshot.
/// Crossings before the snapshot time are not seen, and the refinement
/// sub-runs are skipped.
pub fn conjecture1_resume(p: &Conjecture1Params, from: &Checkpoint) -> Result<Report> {
    falsify(p, Some(from))
}

fn falsify(p: &Conjecture1Params, from: Option<&Checkpoint>) -> Result<Report> {
    let model = ModelSpec::slope_selection(p.nu)?;
    let grid = TorusGrid::new(1, p.n)?;
    if let Some(c) = from {
        check_resume(c, grid, &model, p.t_end)?;
    }
    let mut v = Verdict::new(
        "conjecture1",
        "thm3: slope exceeds 1 in finite time from data with slope below 1",
        grid,
        &model,
    );

    // unperturbed data: rate of change of the slope at the origin
    let w0 = make_thm3(p.eta, 0.0, grid)?;
    let rate = spectral_derivative(&rhs(&w0, &model), 0, 1)?.at(0);
    let target = 120.0 * p.nu * p.eta;
    v.witness("initial_rate_origin", rate)
        .witness("initial_rate_target", target)
        .witness("initial_rate_rel_error", rel_change(rate, target));

    let main = match from {
        Some(c) => {
            v.witness("resumed_from", c.t);
            track_from(&c.field, c.t, &model, p.t_end, &p.controls, Some(THRESHOLD))?
        }
        None => run_once(p, grid, &p.controls)?,
    };
    let traj = &main.trajectory;
    v.witness("grad_sup_initial", traj.grad_sup[0])
        .witness("peak_grad_sup", main.peak)
        .witness("peak_time", main.peak_time)
        .witness("overshoot", main.peak - THRESHOLD)
        .witness("accepted_steps", traj.accepted_steps as f64)
        .witness("rejected_steps", traj.rejected_steps as f64);
    if let Some(c) = main.crossing {
        v.witness("crossing_time", c.t)
            .witness("crossing_bracket_lo", c.before)
            .witness("crossing_bracket_hi", c.after);
    }

    let mut scheme_tol = p.controls.energy_tol;
    let mut refinement = None;
    if p.resolution_check && from.is_none() {
        let finer = EvolveControls {
            dt_initial: 0.5 * p.controls.dt_initial,
            dt_max: 0.5 * p.controls.dt_max,
            ..p.controls.clone()
        };
        let fine_dt = run_once(p, grid, &finer)?;
        scheme_tol = scheme_tol.max((fine_dt.peak - main.peak).abs());
        let half = run_once(p, half_grid(grid)?, &p.controls)?;
        v.witness("half_res_peak", half.peak);
        let mut change = rel_change(half.peak, main.peak);
        if let (Some(a), Some(b)) = (half.crossing, main.crossing) {
            v.witness("half_res_crossing_time", a.t);
            change = change.max(rel_change(a.t, b.t));
        }
        v.witness("refinement_change", change);
        refinement = Some(change);
    }
    v.witness("scheme_tolerance", scheme_tol);

    let (outcome, reason) = match main.crossing {
        None => (
            Outcome::Inconclusive,
            Some(format!(
                "no crossing before t = {}; max grad sup {:.10}",
                p.t_end, main.peak
            )),
        ),
        Some(_) if main.peak - THRESHOLD < 10.0 * scheme_tol => (
            Outcome::Inconclusive,
            Some(format!(
                "overshoot {:.3e} below 10x scheme tolerance {:.3e}",
                main.peak - THRESHOLD,
                scheme_tol
            )),
        ),
        Some(_) if refinement.is_some_and(|c| c > REFINEMENT_TOL) => (
            Outcome::Inconclusive,
            Some(format!(
                "witnesses change by {:.3e} at half resolution",
                refinement.unwrap_or_default()
            )),
        ),
        Some(_) => (
            Outcome::Confirmed,
            (!p.resolution_check || from.is_some())
                .then(|| "resolution check skipped".to_string()),
        ),
    };

    let series = vec![Series::linear(
        "grad_sup",
        "t",
        "sup |grad h|",
        traj.times.clone(),
        traj.grad_sup.clone(),
    )
    .with_reference(THRESHOLD)];
    let mut report = Report::new(v.conclude(outcome, reason));
    report.trajectory = Some(main.trajectory);
    report.series = series;
    Ok(report)
}
