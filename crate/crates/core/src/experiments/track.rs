//! Evolution with per-step slope monitoring and threshold-crossing location.

use crate::dynamics::{EvolveControls, Etdrk4, Evolver, Semilinear, Trajectory};
use crate::spectral::Field;
use crate::{Error, Result};

/// First time the slope diagnostic exceeds a threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    /// Crossing time located by bisection inside the bracketing step.
    pub t: f64,
    /// Accepted step times bracketing the crossing.
    pub before: f64,
    pub after: f64,
}

#[derive(Clone, Debug)]
pub struct Tracked {
    pub trajectory: Trajectory,
    /// Largest slope diagnostic over all accepted steps, recorded or not.
    pub peak: f64,
    pub peak_time: f64,
    pub crossing: Option<Crossing>,
}

const BISECTION_STEPS: usize = 60;

/// Evolves like [`crate::dynamics::evolve`] but evaluates the slope
/// diagnostic after every accepted step, keeps its running maximum, and
/// locates the first upward crossing of `threshold` by bisecting a single
/// fourth-order step from the last state below it.
pub fn track<E: Semilinear>(
    h0: &Field,
    eq: &E,
    t_end: f64,
    controls: &EvolveControls,
    threshold: Option<f64>,
) -> Result<Tracked> {
    track_from(h0, 0.0, eq, t_end, controls, threshold)
}

/// [`track`] starting at time `t0`.
pub fn track_from<E: Semilinear>(
    h0: &Field,
    t0: f64,
    eq: &E,
    t_end: f64,
    controls: &EvolveControls,
    threshold: Option<f64>,
) -> Result<Tracked> {
    if !(t_end > t0) || !t_end.is_finite() {
        return Err(Error::param("t_end", format!("{t_end} must exceed start {t0}")));
    }
    let mut ev = Evolver::new(h0, t0, eq, controls.clone())?;
    let mut traj = Trajectory {
        times: vec![],
        energy: vec![],
        grad_sup: vec![],
        mean_h: vec![],
        checkpoints: vec![],
        final_state: h0.clone(),
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let slope0 = eq.slope_sup(h0);
    let push = |traj: &mut Trajectory, t: f64, state: &Field, slope: f64, ev: &Evolver<E>| {
        traj.times.push(t);
        traj.energy.push(ev.energy());
        traj.grad_sup.push(slope);
        traj.mean_h.push(state.mean());
    };
    push(&mut traj, t0, h0, slope0, &ev);
    let (mut peak, mut peak_time) = (slope0, t0);
    let mut crossing = None;
    let mut prev = (t0, h0.spectral().to_vec(), slope0);
    let mut since = 0;
    let mut next_checkpoint = controls.checkpoint_interval.map(|c| t0 + c);
    while ev.t() < t_end {
        let report = ev.advance(t_end)?;
        let state = ev.state();
        let slope = eq.slope_sup(&state);
        if slope > peak {
            peak = slope;
            peak_time = report.t;
        }
        if let Some(level) = threshold {
            if crossing.is_none() && prev.2 <= level && slope > level {
                crossing = Some(bisect(eq, &ev, &prev.1, prev.0, report.t, level)?);
            }
        }
        since += 1;
        if since >= controls.record_every || report.t >= t_end {
            push(&mut traj, report.t, &state, slope, &ev);
            since = 0;
        }
        if let (Some(c), Some(step)) = (next_checkpoint, controls.checkpoint_interval) {
            if report.t >= c {
                traj.checkpoints.push((report.t, state.clone()));
                let mut c = c;
                while c <= report.t {
                    c += step;
                }
                next_checkpoint = Some(c);
            }
        }
        prev = (report.t, ev.coeffs().to_vec(), slope);
    }
    traj.final_state = ev.state();
    traj.accepted_steps = ev.accepted;
    traj.rejected_steps = ev.rejected;
    Ok(Tracked {
        trajectory: traj,
        peak,
        peak_time,
        crossing,
    })
}

fn bisect<E: Semilinear>(
    eq: &E,
    ev: &Evolver<E>,
    start: &[crate::Complex64],
    t0: f64,
    t1: f64,
    level: f64,
) -> Result<Crossing> {
    let ws = ev.workspace();
    let mut stepper = Etdrk4::new();
    let excess = |tau: f64, stepper: &mut Etdrk4| -> Result<f64> {
        let u = stepper.step(eq, ws, start, tau);
        let f = Field::from_spectral(ws.grid(), u).map_err(|_| Error::Blowup { t: t0 + tau })?;
        Ok(eq.slope_sup(&f) - level)
    };
    let (mut lo, mut hi) = (0.0, t1 - t0);
    // the single-step value at the far end may differ slightly from the
    // accepted state; fall back to the bracket end if it does not cross
    if excess(hi, &mut stepper)? <= 0.0 {
        return Ok(Crossing {
            t: t1,
            before: t0,
            after: t1,
        });
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid, &mut stepper)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Crossing {
        t: t0 + 0.5 * (lo + hi),
        before: t0,
        after: t1,
    })
}
