use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrators::{Etd2, Etdrk4, Scheme};
use super::model::{energy_spectral, EnergyBreakdown, Semilinear, Workspace};
use crate::spectral::Field;
use crate::{Error, Result};

/// Time-stepping controls for [`evolve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveControls {
    pub dt_initial: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Step growth factor after an accepted full step.
    pub growth: f64,
    /// Allowed relative energy increase per step.
    pub energy_tol: f64,
    /// Record diagnostics every this many accepted steps.
    pub record_every: usize,
    /// Store a state snapshot whenever `t` passes a multiple of this interval.
    pub checkpoint_interval: Option<f64>,
    pub scheme: Scheme,
    /// With `false` the step size is fixed and the energy guard is off.
    pub adaptive: bool,
}

impl Default for EvolveControls {
    fn default() -> Self {
        Self {
            dt_initial: 1e-4,
            dt_min: 1e-12,
            dt_max: 1e-2,
            growth: 1.25,
            energy_tol: 1e-10,
            record_every: 1,
            checkpoint_interval: None,
            scheme: Scheme::Etdrk4,
            adaptive: true,
        }
    }
}

impl EvolveControls {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} must be positive")))
            }
        };
        positive("dt_initial", self.dt_initial)?;
        positive("dt_min", self.dt_min)?;
        positive("dt_max", self.dt_max)?;
        if self.dt_min > self.dt_max {
            return Err(Error::param("dt_min", "exceeds dt_max"));
        }
        if !(self.growth >= 1.0) {
            return Err(Error::param("growth", "must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every", "must be at least 1"));
        }
        if let Some(c) = self.checkpoint_interval {
            positive("checkpoint_interval", c)?;
        }
        Ok(())
    }
}

/// Diagnostics of one run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub energy: Vec<EnergyBreakdown>,
    pub grad_sup: Vec<f64>,
    pub mean_h: Vec<f64>,
    pub checkpoints: Vec<(f64, Field)>,
    pub final_state: Field,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn max_grad_sup(&self) -> f64 {
        self.grad_sup.iter().copied().fold(0.0, f64::max)
    }

    /// Relative defects of the energy law between consecutive records,
    /// `|ΔE/Δt + (D₀ + D₁)/2| / ((D₀ + D₁)/2)`.
    pub fn energy_law_residuals(&self) -> Vec<f64> {
        self.times
            .windows(2)
            .zip(self.energy.windows(2))
            .map(|(t, e)| {
                let avg = 0.5 * (e[0].dissipation + e[1].dissipation);
                let slope = (e[1].total - e[0].total) / (t[1] - t[0]);
                (slope + avg).abs() / avg
            })
            .collect()
    }

    /// Largest energy increase between consecutive records, relative to
    /// `1 + |E|`. Non-positive for a monotone trajectory.
    pub fn max_energy_increase(&self) -> f64 {
        self.energy
            .windows(2)
            .map(|e| (e[1].total - e[0].total) / (1.0 + e[0].total.abs()))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Step-by-step integrator with energy-guarded adaptivity.
pub struct Evolver<'a, E: Semilinear> {
    eq: &'a E,
    ws: Workspace,
    controls: EvolveControls,
    u: Vec<Complex64>,
    t: f64,
    dt: f64,
    /// Total energy of the current state.
    energy_total: f64,
    /// Accepted steps since the last rejection.
    streak: usize,
    rk4: Etdrk4,
    etd2: Etd2,
    pub accepted: usize,
    pub rejected: usize,
}

/// Outcome of one accepted step.
#[derive(Clone, Copy, Debug)]
pub struct StepReport {
    pub t: f64,
    pub dt: f64,
    pub energy: f64,
}

/// Accepted steps required after a rejection before the step may grow again.
const GROWTH_HOLD: usize = 4;

impl<'a, E: Semilinear> Evolver<'a, E> {
    pub fn new(h0: &Field, t0: f64, eq: &'a E, controls: EvolveControls) -> Result<Self> {
        controls.validate()?;
        if !h0.is_finite() {
            return Err(Error::Blowup { t: t0 });
        }
        let ws = Workspace::new(h0.grid(), eq);
        let u = h0.spectral().to_vec();
        let (a, b) = eq.energy_terms(&ws, &u);
        Ok(Self {
            eq,
            ws,
            dt: controls.dt_initial.min(controls.dt_max),
            controls,
            u,
            t: t0,
            energy_total: a + b,
            streak: GROWTH_HOLD,
            rk4: Etdrk4::new(),
            etd2: Etd2::new(),
            accepted: 0,
            rejected: 0,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Full energy breakdown of the current state, including dissipation.
    pub fn energy(&self) -> EnergyBreakdown {
        energy_spectral(self.eq, &self.ws, &self.u)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.u
    }

    pub fn state(&self) -> Field {
        Field::from_spectral(self.ws.grid(), self.u.clone()).expect("accepted states are finite")
    }

    pub fn workspace(&self) -> &Workspace {
        &self.ws
    }

    /// Takes one accepted step, never past `t_end`. Rejected attempts halve
    /// the step; falling below `dt_min` is an error.
    pub fn advance(&mut self, t_end: f64) -> Result<StepReport> {
        loop {
            let remaining = t_end - self.t;
            let full = self.dt <= remaining;
            let dt = if full { self.dt } else { remaining };
            let (next, n0) = match self.controls.scheme {
                Scheme::Etdrk4 => (self.rk4.step(self.eq, &self.ws, &self.u, dt), None),
                Scheme::Imex => {
                    let (next, n0) = self.etd2.step(self.eq, &self.ws, &self.u, dt);
                    (next, Some(n0))
                }
            };
            let finite = next.iter().all(|c| c.re.is_finite() && c.im.is_finite());
            let energy = if finite {
                let (a, b) = self.eq.energy_terms(&self.ws, &next);
                Some(a + b)
            } else {
                None
            };
            let ok = match energy {
                None => false,
                Some(_) if !self.controls.adaptive => true,
                Some(e) => {
                    e.is_finite()
                        && e <= self.energy_total
                            + self.controls.energy_tol * (1.0 + self.energy_total.abs())
                }
            };
            if ok {
                if let Some(n0) = n0 {
                    self.etd2.commit(n0);
                }
                self.u = next;
                self.t = if full { self.t + dt } else { t_end };
                self.energy_total = energy.expect("checked");
                self.accepted += 1;
                self.streak += 1;
                if self.controls.adaptive && full && self.streak >= GROWTH_HOLD {
                    self.dt = (self.dt * self.controls.growth).min(self.controls.dt_max);
                }
                return Ok(StepReport {
                    t: self.t,
                    dt,
                    energy: self.energy_total,
                });
            }
            if !self.controls.adaptive {
                return Err(Error::Blowup { t: self.t + dt });
            }
            self.rejected += 1;
            self.streak = 0;
            self.etd2.reset();
            self.dt = 0.5 * dt;
            if self.dt < self.controls.dt_min {
                return Err(Error::DtUnderflow {
                    t: self.t,
                    dt: self.dt,
                    trajectory: Box::new(Trajectory {
                        times: vec![],
                        energy: vec![],
                        grad_sup: vec![],
                        mean_h: vec![],
                        checkpoints: vec![],
                        final_state: self.state(),
                        accepted_steps: self.accepted,
                        rejected_steps: self.rejected,
                    }),
                });
            }
        }
    }
}

struct Recorder {
    traj: Trajectory,
}

impl Recorder {
    fn push(&mut self, eq: &impl Semilinear, t: f64, field: &Field, energy: EnergyBreakdown) {
        self.traj.times.push(t);
        self.traj.energy.push(energy);
        self.traj.grad_sup.push(eq.slope_sup(field));
        self.traj.mean_h.push(field.mean());
    }
}

/// Integrates from `h0` at time `t0` to `t_end`.
pub fn evolve_from<E: Semilinear>(
    h0: &Field,
    t0: f64,
    eq: &E,
    t_end: f64,
    controls: &EvolveControls,
) -> Result<Trajectory> {
    if !(t_end >= t0) || !t_end.is_finite() {
        return Err(Error::param("t_end", format!("{t_end} before start {t0}")));
    }
    let mut ev = Evolver::new(h0, t0, eq, controls.clone())?;
    let mut rec = Recorder {
        traj: Trajectory {
            times: vec![],
            energy: vec![],
            grad_sup: vec![],
            mean_h: vec![],
            checkpoints: vec![],
            final_state: h0.clone(),
            accepted_steps: 0,
            rejected_steps: 0,
        },
    };
    rec.push(eq, t0, h0, ev.energy());
    let mut next_checkpoint = controls.checkpoint_interval.map(|c| t0 + c);
    let mut since_record = 0;
    while ev.t() < t_end {
        let report = match ev.advance(t_end) {
            Ok(r) => r,
            Err(Error::DtUnderflow { t, dt, trajectory }) => {
                let mut partial = rec.traj;
                partial.final_state = trajectory.final_state;
                partial.accepted_steps = trajectory.accepted_steps;
                partial.rejected_steps = trajectory.rejected_steps;
                return Err(Error::DtUnderflow {
                    t,
                    dt,
                    trajectory: Box::new(partial),
                });
            }
            Err(e) => return Err(e),
        };
        since_record += 1;
        let last = report.t >= t_end;
        let snapshot_due = next_checkpoint.is_some_and(|c| report.t >= c);
        if since_record >= controls.record_every || last || snapshot_due {
            let state = ev.state();
            if since_record >= controls.record_every || last {
                rec.push(eq, report.t, &state, ev.energy());
                since_record = 0;
            }
            if snapshot_due {
                rec.traj.checkpoints.push((report.t, state));
                let step = controls.checkpoint_interval.expect("interval set");
                let mut c = next_checkpoint.expect("set");
                while c <= report.t {
                    c += step;
                }
                next_checkpoint = Some(c);
            }
        }
    }
    rec.traj.final_state = ev.state();
    rec.traj.accepted_steps = ev.accepted;
    rec.traj.rejected_steps = ev.rejected;
    Ok(rec.traj)
}

/// Integrates from `h0` at `t = 0` to `t_end`.
pub fn evolve<E: Semilinear>(
    h0: &Field,
    eq: &E,
    t_end: f64,
    controls: &EvolveControls,
) -> Result<Trajectory> {
    evolve_from(h0, 0.0, eq, t_end, controls)
}
