//! Experiment drivers. Each driver builds its data, runs the dynamics or the
//! linear flow, embeds a half-resolution convergence sub-run where a
//! simulation is involved, and condenses the result into a [`Verdict`].

mod audit;
mod bridge;
mod conjecture;
mod extras;
mod longtime;
mod lower_bound;
mod reference;
mod sweep;
mod track;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Checkpoint, ModelSpec, Trajectory, Variant};
use crate::fit::PowerFit;
use crate::spectral::TorusGrid;
use crate::{Error, Result};

pub use audit::{gradient_bound_audit, AuditBound, AuditParams};
pub use bridge::{cahn_hilliard_bridge, BridgeParams};
pub use conjecture::{conjecture1_falsification, conjecture1_resume, Conjecture1Params};
pub use extras::{
    energy_law, piecewise_constant, integrator_order, sawtooth_scaling, smoothing_rates, EnergyLawParams,
    IntegratorOrderParams, SawtoothParams, SmoothingParams,
};
pub use longtime::{longtime_1d, longtime_1d_resume, reflection_center, LongtimeParams};
pub use lower_bound::{thm5_lower_bound, LowerBoundParams};
pub use reference::{max_principle_reference, ReferenceParams};
pub use sweep::parallel_map;
pub use track::{track, track_from, Crossing, Tracked};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Confirmed,
    Violated,
    Inconclusive,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Confirmed => "confirmed",
            Outcome::Violated => "violated",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
}

impl From<TorusGrid> for GridSpec {
    fn from(g: TorusGrid) -> Self {
        GridSpec {
            dim: g.dim(),
            n: g.n(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub nu: f64,
    pub gamma: f64,
    pub variant: Variant,
}

impl From<&ModelSpec> for ModelSummary {
    fn from(m: &ModelSpec) -> Self {
        ModelSummary {
            nu: m.nu,
            gamma: m.gamma,
            variant: m.variant,
        }
    }
}

/// Structured result of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub experiment: String,
    /// Statement the experiment probes.
    pub claim_ref: String,
    pub outcome: Outcome,
    /// Why the outcome is not `confirmed`, or what was skipped.
    pub reason: Option<String>,
    pub witnesses: BTreeMap<String, f64>,
    pub grid: GridSpec,
    pub model: ModelSummary,
    pub seed: Option<u64>,
    /// Wall-clock time; left empty unless timing is requested so that
    /// repeated runs serialize identically.
    pub runtime_s: Option<f64>,
}

impl Verdict {
    pub fn new(experiment: &str, claim_ref: &str, grid: TorusGrid, model: &ModelSpec) -> Self {
        Verdict {
            experiment: experiment.into(),
            claim_ref: claim_ref.into(),
            outcome: Outcome::Inconclusive,
            reason: None,
            witnesses: BTreeMap::new(),
            grid: grid.into(),
            model: model.into(),
            seed: None,
            runtime_s: None,
        }
    }

    /// Records a witness. Non-finite values cannot be serialized; they are
    /// listed in `reason` instead.
    pub fn witness(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        let key = key.into();
        if value.is_finite() {
            self.witnesses.insert(key, value);
        } else {
            self.note(format!("witness {key} is {value}"));
        }
        self
    }

    pub fn flag(&mut self, key: impl Into<String>, value: bool) -> &mut Self {
        self.witness(key, if value { 1.0 } else { 0.0 })
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.witnesses.get(key).copied()
    }

    fn note(&mut self, text: String) {
        self.reason = Some(match self.reason.take() {
            Some(r) => format!("{r}; {text}"),
            None => text,
        });
    }

    pub fn conclude(mut self, outcome: Outcome, reason: Option<String>) -> Self {
        self.outcome = outcome;
        if let Some(r) = reason {
            self.note(r);
        }
        self
    }
}

/// One plottable curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Horizontal reference line.
    pub reference: Option<f64>,
    pub fit: Option<PowerFit>,
}

impl Series {
    pub fn linear(name: &str, x_label: &str, y_label: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        Series {
            name: name.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x: false,
            log_y: false,
            x,
            y,
            reference: None,
            fit: None,
        }
    }

    pub fn loglog(
        name: &str,
        x_label: &str,
        y_label: &str,
        x: Vec<f64>,
        y: Vec<f64>,
        fit: Option<PowerFit>,
    ) -> Self {
        Series {
            log_x: true,
            log_y: true,
            fit,
            ..Series::linear(name, x_label, y_label, x, y)
        }
    }

    pub fn with_reference(mut self, level: f64) -> Self {
        self.reference = Some(level);
        self
    }
}

/// Everything a driver produces: the verdict, the main trajectory (for time
/// series and the final checkpoint) and extra plot data.
#[derive(Clone, Debug)]
pub struct Report {
    pub verdict: Verdict,
    pub trajectory: Option<Trajectory>,
    pub series: Vec<Series>,
}

impl Report {
    fn new(verdict: Verdict) -> Self {
        Report {
            verdict,
            trajectory: None,
            series: vec![],
        }
    }
}

/// Serializable selection of a driver with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Experiment {
    Conjecture1(Conjecture1Params),
    Thm5LowerBound(LowerBoundParams),
    GradientBoundAudit(AuditParams),
    #[serde(rename = "longtime_1d")]
    Longtime1d(LongtimeParams),
    CahnHilliardBridge(BridgeParams),
    MaxPrincipleReference(ReferenceParams),
    SmoothingRates(SmoothingParams),
    SawtoothScaling(SawtoothParams),
    EnergyLaw(EnergyLawParams),
    IntegratorOrder(IntegratorOrderParams),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Conjecture1(_) => "conjecture1",
            Experiment::Thm5LowerBound(_) => "thm5_lower_bound",
            Experiment::GradientBoundAudit(_) => "gradient_bound_audit",
            Experiment::Longtime1d(_) => "longtime_1d",
            Experiment::CahnHilliardBridge(_) => "cahn_hilliard_bridge",
            Experiment::MaxPrincipleReference(_) => "max_principle_reference",
            Experiment::SmoothingRates(_) => "smoothing_rates",
            Experiment::SawtoothScaling(_) => "sawtooth_scaling",
            Experiment::EnergyLaw(_) => "energy_law",
            Experiment::IntegratorOrder(_) => "integrator_order",
        }
    }

    /// Cheap parameter checks that need no data construction. Drivers repeat
    /// them and check the rest when they start.
    pub fn validate(&self) -> Result<()> {
        match self {
            Experiment::Conjecture1(p) => {
                ModelSpec::slope_selection(p.nu)?;
                TorusGrid::new(1, p.n)?;
                positive("t_end", p.t_end)?;
                p.controls.validate()
            }
            Experiment::Thm5LowerBound(p) => {
                ModelSpec::slope_selection(p.nu)?;
                if let Some(n) = p.n {
                    TorusGrid::new(1, n)?;
                }
                if p.steps == 0 {
                    return Err(Error::param("steps", "must be at least 1"));
                }
                Ok(())
            }
            Experiment::GradientBoundAudit(p) => {
                if !(1..=3).contains(&p.dim) {
                    return Err(Error::param("dim", format!("{} not in 1..=3", p.dim)));
                }
                if p.nu_sweep.len() < 2 {
                    return Err(Error::param("nu_sweep", "need at least two values"));
                }
                for &nu in &p.nu_sweep {
                    ModelSpec::slope_selection(nu)?;
                }
                if let Some(n) = p.n {
                    TorusGrid::new(p.dim, n)?;
                }
                positive("t_end", p.t_end)
            }
            Experiment::Longtime1d(p) => {
                ModelSpec::slope_selection(p.nu)?;
                TorusGrid::new(1, p.n)?;
                positive("t_long", p.t_long)?;
                p.controls.validate()
            }
            Experiment::CahnHilliardBridge(p) => {
                ModelSpec::slope_selection(p.nu)?;
                TorusGrid::new(1, p.n)?;
                positive("t_end", p.t_end)?;
                positive("dt", p.dt)
            }
            Experiment::MaxPrincipleReference(_) => Ok(()),
            Experiment::SmoothingRates(p) => {
                if p.gamma == 4.0 {
                    ModelSpec::slope_selection(p.nu)?;
                } else {
                    ModelSpec::fractional(p.nu, p.gamma)?;
                }
                TorusGrid::new(1, p.n)?;
                positive("t_min", p.t_min)?;
                positive("t_max", p.t_max)
            }
            Experiment::SawtoothScaling(p) => {
                if p.nu_sweep.len() < 2 {
                    return Err(Error::param("nu_sweep", "need at least two values"));
                }
                for &nu in &p.nu_sweep {
                    ModelSpec::slope_selection(nu)?;
                }
                positive("t_end", p.t_end)
            }
            Experiment::EnergyLaw(p) => {
                ModelSpec::new(p.variant, p.nu, p.gamma)?;
                if p.dims.is_empty() || p.dims.len() != p.sizes.len() {
                    return Err(Error::param("sizes", "one grid size per dimension required"));
                }
                for (&d, &n) in p.dims.iter().zip(&p.sizes) {
                    TorusGrid::new(d, n)?;
                }
                positive("t_end", p.t_end)?;
                p.controls.validate()
            }
            Experiment::IntegratorOrder(p) => {
                ModelSpec::slope_selection(p.nu)?;
                TorusGrid::new(1, p.n)?;
                positive("t_end", p.t_end)
            }
        }
    }

    /// Whether [`Experiment::resume`] is available.
    pub fn resumable(&self) -> bool {
        matches!(self, Experiment::Conjecture1(_) | Experiment::Longtime1d(_))
    }

    /// Continues the main evolution from a snapshot.
    pub fn resume(&self, from: &Checkpoint) -> Result<Report> {
        match self {
            Experiment::Conjecture1(p) => conjecture1_resume(p, from),
            Experiment::Longtime1d(p) => longtime_1d_resume(p, from),
            _ => Err(Error::param(
                "resume",
                format!("{} has no single evolution to continue", self.name()),
            )),
        }
    }

    /// Runs the driver with at most `workers` concurrent sub-runs.
    pub fn run(&self, workers: usize) -> Result<Report> {
        match self {
            Experiment::Conjecture1(p) => conjecture1_falsification(p),
            Experiment::Thm5LowerBound(p) => thm5_lower_bound(p),
            Experiment::GradientBoundAudit(p) => gradient_bound_audit(p, workers),
            Experiment::Longtime1d(p) => longtime_1d(p),
            Experiment::CahnHilliardBridge(p) => cahn_hilliard_bridge(p),
            Experiment::MaxPrincipleReference(p) => max_principle_reference(p),
            Experiment::SmoothingRates(p) => smoothing_rates(p),
            Experiment::SawtoothScaling(p) => sawtooth_scaling(p, workers),
            Experiment::EnergyLaw(p) => energy_law(p, workers),
            Experiment::IntegratorOrder(p) => integrator_order(p),
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} must be positive")))
    }
}

/// A snapshot can continue a run if it lives on the run's grid, carries the
/// run's dissipation and lies before its end.
pub(crate) fn check_resume(c: &Checkpoint, grid: TorusGrid, model: &ModelSpec, t_end: f64) -> Result<()> {
    if c.field.grid() != grid {
        return Err(Error::param(
            "resume",
            format!("snapshot grid {} differs from {grid}", c.field.grid()),
        ));
    }
    if c.nu != model.nu || c.gamma != model.gamma {
        return Err(Error::param(
            "resume",
            format!("snapshot has nu = {}, gamma = {}", c.nu, c.gamma),
        ));
    }
    if !(c.t < t_end) {
        return Err(Error::param("resume", format!("snapshot time {} not before {t_end}", c.t)));
    }
    Ok(())
}

/// Relative change `|a − b| / |b|`, or the absolute change when `b = 0`.
pub(crate) fn rel_change(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        (a - b).abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Half of an even grid size, kept at the minimum admissible size.
pub(crate) fn half_grid(grid: TorusGrid) -> Result<TorusGrid> {
    let n = (grid.n() / 2).max(8);
    TorusGrid::new(grid.dim(), n + n % 2)
}

/// Largest spectral coefficient within `n/32` of the Nyquist planes relative
/// to the largest coefficient overall. Small values mean the field is resolved.
pub fn spectral_tail(f: &crate::Field) -> f64 {
    let g = f.grid();
    let band = (g.n() / 2 - g.n() / 32) as i64;
    let c = f.spectral();
    let peak = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let edge = c
        .iter()
        .enumerate()
        .filter(|(i, _)| g.wavevector(*i).iter().any(|k| k.abs() >= band))
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    edge / peak
}
