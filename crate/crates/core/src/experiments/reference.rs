use serde::{Deserialize, Serialize};

use super::{Outcome, Report, Verdict};
use crate::dynamics::{ModelSpec, Variant};
use crate::spectral::TorusGrid;
use crate::Result;

/// No knobs; the verdict only surfaces constants.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceParams {}

/// Reports the sup-norm baselines of the equation without fourth-order
/// dissipation: `1/√3` in one dimension and `1` for `d ≥ 2`. Nothing is
/// simulated, so the outcome is always `confirmed`.
pub fn max_principle_reference(_p: &ReferenceParams) -> Result<Report> {
    // ν = 0 is the point of the reference, so the spec is built directly
    let model = ModelSpec {
        variant: Variant::SlopeSelection,
        nu: 0.0,
        gamma: 4.0,
    };
    let mut v = Verdict::new(
        "max_principle_reference",
        "prop1.1: slope bounded by max(initial slope, 1/sqrt(3)) without dissipation",
        TorusGrid::new(1, 8)?,
        &model,
    );
    v.witness("baseline_1d", 1.0 / 3f64.sqrt())
        .witness("baseline_multid", 1.0);
    Ok(Report::new(v.conclude(
        Outcome::Confirmed,
        Some("reference constants only; no simulation".into()),
    )))
}
