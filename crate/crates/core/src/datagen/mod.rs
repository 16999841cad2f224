//! Initial-data constructors.

mod random;
mod sawtooth;
pub mod thm3;
pub mod thm5;
mod window;

use serde::{Deserialize, Serialize};

use crate::semigroup::KernelTable;
use crate::spectral::{Field, TorusGrid};
use crate::{Error, Result};

pub use random::make_random_smooth;
pub use sawtooth::{make_sawtooth_cap, sawtooth_resolution};
pub use thm3::{make_cor4, make_thm3};
pub use thm5::{make_thm5, thm5_resolution, thm5_scales, thm5_t1};
pub use window::{plateau, plateau_prime};

/// Serializable description of an initial-data family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataFamily {
    Thm3Polynomial {
        eta: f64,
        #[serde(default)]
        delta: f64,
    },
    Cor4Multid {
        eta: f64,
        #[serde(default)]
        delta: f64,
    },
    Thm5Signprofile {
        nu: f64,
        t: f64,
        delta: f64,
    },
    SawtoothCap {
        l0: u32,
        delta: f64,
    },
    RandomSmooth {
        seed: u64,
        bandwidth: usize,
        amplitude: f64,
    },
    /// `amplitude·sin(mode·x₁)`; even about `x₁ = π/(2·mode)`.
    Sine {
        amplitude: f64,
        #[serde(default = "one")]
        mode: u32,
    },
}

fn one() -> u32 {
    1
}

impl DataFamily {
    pub fn kind(&self) -> &'static str {
        match self {
            DataFamily::Thm3Polynomial { .. } => "thm3_polynomial",
            DataFamily::Cor4Multid { .. } => "cor4_multid",
            DataFamily::Thm5Signprofile { .. } => "thm5_signprofile",
            DataFamily::SawtoothCap { .. } => "sawtooth_cap",
            DataFamily::RandomSmooth { .. } => "random_smooth",
            DataFamily::Sine { .. } => "sine",
        }
    }

    /// Whether the constructor certifies `‖∇h₀‖_∞ < 1`.
    pub fn certifies_subunit_slope(&self) -> bool {
        match *self {
            DataFamily::Thm3Polynomial { delta, .. } | DataFamily::Cor4Multid { delta, .. } => {
                delta > 0.0
            }
            DataFamily::Thm5Signprofile { .. } => true,
            DataFamily::RandomSmooth { amplitude, .. } => amplitude < 1.0,
            DataFamily::Sine { amplitude, mode } => amplitude * mode as f64 <= 1.0,
            DataFamily::SawtoothCap { .. } => false,
        }
    }

    /// Samples the family on `grid`. The sign-profile family builds the
    /// quartic kernel table on demand.
    pub fn generate(&self, grid: TorusGrid) -> Result<Field> {
        match *self {
            DataFamily::Thm3Polynomial { eta, delta } => make_thm3(eta, delta, grid),
            DataFamily::Cor4Multid { eta, delta } => make_cor4(eta, delta, grid),
            DataFamily::Thm5Signprofile { nu, t, delta } => {
                let table = KernelTable::build(4.0)?;
                make_thm5(nu, t, delta, grid, &table)
            }
            DataFamily::SawtoothCap { l0, delta } => make_sawtooth_cap(l0, delta, grid),
            DataFamily::RandomSmooth {
                seed,
                bandwidth,
                amplitude,
            } => make_random_smooth(seed, bandwidth, amplitude, grid),
            DataFamily::Sine { amplitude, mode } => {
                if mode == 0 || 2 * mode as usize >= grid.n() {
                    return Err(Error::param("mode", format!("{mode} not resolved on {grid}")));
                }
                Field::from_fn(grid, |x| amplitude * (mode as f64 * x[0]).sin())
            }
        }
    }
}
