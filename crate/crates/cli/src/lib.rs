//! Command-line front end: configuration parsing, schema checks and output
//! files for the experiment drivers in `epitaxy-core`.

pub mod config;
pub mod emit;
pub mod plot;
pub mod schema;

pub use config::{parse_config, parse_config_str, ConfigError, RunConfig};
pub use emit::{emit_plotdata, emit_timeseries, read_timeseries, write_verdict, CSV_HEADER};

use epitaxy_core::Outcome;

/// Process exit codes.
pub mod exit {
    pub const CONFIRMED: i32 = 0;
    pub const COMPUTE_ERROR: i32 = 1;
    pub const INVALID_CONFIG: i32 = 2;
    pub const VIOLATED: i32 = 3;
    pub const INCONCLUSIVE: i32 = 4;
}

pub fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Confirmed => exit::CONFIRMED,
        Outcome::Violated => exit::VIOLATED,
        Outcome::Inconclusive => exit::INCONCLUSIVE,
    }
}
