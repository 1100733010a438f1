//! Design-point energy and exergy model of a separate-flow turbofan with an
//! intake chiller, plus a genetic-algorithm cycle optimizer and TOPSIS
//! ranking of candidate cycles.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod cycle;
pub mod decision;
pub mod error;
pub mod exergy;
pub mod gasmodel;
pub mod optimizer;
pub mod performance;
pub mod report;
pub mod sweep;
pub mod validation;

pub use config::{OutputFormat, RunConfig};
pub use cycle::{run_cycle, CycleResult, EngineSpec, FlightCondition, StationId};
pub use error::{Error, Result};
pub use exergy::{audit, ExergyOptions, ExergyReport};
pub use gasmodel::{fuel_lookup, Fuel, FuelDatabase, GasProperties};
pub use performance::CyclePerformance;
pub use sweep::{run_sweep, SweepRow};
