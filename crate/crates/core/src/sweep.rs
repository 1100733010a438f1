//! Inlet-temperature and fuel sweeps over a fixed engine and flight
//! condition.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle::{run_cycle, EngineSpec, FlightCondition};
use crate::error::{Error, Result};
use crate::exergy::{audit, ExergyOptions, ExergyReport};
use crate::gasmodel::Fuel;
use crate::performance::CyclePerformance;

/// Evenly spaced inlet temperature offsets, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DeltaTRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl DeltaTRange {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::Config(format!("sweep step {} must be positive", self.step)));
        }
        if !(self.min <= self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Config(format!(
                "sweep range [{}, {}] is empty or not finite",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// `min`, `min + step`, ... up to `max`. A step that does not divide
    /// the range stops short of `max`.
    pub fn values(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let span = (self.max - self.min) / self.step;
        let n = (span + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| self.min + i as f64 * self.step).collect())
    }
}

/// One (deltaT, fuel) point. Exactly one of `result` and `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepRow {
    #[serde(rename = "deltaT")]
    pub delta_t: f64,
    pub fuel: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<SweepPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepPoint {
    /// kg/s
    pub mass_flow: f64,
    pub performance: CyclePerformance,
    pub exergy: ExergyReport,
}

fn evaluate(spec: &EngineSpec, flight: &FlightCondition, fuel: &Fuel, options: &ExergyOptions) -> Result<SweepPoint> {
    let cycle = run_cycle(spec, flight, fuel)?;
    let exergy = audit(&cycle, options)?;
    Ok(SweepPoint {
        mass_flow: cycle.mass_flow,
        performance: cycle.performance,
        exergy,
    })
}

/// Runs every (fuel, deltaT) combination, fuel-major. Rows are computed in
/// parallel but returned in grid order, so output is deterministic.
/// A point that fails is kept with its error message.
pub fn run_sweep(
    spec: &EngineSpec,
    flight: &FlightCondition,
    fuels: &[Fuel],
    delta_ts: &[f64],
    options: &ExergyOptions,
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    if fuels.is_empty() {
        return Err(Error::Config("sweep needs at least one fuel".into()));
    }
    let grid: Vec<(&Fuel, f64)> = fuels
        .iter()
        .flat_map(|f| delta_ts.iter().map(move |&dt| (f, dt)))
        .collect();
    Ok(grid
        .into_par_iter()
        .map(|(fuel, dt)| {
            let outcome = evaluate(spec, &flight.with_delta_t(dt), fuel, options);
            if let Err(e) = &outcome {
                log::warn!("sweep point {} at deltaT {dt} failed: {e}", fuel.name);
            }
            SweepRow {
                delta_t: dt,
                fuel: fuel.name.clone(),
                error: outcome.as_ref().err().map(|e| e.to_string()),
                result: outcome.ok(),
            }
        })
        .collect())
}
