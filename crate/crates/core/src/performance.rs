//! Scalar performance metrics and NOx indices of a solved cycle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exergy;
use crate::gasmodel::Fuel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CyclePerformance {
    /// kN
    pub thrust: f64,
    /// g/kNs
    pub tsfc: f64,
    pub eta_thermal: f64,
    pub eta_propulsive: f64,
    pub eta_overall: f64,
    pub eta_exergetic: f64,
    /// Ns/kg
    pub tsf: f64,
    /// kg/s
    pub fuel_flow: f64,
    pub snox: f64,
    /// g/s
    pub nox_rate: f64,
    /// kW
    pub offtake: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EmissionInputs {
    /// HPC delivery pressure, kPa.
    #[serde(rename = "P4")]
    pub p4: f64,
    /// HPC delivery temperature, K.
    #[serde(rename = "T4")]
    pub t4: f64,
    pub war: f64,
}

/// Everything the metrics need from a solved cycle.
#[derive(Debug, Clone, Copy)]
pub struct PerformanceInputs<'a> {
    pub thrust: f64,
    pub fuel_flow: f64,
    pub mass_flow: f64,
    pub m_hot: f64,
    pub m_cold: f64,
    pub v_hot: f64,
    pub v_cold: f64,
    pub v0: f64,
    pub fuel: &'a Fuel,
    pub p4: f64,
    pub t4: f64,
    pub water_air_ratio: f64,
    pub offtake: f64,
}

/// Thrust-specific fuel consumption, g/kNs.
pub fn tsfc(fuel_flow: f64, thrust: f64) -> Result<f64> {
    if !(thrust > 0.0) {
        return Err(Error::UndefinedMetric {
            metric: "TSFC",
            reason: "thrust is not positive",
        });
    }
    Ok(fuel_flow * 1000.0 / thrust)
}

/// Jet kinetic-energy rise across the engine, W. The core inflow is charged
/// with the flight kinetic energy of the core air only; the fuel enters at
/// rest.
pub fn kinetic_term(m_hot: f64, m_cold: f64, m_fuel: f64, v_hot: f64, v_cold: f64, v0: f64) -> f64 {
    (m_hot + m_fuel) * v_hot * v_hot - m_hot * v0 * v0 + m_cold * (v_cold * v_cold - v0 * v0)
}

/// Kinetic-energy rise over twice the fuel heat release rate.
pub fn thermal_efficiency(kinetic: f64, fuel_flow: f64, fuel: &Fuel) -> Result<f64> {
    if !(fuel_flow > 0.0) {
        return Err(Error::UndefinedMetric {
            metric: "etaThermal",
            reason: "no fuel is burned",
        });
    }
    Ok(kinetic / (2.0 * fuel_flow * fuel.fhv_j_per_kg()))
}

/// Thrust power over the kinetic-energy rise. Zero at zero flight speed.
/// Pressure thrust from choked nozzles counts in `thrust` but not in
/// `kinetic`, so values above 1 are possible.
pub fn propulsive_efficiency(thrust: f64, v0: f64, kinetic: f64) -> Result<f64> {
    if v0 == 0.0 {
        return Ok(0.0);
    }
    if !(kinetic > 0.0) {
        return Err(Error::UndefinedMetric {
            metric: "etaPropulsive",
            reason: "jets add no kinetic energy",
        });
    }
    Ok(thrust * 1000.0 * v0 / kinetic)
}

pub fn overall_efficiency(eta_thermal: f64, eta_propulsive: f64) -> f64 {
    eta_thermal * eta_propulsive
}

/// Specific thrust, Ns/kg.
pub fn tsf(thrust: f64, intake_flow: f64) -> Result<f64> {
    if !(intake_flow > 0.0) {
        return Err(Error::UndefinedMetric {
            metric: "TSF",
            reason: "intake flow is not positive",
        });
    }
    Ok(thrust * 1000.0 / intake_flow)
}

/// NOx severity index from combustor inlet conditions.
pub fn snox(inputs: &EmissionInputs) -> f64 {
    (inputs.p4 / 2965.0).powf(0.4) * ((inputs.t4 - 826.0) / 194.0 + (6.29 - 100.0 * inputs.war) / 53.2).exp()
}

/// NOx production, g/s.
pub fn nox_rate(snox: f64, fuel_flow: f64) -> f64 {
    23.0 * snox * fuel_flow
}

pub fn evaluate(p: &PerformanceInputs) -> Result<CyclePerformance> {
    let kinetic = kinetic_term(p.m_hot, p.m_cold, p.fuel_flow, p.v_hot, p.v_cold, p.v0);
    let eta_thermal = thermal_efficiency(kinetic, p.fuel_flow, p.fuel)?;
    let eta_propulsive = propulsive_efficiency(p.thrust, p.v0, kinetic)?;
    let fuel_exergy = exergy::fuel_exergy_rate(p.fuel_flow, p.fuel);
    let snox = snox(&EmissionInputs {
        p4: p.p4,
        t4: p.t4,
        war: p.water_air_ratio,
    });
    Ok(CyclePerformance {
        thrust: p.thrust,
        tsfc: tsfc(p.fuel_flow, p.thrust)?,
        eta_thermal,
        eta_propulsive,
        eta_overall: overall_efficiency(eta_thermal, eta_propulsive),
        eta_exergetic: exergy::engine_exergetic_efficiency(p.thrust, p.v0, fuel_exergy)?,
        tsf: tsf(p.thrust, p.mass_flow)?,
        fuel_flow: p.fuel_flow,
        snox,
        nox_rate: nox_rate(snox, p.fuel_flow),
        offtake: p.offtake,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn unit_arithmetic() {
        assert_eq!(tsfc(1.0, 100.0).unwrap(), 10.0);
        assert!(tsfc(1.0, 0.0).is_err());
        assert_eq!(tsf(100.0, 1000.0).unwrap(), 100.0);
        assert_relative_eq!(overall_efficiency(0.5, 0.8), 0.4);
        assert_eq!(nox_rate(1.0, 1.0), 23.0);
        assert_eq!(propulsive_efficiency(50.0, 0.0, 1e6).unwrap(), 0.0);
    }

    #[test]
    fn snox_reference_point() {
        let s = snox(&EmissionInputs {
            p4: 2965.0,
            t4: 826.0,
            war: 0.0,
        });
        assert!((s - (6.29f64 / 53.2).exp()).abs() < 1e-12);
        assert!((s - 1.1255).abs() < 1e-4);
        // Humidity term cancels exactly.
        let dry = snox(&EmissionInputs {
            p4: 2965.0,
            t4: 826.0,
            war: 0.0629,
        });
        assert!((dry - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kinetic_term_hand_value() {
        let b = kinetic_term(100.0, 900.0, 2.0, 600.0, 300.0, 250.0);
        let expected = 102.0 * 600.0 * 600.0 - 100.0 * 250.0 * 250.0 + 900.0 * (300.0 * 300.0 - 250.0 * 250.0);
        assert_relative_eq!(b, expected);
        assert_eq!(kinetic_term(100.0, 900.0, 0.0, 0.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn thermal_efficiency_needs_fuel() {
        assert!(thermal_efficiency(1e6, 0.0, &Fuel::jp10()).is_err());
        let eta = thermal_efficiency(2.0 * 42.075e6, 1.0, &Fuel::jp10()).unwrap();
        assert_relative_eq!(eta, 1.0);
    }

    proptest! {
        #[test]
        fn snox_partial_derivative_signs(p4 in 100.0f64..5000.0, t4 in 400.0f64..1100.0, war in 0.0f64..0.1) {
            let at = |p4, t4, war| snox(&EmissionInputs { p4, t4, war });
            let base = at(p4, t4, war);
            let h = 1e-3;
            prop_assert!(at(p4, t4 + h, war) > base);
            prop_assert!(at(p4 + h, t4, war) > base);
            prop_assert!(at(p4, t4, war + 1e-4) < base);
        }

        #[test]
        fn nox_rate_linear(s in 0.0f64..5.0, mf in 0.0f64..10.0, c in 0.1f64..10.0) {
            prop_assert!((nox_rate(c * s, mf) - c * nox_rate(s, mf)).abs() <= 1e-9 * nox_rate(c * s, mf).max(1.0));
            prop_assert!((nox_rate(s, c * mf) - c * nox_rate(s, mf)).abs() <= 1e-9 * nox_rate(s, c * mf).max(1.0));
        }
    }
}
