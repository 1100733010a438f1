//! Second-law audit of a solved cycle: flow exergy at every station,
//! component efficiencies and destruction rates, and entropy generation.
//!
//! The dead state is always the ambient (T0, P0), also for cooled-inlet
//! cases. Rates are in kW.

use serde::{Deserialize, Serialize};

use crate::cycle::{CycleResult, StationId, StationState};
use crate::error::{Error, Result};
use crate::gasmodel::{AmbientState, Fuel, GasProperties};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombustorConvention {
    /// Fuel exergy is an input: eta = out / (in + fuel).
    #[default]
    FuelAsInput,
    /// eta = out / (in - fuel), kept for comparison with published numbers.
    /// Produces negative efficiencies for any real fuel.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct ExergyOptions {
    pub combustor_convention: CombustorConvention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    #[serde(rename = "fan")]
    Fan,
    #[serde(rename = "LPC")]
    Lpc,
    #[serde(rename = "HPC")]
    Hpc,
    #[serde(rename = "combustor")]
    Combustor,
    #[serde(rename = "HPT")]
    Hpt,
    #[serde(rename = "LPT")]
    Lpt,
}

impl Component {
    pub const ALL: [Component; 6] = [
        Component::Fan,
        Component::Lpc,
        Component::Hpc,
        Component::Combustor,
        Component::Hpt,
        Component::Lpt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::Fan => "fan",
            Component::Lpc => "LPC",
            Component::Hpc => "HPC",
            Component::Combustor => "combustor",
            Component::Hpt => "HPT",
            Component::Lpt => "LPT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowExergy {
    pub station_id: StationId,
    /// kW
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComponentExergyRecord {
    pub component: Component,
    /// `None` when the component does no work or has no exergy change.
    pub eta_ex: Option<f64>,
    /// kW
    pub destruction: f64,
}

/// Exergy bookkeeping for the whole engine in the ground frame.
///
/// Inputs: fuel chemical exergy, the fuel's kinetic exergy at flight speed,
/// and the intake stream's exergy (nonzero only when the chiller runs).
/// Outputs: thrust power, shaft off-take, the exhaust residual and the
/// component destructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExergyBalance {
    pub fuel_exergy: f64,
    pub fuel_kinetic_exergy: f64,
    pub intake_exergy: f64,
    pub thrust_power: f64,
    pub offtake: f64,
    pub exhaust_residual: f64,
    pub component_destruction: f64,
}

impl ExergyBalance {
    pub fn inputs(&self) -> f64 {
        self.fuel_exergy + self.fuel_kinetic_exergy + self.intake_exergy
    }

    pub fn outputs(&self) -> f64 {
        self.thrust_power + self.offtake + self.exhaust_residual + self.component_destruction
    }

    /// Relative mismatch between inputs and outputs.
    pub fn closure_error(&self) -> f64 {
        (self.inputs() - self.outputs()).abs() / self.inputs().abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExergyReport {
    pub per_component: Vec<ComponentExergyRecord>,
    pub stations: Vec<FlowExergy>,
    /// kW
    pub fuel_exergy_rate: f64,
    pub engine_eta_ex: f64,
    /// Exhaust jets' thermal and kinetic exergy relative to still ambient
    /// air, plus the nozzle losses, kW.
    pub exhaust_residual: f64,
    /// Component destructions plus the exhaust residual, kW.
    pub total_destruction: f64,
    /// kW/K
    pub entropy_generation: f64,
    pub balance: ExergyBalance,
}

impl ExergyReport {
    pub fn component(&self, c: Component) -> &ComponentExergyRecord {
        self.per_component
            .iter()
            .find(|r| r.component == c)
            .expect("every component is audited")
    }

    /// Component with the largest destruction rate.
    pub fn dominant_destruction(&self) -> Component {
        self.per_component
            .iter()
            .max_by(|a, b| a.destruction.total_cmp(&b.destruction))
            .map(|r| r.component)
            .expect("every component is audited")
    }
}

/// Specific flow exergy relative to the ambient dead state, J/kg.
pub fn specific_exergy(t: f64, p: f64, ambient: &AmbientState, gas: &GasProperties) -> f64 {
    let t0 = ambient.t0;
    gas.cp * (t - t0) - t0 * (gas.cp * (t / t0).ln() - gas.r() * (p / ambient.p0).ln())
}

pub fn physical_exergy(station: &StationState, ambient: &AmbientState, gas: &GasProperties) -> FlowExergy {
    FlowExergy {
        station_id: station.station_id,
        rate: station.mdot * specific_exergy(station.t, station.p, ambient, gas) / 1000.0,
    }
}

/// Chemical exergy inflow with the fuel, kW.
pub fn fuel_exergy_rate(fuel_flow: f64, fuel: &Fuel) -> f64 {
    fuel_flow * fuel.chem_exergy * 1000.0
}

/// Thrust power over fuel exergy. Zero at zero flight speed.
pub fn engine_exergetic_efficiency(thrust: f64, v0: f64, fuel_exergy: f64) -> Result<f64> {
    if v0 == 0.0 {
        return Ok(0.0);
    }
    if !(fuel_exergy > 0.0) {
        return Err(Error::UndefinedMetric {
            metric: "etaExergetic",
            reason: "fuel exergy is not positive",
        });
    }
    Ok(thrust * v0 / fuel_exergy)
}

/// Gouy-Stodola: destruction over dead-state temperature, kW/K.
pub fn entropy_generation(components: &[ComponentExergyRecord], exhaust_residual: f64, t0: f64) -> f64 {
    let sum: f64 = components.iter().map(|c| c.destruction).sum();
    (sum + exhaust_residual) / t0
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0 && num != 0.0).then(|| num / den)
}

/// Compressor-type record: power in, exergy rise out.
pub fn compressor_record(component: Component, power: f64, psi_in: f64, psi_out: f64) -> ComponentExergyRecord {
    ComponentExergyRecord {
        component,
        eta_ex: ratio(psi_out - psi_in, power),
        destruction: power + psi_in - psi_out,
    }
}

/// Turbine-type record: exergy drop in, power out.
pub fn turbine_record(component: Component, power: f64, psi_in: f64, psi_out: f64) -> ComponentExergyRecord {
    ComponentExergyRecord {
        component,
        eta_ex: ratio(power, psi_in - psi_out),
        destruction: psi_in - psi_out - power,
    }
}

pub fn combustor_record(
    psi_in: f64,
    psi_out: f64,
    fuel_exergy: f64,
    convention: CombustorConvention,
) -> ComponentExergyRecord {
    let denominator = match convention {
        CombustorConvention::FuelAsInput => psi_in + fuel_exergy,
        CombustorConvention::AsPrinted => psi_in - fuel_exergy,
    };
    ComponentExergyRecord {
        component: Component::Combustor,
        eta_ex: ratio(psi_out, denominator),
        destruction: psi_in + fuel_exergy - psi_out,
    }
}

/// Full audit of a solved cycle.
pub fn audit(cycle: &CycleResult, options: &ExergyOptions) -> Result<ExergyReport> {
    if options.combustor_convention == CombustorConvention::AsPrinted {
        log::warn!("combustor exergetic efficiency uses the (in - fuel) denominator; values will be negative");
    }
    let amb = &cycle.ambient;
    let gas = &cycle.gas_props;
    let st = |id| *cycle.station(id);
    let rate = |s: StationState, g: &GasProperties| physical_exergy(&s, amb, g).rate;

    let s2 = st(StationId::DiffuserExit);
    let s31 = st(StationId::FanExit);
    let s32 = st(StationId::LpcExit);
    let s4 = st(StationId::HpcExit);
    let s5 = st(StationId::CombustorExit);
    let s6 = st(StationId::HptExit);
    let s7 = st(StationId::LptExit);
    let s8 = st(StationId::HotNozzleExit);
    let s9 = st(StationId::ColdNozzleExit);

    let psi2 = rate(s2, &gas.diffuser);
    let psi31 = rate(s31, &gas.fan);
    let psi31_core = psi31 * cycle.m_hot / cycle.mass_flow;
    let psi31_bypass = psi31 - psi31_core;
    let psi32 = rate(s32, &gas.lpc);
    let psi4 = rate(s4, &gas.hpc);
    let psi5 = rate(s5, &gas.hpt);
    let psi6 = rate(s6, &gas.hpt);
    let psi7 = rate(s7, &gas.lpt);
    let psi8 = rate(s8, &gas.hot_nozzle);
    let psi9 = rate(s9, &gas.cold_nozzle);

    let mut stations: Vec<FlowExergy> = [StationId::Ambient, StationId::Inlet]
        .into_iter()
        .map(|id| physical_exergy(cycle.station(id), amb, &gas.diffuser))
        .collect();
    for (id, r) in [
        (StationId::DiffuserExit, psi2),
        (StationId::FanExit, psi31),
        (StationId::LpcExit, psi32),
        (StationId::HpcExit, psi4),
        (StationId::CombustorExit, psi5),
        (StationId::HptExit, psi6),
        (StationId::LptExit, psi7),
        (StationId::HotNozzleExit, psi8),
        (StationId::ColdNozzleExit, psi9),
    ] {
        stations.push(FlowExergy {
            station_id: id,
            rate: r,
        });
    }

    let fuel_exergy = fuel_exergy_rate(cycle.fuel_flow, &cycle.fuel);
    let w = &cycle.power;
    let per_component = vec![
        compressor_record(Component::Fan, w.w_fan, psi2, psi31),
        compressor_record(Component::Lpc, w.w_lpc, psi31_core, psi32),
        compressor_record(Component::Hpc, w.w_hpc, psi32, psi4),
        combustor_record(psi4, psi5, fuel_exergy, options.combustor_convention),
        turbine_record(Component::Hpt, w.w_hpt, psi5, psi6),
        turbine_record(Component::Lpt, w.w_lpt, psi6, psi7),
    ];

    // Ground frame: still air and the exhaust are judged relative to the
    // dead state at rest, while the engine moves at v0.
    let v0 = cycle.flight_speed;
    let jet = |m: f64, psi_exit: f64, v: f64| psi_exit + m * 0.5 * (v - v0).powi(2) / 1000.0;
    let nozzle_loss = |psi_in: f64, m: f64, psi_exit: f64, v: f64| psi_in - psi_exit - m * 0.5 * v * v / 1000.0;
    let hot = &cycle.hot_nozzle;
    let cold = &cycle.cold_nozzle;
    let pressure_thrust = hot.exit_area * (hot.exit_pressure - amb.p0) + cold.exit_area * (cold.exit_pressure - amb.p0);
    let exhaust_residual = nozzle_loss(psi7, s8.mdot, psi8, hot.velocity)
        + nozzle_loss(psi31_bypass, s9.mdot, psi9, cold.velocity)
        + jet(s8.mdot, psi8, hot.velocity)
        + jet(s9.mdot, psi9, cold.velocity)
        - v0 * pressure_thrust;

    let component_destruction: f64 = per_component.iter().map(|c| c.destruction).sum();
    let total_destruction = component_destruction + exhaust_residual;
    let balance = ExergyBalance {
        fuel_exergy,
        fuel_kinetic_exergy: cycle.fuel_flow * 0.5 * v0 * v0 / 1000.0,
        intake_exergy: psi2 - cycle.mass_flow * 0.5 * v0 * v0 / 1000.0,
        thrust_power: cycle.thrust.f_total * v0,
        offtake: w.w_offtake,
        exhaust_residual,
        component_destruction,
    };

    Ok(ExergyReport {
        entropy_generation: entropy_generation(&per_component, exhaust_residual, amb.t0),
        per_component,
        stations,
        fuel_exergy_rate: fuel_exergy,
        engine_eta_ex: engine_exergetic_efficiency(cycle.thrust.f_total, v0, fuel_exergy)?,
        exhaust_residual,
        total_destruction,
        balance,
    })
}
