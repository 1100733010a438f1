//! Station-by-station design-point model of a separate-flow turbofan with an
//! intake chiller.
//!
//! Station numbering: 0 ambient, 1 after the chiller, 2 diffuser exit,
//! 31 fan exit, 32 LPC exit, 4 HPC exit, 5 combustor exit, 6 HPT exit,
//! 7 LPT exit, 8 hot nozzle exit, 9 cold nozzle exit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gasmodel::{
    air_density, apply_inlet_cooling, isa_ambient, AmbientState, Fuel, GasProperties, InletState, R_AIR,
    SEA_LEVEL_PRESSURE, SEA_LEVEL_TEMPERATURE,
};
use crate::performance::{self, CyclePerformance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FlightCondition {
    pub mach: f64,
    pub altitude: f64,
    #[serde(default, rename = "deltaT")]
    pub delta_t: f64,
}

impl FlightCondition {
    /// Static sea-level take-off.
    pub fn takeoff() -> Self {
        FlightCondition {
            mach: 0.0,
            altitude: 0.0,
            delta_t: 0.0,
        }
    }

    /// Cruise design point, Mach 0.85 at 10 km.
    pub fn on_design() -> Self {
        FlightCondition {
            mach: 0.85,
            altitude: 10_000.0,
            delta_t: 0.0,
        }
    }

    pub fn with_delta_t(self, delta_t: f64) -> Self {
        FlightCondition { delta_t, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mach >= 0.0) || !self.mach.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mach",
                value: self.mach,
                reason: "must be finite and non-negative",
            });
        }
        if !self.delta_t.is_finite() {
            return Err(Error::InvalidParameter {
                name: "deltaT",
                value: self.delta_t,
                reason: "must be finite",
            });
        }
        isa_ambient(self.altitude).map(|_| ())
    }
}

/// Working-gas properties for each component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct GasSet {
    pub diffuser: GasProperties,
    pub fan: GasProperties,
    pub lpc: GasProperties,
    pub hpc: GasProperties,
    pub hpt: GasProperties,
    pub lpt: GasProperties,
    pub hot_nozzle: GasProperties,
    pub cold_nozzle: GasProperties,
    /// Mean specific heat across the combustor, J/kgK.
    pub combustor_cp: f64,
}

impl Default for GasSet {
    fn default() -> Self {
        let cold = GasProperties::COLD_AIR;
        let hot = GasProperties::HOT_GAS;
        GasSet {
            diffuser: cold,
            fan: cold,
            lpc: cold,
            hpc: cold,
            hpt: hot,
            lpt: hot,
            hot_nozzle: hot,
            cold_nozzle: cold,
            combustor_cp: 1200.0,
        }
    }
}

/// Engine design parameters. Missing fields in a config file fall back to
/// the GEnx-1B70 defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct EngineSpec {
    /// Turbine inlet temperature (station 5), K.
    #[serde(rename = "TIT")]
    pub tit: f64,
    pub pi_fan: f64,
    #[serde(rename = "piLPC")]
    pub pi_lpc: f64,
    #[serde(rename = "piHPC")]
    pub pi_hpc: f64,
    pub alpha: f64,
    /// Intake flow at sea-level static standard conditions, kg/s.
    pub design_mass_flow: f64,
    pub eta_fan: f64,
    #[serde(rename = "etaLPC")]
    pub eta_lpc: f64,
    #[serde(rename = "etaHPC")]
    pub eta_hpc: f64,
    #[serde(rename = "etaHPT")]
    pub eta_hpt: f64,
    #[serde(rename = "etaLPT")]
    pub eta_lpt: f64,
    pub eta_nozzle_hot: f64,
    pub eta_nozzle_cold: f64,
    pub eta_combustor: f64,
    pub combustor_pressure_drop_frac: f64,
    /// Auxiliary shaft off-take from the HPT, kW.
    pub aux_offtake: f64,
    #[serde(rename = "chillerCOP")]
    pub chiller_cop: f64,
    /// Liquid water to air ratio used by the NOx severity index.
    pub water_air_ratio: f64,
    pub gas_props: GasSet,
}

impl Default for EngineSpec {
    fn default() -> Self {
        Self::genx_1b70()
    }
}

impl EngineSpec {
    pub fn genx_1b70() -> Self {
        EngineSpec {
            tit: 1695.0,
            pi_fan: 1.5,
            pi_lpc: 1.3,
            pi_hpc: 23.0,
            alpha: 9.1,
            design_mass_flow: 1155.43,
            eta_fan: 0.91,
            eta_lpc: 0.91,
            eta_hpc: 0.91,
            eta_hpt: 0.88,
            eta_lpt: 0.88,
            eta_nozzle_hot: 0.95,
            eta_nozzle_cold: 0.90,
            eta_combustor: 0.99,
            combustor_pressure_drop_frac: 0.05,
            aux_offtake: 50.0,
            chiller_cop: 6.0,
            water_air_ratio: 0.0,
            gas_props: GasSet::default(),
        }
    }

    /// Overall core pressure ratio, LPC times HPC.
    pub fn pi_core(&self) -> f64 {
        self.pi_lpc * self.pi_hpc
    }

    pub fn validate(&self) -> Result<()> {
        let ratios = [("piFan", self.pi_fan), ("piLPC", self.pi_lpc), ("piHPC", self.pi_hpc)];
        for (name, v) in ratios {
            if !(v >= 1.0) || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "pressure ratio must be at least 1",
                });
            }
        }
        let etas = [
            ("etaFan", self.eta_fan),
            ("etaLPC", self.eta_lpc),
            ("etaHPC", self.eta_hpc),
            ("etaHPT", self.eta_hpt),
            ("etaLPT", self.eta_lpt),
            ("etaNozzleHot", self.eta_nozzle_hot),
            ("etaNozzleCold", self.eta_nozzle_cold),
            ("etaCombustor", self.eta_combustor),
        ];
        for (name, v) in etas {
            check_efficiency(name, v)?;
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                reason: "bypass ratio must be positive",
            });
        }
        if !(self.tit > 400.0) || !self.tit.is_finite() {
            return Err(Error::InvalidParameter {
                name: "TIT",
                value: self.tit,
                reason: "must exceed 400 K",
            });
        }
        if !(0.0..=0.1).contains(&self.combustor_pressure_drop_frac) {
            return Err(Error::OutOfRange {
                quantity: "combustorPressureDropFrac",
                value: self.combustor_pressure_drop_frac,
                min: 0.0,
                max: 0.1,
            });
        }
        let positives = [
            ("designMassFlow", self.design_mass_flow),
            ("chillerCOP", self.chiller_cop),
            ("gasProps.combustorCp", self.gas_props.combustor_cp),
        ];
        for (name, v) in positives {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be positive",
                });
            }
        }
        if !(self.aux_offtake >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "auxOfftake",
                value: self.aux_offtake,
                reason: "must be non-negative",
            });
        }
        if !(self.water_air_ratio >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "waterAirRatio",
                value: self.water_air_ratio,
                reason: "must be non-negative",
            });
        }
        Ok(())
    }
}

fn check_efficiency(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            reason: "efficiency must lie in (0, 1]",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum StationId {
    Ambient,
    Inlet,
    DiffuserExit,
    FanExit,
    LpcExit,
    HpcExit,
    CombustorExit,
    HptExit,
    LptExit,
    HotNozzleExit,
    ColdNozzleExit,
}

impl StationId {
    pub const ALL: [StationId; 11] = [
        StationId::Ambient,
        StationId::Inlet,
        StationId::DiffuserExit,
        StationId::FanExit,
        StationId::LpcExit,
        StationId::HpcExit,
        StationId::CombustorExit,
        StationId::HptExit,
        StationId::LptExit,
        StationId::HotNozzleExit,
        StationId::ColdNozzleExit,
    ];

    pub fn number(self) -> u8 {
        match self {
            StationId::Ambient => 0,
            StationId::Inlet => 1,
            StationId::DiffuserExit => 2,
            StationId::FanExit => 31,
            StationId::LpcExit => 32,
            StationId::HpcExit => 4,
            StationId::CombustorExit => 5,
            StationId::HptExit => 6,
            StationId::LptExit => 7,
            StationId::HotNozzleExit => 8,
            StationId::ColdNozzleExit => 9,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            StationId::Ambient => "ambient",
            StationId::Inlet => "inlet",
            StationId::DiffuserExit => "diffuser exit",
            StationId::FanExit => "fan exit",
            StationId::LpcExit => "LPC exit",
            StationId::HpcExit => "HPC exit",
            StationId::CombustorExit => "combustor exit",
            StationId::HptExit => "HPT exit",
            StationId::LptExit => "LPT exit",
            StationId::HotNozzleExit => "hot nozzle exit",
            StationId::ColdNozzleExit => "cold nozzle exit",
        }
    }
}

impl From<StationId> for u8 {
    fn from(s: StationId) -> u8 {
        s.number()
    }
}

impl TryFrom<u8> for StationId {
    type Error = String;
    fn try_from(n: u8) -> std::result::Result<Self, String> {
        StationId::ALL
            .into_iter()
            .find(|s| s.number() == n)
            .ok_or_else(|| format!("no station numbered {n}"))
    }
}

impl fmt::Display for StationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.number(), self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StationState {
    pub station_id: StationId,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "P")]
    pub p: f64,
    pub mdot: f64,
}

impl StationState {
    pub fn new(station_id: StationId, t: f64, p: f64, mdot: f64) -> Self {
        StationState { station_id, t, p, mdot }
    }

    fn with_mdot(self, mdot: f64) -> Self {
        StationState { mdot, ..self }
    }
}

/// Every station of a solved cycle, in flow order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StationTable(Vec<StationState>);

impl StationTable {
    pub fn get(&self, id: StationId) -> &StationState {
        self.0
            .iter()
            .find(|s| s.station_id == id)
            .expect("a solved cycle records every station")
    }

    pub fn iter(&self) -> impl Iterator<Item = &StationState> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Shaft powers, kW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PowerLedger {
    pub w_fan: f64,
    #[serde(rename = "wLPC")]
    pub w_lpc: f64,
    #[serde(rename = "wHPC")]
    pub w_hpc: f64,
    #[serde(rename = "wHPT")]
    pub w_hpt: f64,
    #[serde(rename = "wLPT")]
    pub w_lpt: f64,
    pub w_offtake: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NozzleExit {
    /// m/s
    pub velocity: f64,
    /// kPa
    pub exit_pressure: f64,
    /// K
    pub exit_temperature: f64,
    /// m²
    pub exit_area: f64,
    pub choked: bool,
}

/// Thrust split by stream, kN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Thrust {
    pub f_hot: f64,
    pub f_cold: f64,
    pub f_total: f64,
}

/// Ideal (loss-free) ram compression from flight Mach number.
pub fn diffuser(inlet: &InletState, mach: f64, gas: &GasProperties) -> Result<StationState> {
    if !(mach >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "mach",
            value: mach,
            reason: "must be non-negative",
        });
    }
    let t2 = inlet.t1 * (1.0 + 0.5 * (gas.k - 1.0) * mach * mach);
    let p2 = inlet.p1 * (t2 / inlet.t1).powf(gas.k / (gas.k - 1.0));
    Ok(StationState::new(StationId::DiffuserExit, t2, p2, 0.0))
}

/// Adiabatic compression. Returns the exit state (same mass flow, labelled
/// `out_id`) and the specific work in J/kg.
pub fn compress(
    inlet: &StationState,
    out_id: StationId,
    pi: f64,
    eta: f64,
    gas: &GasProperties,
) -> Result<(StationState, f64)> {
    if !(pi >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "pressure ratio",
            value: pi,
            reason: "compressor pressure ratio must be at least 1",
        });
    }
    check_efficiency("compressor efficiency", eta)?;
    let t_out = inlet.t + inlet.t / eta * (pi.powf(gas.isentropic_exponent()) - 1.0);
    let out = StationState::new(out_id, t_out, inlet.p * pi, inlet.mdot);
    Ok((out, gas.cp * (t_out - inlet.t)))
}

/// Core and bypass flows for a bypass ratio.
pub fn split_flow(m_total: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "bypass ratio must be positive",
        });
    }
    let m_hot = m_total / (alpha + 1.0);
    Ok((m_hot, m_total - m_hot))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombustorOutlet {
    pub state: StationState,
    /// kg/s
    pub fuel_flow: f64,
    /// kW
    pub heat_rate: f64,
}

/// Heat addition up to `tit`. `inlet.mdot` is the core air flow; the exit
/// flow includes the fuel.
pub fn combustor(
    inlet: &StationState,
    tit: f64,
    fuel: &Fuel,
    eta_cc: f64,
    drop_frac: f64,
    mean_cp: f64,
) -> Result<CombustorOutlet> {
    if tit < inlet.t {
        return Err(Error::infeasible(
            StationId::CombustorExit,
            format!(
                "turbine inlet temperature {tit:.1} K is below the compressor delivery temperature {:.1} K",
                inlet.t
            ),
        ));
    }
    check_efficiency("etaCombustor", eta_cc)?;
    let heat_rate = inlet.mdot * mean_cp * (tit - inlet.t) / 1000.0;
    let fuel_flow = heat_rate * 1000.0 / (fuel.fhv_j_per_kg() * eta_cc);
    let state = StationState::new(
        StationId::CombustorExit,
        tit,
        inlet.p * (1.0 - drop_frac),
        inlet.mdot + fuel_flow,
    );
    Ok(CombustorOutlet {
        state,
        fuel_flow,
        heat_rate,
    })
}

/// Expands the flow until it has delivered `required_power` kW.
pub fn turbine_expand_to_power(
    inlet: &StationState,
    out_id: StationId,
    required_power: f64,
    eta: f64,
    gas: &GasProperties,
) -> Result<StationState> {
    if !(required_power >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "turbine power",
            value: required_power,
            reason: "must be non-negative",
        });
    }
    check_efficiency("turbine efficiency", eta)?;
    let available = inlet.mdot * gas.cp * inlet.t / 1000.0;
    if required_power >= available {
        return Err(Error::infeasible(
            out_id,
            format!(
                "turbine must deliver {required_power:.0} kW but the flow carries only {available:.0} kW of enthalpy"
            ),
        ));
    }
    let t_out = inlet.t - required_power * 1000.0 / (inlet.mdot * gas.cp);
    let bracket = 1.0 - (1.0 - t_out / inlet.t) / eta;
    if bracket <= 0.0 {
        return Err(Error::infeasible(
            out_id,
            format!("expansion to {t_out:.1} K needs more than the full isentropic drop at efficiency {eta}"),
        ));
    }
    let p_out = inlet.p * bracket.powf(gas.k / (gas.k - 1.0));
    Ok(StationState::new(out_id, t_out, p_out, inlet.mdot))
}

/// Critical pressure ratio of a convergent nozzle with losses.
pub fn critical_pressure_ratio(eta: f64, gas: &GasProperties) -> f64 {
    let k = gas.k;
    (1.0 - (1.0 / eta) * (k - 1.0) / (k + 1.0)).powf(-k / (k - 1.0))
}

/// Convergent nozzle: fully expanded when unchoked, sonic exit otherwise.
pub fn nozzle(
    inlet: &StationState,
    out_id: StationId,
    eta: f64,
    gas: &GasProperties,
    ambient_p: f64,
) -> Result<NozzleExit> {
    check_efficiency("nozzle efficiency", eta)?;
    if inlet.p < ambient_p {
        return Err(Error::infeasible(
            out_id,
            format!(
                "nozzle entry pressure {:.3} kPa is below ambient {ambient_p:.3} kPa",
                inlet.p
            ),
        ));
    }
    let k = gas.k;
    let r = gas.r();
    let pr_crit = critical_pressure_ratio(eta, gas);
    let (velocity, exit_pressure, exit_temperature, choked) = if inlet.p / ambient_p < pr_crit {
        let expansion = 1.0 - (ambient_p / inlet.p).powf(gas.isentropic_exponent());
        let v = (2.0 * eta * k / (k - 1.0) * r * inlet.t * expansion).max(0.0).sqrt();
        (v, ambient_p, inlet.t - v * v / (2.0 * gas.cp), false)
    } else {
        let te = 2.0 * inlet.t / (k + 1.0);
        ((k * r * te).sqrt(), inlet.p / pr_crit, te, true)
    };
    let exit_area = if velocity > 0.0 {
        let rho = exit_pressure * 1000.0 / (r * exit_temperature);
        inlet.mdot / (rho * velocity)
    } else {
        0.0
    };
    Ok(NozzleExit {
        velocity,
        exit_pressure,
        exit_temperature,
        exit_area,
        choked,
    })
}

/// Flight speed from Mach number and ambient temperature, m/s.
pub fn flight_speed(mach: f64, t0: f64, gas: &GasProperties) -> f64 {
    mach * (gas.k * R_AIR * t0).sqrt()
}

/// Net thrust of both streams, kN. Mass flows in kg/s, pressures in kPa.
pub fn thrust(
    hot: &NozzleExit,
    cold: &NozzleExit,
    m_hot: f64,
    m_cold: f64,
    m_fuel: f64,
    v0: f64,
    ambient_p: f64,
) -> Thrust {
    let f_hot =
        ((m_hot + m_fuel) * hot.velocity - m_hot * v0) / 1000.0 + hot.exit_area * (hot.exit_pressure - ambient_p);
    let f_cold = (m_cold * cold.velocity - m_cold * v0) / 1000.0 + cold.exit_area * (cold.exit_pressure - ambient_p);
    Thrust {
        f_hot,
        f_cold,
        f_total: f_hot + f_cold,
    }
}

/// Sea-level standard density used to anchor `designMassFlow`, kg/m³.
pub fn reference_density() -> f64 {
    air_density(SEA_LEVEL_TEMPERATURE, SEA_LEVEL_PRESSURE)
}

/// Intake flow scaled from the design flow by the diffuser-exit density.
/// At zero flight speed this is the density after the chiller.
pub fn intake_mass_flow(spec: &EngineSpec, diffuser_exit: &StationState) -> f64 {
    spec.design_mass_flow * air_density(diffuser_exit.t, diffuser_exit.p) / reference_density()
}

/// A fully solved design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CycleResult {
    pub ambient: AmbientState,
    pub inlet: InletState,
    pub flight: FlightCondition,
    pub fuel: Fuel,
    pub gas_props: GasSet,
    /// m/s
    pub flight_speed: f64,
    pub mass_flow: f64,
    pub m_hot: f64,
    pub m_cold: f64,
    pub fuel_flow: f64,
    /// kW
    pub heat_rate: f64,
    pub stations: StationTable,
    pub power: PowerLedger,
    pub hot_nozzle: NozzleExit,
    pub cold_nozzle: NozzleExit,
    pub thrust: Thrust,
    pub performance: CyclePerformance,
}

impl CycleResult {
    pub fn station(&self, id: StationId) -> &StationState {
        self.stations.get(id)
    }
}

/// Runs the whole engine at one flight condition.
pub fn run_cycle(spec: &EngineSpec, cond: &FlightCondition, fuel: &Fuel) -> Result<CycleResult> {
    spec.validate()?;
    cond.validate()?;
    fuel.validate()?;
    let gas = &spec.gas_props;

    let ambient = isa_ambient(cond.altitude)?;
    let unloaded = apply_inlet_cooling(&ambient, cond.delta_t, 0.0, spec.chiller_cop, &gas.diffuser)?;
    let s2 = diffuser(&unloaded, cond.mach, &gas.diffuser)?;
    let mass_flow = intake_mass_flow(spec, &s2);
    let inlet = apply_inlet_cooling(&ambient, cond.delta_t, mass_flow, spec.chiller_cop, &gas.diffuser)?;
    let s2 = s2.with_mdot(mass_flow);
    let w_offtake = spec.aux_offtake + inlet.chiller_power(spec.chiller_cop);

    let s0 = StationState::new(StationId::Ambient, ambient.t0, ambient.p0, mass_flow);
    let s1 = StationState::new(StationId::Inlet, inlet.t1, inlet.p1, mass_flow);

    let (s31, w_fan_specific) = compress(&s2, StationId::FanExit, spec.pi_fan, spec.eta_fan, &gas.fan)?;
    let (m_hot, m_cold) = split_flow(mass_flow, spec.alpha)?;
    let core_in = s31.with_mdot(m_hot);
    let (s32, w_lpc_specific) = compress(&core_in, StationId::LpcExit, spec.pi_lpc, spec.eta_lpc, &gas.lpc)?;
    let (s4, w_hpc_specific) = compress(&s32, StationId::HpcExit, spec.pi_hpc, spec.eta_hpc, &gas.hpc)?;

    let w_fan = mass_flow * w_fan_specific / 1000.0;
    let w_lpc = m_hot * w_lpc_specific / 1000.0;
    let w_hpc = m_hot * w_hpc_specific / 1000.0;

    let burn = combustor(
        &s4,
        spec.tit,
        fuel,
        spec.eta_combustor,
        spec.combustor_pressure_drop_frac,
        gas.combustor_cp,
    )?;
    let s5 = burn.state;

    let w_hpt = w_hpc + w_offtake;
    let w_lpt = w_fan + w_lpc;
    let s6 = turbine_expand_to_power(&s5, StationId::HptExit, w_hpt, spec.eta_hpt, &gas.hpt)?;
    let s7 = turbine_expand_to_power(&s6, StationId::LptExit, w_lpt, spec.eta_lpt, &gas.lpt)?;

    let hot_nozzle = nozzle(
        &s7,
        StationId::HotNozzleExit,
        spec.eta_nozzle_hot,
        &gas.hot_nozzle,
        ambient.p0,
    )?;
    let bypass = s31.with_mdot(m_cold);
    let cold_nozzle = nozzle(
        &bypass,
        StationId::ColdNozzleExit,
        spec.eta_nozzle_cold,
        &gas.cold_nozzle,
        ambient.p0,
    )?;
    let s8 = StationState::new(
        StationId::HotNozzleExit,
        hot_nozzle.exit_temperature,
        hot_nozzle.exit_pressure,
        s7.mdot,
    );
    let s9 = StationState::new(
        StationId::ColdNozzleExit,
        cold_nozzle.exit_temperature,
        cold_nozzle.exit_pressure,
        m_cold,
    );

    let v0 = flight_speed(cond.mach, ambient.t0, &gas.diffuser);
    let thrust = thrust(&hot_nozzle, &cold_nozzle, m_hot, m_cold, burn.fuel_flow, v0, ambient.p0);

    let power = PowerLedger {
        w_fan,
        w_lpc,
        w_hpc,
        w_hpt,
        w_lpt,
        w_offtake,
    };
    let stations = StationTable(vec![s0, s1, s2, s31, s32, s4, s5, s6, s7, s8, s9]);

    let performance = performance::evaluate(&performance::PerformanceInputs {
        thrust: thrust.f_total,
        fuel_flow: burn.fuel_flow,
        mass_flow,
        m_hot,
        m_cold,
        v_hot: hot_nozzle.velocity,
        v_cold: cold_nozzle.velocity,
        v0,
        fuel,
        p4: s4.p,
        t4: s4.t,
        water_air_ratio: spec.water_air_ratio,
        offtake: w_offtake,
    })?;

    Ok(CycleResult {
        ambient,
        inlet,
        flight: *cond,
        fuel: fuel.clone(),
        gas_props: *gas,
        flight_speed: v0,
        mass_flow,
        m_hot,
        m_cold,
        fuel_flow: burn.fuel_flow,
        heat_rate: burn.heat_rate,
        stations,
        power,
        hot_nozzle,
        cold_nozzle,
        thrust,
        performance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gasmodel::{fuel_lookup, Fuel, FuelDatabase};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn air() -> GasProperties {
        GasProperties::COLD_AIR
    }

    #[test]
    fn diffuser_static_is_identity() {
        let a = isa_ambient(0.0).unwrap();
        let inlet = apply_inlet_cooling(&a, 0.0, 0.0, 6.0, &air()).unwrap();
        let s2 = diffuser(&inlet, 0.0, &air()).unwrap();
        assert_eq!((s2.t, s2.p), (a.t0, a.p0));
    }

    #[test]
    fn diffuser_cruise_hand_values() {
        let inlet = InletState {
            t1: 223.15,
            p1: 26.44,
            delta_t: 0.0,
            chiller_heat_load: 0.0,
        };
        let s2 = diffuser(&inlet, 0.85, &air()).unwrap();
        let t2 = 223.15 * (1.0 + 0.2 * 0.7225);
        assert_relative_eq!(s2.t, t2, max_relative = 1e-12);
        assert!((s2.t - 255.39).abs() < 0.01);
        assert!((s2.p - 42.4).abs() < 0.05, "{}", s2.p);
    }

    #[test]
    fn compressor_hand_value() {
        let s = StationState::new(StationId::DiffuserExit, 288.15, 101.325, 1.0);
        let (out, w) = compress(&s, StationId::FanExit, 1.5, 0.91, &air()).unwrap();
        let expected = 288.15 + 288.15 / 0.91 * (1.5f64.powf(0.4 / 1.4) - 1.0);
        assert_relative_eq!(out.t, expected, max_relative = 1e-12);
        assert!((out.t - 327.0).abs() < 0.1, "{}", out.t);
        assert_relative_eq!(out.p, 1.5 * 101.325, max_relative = 1e-12);
        assert_relative_eq!(w, 1005.0 * (out.t - 288.15), max_relative = 1e-12);

        let (same, w0) = compress(&s, StationId::FanExit, 1.0, 0.91, &air()).unwrap();
        assert_eq!((same.t, w0), (s.t, 0.0));
        assert!(compress(&s, StationId::FanExit, 0.9, 0.91, &air()).is_err());
    }

    #[test]
    fn split_hand_values() {
        let (h, c) = split_flow(1155.43, 9.1).unwrap();
        assert!((h - 114.4).abs() < 0.05);
        assert!((c - 1041.0).abs() < 0.05);
        assert_eq!(split_flow(0.0, 9.1).unwrap(), (0.0, 0.0));
        let (h, _) = split_flow(100.0, 1e-12).unwrap();
        assert_relative_eq!(h, 100.0, max_relative = 1e-9);
    }

    #[test]
    fn combustor_hand_values() {
        let s4 = StationState::new(StationId::HpcExit, 900.0, 3000.0, 100.0);
        let jp10 = Fuel::jp10();
        let out = combustor(&s4, 1695.0, &jp10, 0.99, 0.04, 1148.0).unwrap();
        assert_relative_eq!(out.heat_rate, 100.0 * 1148.0 * 795.0 / 1000.0, max_relative = 1e-12);
        assert!((out.heat_rate - 91_266.0).abs() < 1.0);
        assert!((out.fuel_flow - 2.19).abs() < 0.005, "{}", out.fuel_flow);
        assert_relative_eq!(out.state.p, 3000.0 * 0.96, max_relative = 1e-12);
        assert_relative_eq!(out.state.mdot, 100.0 + out.fuel_flow, max_relative = 1e-12);

        let h2 = combustor(&s4, 1695.0, &Fuel::hydrogen(), 0.99, 0.04, 1148.0).unwrap();
        assert_relative_eq!(h2.fuel_flow / out.fuel_flow, 42.075 / 118.429, max_relative = 1e-12);

        let idle = combustor(&s4, 900.0, &jp10, 0.99, 0.04, 1148.0).unwrap();
        assert_eq!((idle.heat_rate, idle.fuel_flow), (0.0, 0.0));

        let err = combustor(&s4, 850.0, &jp10, 0.99, 0.04, 1148.0).unwrap_err();
        assert!(err.is_infeasible());
    }

    #[test]
    fn turbine_hand_values() {
        let gas = GasProperties::new(1148.0, 1.33).unwrap();
        let s5 = StationState::new(StationId::CombustorExit, 1695.0, 2000.0, 116.0);
        let out = turbine_expand_to_power(&s5, StationId::HptExit, 40_000.0, 0.92, &gas).unwrap();
        let t_out = 1695.0 - 40e6 / (116.0 * 1148.0);
        assert_relative_eq!(out.t, t_out, max_relative = 1e-12);
        assert!((out.t - 1394.6).abs() < 0.1);
        let ratio = (1.0 - (1.0 / 0.92) * (1.0 - t_out / 1695.0)).powf(1.33 / 0.33);
        assert_relative_eq!(out.p / s5.p, ratio, max_relative = 1e-12);

        let idle = turbine_expand_to_power(&s5, StationId::HptExit, 0.0, 0.92, &gas).unwrap();
        assert_eq!((idle.t, idle.p), (s5.t, s5.p));

        let over = turbine_expand_to_power(&s5, StationId::HptExit, 1e9, 0.92, &gas);
        assert!(over.unwrap_err().is_infeasible());
        // Enough enthalpy, but more drop than the efficiency allows.
        let steep = turbine_expand_to_power(&s5, StationId::HptExit, 200_000.0, 0.5, &gas);
        assert!(steep.unwrap_err().is_infeasible());
    }

    #[test]
    fn nozzle_unchoked_hand_value() {
        let gas = GasProperties::new(287.0 * 1.33 / 0.33, 1.33).unwrap();
        let s7 = StationState::new(StationId::LptExit, 800.0, 150.0, 100.0);
        let out = nozzle(&s7, StationId::HotNozzleExit, 0.98, &gas, 100.0).unwrap();
        let v = (2.0 * 0.98 * (1.33 / 0.33) * 287.0 * 800.0 * (1.0 - 1.5f64.powf(-0.33 / 1.33))).sqrt();
        assert!(!out.choked);
        assert_relative_eq!(out.velocity, v, max_relative = 1e-9);
        assert_eq!(out.exit_pressure, 100.0);
        assert!(out.exit_area > 0.0);
        // Continuity at the exit plane.
        let rho = out.exit_pressure * 1000.0 / (gas.r() * out.exit_temperature);
        assert_relative_eq!(rho * out.velocity * out.exit_area, 100.0, max_relative = 1e-12);
    }

    #[test]
    fn nozzle_choked_and_idle() {
        let gas = GasProperties::HOT_GAS;
        let pr = critical_pressure_ratio(0.98, &gas);
        assert!((pr - 1.85).abs() < 0.05, "{pr}");
        let s7 = StationState::new(StationId::LptExit, 800.0, 400.0, 100.0);
        let out = nozzle(&s7, StationId::HotNozzleExit, 0.98, &gas, 100.0).unwrap();
        assert!(out.choked);
        assert!(out.exit_pressure > 100.0);
        assert_relative_eq!(
            out.velocity,
            gas.speed_of_sound(out.exit_temperature),
            max_relative = 1e-12
        );

        let flat = StationState::new(StationId::LptExit, 800.0, 100.0, 100.0);
        let out = nozzle(&flat, StationId::HotNozzleExit, 0.98, &gas, 100.0).unwrap();
        assert_eq!(out.velocity, 0.0);
        assert!(!out.choked);

        let under = StationState::new(StationId::LptExit, 800.0, 90.0, 100.0);
        assert!(nozzle(&under, StationId::HotNozzleExit, 0.98, &gas, 100.0)
            .unwrap_err()
            .is_infeasible());
    }

    #[test]
    fn thrust_pressure_term() {
        let hot = NozzleExit {
            velocity: 500.0,
            exit_pressure: 150.0,
            exit_temperature: 700.0,
            exit_area: 0.5,
            choked: true,
        };
        let cold = NozzleExit {
            velocity: 300.0,
            exit_pressure: 100.0,
            exit_temperature: 280.0,
            exit_area: 2.0,
            choked: false,
        };
        let f = thrust(&hot, &cold, 100.0, 900.0, 2.0, 250.0, 100.0);
        assert_relative_eq!(f.f_hot, (102.0 * 500.0 - 100.0 * 250.0) / 1000.0 + 0.5 * 50.0);
        assert_relative_eq!(f.f_cold, 900.0 * 50.0 / 1000.0);
        assert_relative_eq!(f.f_total, f.f_hot + f.f_cold);
    }

    #[test]
    fn takeoff_cycle_closure() {
        let r = run_cycle(&EngineSpec::default(), &FlightCondition::takeoff(), &Fuel::jp10()).unwrap();
        assert_eq!(r.stations.len(), 11);
        assert_relative_eq!(r.mass_flow, 1155.43, max_relative = 1e-12);
        assert!(!r.hot_nozzle.choked && !r.cold_nozzle.choked);
        // Unchoked at take-off: pure momentum thrust.
        assert_eq!(r.hot_nozzle.exit_pressure, r.ambient.p0);
        assert_relative_eq!(
            r.thrust.f_total,
            ((r.m_hot + r.fuel_flow) * r.hot_nozzle.velocity + r.m_cold * r.cold_nozzle.velocity) / 1000.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn on_design_choking_and_speed() {
        let r = run_cycle(&EngineSpec::default(), &FlightCondition::on_design(), &Fuel::jp10()).unwrap();
        let v0 = 0.85 * (1.4 * R_AIR * 223.15f64).sqrt();
        assert_relative_eq!(r.flight_speed, v0, max_relative = 1e-12);
        assert!(r.thrust.f_total > 0.0);
        assert!(r.mass_flow < 1155.43);
    }

    #[test]
    fn infeasible_reports_station() {
        let spec = EngineSpec {
            tit: 700.0,
            ..EngineSpec::default()
        };
        match run_cycle(&spec, &FlightCondition::takeoff(), &Fuel::jp10()) {
            Err(Error::Infeasible { station, .. }) => assert_eq!(station, StationId::CombustorExit),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_spec_rejected() {
        let base = EngineSpec::default();
        for spec in [
            EngineSpec {
                eta_fan: 1.2,
                ..base.clone()
            },
            EngineSpec {
                combustor_pressure_drop_frac: 0.2,
                ..base.clone()
            },
            EngineSpec { pi_hpc: 0.5, ..base },
        ] {
            assert!(spec.validate().is_err());
        }
    }

    #[test]
    fn station_ids_round_trip() {
        for s in StationId::ALL {
            assert_eq!(StationId::try_from(s.number()).unwrap(), s);
        }
        assert!(StationId::try_from(3).is_err());
        assert_eq!(StationId::HpcExit.to_string(), "4 (HPC exit)");
    }

    #[test]
    fn spec_serde_defaults() {
        let spec: EngineSpec = toml::from_str("TIT = 1800.0\nalpha = 10.0").unwrap();
        assert_eq!(spec.tit, 1800.0);
        assert_eq!(spec.alpha, 10.0);
        assert_eq!(spec.pi_fan, EngineSpec::default().pi_fan);
        assert!(toml::from_str::<EngineSpec>("bogus = 1").is_err());
    }

    fn conditions() -> impl Strategy<Value = FlightCondition> {
        (0.0f64..0.9, 0.0f64..11_000.0, -20.0f64..10.0).prop_map(|(mach, altitude, delta_t)| FlightCondition {
            mach,
            altitude,
            delta_t,
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closures_hold(cond in conditions(), fuel_idx in 0usize..3) {
            let fuel = FuelDatabase::builtin().fuels[fuel_idx].clone();
            let r = run_cycle(&EngineSpec::default(), &cond, &fuel).unwrap();
            let w = r.power;
            prop_assert!(((w.w_hpt - w.w_hpc - w.w_offtake) / w.w_hpt).abs() < 1e-6);
            prop_assert!(((w.w_lpt - w.w_fan - w.w_lpc) / w.w_lpt).abs() < 1e-6);
            prop_assert!((r.station(StationId::HotNozzleExit).mdot - (r.m_hot + r.fuel_flow)).abs() < 1e-9);
            prop_assert_eq!(r.station(StationId::ColdNozzleExit).mdot, r.m_cold);
            prop_assert!((r.mass_flow - (r.m_hot + r.m_cold)).abs() < 1e-9);

            let p = |id| r.station(id).p;
            prop_assert!(p(StationId::DiffuserExit) <= p(StationId::FanExit));
            prop_assert!(p(StationId::FanExit) <= p(StationId::LpcExit));
            prop_assert!(p(StationId::LpcExit) < p(StationId::HpcExit));
            prop_assert!(p(StationId::CombustorExit) > p(StationId::HptExit));
            prop_assert!(p(StationId::HptExit) > p(StationId::LptExit));
            prop_assert!(p(StationId::LptExit) >= p(StationId::HotNozzleExit));
            for s in r.stations.iter() {
                prop_assert!(s.t > 0.0 && s.p > 0.0 && s.mdot >= 0.0);
            }
        }

        #[test]
        fn colder_inlet_more_flow_thrust_fuel(dt in -20.0f64..9.0, step in 0.1f64..1.0, on_design in any::<bool>()) {
            let base = if on_design { FlightCondition::on_design() } else { FlightCondition::takeoff() };
            let spec = EngineSpec::default();
            let warm = run_cycle(&spec, &base.with_delta_t(dt + step), &Fuel::jp10()).unwrap();
            let cold = run_cycle(&spec, &base.with_delta_t(dt), &Fuel::jp10()).unwrap();
            prop_assert!(cold.mass_flow > warm.mass_flow);
            prop_assert!(cold.thrust.f_total > warm.thrust.f_total);
            prop_assert!(cold.fuel_flow > warm.fuel_flow);
        }

        #[test]
        fn fuel_flow_ordering(cond in conditions()) {
            let spec = EngineSpec::default();
            let mf = |name: &str| run_cycle(&spec, &cond, &fuel_lookup(name).unwrap()).unwrap().fuel_flow;
            let (h2, ng, jp) = (mf("hydrogen"), mf("natural-gas"), mf("JP10"));
            prop_assert!(h2 < ng && ng < jp);
        }
    }
}
