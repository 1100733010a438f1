//! Ambient atmosphere, working-gas property sets and the fuel database.
//!
//! Units used throughout the crate: temperature in K, pressure in kPa,
//! density in kg/m³, mass flow in kg/s, power in kW, heating values and
//! chemical exergies in MJ/kg.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Specific gas constant of dry air, J/kgK.
pub const R_AIR: f64 = 287.05;

pub const SEA_LEVEL_TEMPERATURE: f64 = 288.15;
pub const SEA_LEVEL_PRESSURE: f64 = 101.325;
/// Troposphere lapse rate, K/m.
pub const LAPSE_RATE: f64 = 0.0065;
pub const BAROMETRIC_EXPONENT: f64 = 5.2561;
pub const TROPOPAUSE_ALTITUDE: f64 = 11_000.0;

/// Ideal-gas density in kg/m³ from pressure in kPa.
pub fn air_density(t: f64, p_kpa: f64) -> f64 {
    p_kpa * 1000.0 / (R_AIR * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AmbientState {
    pub altitude: f64,
    #[serde(rename = "T0")]
    pub t0: f64,
    #[serde(rename = "P0")]
    pub p0: f64,
    pub rho0: f64,
}

impl AmbientState {
    pub fn sea_level() -> Self {
        isa_ambient(0.0).expect("sea level is inside the troposphere")
    }
}

/// International Standard Atmosphere, troposphere only.
pub fn isa_ambient(altitude: f64) -> Result<AmbientState> {
    if !(0.0..=TROPOPAUSE_ALTITUDE).contains(&altitude) {
        return Err(Error::OutOfRange {
            quantity: "altitude [m] (stratosphere not modeled)",
            value: altitude,
            min: 0.0,
            max: TROPOPAUSE_ALTITUDE,
        });
    }
    let t0 = SEA_LEVEL_TEMPERATURE - LAPSE_RATE * altitude;
    let p0 = SEA_LEVEL_PRESSURE * (t0 / SEA_LEVEL_TEMPERATURE).powf(BAROMETRIC_EXPONENT);
    Ok(AmbientState {
        altitude,
        t0,
        p0,
        rho0: air_density(t0, p0),
    })
}

/// Air state after the intake chiller (or heater), ahead of the diffuser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InletState {
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "P1")]
    pub p1: f64,
    pub delta_t: f64,
    /// Heat removed by the chiller, kW.
    pub chiller_heat_load: f64,
}

impl InletState {
    /// Shaft power the chiller draws for a given coefficient of performance, kW.
    pub fn chiller_power(&self, cop: f64) -> f64 {
        self.chiller_heat_load / cop
    }

    pub fn density(&self) -> f64 {
        air_density(self.t1, self.p1)
    }
}

/// Inlet cooling at constant pressure. Heating (`delta_t > 0`) carries no
/// chiller load.
pub fn apply_inlet_cooling(
    ambient: &AmbientState,
    delta_t: f64,
    mass_flow: f64,
    cop: f64,
    gas: &GasProperties,
) -> Result<InletState> {
    if !(cop > 0.0) {
        return Err(Error::InvalidParameter {
            name: "chiller COP",
            value: cop,
            reason: "must be positive",
        });
    }
    if !(mass_flow >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "mass flow",
            value: mass_flow,
            reason: "must be non-negative",
        });
    }
    let t1 = ambient.t0 + delta_t;
    if !(t1 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "inlet temperature difference",
            value: delta_t,
            reason: "drives the inlet temperature below absolute zero",
        });
    }
    Ok(InletState {
        t1,
        p1: ambient.p0,
        delta_t,
        chiller_heat_load: mass_flow * gas.cp * (-delta_t).max(0.0) / 1000.0,
    })
}

/// Calorically perfect gas: constant `cp` and `k`, `R = cp (k - 1) / k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGas", into = "RawGas")]
pub struct GasProperties {
    pub cp: f64,
    pub k: f64,
}

#[derive(Serialize, Deserialize)]
struct RawGas {
    cp: f64,
    k: f64,
}

impl TryFrom<RawGas> for GasProperties {
    type Error = Error;
    fn try_from(raw: RawGas) -> Result<Self> {
        GasProperties::new(raw.cp, raw.k)
    }
}

impl From<GasProperties> for RawGas {
    fn from(g: GasProperties) -> Self {
        RawGas { cp: g.cp, k: g.k }
    }
}

impl GasProperties {
    pub const COLD_AIR: GasProperties = GasProperties { cp: 1005.0, k: 1.40 };
    pub const HOT_GAS: GasProperties = GasProperties { cp: 1148.0, k: 1.33 };

    pub fn new(cp: f64, k: f64) -> Result<Self> {
        if !(cp > 0.0) {
            return Err(Error::InvalidParameter {
                name: "cp",
                value: cp,
                reason: "must be positive",
            });
        }
        if !(k > 1.0) {
            return Err(Error::InvalidParameter {
                name: "k",
                value: k,
                reason: "specific-heat ratio must exceed 1",
            });
        }
        Ok(Self { cp, k })
    }

    /// Gas constant, J/kgK.
    pub fn r(&self) -> f64 {
        self.cp * (self.k - 1.0) / self.k
    }

    /// `(k - 1) / k`, the isentropic temperature-pressure exponent.
    pub fn isentropic_exponent(&self) -> f64 {
        (self.k - 1.0) / self.k
    }

    pub fn speed_of_sound(&self, t: f64) -> f64 {
        (self.k * self.r() * t).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Fuel {
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub carbon_atoms: u32,
    pub hydrogen_atoms: u32,
    /// Heating value, MJ/kg.
    #[serde(rename = "FHV")]
    pub fhv: f64,
    /// Specific chemical exergy, MJ/kg.
    pub chem_exergy: f64,
    /// g/mol
    pub molecular_weight: f64,
}

impl Fuel {
    pub fn jp10() -> Self {
        Fuel {
            name: "JP10".into(),
            aliases: vec![],
            carbon_atoms: 10,
            hydrogen_atoms: 16,
            fhv: 42.075,
            chem_exergy: 44.921,
            molecular_weight: 136.0,
        }
    }

    pub fn natural_gas() -> Self {
        Fuel {
            name: "natural-gas".into(),
            aliases: vec!["NG".into(), "natural gas".into(), "CH4".into()],
            carbon_atoms: 1,
            hydrogen_atoms: 4,
            fhv: 49.736,
            chem_exergy: 55.168,
            molecular_weight: 16.0,
        }
    }

    pub fn hydrogen() -> Self {
        Fuel {
            name: "hydrogen".into(),
            aliases: vec!["H2".into()],
            carbon_atoms: 0,
            hydrogen_atoms: 2,
            fhv: 118.429,
            chem_exergy: 134.778,
            molecular_weight: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fhv > 0.0) {
            return Err(Error::InvalidParameter {
                name: "FHV",
                value: self.fhv,
                reason: "heating value must be positive",
            });
        }
        if !(self.chem_exergy >= 0.9 * self.fhv) {
            return Err(Error::InvalidParameter {
                name: "chemExergy",
                value: self.chem_exergy,
                reason: "chemical exergy must be at least 0.9 x heating value",
            });
        }
        if self.hydrogen_atoms < 1 {
            return Err(Error::InvalidParameter {
                name: "hydrogenAtoms",
                value: self.hydrogen_atoms as f64,
                reason: "fuel must contain hydrogen",
            });
        }
        Ok(())
    }

    pub fn matches(&self, name: &str) -> bool {
        let name = name.trim();
        self.name.eq_ignore_ascii_case(name) || self.aliases.iter().any(|a| a.eq_ignore_ascii_case(name))
    }

    /// Heating value in J/kg.
    pub fn fhv_j_per_kg(&self) -> f64 {
        self.fhv * 1e6
    }
}

/// Hydrocarbon chemical-exergy correlation, evaluated exactly as published.
///
/// Diagnostic only: it does not reproduce the tabulated exergies (JP10 gives
/// ~46.8 MJ/kg against 44.921). Cycle and exergy calculations always use
/// [`Fuel::chem_exergy`].
pub fn chemical_exergy_correlation(fuel: &Fuel) -> Result<f64> {
    if fuel.carbon_atoms == 0 {
        return Err(Error::NotApplicable(format!(
            "chemical exergy correlation needs a hydrocarbon; '{}' has no carbon, use its tabulated value",
            fuel.name
        )));
    }
    let c = fuel.carbon_atoms as f64;
    let h = fuel.hydrogen_atoms as f64;
    Ok(fuel.fhv * (1.04224 + 0.11925 * c / h - 0.042 / c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelDatabase {
    #[serde(rename = "fuel")]
    pub fuels: Vec<Fuel>,
}

impl Default for FuelDatabase {
    fn default() -> Self {
        Self::builtin()
    }
}

impl FuelDatabase {
    pub fn builtin() -> Self {
        FuelDatabase {
            fuels: vec![Fuel::jp10(), Fuel::natural_gas(), Fuel::hydrogen()],
        }
    }

    /// Reads a `[[fuel]]` table file. Entries are validated individually.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let db: FuelDatabase = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for fuel in &db.fuels {
            fuel.validate()?;
        }
        Ok(db)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Built-ins overlaid with user entries; a user fuel replaces a built-in
    /// of the same name.
    pub fn with_overrides(mut self, extra: FuelDatabase) -> Self {
        for fuel in extra.fuels {
            self.fuels.retain(|f| !f.matches(&fuel.name));
            self.fuels.push(fuel);
        }
        self
    }

    pub fn lookup(&self, name: &str) -> Result<Fuel> {
        self.fuels
            .iter()
            .find(|f| f.matches(name))
            .cloned()
            .ok_or_else(|| Error::FuelNotFound {
                name: name.to_string(),
                available: self.fuels.iter().map(|f| f.name.clone()).collect(),
            })
    }
}

/// Looks a fuel up in the built-in table.
pub fn fuel_lookup(name: &str) -> Result<Fuel> {
    FuelDatabase::builtin().lookup(name)
}
