//! Run configuration files (TOML).
//!
//! A file may carry any of the `sweep`, `optimize` and `rank` sections; the
//! command being run decides which one is read. Relative paths inside the
//! file resolve against the file's own directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cycle::{EngineSpec, FlightCondition};
use crate::decision::{DecisionMatrix, WeightVector};
use crate::error::{Error, Result};
use crate::exergy::ExergyOptions;
use crate::gasmodel::{Fuel, FuelDatabase};
use crate::optimizer::{Bounds, ConstraintSet, DesignContext, GaConfig, ObjectiveCase};
use crate::sweep::DeltaTRange;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "deltaT")]
    pub delta_t: DeltaTRange,
    /// Defaults to the run's fuel.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fuels: Vec<String>,
}

fn default_optimize_fuel() -> String {
    "hydrogen".into()
}

fn default_oracle_points() -> usize {
    7
}

/// Optimization runs have their own flight condition and fuel, hydrogen at
/// cruise unless stated otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OptimizeConfig {
    pub case: ObjectiveCase,
    #[serde(default = "FlightCondition::on_design")]
    pub flight: FlightCondition,
    #[serde(default = "default_optimize_fuel")]
    pub fuel: String,
    #[serde(default)]
    pub bounds: Bounds,
    /// Defaults to the published bands for `case`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintSet>,
    #[serde(default)]
    pub ga: GaConfig,
    /// Grid points per axis for the brute-force cross-check; 0 skips it.
    #[serde(default = "default_oracle_points")]
    pub oracle_points: usize,
}

impl OptimizeConfig {
    pub fn new(case: ObjectiveCase) -> Self {
        OptimizeConfig {
            case,
            flight: FlightCondition::on_design(),
            fuel: default_optimize_fuel(),
            bounds: Bounds::default(),
            constraints: None,
            ga: GaConfig::default(),
            oracle_points: default_oracle_points(),
        }
    }

    pub fn constraints(&self) -> ConstraintSet {
        self.constraints
            .clone()
            .unwrap_or_else(|| ConstraintSet::published(self.case))
    }
}

/// Contents of a standalone decision-matrix file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub alternatives: Vec<String>,
    pub criteria: Vec<String>,
    pub values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightVector>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RankConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<DecisionMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightVector>,
    /// Named weight set, "economic" or "exero-environmental".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
}

fn default_fuel() -> String {
    "JP10".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    /// Inline engine; mutually exclusive with `engine_file`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine_file: Option<PathBuf>,
    #[serde(default = "FlightCondition::on_design")]
    pub flight: FlightCondition,
    #[serde(default = "default_fuel")]
    pub fuel: String,
    /// Extra `[[fuel]]` records layered over the built-in table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuel_file: Option<PathBuf>,
    #[serde(default)]
    pub exergy: ExergyOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<RankConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            engine: None,
            engine_file: None,
            flight: FlightCondition::on_design(),
            fuel: default_fuel(),
            fuel_file: None,
            exergy: ExergyOptions::default(),
            sweep: None,
            optimize: None,
            rank: None,
            output: OutputConfig::default(),
            base_dir: None,
        }
    }
}

fn parse_error(origin: &str, e: toml::de::Error) -> Error {
    Error::Config(format!("{origin}: {}", e.to_string().trim_end()))
}

impl RunConfig {
    /// Every section filled with its default, as written by `dump-defaults`.
    pub fn example() -> Self {
        RunConfig {
            engine: Some(EngineSpec::genx_1b70()),
            sweep: Some(SweepConfig {
                delta_t: DeltaTRange {
                    min: -20.0,
                    max: 10.0,
                    step: 5.0,
                },
                fuels: vec!["JP10".into(), "natural-gas".into(), "hydrogen".into()],
            }),
            optimize: Some(OptimizeConfig::new(ObjectiveCase::ThrustMax)),
            rank: Some(RankConfig {
                matrix: Some(DecisionMatrix::reference_cycles()),
                preset: Some("economic".into()),
                ..RankConfig::default()
            }),
            ..RunConfig::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| parse_error("config", e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| parse_error(&path.display().to_string(), e))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn engine_spec(&self) -> Result<EngineSpec> {
        let spec = match (&self.engine, &self.engine_file) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either [engine] or engineFile, not both".into()));
            }
            (Some(spec), None) => spec.clone(),
            (None, Some(file)) => {
                let path = self.resolve(file);
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                toml::from_str(&text).map_err(|e| parse_error(&path.display().to_string(), e))?
            }
            (None, None) => EngineSpec::genx_1b70(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fuel_database(&self) -> Result<FuelDatabase> {
        let db = FuelDatabase::builtin();
        match &self.fuel_file {
            Some(file) => Ok(db.with_overrides(FuelDatabase::load(&self.resolve(file))?)),
            None => Ok(db),
        }
    }

    pub fn fuel(&self) -> Result<Fuel> {
        self.fuel_database()?.lookup(&self.fuel)
    }

    pub fn sweep_section(&self) -> Result<&SweepConfig> {
        self.sweep
            .as_ref()
            .ok_or_else(|| Error::Config("missing [sweep] section".into()))
    }

    /// Sweep fuels, falling back to the run's fuel.
    pub fn sweep_fuels(&self) -> Result<Vec<Fuel>> {
        let sweep = self.sweep_section()?;
        let db = self.fuel_database()?;
        if sweep.fuels.is_empty() {
            return Ok(vec![db.lookup(&self.fuel)?]);
        }
        sweep.fuels.iter().map(|name| db.lookup(name)).collect()
    }

    pub fn optimize_section(&self) -> Result<&OptimizeConfig> {
        self.optimize
            .as_ref()
            .ok_or_else(|| Error::Config("missing [optimize] section".into()))
    }

    pub fn design_context(&self) -> Result<DesignContext> {
        let opt = self.optimize_section()?;
        Ok(DesignContext {
            template: self.engine_spec()?,
            flight: opt.flight,
            fuel: self.fuel_database()?.lookup(&opt.fuel)?,
            bounds: opt.bounds,
            exergy: self.exergy,
        })
    }

    /// Decision matrix and weights. Weights given in the rank section win
    /// over weights stored in the matrix file.
    pub fn decision_input(&self) -> Result<(DecisionMatrix, WeightVector)> {
        let rank = self
            .rank
            .as_ref()
            .ok_or_else(|| Error::Config("missing [rank] section".into()))?;
        let (matrix, file_weights) = match (&rank.matrix, &rank.matrix_file) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either rank.matrix or rank.matrixFile, not both".into(),
                ));
            }
            (Some(m), None) => (m.clone(), None),
            (None, Some(file)) => {
                let path = self.resolve(file);
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let f: MatrixFile = toml::from_str(&text).map_err(|e| parse_error(&path.display().to_string(), e))?;
                (DecisionMatrix::new(f.alternatives, f.criteria, f.values)?, f.weights)
            }
            (None, None) => return Err(Error::Config("rank needs matrix or matrixFile".into())),
        };
        matrix.validate()?;
        let weights = match (&rank.weights, &rank.preset) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either rank.weights or rank.preset, not both".into(),
                ));
            }
            (Some(w), None) => w.clone(),
            (None, Some(name)) => WeightVector::preset(name)?,
            (None, None) => file_weights.ok_or_else(|| Error::Config("rank needs weights or preset".into()))?,
        };
        Ok((matrix, weights))
    }
}
