use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;
use turbofan_core::config::RunConfig;
use turbofan_core::decision::topsis_rank;
use turbofan_core::optimizer::{ga_optimize, grid_search_oracle, OptimizationResult};
use turbofan_core::sweep::run_sweep;
use turbofan_core::{audit, report, run_cycle, validation, CycleResult, Error, ExergyReport, OutputFormat};

use crate::{Cli, Command};

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_VALIDATION: u8 = 4;
pub const EXIT_NO_FEASIBLE: u8 = 5;

const DEFAULT_CONFIG_NAME: &str = "turbofan.toml";

#[derive(Debug, thiserror::Error)]
#[error("no design satisfies every constraint band; best infeasible design written")]
pub struct NoFeasibleDesign;

#[derive(Debug, thiserror::Error)]
#[error("{failed} of {total} validation criteria failed")]
pub struct ValidationFailed {
    failed: usize,
    total: usize,
}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.is::<NoFeasibleDesign>() {
        return EXIT_NO_FEASIBLE;
    }
    if e.is::<ValidationFailed>() {
        return EXIT_VALIDATION;
    }
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_infeasible() => EXIT_INFEASIBLE,
        Some(Error::Io(_)) | Some(Error::NotApplicable(_)) => EXIT_OTHER,
        Some(_) => EXIT_CONFIG,
        None => EXIT_OTHER,
    }
}

fn locate_config(cli: &Cli) -> Option<PathBuf> {
    match (&cli.config, &cli.config_dir) {
        (Some(p), Some(dir)) if p.is_relative() && !p.exists() => Some(dir.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(DEFAULT_CONFIG_NAME)).filter(|p| p.is_file()),
        (None, None) => None,
    }
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match locate_config(cli) {
        Some(path) => {
            log::info!("reading {}", path.display());
            RunConfig::load(&path)?
        }
        None => RunConfig::default(),
    };
    cfg.output.path = cfg.output.path.as_deref().map(|p| cfg.resolve(p));
    if let Some(path) = &cli.output {
        cfg.output.path = Some(path.clone());
    }
    if let Some(f) = cli.format {
        cfg.output.format = f.into();
    }
    if let Some(seed) = cli.seed {
        if let Some(opt) = cfg.optimize.as_mut() {
            opt.ga.seed = seed;
        }
    }
    Ok(cfg)
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::DumpDefaults => dump_defaults(cli),
        Command::Validate => validate(),
        cmd => {
            let cfg = load_config(cli)?;
            match cmd {
                Command::Analyze => analyze(&cfg),
                Command::Sweep => sweep(&cfg),
                Command::Optimize => optimize(&cfg),
                Command::Rank => rank(&cfg),
                Command::Validate | Command::DumpDefaults => unreachable!(),
            }
        }
    }
}

/// `out.json` with suffix `-trace` and extension `csv` gives `out-trace.csv`.
fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> turbofan_core::Result<()>) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct AnalysisOutput<'a> {
    cycle: &'a CycleResult,
    exergy: &'a ExergyReport,
}

fn analyze(cfg: &RunConfig) -> anyhow::Result<()> {
    let spec = cfg.engine_spec()?;
    let fuel = cfg.fuel()?;
    let cycle = run_cycle(&spec, &cfg.flight, &fuel)?;
    let exergy = audit(&cycle, &cfg.exergy)?;
    let mut out = io::stdout().lock();
    crate::render::analysis(&mut out, &cycle, &exergy)?;
    if let Some(path) = &cfg.output.path {
        match cfg.output.format {
            OutputFormat::Json => write_file(path, |w| {
                report::write_json(
                    &AnalysisOutput {
                        cycle: &cycle,
                        exergy: &exergy,
                    },
                    w,
                )
            })?,
            OutputFormat::Csv => {
                write_file(path, |w| report::write_stations_csv(&cycle, w))?;
                write_file(&sibling(path, "-exergy", "csv"), |w| {
                    report::write_exergy_csv(&exergy, w)
                })?;
            }
        }
    }
    Ok(())
}

fn sweep(cfg: &RunConfig) -> anyhow::Result<()> {
    let section = cfg.sweep_section()?;
    let spec = cfg.engine_spec()?;
    let fuels = cfg.sweep_fuels()?;
    let delta_ts = section.delta_t.values()?;
    let rows = run_sweep(&spec, &cfg.flight, &fuels, &delta_ts, &cfg.exergy)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    match &cfg.output.path {
        Some(path) => {
            match cfg.output.format {
                OutputFormat::Csv => write_file(path, |w| report::write_sweep_csv(&rows, w))?,
                OutputFormat::Json => write_file(path, |w| report::write_json(&rows, w))?,
            }
            println!("{} sweep points, {failed} failed -> {}", rows.len(), path.display());
        }
        None => {
            let out = io::stdout().lock();
            match cfg.output.format {
                OutputFormat::Csv => report::write_sweep_csv(&rows, out)?,
                OutputFormat::Json => report::write_json(&rows, out)?,
            }
        }
    }
    if failed > 0 {
        log::warn!("{failed} of {} sweep points failed", rows.len());
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct OptimizeOutput<'a> {
    ga: &'a OptimizationResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<&'a OptimizationResult>,
}

fn optimize(cfg: &RunConfig) -> anyhow::Result<()> {
    let section = cfg.optimize_section()?;
    let ctx = cfg.design_context()?;
    let constraints = section.constraints();
    let ga = ga_optimize(section.case, &constraints, &ctx, &section.ga)?;
    let oracle = match section.oracle_points {
        0 => None,
        n => Some(grid_search_oracle(
            section.case,
            &constraints,
            &ctx,
            n,
            section.ga.penalty_for(section.case),
        )?),
    };
    let mut out = io::stdout().lock();
    crate::render::optimization(&mut out, "GA", &ga)?;
    if let Some(o) = &oracle {
        crate::render::optimization(&mut out, "grid oracle", o)?;
    }
    if let Some(path) = &cfg.output.path {
        let trace_path = sibling(path, "-trace", "csv");
        let mut traces: Vec<(&str, &[f64])> = vec![("ga", &ga.history)];
        if let Some(o) = &oracle {
            traces.push(("oracle", &o.history));
        }
        match cfg.output.format {
            OutputFormat::Json => {
                let result = OptimizeOutput {
                    ga: &ga,
                    oracle: oracle.as_ref(),
                };
                write_file(path, |w| report::write_json(&result, w))?;
            }
            OutputFormat::Csv => {
                let mut rows = vec![("ga", &ga)];
                if let Some(o) = &oracle {
                    rows.push(("oracle", o));
                }
                write_file(path, |w| report::write_optimization_csv(&rows, w))?;
            }
        }
        write_file(&trace_path, |w| report::write_history_csv(&traces, w))?;
    }
    if !ga.feasible {
        bail!(NoFeasibleDesign);
    }
    Ok(())
}

fn rank(cfg: &RunConfig) -> anyhow::Result<()> {
    let (matrix, weights) = cfg.decision_input()?;
    let result = topsis_rank(&matrix, &weights)?;
    let mut out = io::stdout().lock();
    crate::render::ranking(&mut out, &result)?;
    if let Some(path) = &cfg.output.path {
        match cfg.output.format {
            OutputFormat::Json => write_file(path, |w| report::write_json(&result, w))?,
            OutputFormat::Csv => write_file(path, |w| report::write_ranking_csv(&result, w))?,
        }
    }
    Ok(())
}

fn validate() -> anyhow::Result<()> {
    let reports = validation::run_all();
    let mut out = io::stdout().lock();
    for r in &reports {
        write!(out, "{r}")?;
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    writeln!(out, "{} of {} criteria passed", reports.len() - failed, reports.len())?;
    if failed > 0 {
        bail!(ValidationFailed {
            failed,
            total: reports.len()
        });
    }
    Ok(())
}

fn dump_defaults(cli: &Cli) -> anyhow::Result<()> {
    let text = RunConfig::example().to_toml_string()?;
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
