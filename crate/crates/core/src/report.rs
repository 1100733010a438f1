//! CSV and JSON writers. Column headers carry SI units.

use std::io::Write;

use serde::Serialize;

use crate::cycle::CycleResult;
use crate::decision::TopsisResult;
use crate::error::Result;
use crate::exergy::{Component, ExergyReport};
use crate::optimizer::{DesignVector, OptimizationResult};
use crate::sweep::SweepRow;

fn num(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

/// Columns: station, T_K, P_kPa, mdot_kgps.
pub fn write_stations_csv<W: Write>(cycle: &CycleResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["station", "T_K", "P_kPa", "mdot_kgps"])?;
    for s in cycle.stations.iter() {
        out.write_record([s.station_id.number().to_string(), num(s.t), num(s.p), num(s.mdot)])?;
    }
    out.flush()?;
    Ok(())
}

/// Columns: component, etaEx, E_D_kW. Components without a defined
/// efficiency leave `etaEx` empty.
pub fn write_exergy_csv<W: Write>(report: &ExergyReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["component", "etaEx", "E_D_kW"])?;
    for r in &report.per_component {
        out.write_record([r.component.name().to_string(), opt(r.eta_ex), num(r.destruction)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn sweep_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "deltaT_K",
        "fuel",
        "massFlow_kgps",
        "thrust_kN",
        "fuelFlow_kgps",
        "tsfc_gpkNs",
        "tsf_Nspkg",
        "etaThermal",
        "etaPropulsive",
        "etaOverall",
        "etaExergetic",
        "snox",
        "noxRate_gps",
        "offtake_kW",
        "fuelExergy_kW",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for c in Component::ALL {
        h.push(format!("etaEx_{}", c.name()));
        h.push(format!("E_D_{}_kW", c.name()));
    }
    h.extend(
        [
            "exhaustResidual_kW",
            "totalDestruction_kW",
            "entropyGeneration_kWpK",
            "error",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    h
}

fn sweep_record(row: &SweepRow) -> Vec<String> {
    let width = sweep_header().len();
    let mut rec = vec![num(row.delta_t), row.fuel.clone()];
    match &row.result {
        Some(pt) => {
            let p = &pt.performance;
            let ex = &pt.exergy;
            rec.extend(
                [
                    pt.mass_flow,
                    p.thrust,
                    p.fuel_flow,
                    p.tsfc,
                    p.tsf,
                    p.eta_thermal,
                    p.eta_propulsive,
                    p.eta_overall,
                    p.eta_exergetic,
                    p.snox,
                    p.nox_rate,
                    p.offtake,
                    ex.fuel_exergy_rate,
                ]
                .map(num),
            );
            for c in Component::ALL {
                let r = ex.component(c);
                rec.push(opt(r.eta_ex));
                rec.push(num(r.destruction));
            }
            rec.extend([ex.exhaust_residual, ex.total_destruction, ex.entropy_generation].map(num));
            rec.push(String::new());
        }
        None => {
            rec.resize(width - 1, String::new());
            rec.push(row.error.clone().unwrap_or_default());
        }
    }
    rec
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(sweep_header())?;
    for row in rows {
        out.write_record(sweep_record(row))?;
    }
    out.flush()?;
    Ok(())
}

/// Columns: generation, <label>_bestFitness for each trace. Shorter traces
/// leave trailing cells empty.
pub fn write_history_csv<W: Write>(traces: &[(&str, &[f64])], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["generation".to_string()];
    header.extend(traces.iter().map(|(label, _)| format!("{label}_bestFitness")));
    out.write_record(&header)?;
    let n = traces.iter().map(|(_, h)| h.len()).max().unwrap_or(0);
    for g in 0..n {
        let mut rec = vec![g.to_string()];
        rec.extend(traces.iter().map(|(_, h)| opt(h.get(g).copied())));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// One row per labelled optimization result.
pub fn write_optimization_csv<W: Write>(results: &[(&str, &OptimizationResult)], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = ["method", "case", "feasible", "objective", "fitness", "evaluations"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(["TIT_K", "deltaT_K", "piFan", "piCompressor", "alpha"].map(String::from));
    header.extend(
        [
            "thrust_kN",
            "tsfc_gpkNs",
            "tsf_Nspkg",
            "etaThermal",
            "etaPropulsive",
            "etaExergetic",
        ]
        .map(String::from),
    );
    out.write_record(&header)?;
    for (label, r) in results {
        let mut rec = vec![
            label.to_string(),
            r.case.label().to_string(),
            r.feasible.to_string(),
            num(r.objective),
            num(r.fitness),
            r.evaluations.to_string(),
        ];
        rec.extend(DesignVector::to_array(r.best).map(num));
        let p = &r.performance;
        rec.extend(
            [
                p.thrust,
                p.tsfc,
                p.tsf,
                p.eta_thermal,
                p.eta_propulsive,
                p.eta_exergetic,
            ]
            .map(num),
        );
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Columns: rank, alternative, closeness; best first.
pub fn write_ranking_csv<W: Write>(result: &TopsisResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["rank", "alternative", "closeness"])?;
    for (i, alt) in result.ranking.iter().enumerate() {
        let c = result.score(alt).unwrap_or(f64::NAN);
        out.write_record([(i + 1).to_string(), alt.clone(), num(c)])?;
    }
    out.flush()?;
    Ok(())
}
