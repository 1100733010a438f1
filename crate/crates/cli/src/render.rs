//! Plain-text reports for the terminal.

use std::io::{self, Write};

use turbofan_core::decision::TopsisResult;
use turbofan_core::optimizer::OptimizationResult;
use turbofan_core::{CycleResult, ExergyReport};

pub fn analysis(out: &mut impl Write, c: &CycleResult, ex: &ExergyReport) -> io::Result<()> {
    writeln!(
        out,
        "{} at Mach {} / {} m, deltaT {} K",
        c.fuel.name, c.flight.mach, c.flight.altitude, c.flight.delta_t
    )?;
    writeln!(out)?;
    writeln!(
        out,
        "{:<24} {:>10} {:>10} {:>11}",
        "station", "T [K]", "P [kPa]", "mdot [kg/s]"
    )?;
    for s in c.stations.iter() {
        writeln!(
            out,
            "{:<24} {:>10.2} {:>10.3} {:>11.3}",
            s.station_id.to_string(),
            s.t,
            s.p,
            s.mdot
        )?;
    }
    let w = &c.power;
    writeln!(out)?;
    writeln!(out, "shaft power [kW]")?;
    for (name, v) in [
        ("fan", w.w_fan),
        ("LPC", w.w_lpc),
        ("HPC", w.w_hpc),
        ("HPT", w.w_hpt),
        ("LPT", w.w_lpt),
        ("off-take", w.w_offtake),
    ] {
        writeln!(out, "  {name:<10} {v:>12.1}")?;
    }
    let p = &c.performance;
    writeln!(out)?;
    writeln!(out, "performance")?;
    writeln!(
        out,
        "  thrust          {:>10.2} kN (hot {:.2}, cold {:.2})",
        p.thrust, c.thrust.f_hot, c.thrust.f_cold
    )?;
    writeln!(out, "  TSFC            {:>10.3} g/kNs", p.tsfc)?;
    writeln!(out, "  TSF             {:>10.2} Ns/kg", p.tsf)?;
    writeln!(out, "  fuel flow       {:>10.4} kg/s", p.fuel_flow)?;
    writeln!(out, "  intake flow     {:>10.2} kg/s", c.mass_flow)?;
    writeln!(out, "  eta thermal     {:>10.4}", p.eta_thermal)?;
    writeln!(out, "  eta propulsive  {:>10.4}", p.eta_propulsive)?;
    writeln!(out, "  eta overall     {:>10.4}", p.eta_overall)?;
    writeln!(out, "  eta exergetic   {:>10.4}", p.eta_exergetic)?;
    writeln!(out, "  SNOx            {:>10.4}", p.snox)?;
    writeln!(out, "  NOx             {:>10.3} g/s", p.nox_rate)?;
    writeln!(out)?;
    writeln!(out, "{:<10} {:>8} {:>12}", "component", "eta_ex", "E_D [kW]")?;
    for r in &ex.per_component {
        let eta = r.eta_ex.map(|e| format!("{e:.4}")).unwrap_or_else(|| "-".into());
        writeln!(out, "{:<10} {:>8} {:>12.1}", r.component.name(), eta, r.destruction)?;
    }
    writeln!(out, "fuel exergy       {:>12.1} kW", ex.fuel_exergy_rate)?;
    writeln!(out, "exhaust residual  {:>12.1} kW", ex.exhaust_residual)?;
    writeln!(out, "total destruction {:>12.1} kW", ex.total_destruction)?;
    writeln!(out, "entropy generation{:>12.3} kW/K", ex.entropy_generation)?;
    writeln!(out, "balance closure   {:>12.2e}", ex.balance.closure_error())?;
    Ok(())
}

pub fn optimization(out: &mut impl Write, label: &str, r: &OptimizationResult) -> io::Result<()> {
    let b = &r.best;
    let p = &r.performance;
    writeln!(
        out,
        "{label} [{}]: objective {:.5}, fitness {:.5}, {} ({} evaluations)",
        r.case.label(),
        r.objective,
        r.fitness,
        if r.feasible { "feasible" } else { "INFEASIBLE" },
        r.evaluations
    )?;
    writeln!(
        out,
        "  TIT {:.1} K, deltaT {:.2} K, piFan {:.4}, piCompressor {:.3}, alpha {:.3}",
        b.tit, b.delta_t, b.pi_fan, b.pi_compressor, b.alpha
    )?;
    writeln!(
        out,
        "  thrust {:.2} kN, TSFC {:.3} g/kNs, TSF {:.1} Ns/kg, eta_th {:.4}, eta_p {:.4}, eta_ex {:.4}",
        p.thrust, p.tsfc, p.tsf, p.eta_thermal, p.eta_propulsive, p.eta_exergetic
    )
}

pub fn ranking(out: &mut impl Write, r: &TopsisResult) -> io::Result<()> {
    writeln!(out, "{:<5} {:<20} {:>10}", "rank", "alternative", "closeness")?;
    for (i, alt) in r.ranking.iter().enumerate() {
        writeln!(
            out,
            "{:<5} {:<20} {:>10.4}",
            i + 1,
            alt,
            r.score(alt).unwrap_or(f64::NAN)
        )?;
    }
    Ok(())
}
