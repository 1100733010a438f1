//! Reference checks against the published GEnx-1B70 results. Each
//! criterion returns a report with one line per sub-check; the CLI
//! `validate` command and the acceptance tests share these functions.

use std::fmt;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cycle::{run_cycle, CycleResult, EngineSpec, FlightCondition, StationId, StationState};
use crate::decision::{topsis_rank, DecisionMatrix, WeightVector};
use crate::error::Result;
use crate::exergy::{audit, physical_exergy, Component, ExergyOptions};
use crate::gasmodel::{isa_ambient, Fuel, FuelDatabase, GasProperties};
use crate::optimizer::{
    ga_optimize, grid_search_oracle, Bounds, ConstraintSet, DesignContext, GaConfig, ObjectiveCase, OptimizationResult,
};
use crate::performance::{snox, EmissionInputs};

/// Pinned reference values and tolerances.
pub mod targets {
    pub const TAKEOFF_THRUST_KN: f64 = 310.0;
    pub const TAKEOFF_THRUST_TOL: f64 = 0.05;
    pub const TAKEOFF_TSFC: f64 = 8.454;
    pub const TAKEOFF_TSFC_TOL: f64 = 0.12;

    pub const CRUISE_THRUST_KN: f64 = 72.5;
    pub const CRUISE_THRUST_TOL: f64 = 0.08;
    pub const CRUISE_TSFC: f64 = 18.001;
    pub const CRUISE_TSFC_TOL: f64 = 0.12;

    pub const H2_THRUST_KN: f64 = 73.26;
    pub const H2_TSFC: f64 = 6.594;
    pub const H2_ETA_THERMAL: f64 = 0.5791;
    pub const H2_ETA_PROPULSIVE: f64 = 0.7795;
    pub const H2_TOL: f64 = 0.10;
    pub const IDENTITY_TOL: f64 = 1e-12;

    pub const COOLING_DELTA_T: f64 = -20.0;
    pub const THRUST_GAIN_BAND: (f64, f64) = (0.09, 0.14);
    pub const FUEL_GAIN_BAND: (f64, f64) = (0.08, 0.13);

    pub const DESTRUCTION_FLOOR_KW: f64 = -1e-6;
    pub const BALANCE_TOL: f64 = 0.005;

    pub const ORACLE_POINTS: usize = 7;
    pub const ORACLE_MARGIN: f64 = 0.01;

    pub const CASE1_THRUST_GAIN: f64 = 0.10;
    pub const CASE3_ETA_P_GAIN: f64 = 0.08;

    pub const ECONOMIC_RANKING: [&str; 3] = ["case1", "case2", "case3"];
    pub const ECONOMIC_SCORES: [f64; 3] = [0.81, 0.18, 0.05];
    pub const ENVIRONMENTAL_SCORES: [f64; 3] = [0.21, 0.02, 0.77];
    pub const SCORE_TOL: f64 = 0.15;

    pub const SNOX_TOL: f64 = 1e-9;
    pub const RANDOM_MATRICES: usize = 1000;
}

use targets::*;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    /// Informational; does not affect the criterion verdict.
    pub soft: bool,
}

impl Check {
    pub fn hard(passed: bool, label: impl Into<String>) -> Self {
        Check {
            label: label.into(),
            passed,
            soft: false,
        }
    }

    pub fn soft(passed: bool, label: impl Into<String>) -> Self {
        Check {
            label: label.into(),
            passed,
            soft: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
    pub time_limit: Option<Duration>,
}

impl CriterionReport {
    pub fn within_time(&self) -> bool {
        self.time_limit.is_none_or(|t| self.elapsed < t)
    }

    pub fn passed(&self) -> bool {
        self.within_time() && self.checks.iter().filter(|c| !c.soft).all(|c| c.passed)
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let limit = self
            .time_limit
            .map(|t| format!(", limit {:.3} s", t.as_secs_f64()))
            .unwrap_or_default();
        writeln!(
            f,
            "[{verdict}] criterion {}: {} ({:.3} s{limit})",
            self.id,
            self.title,
            self.elapsed.as_secs_f64()
        )?;
        for c in &self.checks {
            let mark = match (c.soft, c.passed) {
                (false, true) => "ok  ",
                (false, false) => "FAIL",
                (true, true) => "soft ok  ",
                (true, false) => "soft miss",
            };
            writeln!(f, "    {mark} {}", c.label)?;
        }
        Ok(())
    }
}

fn timed(
    id: u8,
    title: &'static str,
    time_limit: Option<Duration>,
    body: impl FnOnce() -> Result<Vec<Check>>,
) -> CriterionReport {
    let start = Instant::now();
    let checks = body().unwrap_or_else(|e| vec![Check::hard(false, format!("evaluation error: {e}"))]);
    CriterionReport {
        id,
        title,
        checks,
        elapsed: start.elapsed(),
        time_limit,
    }
}

fn relative_check(name: &str, computed: f64, target: f64, tol: f64, unit: &str) -> Check {
    let dev = (computed - target) / target;
    Check::hard(
        dev.abs() <= tol,
        format!(
            "{name}: {computed:.4} {unit} vs {target} {unit} ({:+.2}%, tolerance ±{:.0}%)",
            100.0 * dev,
            100.0 * tol
        ),
    )
}

fn baseline(cond: FlightCondition, fuel: &Fuel) -> Result<CycleResult> {
    run_cycle(&EngineSpec::genx_1b70(), &cond, fuel)
}

pub fn criterion_1() -> CriterionReport {
    timed(1, "take-off validation, JP10", Some(Duration::from_secs(1)), || {
        let r = baseline(FlightCondition::takeoff(), &Fuel::jp10())?;
        Ok(vec![
            relative_check(
                "thrust",
                r.performance.thrust,
                TAKEOFF_THRUST_KN,
                TAKEOFF_THRUST_TOL,
                "kN",
            ),
            relative_check("TSFC", r.performance.tsfc, TAKEOFF_TSFC, TAKEOFF_TSFC_TOL, "g/kNs"),
        ])
    })
}

pub fn criterion_2() -> CriterionReport {
    timed(2, "on-design validation, JP10", Some(Duration::from_secs(1)), || {
        let r = baseline(FlightCondition::on_design(), &Fuel::jp10())?;
        Ok(vec![
            relative_check(
                "thrust",
                r.performance.thrust,
                CRUISE_THRUST_KN,
                CRUISE_THRUST_TOL,
                "kN",
            ),
            relative_check("TSFC", r.performance.tsfc, CRUISE_TSFC, CRUISE_TSFC_TOL, "g/kNs"),
        ])
    })
}

pub fn criterion_3() -> CriterionReport {
    timed(3, "hydrogen baseline at the design point", None, || {
        let p = baseline(FlightCondition::on_design(), &Fuel::hydrogen())?.performance;
        let identity = (p.eta_overall - p.eta_thermal * p.eta_propulsive).abs() / p.eta_overall.abs();
        Ok(vec![
            relative_check("thrust", p.thrust, H2_THRUST_KN, H2_TOL, "kN"),
            relative_check("TSFC", p.tsfc, H2_TSFC, H2_TOL, "g/kNs"),
            relative_check("thermal efficiency", p.eta_thermal, H2_ETA_THERMAL, H2_TOL, ""),
            relative_check("propulsive efficiency", p.eta_propulsive, H2_ETA_PROPULSIVE, H2_TOL, ""),
            Check::hard(
                identity <= IDENTITY_TOL,
                format!("overall = thermal x propulsive, relative error {identity:.1e}"),
            ),
        ])
    })
}

/// Inlet temperature offsets used by the trend checks, K.
pub fn trend_grid() -> Vec<f64> {
    (0..=30).map(|i| -20.0 + i as f64).collect()
}

fn strictly(values: &[f64], increasing: bool) -> bool {
    values
        .windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

pub fn criterion_4() -> CriterionReport {
    timed(
        4,
        "trends over inlet temperature",
        Some(Duration::from_secs(10)),
        || {
            let spec = EngineSpec::genx_1b70();
            let fuel = Fuel::jp10();
            let mut checks = Vec::new();
            for (name, cond) in [
                ("take-off", FlightCondition::takeoff()),
                ("on-design", FlightCondition::on_design()),
            ] {
                let mut rows = Vec::new();
                for dt in trend_grid() {
                    let c = run_cycle(&spec, &cond.with_delta_t(dt), &fuel)?;
                    let ex = audit(&c, &ExergyOptions::default())?;
                    rows.push((c, ex));
                }
                let series = |f: &dyn Fn(&(CycleResult, crate::exergy::ExergyReport)) -> f64| -> Vec<f64> {
                    rows.iter().map(f).collect()
                };
                let grid = format!("{name}, deltaT -20..10 K step 1");
                checks.push(Check::hard(
                    strictly(&series(&|r| r.0.mass_flow), false),
                    format!("{grid}: intake mass flow falls as inlet temperature rises"),
                ));
                checks.push(Check::hard(
                    strictly(&series(&|r| r.0.performance.thrust), false),
                    format!("{grid}: thrust falls"),
                ));
                checks.push(Check::hard(
                    strictly(&series(&|r| r.0.fuel_flow), false),
                    format!("{grid}: fuel flow falls"),
                ));
                checks.push(Check::hard(
                    strictly(&series(&|r| r.0.performance.snox), true),
                    format!("{grid}: SNOx rises"),
                ));
                if cond.mach > 0.0 {
                    checks.push(Check::hard(
                        strictly(&series(&|r| r.1.entropy_generation), false),
                        format!("{grid}: entropy generation falls"),
                    ));
                    checks.push(Check::hard(
                        strictly(&series(&|r| r.1.engine_eta_ex), true),
                        format!("{grid}: engine exergetic efficiency rises"),
                    ));
                }
            }
            Ok(checks)
        },
    )
}

fn band_check(name: &str, change: f64, band: (f64, f64), published: f64) -> Check {
    Check::hard(
        (band.0..=band.1).contains(&change),
        format!(
            "{name} change {:+.2}% (required {:.0}%..{:.0}%, published {published:+.2}%)",
            100.0 * change,
            100.0 * band.0,
            100.0 * band.1
        ),
    )
}

pub fn criterion_5() -> CriterionReport {
    timed(5, "cooling by 20 K at the design point, JP10", None, || {
        let warm = baseline(FlightCondition::on_design(), &Fuel::jp10())?.performance;
        let cold = baseline(
            FlightCondition::on_design().with_delta_t(COOLING_DELTA_T),
            &Fuel::jp10(),
        )?
        .performance;
        let snox_change = cold.snox / warm.snox - 1.0;
        Ok(vec![
            band_check("thrust", cold.thrust / warm.thrust - 1.0, THRUST_GAIN_BAND, 11.76),
            band_check(
                "fuel flow",
                cold.fuel_flow / warm.fuel_flow - 1.0,
                FUEL_GAIN_BAND,
                10.53,
            ),
            Check::hard(
                snox_change < 0.0,
                format!(
                    "SNOx change {:+.2}% (required negative, published -2.11%)",
                    100.0 * snox_change
                ),
            ),
        ])
    })
}

pub fn criterion_6() -> CriterionReport {
    timed(6, "exergy audit soundness", None, || {
        let spec = EngineSpec::genx_1b70();
        let mut checks = Vec::new();
        let (mut worst_destruction, mut worst_closure, mut points) = (f64::INFINITY, 0.0f64, 0);
        for fuel in FuelDatabase::builtin().fuels {
            for cond in [FlightCondition::takeoff(), FlightCondition::on_design()] {
                for dt in [-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0] {
                    let c = run_cycle(&spec, &cond.with_delta_t(dt), &fuel)?;
                    let ex = audit(&c, &ExergyOptions::default())?;
                    for rec in &ex.per_component {
                        worst_destruction = worst_destruction.min(rec.destruction);
                    }
                    worst_closure = worst_closure.max(ex.balance.closure_error());
                    points += 1;
                    if dt == 0.0 {
                        let top = ex.dominant_destruction();
                        checks.push(Check::hard(
                            top == Component::Combustor,
                            format!(
                                "{} {}: largest destruction in {} ({:.0} kW)",
                                fuel.name,
                                if cond.mach > 0.0 { "on-design" } else { "take-off" },
                                top.name(),
                                ex.component(top).destruction
                            ),
                        ));
                    }
                }
            }
        }
        checks.push(Check::hard(
            worst_destruction >= DESTRUCTION_FLOOR_KW,
            format!("smallest component destruction over {points} cycles: {worst_destruction:.3} kW"),
        ));
        checks.push(Check::hard(
            worst_closure <= BALANCE_TOL,
            format!(
                "largest exergy balance mismatch: {:.2e} (tolerance {BALANCE_TOL})",
                worst_closure
            ),
        ));
        Ok(checks)
    })
}

/// GA and grid results for one objective, computed once per process.
#[derive(Debug, Clone)]
pub struct OptimizationRun {
    pub case: ObjectiveCase,
    pub ga: OptimizationResult,
    pub ga_repeat: OptimizationResult,
    pub oracle: OptimizationResult,
    pub elapsed: Duration,
}

pub fn optimization_context() -> DesignContext {
    DesignContext::hydrogen_cruise(Bounds::default())
}

fn run_optimizations() -> Result<Vec<OptimizationRun>> {
    let ctx = optimization_context();
    let cfg = GaConfig::default();
    ObjectiveCase::ALL
        .into_iter()
        .map(|case| {
            let start = Instant::now();
            let constraints = ConstraintSet::published(case);
            let ga = ga_optimize(case, &constraints, &ctx, &cfg)?;
            let ga_repeat = ga_optimize(case, &constraints, &ctx, &cfg)?;
            let oracle = grid_search_oracle(case, &constraints, &ctx, ORACLE_POINTS, cfg.penalty_for(case))?;
            Ok(OptimizationRun {
                case,
                ga,
                ga_repeat,
                oracle,
                elapsed: start.elapsed(),
            })
        })
        .collect()
}

/// Shared by criteria 7 and 8 so the searches run only once.
pub fn optimization_runs() -> &'static std::result::Result<Vec<OptimizationRun>, crate::error::Error> {
    static RUNS: OnceLock<std::result::Result<Vec<OptimizationRun>, crate::error::Error>> = OnceLock::new();
    RUNS.get_or_init(run_optimizations)
}

/// True when `ga` is at least as good as `oracle` less the margin.
pub fn ga_matches_oracle(ga: &OptimizationResult, oracle: &OptimizationResult, margin: f64) -> bool {
    match (ga.feasible, oracle.feasible) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => ga.objective >= oracle.objective - margin * oracle.objective.abs(),
        (false, false) => ga.fitness >= oracle.fitness - margin * oracle.fitness.abs(),
    }
}

pub fn criterion_7() -> CriterionReport {
    let mut report = timed(7, "GA against grid oracle", Some(Duration::from_secs(300)), || {
        let runs = optimization_runs().as_ref().map_err(Clone::clone)?;
        let mut checks = Vec::new();
        for run in runs {
            let basis = if run.ga.feasible && run.oracle.feasible {
                "objective"
            } else {
                "penalized fitness"
            };
            let (g, o) = if basis == "objective" {
                (run.ga.objective, run.oracle.objective)
            } else {
                (run.ga.fitness, run.oracle.fitness)
            };
            checks.push(Check::hard(
                ga_matches_oracle(&run.ga, &run.oracle, ORACLE_MARGIN),
                format!(
                    "{}: GA {basis} {g:.5} (feasible {}) vs oracle {o:.5} (feasible {}, {} points)",
                    run.case.label(),
                    run.ga.feasible,
                    run.oracle.feasible,
                    run.oracle.evaluations
                ),
            ));
            let same = serde_json::to_string(&run.ga).ok() == serde_json::to_string(&run.ga_repeat).ok();
            checks.push(Check::hard(
                same,
                format!(
                    "{}: repeated GA run with seed {} is bit-identical",
                    run.case.label(),
                    GaConfig::default().seed
                ),
            ));
        }
        Ok(checks)
    });
    // The searches may already have run for another criterion; charge
    // their own wall time rather than the cache lookup.
    if let Ok(runs) = optimization_runs() {
        report.elapsed = runs.iter().map(|r| r.elapsed).sum();
    }
    report
}

pub fn criterion_8() -> CriterionReport {
    timed(8, "optimized cycles against the hydrogen baseline", None, || {
        let runs = optimization_runs().as_ref().map_err(Clone::clone)?;
        let base = baseline(FlightCondition::on_design(), &Fuel::hydrogen())?.performance;
        let get = |case| runs.iter().find(|r| r.case == case).expect("all cases run");
        let c1 = &get(ObjectiveCase::ThrustMax).ga;
        let c2 = &get(ObjectiveCase::ThermalEffMax).ga;
        let c3 = &get(ObjectiveCase::PropulsiveEffMax).ga;
        let gain = c1.performance.thrust / base.thrust - 1.0;
        let dp = c3.performance.eta_propulsive - base.eta_propulsive;
        Ok(vec![
            Check::hard(
                c2.performance.eta_thermal >= base.eta_thermal,
                format!(
                    "case 2 thermal efficiency {:.4} vs baseline {:.4} (feasible {})",
                    c2.performance.eta_thermal, base.eta_thermal, c2.feasible
                ),
            ),
            Check::hard(
                dp >= CASE3_ETA_P_GAIN,
                format!(
                    "case 3 propulsive efficiency {:.4} vs baseline {:.4}: {:+.2} points (required +{:.0}, feasible {})",
                    c3.performance.eta_propulsive,
                    base.eta_propulsive,
                    100.0 * dp,
                    100.0 * CASE3_ETA_P_GAIN,
                    c3.feasible
                ),
            ),
            Check::hard(
                gain >= CASE1_THRUST_GAIN,
                format!(
                    "case 1 thrust {:.2} kN vs baseline {:.2} kN: {:+.2}% (required +{:.0}%, feasible {})",
                    c1.performance.thrust,
                    base.thrust,
                    100.0 * gain,
                    100.0 * CASE1_THRUST_GAIN,
                    c1.feasible
                ),
            ),
        ])
    })
}

pub fn criterion_9() -> CriterionReport {
    timed(
        9,
        "TOPSIS ranking of the published optima",
        Some(Duration::from_millis(1)),
        || {
            let m = DecisionMatrix::reference_cycles();
            let eco = topsis_rank(&m, &WeightVector::economic())?;
            let env = topsis_rank(&m, &WeightVector::exero_environmental())?;
            let mut checks = vec![
                Check::hard(
                    eco.ranking == ECONOMIC_RANKING,
                    format!("economic ranking {:?}", eco.ranking),
                ),
                Check::hard(
                    env.ranking.first().map(String::as_str) == Some("case3")
                        && env.ranking.last().map(String::as_str) == Some("case2"),
                    format!("exero-environmental ranking {:?}", env.ranking),
                ),
            ];
            for (name, result, published) in [
                ("economic", &eco, ECONOMIC_SCORES),
                ("exero-environmental", &env, ENVIRONMENTAL_SCORES),
            ] {
                for (c, p) in result.closeness.iter().zip(published) {
                    checks.push(Check::soft(
                        (c - p).abs() <= SCORE_TOL,
                        format!("{name} score {c:.3} vs published {p:.2} (soft tolerance ±{SCORE_TOL})"),
                    ));
                }
            }
            Ok(checks)
        },
    )
}

fn random_topsis_properties(rng: &mut ChaCha8Rng) -> Result<(bool, bool)> {
    let m = rng.gen_range(2..7);
    let n = rng.gen_range(1..6);
    let mut values: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(0.1..100.0)).collect())
        .collect();
    let weights: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(0.05..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let labels = |k: usize, p: &str| (0..k).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    let w = WeightVector(weights.clone());

    let base = topsis_rank(
        &DecisionMatrix::new(labels(m, "a"), labels(n, "c"), values.clone())?,
        &w,
    )?;
    let col = rng.gen_range(0..n);
    let scale = rng.gen_range(0.01..100.0);
    let scaled: Vec<Vec<f64>> = values
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r[col] *= scale;
            r
        })
        .collect();
    let again = topsis_rank(&DecisionMatrix::new(labels(m, "a"), labels(n, "c"), scaled)?, &w)?;
    let scale_ok = base.ranking == again.ranking
        && base
            .closeness
            .iter()
            .zip(&again.closeness)
            .all(|(a, b)| (a - b).abs() < 1e-9);

    // Make alternative 0 ideal and alternative 1 anti-ideal on every criterion.
    for j in 0..n {
        let (lo, hi) = values.iter().skip(2).fold(
            (rng.gen_range(0.1..1.0), rng.gen_range(100.0..200.0)),
            |(lo, hi): (f64, f64), r| (lo.min(r[j]), hi.max(r[j])),
        );
        let (best, worst) = if weights[j] > 0.0 { (hi, lo) } else { (lo, hi) };
        values[0][j] = best;
        values[1][j] = worst;
    }
    let ends = topsis_rank(&DecisionMatrix::new(labels(m, "a"), labels(n, "c"), values)?, &w)?;
    let endpoint_ok = (ends.closeness[0] - 1.0).abs() < 1e-12 && ends.closeness[1].abs() < 1e-12;
    Ok((scale_ok, endpoint_ok))
}

pub fn criterion_10() -> CriterionReport {
    timed(10, "unit and point checks", None, || {
        let s = snox(&EmissionInputs {
            p4: 2965.0,
            t4: 826.0,
            war: 0.0,
        });
        let expected = (6.29f64 / 53.2).exp();
        let amb = isa_ambient(10_000.0)?;
        let dead = physical_exergy(
            &StationState::new(StationId::Ambient, amb.t0, amb.p0, 1000.0),
            &amb,
            &GasProperties::COLD_AIR,
        );
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let (mut scale_ok, mut endpoint_ok) = (0, 0);
        for _ in 0..RANDOM_MATRICES {
            let (a, b) = random_topsis_properties(&mut rng)?;
            scale_ok += a as usize;
            endpoint_ok += b as usize;
        }
        Ok(vec![
            Check::hard(
                (s - expected).abs() <= SNOX_TOL,
                format!("SNOx(2965 kPa, 826 K, dry) = {s:.12}, expected {expected:.12}"),
            ),
            Check::hard(dead.rate == 0.0, format!("exergy at the dead state = {}", dead.rate)),
            Check::hard(
                scale_ok == RANDOM_MATRICES,
                format!("TOPSIS column scale invariance held in {scale_ok}/{RANDOM_MATRICES} random matrices"),
            ),
            Check::hard(
                endpoint_ok == RANDOM_MATRICES,
                format!("TOPSIS ideal/anti-ideal endpoints held in {endpoint_ok}/{RANDOM_MATRICES} random matrices"),
            ),
        ])
    })
}

pub fn run_all() -> Vec<CriterionReport> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]
}
