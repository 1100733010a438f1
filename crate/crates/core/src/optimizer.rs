//! Constrained single-objective cycle optimization over five design
//! variables, with a real-coded genetic algorithm and an exhaustive grid
//! search used as a cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycle::{run_cycle, EngineSpec, FlightCondition};
use crate::error::{Error, Result};
use crate::exergy::{audit, ExergyOptions, ExergyReport};
use crate::gasmodel::Fuel;
use crate::performance::CyclePerformance;

/// Fitness given to designs whose cycle cannot be solved.
pub const INFEASIBLE_PENALTY: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DesignVector {
    #[serde(rename = "TIT")]
    pub tit: f64,
    #[serde(rename = "deltaT")]
    pub delta_t: f64,
    pub pi_fan: f64,
    /// Overall core ratio, LPC times HPC.
    pub pi_compressor: f64,
    pub alpha: f64,
}

impl DesignVector {
    pub const NAMES: [&'static str; 5] = ["TIT", "deltaT", "piFan", "piCompressor", "alpha"];

    pub fn to_array(self) -> [f64; 5] {
        [self.tit, self.delta_t, self.pi_fan, self.pi_compressor, self.alpha]
    }

    pub fn from_array(x: [f64; 5]) -> Self {
        DesignVector {
            tit: x[0],
            delta_t: x[1],
            pi_fan: x[2],
            pi_compressor: x[3],
            alpha: x[4],
        }
    }

    /// The design point of an engine spec with no inlet cooling.
    pub fn from_spec(spec: &EngineSpec) -> Self {
        DesignVector {
            tit: spec.tit,
            delta_t: 0.0,
            pi_fan: spec.pi_fan,
            pi_compressor: spec.pi_core(),
            alpha: spec.alpha,
        }
    }

    /// Applies the vector to a template spec. The core ratio is split
    /// between LPC and HPC in the template's logarithmic proportion.
    pub fn apply(&self, template: &EngineSpec) -> EngineSpec {
        let share = template.pi_lpc.ln() / template.pi_core().ln();
        let pi_lpc = self.pi_compressor.powf(share);
        EngineSpec {
            tit: self.tit,
            pi_fan: self.pi_fan,
            pi_lpc,
            pi_hpc: self.pi_compressor / pi_lpc,
            alpha: self.alpha,
            ..template.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub lower: DesignVector,
    pub upper: DesignVector,
}

impl Default for Bounds {
    /// Published variable ranges with the fan ratio opened down to 1.1 and
    /// the bypass ratio up to 12, so that the reported optima are inside.
    fn default() -> Self {
        let mut b = Self::published();
        b.lower.pi_fan = 1.1;
        b.upper.alpha = 12.0;
        b
    }
}

impl Bounds {
    /// The published variable ranges, unmodified.
    pub fn published() -> Self {
        Bounds {
            lower: DesignVector {
                tit: 1000.0,
                delta_t: -10.0,
                pi_fan: 3.0,
                pi_compressor: 28.0,
                alpha: 7.5,
            },
            upper: DesignVector {
                tit: 2000.0,
                delta_t: 10.0,
                pi_fan: 4.5,
                pi_compressor: 32.0,
                alpha: 10.0,
            },
        }
    }

    pub fn as_pairs(&self) -> Vec<(f64, f64)> {
        self.lower.to_array().into_iter().zip(self.upper.to_array()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for ((lo, hi), name) in self.as_pairs().into_iter().zip(DesignVector::NAMES) {
            if !(lo < hi) {
                return Err(Error::Config(format!(
                    "bounds for {name}: lower {lo} must be below upper {hi}"
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, d: &DesignVector) -> Result<()> {
        for ((x, (lo, hi)), name) in d.to_array().into_iter().zip(self.as_pairs()).zip(DesignVector::NAMES) {
            if !(lo..=hi).contains(&x) {
                return Err(Error::OutOfRange {
                    quantity: name,
                    value: x,
                    min: lo,
                    max: hi,
                });
            }
        }
        Ok(())
    }

    pub fn midpoint(&self) -> DesignVector {
        let pairs = self.as_pairs();
        DesignVector::from_array(std::array::from_fn(|i| 0.5 * (pairs[i].0 + pairs[i].1)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveCase {
    #[serde(alias = "case1")]
    ThrustMax,
    #[serde(alias = "case2")]
    ThermalEffMax,
    #[serde(alias = "case3")]
    PropulsiveEffMax,
}

impl ObjectiveCase {
    pub const ALL: [ObjectiveCase; 3] = [
        ObjectiveCase::ThrustMax,
        ObjectiveCase::ThermalEffMax,
        ObjectiveCase::PropulsiveEffMax,
    ];

    pub fn objective(self, perf: &CyclePerformance) -> f64 {
        match self {
            ObjectiveCase::ThrustMax => perf.thrust,
            ObjectiveCase::ThermalEffMax => perf.eta_thermal,
            ObjectiveCase::PropulsiveEffMax => perf.eta_propulsive,
        }
    }

    /// Typical magnitude of the objective, used to size the penalty.
    pub fn scale(self) -> f64 {
        match self {
            ObjectiveCase::ThrustMax => 100.0,
            ObjectiveCase::ThermalEffMax | ObjectiveCase::PropulsiveEffMax => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ObjectiveCase::ThrustMax => "thrust-max",
            ObjectiveCase::ThermalEffMax => "thermal-eff-max",
            ObjectiveCase::PropulsiveEffMax => "propulsive-eff-max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "etaThermal")]
    EtaThermal,
    #[serde(rename = "etaPropulsive")]
    EtaPropulsive,
    #[serde(rename = "tsfc")]
    Tsfc,
    #[serde(rename = "tsf")]
    Tsf,
}

impl Metric {
    pub fn value(self, perf: &CyclePerformance) -> f64 {
        match self {
            Metric::EtaThermal => perf.eta_thermal,
            Metric::EtaPropulsive => perf.eta_propulsive,
            Metric::Tsfc => perf.tsfc,
            Metric::Tsf => perf.tsf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub metric: Metric,
    pub min: f64,
    pub max: f64,
}

impl Band {
    pub fn new(metric: Metric, min: f64, max: f64) -> Self {
        Band { metric, min, max }
    }

    /// Distance outside the band in units of the band width.
    pub fn violation(&self, perf: &CyclePerformance) -> f64 {
        let v = self.metric.value(perf);
        let width = self.max - self.min;
        if v < self.min {
            (self.min - v) / width
        } else if v > self.max {
            (v - self.max) / width
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSet {
    #[serde(default)]
    pub bands: Vec<Band>,
}

impl ConstraintSet {
    pub fn none() -> Self {
        ConstraintSet { bands: vec![] }
    }

    /// Published constraint bands for each objective.
    pub fn published(case: ObjectiveCase) -> Self {
        use Metric::*;
        let tsfc = Band::new(Tsfc, 2.0, 8.0);
        let bands = match case {
            ObjectiveCase::ThrustMax => vec![
                Band::new(EtaThermal, 0.50, 0.75),
                tsfc,
                Band::new(EtaPropulsive, 0.75, 0.95),
            ],
            ObjectiveCase::ThermalEffMax => {
                vec![Band::new(Tsf, 140.0, 160.0), tsfc, Band::new(EtaPropulsive, 0.75, 0.95)]
            }
            ObjectiveCase::PropulsiveEffMax => {
                vec![Band::new(Tsf, 70.0, 160.0), tsfc, Band::new(EtaThermal, 0.50, 0.75)]
            }
        };
        ConstraintSet { bands }
    }

    pub fn validate(&self) -> Result<()> {
        for b in &self.bands {
            if !(b.min < b.max) {
                return Err(Error::Config(format!(
                    "constraint band on {:?}: min {} must be below max {}",
                    b.metric, b.min, b.max
                )));
            }
        }
        Ok(())
    }

    pub fn total_violation(&self, perf: &CyclePerformance) -> f64 {
        self.bands.iter().map(|b| b.violation(perf)).sum()
    }

    pub fn satisfied(&self, perf: &CyclePerformance) -> bool {
        self.total_violation(perf) == 0.0
    }
}

/// Objective minus the weighted band violations; a fixed large negative
/// value when the cycle could not be solved.
pub fn penalized_fitness(
    perf: Option<&CyclePerformance>,
    case: ObjectiveCase,
    constraints: &ConstraintSet,
    penalty_weight: f64,
) -> f64 {
    match perf {
        Some(p) => case.objective(p) - penalty_weight * constraints.total_violation(p),
        None => -INFEASIBLE_PENALTY,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    /// BLX-alpha extension on each side of the parents' interval.
    pub blend_alpha: f64,
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of each variable's range.
    pub mutation_sigma: f64,
    pub elitism: usize,
    /// Defaults to ten times the objective scale.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalty_weight: Option<f64>,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 100,
            generations: 200,
            tournament_size: 3,
            crossover_rate: 0.9,
            blend_alpha: 0.5,
            mutation_rate: 0.1,
            mutation_sigma: 0.05,
            elitism: 1,
            penalty_weight: None,
            seed: 42,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 10 {
            return Err(Error::Config(format!(
                "populationSize {} is below the minimum of 10",
                self.population_size
            )));
        }
        for (name, v) in [
            ("crossoverRate", self.crossover_rate),
            ("mutationRate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} {v} must lie in [0, 1]")));
            }
        }
        if self.tournament_size == 0 || self.elitism >= self.population_size {
            return Err(Error::Config(
                "tournamentSize must be positive and elitism below populationSize".into(),
            ));
        }
        if !(self.mutation_sigma >= 0.0) || !(self.blend_alpha >= 0.0) {
            return Err(Error::Config(
                "mutationSigma and blendAlpha must be non-negative".into(),
            ));
        }
        if let Some(w) = self.penalty_weight {
            if !(w > 0.0) {
                return Err(Error::Config(format!("penaltyWeight {w} must be positive")));
            }
        }
        Ok(())
    }

    pub fn penalty_for(&self, case: ObjectiveCase) -> f64 {
        self.penalty_weight.unwrap_or(10.0 * case.scale())
    }
}

/// Outcome of one fitness evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub fitness: f64,
    pub feasible: bool,
}

/// Best individual of a box-constrained maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: Vec<f64>,
    pub score: Scored,
    pub history: Vec<f64>,
    pub evaluations: usize,
}

#[derive(Clone)]
struct Individual {
    genes: Vec<f64>,
    score: Scored,
}

/// Prefers feasible over infeasible, then higher fitness; earlier wins ties.
fn better(a: &Scored, b: &Scored) -> bool {
    match (a.feasible, b.feasible) {
        (true, false) => true,
        (false, true) => false,
        _ => a.fitness > b.fitness,
    }
}

fn best_index(pop: &[Individual]) -> usize {
    pop.iter().enumerate().fold(
        0,
        |best, (i, ind)| if better(&ind.score, &pop[best].score) { i } else { best },
    )
}

fn fittest_index(pop: &[Individual]) -> usize {
    pop.iter().enumerate().fold(0, |best, (i, ind)| {
        if ind.score.fitness > pop[best].score.fitness {
            i
        } else {
            best
        }
    })
}

/// Real-coded genetic algorithm maximizing `fitness` inside `bounds`.
///
/// Fitness is evaluated in parallel; all random draws happen on the calling
/// thread, so results depend only on `cfg.seed`. `history[g]` is the best
/// fitness in the population after generation `g` (index 0 is the initial
/// population) and never decreases thanks to elitism. The returned design
/// is the best feasible individual ever evaluated, or the fittest one when
/// none was feasible.
pub fn genetic_search<F>(bounds: &[(f64, f64)], cfg: &GaConfig, fitness: F) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> Scored + Sync,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dims = bounds.len();
    let evaluate = |genes: Vec<Vec<f64>>| -> Vec<Individual> {
        let scores: Vec<Scored> = genes.par_iter().map(|g| fitness(g)).collect();
        genes
            .into_iter()
            .zip(scores)
            .map(|(genes, score)| Individual { genes, score })
            .collect()
    };
    let clamp = |g: &mut Vec<f64>| {
        for (x, (lo, hi)) in g.iter_mut().zip(bounds) {
            *x = x.clamp(*lo, *hi);
        }
    };
    let sigmas: Vec<f64> = bounds.iter().map(|(lo, hi)| cfg.mutation_sigma * (hi - lo)).collect();

    let initial: Vec<Vec<f64>> = (0..cfg.population_size)
        .map(|_| bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect())
        .collect();
    let mut pop = evaluate(initial);
    let mut evaluations = pop.len();
    let mut champion = pop[best_index(&pop)].clone();
    let mut history = vec![pop[fittest_index(&pop)].score.fitness];

    for _ in 0..cfg.generations {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| pop[b].score.fitness.total_cmp(&pop[a].score.fitness));
        let elites: Vec<Individual> = order[..cfg.elitism].iter().map(|&i| pop[i].clone()).collect();

        let tournament = |rng: &mut ChaCha8Rng| -> usize {
            let mut winner = rng.gen_range(0..pop.len());
            for _ in 1..cfg.tournament_size {
                let c = rng.gen_range(0..pop.len());
                if pop[c].score.fitness > pop[winner].score.fitness {
                    winner = c;
                }
            }
            winner
        };

        let mut children: Vec<Vec<f64>> = Vec::with_capacity(cfg.population_size);
        while children.len() + elites.len() < cfg.population_size {
            let a = &pop[tournament(&mut rng)].genes;
            let b = &pop[tournament(&mut rng)].genes;
            let (mut c1, mut c2) = (a.clone(), b.clone());
            if rng.gen_bool(cfg.crossover_rate) {
                for d in 0..dims {
                    let (lo, hi) = (a[d].min(b[d]), a[d].max(b[d]));
                    let ext = cfg.blend_alpha * (hi - lo);
                    if hi - lo > 0.0 || ext > 0.0 {
                        c1[d] = rng.gen_range(lo - ext..=hi + ext);
                        c2[d] = rng.gen_range(lo - ext..=hi + ext);
                    }
                }
            }
            for child in [&mut c1, &mut c2] {
                for d in 0..dims {
                    if sigmas[d] > 0.0 && rng.gen_bool(cfg.mutation_rate) {
                        let step = Normal::new(0.0, sigmas[d]).expect("positive sigma");
                        child[d] += step.sample(&mut rng);
                    }
                }
                clamp(child);
            }
            children.push(c1);
            if children.len() + elites.len() < cfg.population_size {
                children.push(c2);
            }
        }
        evaluations += children.len();
        let mut next = elites;
        next.extend(evaluate(children));
        pop = next;

        let gen_best = best_index(&pop);
        if better(&pop[gen_best].score, &champion.score) {
            champion = pop[gen_best].clone();
        }
        history.push(pop[fittest_index(&pop)].score.fitness);
    }

    Ok(SearchOutcome {
        best: champion.genes,
        score: champion.score,
        history,
        evaluations,
    })
}

/// Exhaustive search over a regular grid with `points` nodes per axis
/// (one node means the box midpoint). Ties resolve to the lowest grid
/// index.
pub fn grid_search<F>(bounds: &[(f64, f64)], points: usize, fitness: F) -> Result<SearchOutcome>
where
    F: Fn(&[f64]) -> Scored + Sync,
{
    if points == 0 {
        return Err(Error::Config("grid needs at least one point per axis".into()));
    }
    let dims = bounds.len();
    let total = points
        .checked_pow(dims as u32)
        .ok_or_else(|| Error::Config("grid too large".into()))?;
    let node = |axis: usize, j: usize| {
        let (lo, hi) = bounds[axis];
        if points == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * j as f64 / (points - 1) as f64
        }
    };
    let point = |mut idx: usize| -> Vec<f64> {
        (0..dims)
            .map(|axis| {
                let j = idx % points;
                idx /= points;
                node(axis, j)
            })
            .collect()
    };
    let scores: Vec<Scored> = (0..total).into_par_iter().map(|i| fitness(&point(i))).collect();
    let best = scores
        .iter()
        .enumerate()
        .fold(0, |best, (i, s)| if better(s, &scores[best]) { i } else { best });
    Ok(SearchOutcome {
        best: point(best),
        score: scores[best],
        history: vec![scores[best].fitness],
        evaluations: total,
    })
}

/// Fixed part of every design evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignContext {
    pub template: EngineSpec,
    pub flight: FlightCondition,
    pub fuel: Fuel,
    pub bounds: Bounds,
    pub exergy: ExergyOptions,
}

impl DesignContext {
    /// GEnx-1B70 template at the cruise design point, burning hydrogen.
    pub fn hydrogen_cruise(bounds: Bounds) -> Self {
        DesignContext {
            template: EngineSpec::genx_1b70(),
            flight: FlightCondition::on_design(),
            fuel: Fuel::hydrogen(),
            bounds,
            exergy: ExergyOptions::default(),
        }
    }
}

/// Solves the cycle and its exergy audit for one design vector. The flight
/// condition's inlet temperature offset is replaced by the vector's.
pub fn evaluate_design(d: &DesignVector, ctx: &DesignContext) -> Result<(CyclePerformance, ExergyReport)> {
    ctx.bounds.contains(d)?;
    let spec = d.apply(&ctx.template);
    let cycle = run_cycle(&spec, &ctx.flight.with_delta_t(d.delta_t), &ctx.fuel)?;
    let report = audit(&cycle, &ctx.exergy)?;
    Ok((cycle.performance, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimizationResult {
    pub case: ObjectiveCase,
    pub best: DesignVector,
    pub performance: CyclePerformance,
    pub exergy: ExergyReport,
    pub feasible: bool,
    pub objective: f64,
    pub fitness: f64,
    pub history: Vec<f64>,
    pub evaluations: usize,
}

fn scorer<'a>(
    case: ObjectiveCase,
    constraints: &'a ConstraintSet,
    ctx: &'a DesignContext,
    penalty_weight: f64,
) -> impl Fn(&[f64]) -> Scored + Sync + 'a {
    move |x: &[f64]| {
        let d = DesignVector::from_array([x[0], x[1], x[2], x[3], x[4]]);
        let spec = d.apply(&ctx.template);
        match run_cycle(&spec, &ctx.flight.with_delta_t(d.delta_t), &ctx.fuel) {
            Ok(c) => Scored {
                fitness: penalized_fitness(Some(&c.performance), case, constraints, penalty_weight),
                feasible: constraints.satisfied(&c.performance),
            },
            Err(_) => Scored {
                fitness: penalized_fitness(None, case, constraints, penalty_weight),
                feasible: false,
            },
        }
    }
}

fn finish(case: ObjectiveCase, ctx: &DesignContext, outcome: SearchOutcome) -> Result<OptimizationResult> {
    let x = &outcome.best;
    let best = DesignVector::from_array([x[0], x[1], x[2], x[3], x[4]]);
    // Only fails when no point of the search space has a solvable cycle.
    let (performance, exergy) = evaluate_design(&best, ctx)?;
    Ok(OptimizationResult {
        case,
        best,
        objective: case.objective(&performance),
        performance,
        exergy,
        feasible: outcome.score.feasible,
        fitness: outcome.score.fitness,
        history: outcome.history,
        evaluations: outcome.evaluations,
    })
}

fn check_problem(constraints: &ConstraintSet, ctx: &DesignContext) -> Result<()> {
    ctx.bounds.validate()?;
    constraints.validate()?;
    ctx.template.validate()?;
    ctx.flight.validate()
}

pub fn ga_optimize(
    case: ObjectiveCase,
    constraints: &ConstraintSet,
    ctx: &DesignContext,
    cfg: &GaConfig,
) -> Result<OptimizationResult> {
    check_problem(constraints, ctx)?;
    let f = scorer(case, constraints, ctx, cfg.penalty_for(case));
    let outcome = genetic_search(&ctx.bounds.as_pairs(), cfg, f)?;
    finish(case, ctx, outcome)
}

pub fn grid_search_oracle(
    case: ObjectiveCase,
    constraints: &ConstraintSet,
    ctx: &DesignContext,
    points_per_axis: usize,
    penalty_weight: f64,
) -> Result<OptimizationResult> {
    check_problem(constraints, ctx)?;
    let f = scorer(case, constraints, ctx, penalty_weight);
    let outcome = grid_search(&ctx.bounds.as_pairs(), points_per_axis, f)?;
    finish(case, ctx, outcome)
}
