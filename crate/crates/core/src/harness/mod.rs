//! Seeded parameter sweeps and their summaries.
//!
//! Each run draws from its own stream, seeded from the base seed, the cell's
//! identity (noise model and λ) and the run index. Results therefore do not
//! depend on the thread count, the execution order, or on which other cells
//! are part of the sweep.

mod csv;
mod stats;

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;

pub use self::csv::{emit_csv, format_sig6, render_csv, HEADER as CSV_HEADER};
pub use self::stats::RunningStats;

use crate::engine::{self, AlgorithmConfig, StoppingRule};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::problem::{Fitness, ProblemInstance};
use crate::rng::{derive_seed, mix64, RandomSource};

/// Default limit on `runs * cap` summed over all cells.
pub const DEFAULT_BUDGET: u128 = 100_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    MeanGenerations,
    StdGenerations,
    SuccessRate,
    MeanBestFitness,
    StdBestFitness,
    MeanEvaluations,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::MeanGenerations,
        Metric::StdGenerations,
        Metric::SuccessRate,
        Metric::MeanBestFitness,
        Metric::StdBestFitness,
        Metric::MeanEvaluations,
    ];

    pub fn all() -> BTreeSet<Metric> {
        Self::ALL.into_iter().collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::MeanGenerations => "mean_generations",
            Metric::StdGenerations => "std_generations",
            Metric::SuccessRate => "success_rate",
            Metric::MeanBestFitness => "mean_best_fitness",
            Metric::StdBestFitness => "std_best_fitness",
            Metric::MeanEvaluations => "mean_evaluations",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown metric {s:?}")))
    }
}

/// Which noise parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// The trigger probability `p`.
    P,
    /// The bit-wise rate parameter `q` (per-bit probability `q/n`).
    Q,
}

/// One sweep cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    /// Value reported in the `param_log2` column.
    pub param: f64,
    pub lambda: usize,
    pub noise: NoiseModel,
}

impl Cell {
    /// `template` with the swept parameter set to `value`.
    pub fn from_template(template: NoiseModel, axis: SweepAxis, value: f64, lambda: usize) -> Result<Self> {
        let noise = match (template, axis) {
            (NoiseModel::NoNoise, _) => NoiseModel::NoNoise,
            (NoiseModel::OneBit { .. }, SweepAxis::P) => NoiseModel::one_bit(value)?,
            (NoiseModel::AsymmetricOneBit { .. }, SweepAxis::P) => {
                NoiseModel::asymmetric_one_bit(value)?
            }
            (NoiseModel::BitWise { q, .. }, SweepAxis::P) => NoiseModel::bit_wise_unchecked(value, q)?,
            (NoiseModel::BitWise { p, .. }, SweepAxis::Q) => NoiseModel::bit_wise_unchecked(p, value)?,
            (other, SweepAxis::Q) => {
                return Err(Error::invalid(format!("cannot sweep q for noise model {other}")))
            }
        };
        Ok(Self {
            param: value,
            lambda,
            noise,
        })
    }

    /// Stream coordinate derived from the cell's content.
    pub fn key(&self) -> u64 {
        let (tag, p, q) = match self.noise {
            NoiseModel::NoNoise => (0u64, 0.0, 0.0),
            NoiseModel::OneBit { p } => (1, p, 0.0),
            NoiseModel::BitWise { p, q } => (2, p, q),
            NoiseModel::AsymmetricOneBit { p } => (3, p, 0.0),
        };
        [tag, self.lambda as u64, p.to_bits(), q.to_bits(), self.param.to_bits()]
            .into_iter()
            .fold(0u64, |h, v| mix64(h ^ v))
    }
}

/// Cartesian product of parameter values and λ values.
pub fn grid(template: NoiseModel, axis: SweepAxis, values: &[f64], lambdas: &[usize]) -> Result<Vec<Cell>> {
    let mut cells = Vec::with_capacity(values.len() * lambdas.len());
    for &lambda in lambdas {
        for &v in values {
            cells.push(Cell::from_template(template, axis, v, lambda)?);
        }
    }
    Ok(cells)
}

/// `2^lo, 2^(lo+1), ..., 2^hi`.
pub fn powers_of_two(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|e| 2f64.powi(e)).collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub instance: ProblemInstance,
    /// Mutation operator and default λ; noise and λ are overridden per cell.
    pub algorithm: AlgorithmConfig,
    pub sweep: Vec<Cell>,
    pub runs_per_cell: usize,
    pub stop: StoppingRule,
    pub base_seed: u64,
    pub metrics: BTreeSet<Metric>,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Limit on `runs * cap` summed over cells.
    pub budget: u128,
    /// Lifts the `q/n <= 1/2` restriction on bit-wise noise.
    pub allow_high_rate: bool,
}

impl ExperimentConfig {
    pub fn new(
        instance: ProblemInstance,
        algorithm: AlgorithmConfig,
        sweep: Vec<Cell>,
        runs_per_cell: usize,
        stop: StoppingRule,
        base_seed: u64,
    ) -> Self {
        Self {
            instance,
            algorithm,
            sweep,
            runs_per_cell,
            stop,
            base_seed,
            metrics: Metric::all(),
            threads: None,
            budget: DEFAULT_BUDGET,
            allow_high_rate: false,
        }
    }

    pub fn predicted_work(&self) -> u128 {
        self.sweep.len() as u128 * self.runs_per_cell as u128 * self.stop.max_generations() as u128
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs_per_cell == 0 {
            return Err(Error::invalid("runs per cell must be at least 1"));
        }
        if self.sweep.is_empty() {
            return Err(Error::invalid("the sweep needs at least one cell"));
        }
        if self.metrics.is_empty() {
            return Err(Error::invalid("at least one metric must be requested"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("thread count must be positive"));
        }
        for cell in &self.sweep {
            if !(self.allow_high_rate && matches!(cell.noise, NoiseModel::BitWise { .. })) {
                cell.noise.validate_for(self.instance.n())?;
            }
            self.algorithm.with_lambda(cell.lambda)?;
        }
        let predicted = self.predicted_work();
        if predicted > self.budget {
            return Err(Error::BudgetExceeded {
                predicted,
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn cell_config(&self, cell: &Cell) -> AlgorithmConfig {
        self.algorithm
            .with_noise(cell.noise)
            .with_lambda(cell.lambda)
            .expect("validated")
    }
}

/// Aggregates over the runs of one cell. Capped runs enter the generation
/// statistics at the cap.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub param: f64,
    pub lambda: usize,
    pub runs: usize,
    pub mean_generations: f64,
    pub std_generations: f64,
    pub success_rate: f64,
    pub mean_best_fitness: f64,
    pub std_best_fitness: f64,
    pub mean_evaluations: f64,
}

/// Per-run data kept for aggregation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOutcome {
    pub success: bool,
    pub generations: u64,
    pub evaluations: u64,
    pub best_true_fitness: f64,
}

pub fn summarize(cell: &Cell, outcomes: &[RunOutcome]) -> CellSummary {
    let gens: RunningStats = outcomes.iter().map(|o| o.generations as f64).collect();
    let best: RunningStats = outcomes.iter().map(|o| o.best_true_fitness).collect();
    let evals: RunningStats = outcomes.iter().map(|o| o.evaluations as f64).collect();
    let successes = outcomes.iter().filter(|o| o.success).count();
    CellSummary {
        param: cell.param,
        lambda: cell.lambda,
        runs: outcomes.len(),
        mean_generations: gens.mean(),
        std_generations: gens.std(),
        success_rate: successes as f64 / outcomes.len() as f64,
        mean_best_fitness: best.mean(),
        std_best_fitness: best.std(),
        mean_evaluations: evals.mean(),
    }
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// All run outcomes per cell, in sweep order and run order.
pub fn run_cells(cfg: &ExperimentConfig) -> Result<Vec<Vec<RunOutcome>>> {
    cfg.validate()?;
    let runs = cfg.runs_per_cell;
    let jobs: Vec<(usize, usize)> = (0..cfg.sweep.len())
        .flat_map(|c| (0..runs).map(move |r| (c, r)))
        .collect();
    let flat: Vec<RunOutcome> = in_pool(cfg.threads, || {
        jobs.par_iter()
            .map(|&(c, r)| {
                let cell = &cfg.sweep[c];
                let algo = cfg.cell_config(cell);
                let mut rng = RandomSource::new(derive_seed(cfg.base_seed, cell.key(), r as u64));
                let rec = engine::run(&cfg.instance, &algo, &cfg.stop, &mut rng);
                RunOutcome {
                    success: rec.success,
                    generations: rec.generations,
                    evaluations: rec.evaluations,
                    best_true_fitness: cfg.instance.to_real(rec.best_true_fitness),
                }
            })
            .collect()
    })?;
    Ok(flat.chunks(runs).map(<[RunOutcome]>::to_vec).collect())
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<CellSummary>> {
    let per_cell = run_cells(cfg)?;
    Ok(cfg
        .sweep
        .iter()
        .zip(&per_cell)
        .map(|(cell, outcomes)| summarize(cell, outcomes))
        .collect())
}

/// Best true fitness among `samples` uniform random points.
pub fn uniform_sampling_baseline<R: Rng + ?Sized>(
    instance: &ProblemInstance,
    samples: u64,
    rng: &mut R,
) -> Result<Fitness> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let best = (0..samples)
        .map(|_| instance.fitness(&engine::initialize(instance, rng)))
        .max()
        .expect("samples >= 1");
    Ok(best)
}

/// Mean and statistics of [`uniform_sampling_baseline`] over `repetitions`
/// independently seeded repetitions.
pub fn uniform_sampling_statistics(
    instance: &ProblemInstance,
    samples: u64,
    repetitions: usize,
    base_seed: u64,
    threads: Option<usize>,
) -> Result<RunningStats> {
    if repetitions == 0 {
        return Err(Error::invalid("need at least one repetition"));
    }
    let bests: Vec<f64> = in_pool(threads, || {
        (0..repetitions)
            .into_par_iter()
            .map(|r| {
                let mut rng = RandomSource::for_run(base_seed, u64::MAX, r as u64);
                uniform_sampling_baseline(instance, samples, &mut rng)
                    .map(|f| instance.to_real(f))
            })
            .collect::<Result<Vec<f64>>>()
    })??;
    Ok(bests.into_iter().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MedianEstimate {
    pub median: u64,
    /// Set when some run hit the safety cap; the median is then a lower bound
    /// if it equals the cap.
    pub censored: bool,
}

/// Empirical median optimisation time in generations: the smallest `t` with at
/// least half of the runs finished by `t`.
pub fn estimate_median_time<R: Rng + ?Sized>(
    instance: &ProblemInstance,
    algorithm: &AlgorithmConfig,
    runs: usize,
    safety_cap: u64,
    rng: &mut R,
) -> Result<MedianEstimate> {
    if runs == 0 {
        return Err(Error::invalid("need at least one run"));
    }
    let stop = StoppingRule::new(safety_cap)?;
    let seeds: Vec<u64> = (0..runs).map(|_| rng.random()).collect();
    let mut times: Vec<(u64, bool)> = seeds
        .par_iter()
        .map(|&s| {
            let rec = engine::run(instance, algorithm, &stop, &mut RandomSource::new(s));
            (rec.generations, rec.success)
        })
        .collect();
    let censored = times.iter().any(|&(_, ok)| !ok);
    times.sort_unstable();
    let median = times[runs.div_ceil(2) - 1].0;
    Ok(MedianEstimate { median, censored })
}
