//! The (1+λ) EA and (1+λ) RLS under prior noise.
//!
//! One generation creates λ offspring by mutating the parent, evaluates each
//! offspring on a freshly perturbed copy, picks a uniformly random maximiser of
//! the noisy values, re-evaluates the parent with fresh noise, and replaces the
//! parent when the chosen offspring's noisy value is at least the parent's.
//!
//! A run succeeds as soon as an offspring *is* the optimum, whether or not it
//! is accepted. The initial point costs one evaluation and every generation
//! costs λ + 1 (λ offspring plus the parent re-evaluation).

use rand::Rng;

use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::mutation::{MutationOperator, PreparedMutation};
use crate::noise::NoiseModel;
use crate::problem::{Fitness, ProblemInstance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmConfig {
    lambda: usize,
    mutation: MutationOperator,
    noise: NoiseModel,
}

impl AlgorithmConfig {
    pub fn new(lambda: usize, mutation: MutationOperator, noise: NoiseModel) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::invalid("offspring population size must be at least 1"));
        }
        Ok(Self {
            lambda,
            mutation,
            noise,
        })
    }

    /// (1+λ) EA with standard bit mutation.
    pub fn ea(lambda: usize, noise: NoiseModel) -> Result<Self> {
        Self::new(lambda, MutationOperator::StandardBit, noise)
    }

    /// (1+λ) RLS, flipping exactly one bit per offspring.
    pub fn rls(lambda: usize, noise: NoiseModel) -> Result<Self> {
        Self::new(lambda, MutationOperator::OneBitFlip, noise)
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn mutation(&self) -> MutationOperator {
        self.mutation
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    pub fn with_noise(self, noise: NoiseModel) -> Self {
        Self { noise, ..self }
    }

    pub fn with_lambda(self, lambda: usize) -> Result<Self> {
        Self::new(lambda, self.mutation, self.noise)
    }

    pub fn evaluations_per_generation(&self) -> u64 {
        self.lambda as u64 + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingRule {
    max_generations: u64,
}

impl StoppingRule {
    pub fn new(max_generations: u64) -> Result<Self> {
        if max_generations == 0 {
            return Err(Error::invalid("generation cap must be at least 1"));
        }
        Ok(Self { max_generations })
    }

    pub fn max_generations(&self) -> u64 {
        self.max_generations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub success: bool,
    /// Generation in which the optimum was first sampled, or the cap.
    pub generations: u64,
    pub evaluations: u64,
    pub best_true_fitness: Fitness,
    pub final_parent: BitString,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub sampled_optimum: bool,
    pub accepted: bool,
    /// Best noise-free fitness among this generation's offspring.
    pub best_offspring_true_fitness: Fitness,
}

/// Uniform initial search point.
pub fn initialize<R: Rng + ?Sized>(instance: &ProblemInstance, rng: &mut R) -> BitString {
    BitString::random(instance.n(), rng)
}

/// Runs one generation, replacing `parent` in place when the offspring wins.
pub fn step_in_place<R: Rng + ?Sized>(
    parent: &mut BitString,
    cfg: &AlgorithmConfig,
    instance: &ProblemInstance,
    rng: &mut R,
) -> StepOutcome {
    let mutation = cfg.mutation.prepare(parent.len());
    step_prepared(parent, cfg, &mutation, instance, rng)
}

#[inline]
fn step_prepared<R: Rng + ?Sized>(
    parent: &mut BitString,
    cfg: &AlgorithmConfig,
    mutation: &PreparedMutation,
    instance: &ProblemInstance,
    rng: &mut R,
) -> StepOutcome {
    let noise = &cfg.noise;
    let mut sampled_optimum = false;
    let mut best_true = Fitness(i64::MIN);
    let mut chosen: Option<(BitString, Fitness)> = None;
    let mut ties = 0u32;
    let mut child = parent.clone();

    for _ in 0..cfg.lambda {
        child.clone_from(parent);
        mutation.apply(&mut child, rng);
        let true_fitness = instance.fitness(&child);
        if instance.is_optimum(&child) {
            sampled_optimum = true;
        }
        best_true = best_true.max(true_fitness);
        let noisy = match noise {
            NoiseModel::NoNoise => true_fitness,
            _ => noise.noisy_fitness(instance, &child, rng),
        };
        match &mut chosen {
            None => {
                chosen = Some((child.clone(), noisy));
                ties = 1;
            }
            Some((best, best_noisy)) => {
                if noisy > *best_noisy {
                    best.clone_from(&child);
                    *best_noisy = noisy;
                    ties = 1;
                } else if noisy == *best_noisy {
                    // reservoir sampling keeps a uniform maximiser
                    ties += 1;
                    if rng.random_range(0..ties) == 0 {
                        best.clone_from(&child);
                    }
                }
            }
        }
    }

    let (offspring, offspring_noisy) = chosen.expect("lambda >= 1");
    let parent_noisy = noise.noisy_fitness(instance, parent, rng);
    let accepted = offspring_noisy >= parent_noisy;
    if accepted {
        *parent = offspring;
    }
    StepOutcome {
        sampled_optimum,
        accepted,
        best_offspring_true_fitness: best_true,
    }
}

/// Functional form of one generation: returns the new parent, whether the
/// optimum was sampled, and the best true offspring fitness.
pub fn generation_step<R: Rng + ?Sized>(
    parent: &BitString,
    cfg: &AlgorithmConfig,
    instance: &ProblemInstance,
    rng: &mut R,
) -> (BitString, bool, Fitness) {
    let mut next = parent.clone();
    let out = step_in_place(&mut next, cfg, instance, rng);
    (next, out.sampled_optimum, out.best_offspring_true_fitness)
}

pub fn run<R: Rng + ?Sized>(
    instance: &ProblemInstance,
    cfg: &AlgorithmConfig,
    stop: &StoppingRule,
    rng: &mut R,
) -> RunRecord {
    run_observed(instance, cfg, stop, rng, |_, _| {})
}

/// Like [`run`], calling `observe(generation, parent)` after every generation.
pub fn run_observed<R, F>(
    instance: &ProblemInstance,
    cfg: &AlgorithmConfig,
    stop: &StoppingRule,
    rng: &mut R,
    mut observe: F,
) -> RunRecord
where
    R: Rng + ?Sized,
    F: FnMut(u64, &BitString),
{
    let mut parent = initialize(instance, rng);
    let mut best = instance.fitness(&parent);
    let per_gen = cfg.evaluations_per_generation();
    let mutation = cfg.mutation.prepare(instance.n());
    if instance.is_optimum(&parent) {
        return RunRecord {
            success: true,
            generations: 0,
            evaluations: 1,
            best_true_fitness: best,
            final_parent: parent,
        };
    }
    for gen in 1..=stop.max_generations {
        let out = step_prepared(&mut parent, cfg, &mutation, instance, rng);
        best = best.max(out.best_offspring_true_fitness);
        observe(gen, &parent);
        if out.sampled_optimum {
            return RunRecord {
                success: true,
                generations: gen,
                evaluations: 1 + per_gen * gen,
                best_true_fitness: best,
                final_parent: parent,
            };
        }
    }
    RunRecord {
        success: false,
        generations: stop.max_generations,
        evaluations: 1 + per_gen * stop.max_generations,
        best_true_fitness: best,
        final_parent: parent,
    }
}
