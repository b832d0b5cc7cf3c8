//! Exact Markov-chain analysis of the (1+1) EA and RLS under prior noise for
//! small dimensions.
//!
//! States are the `2^n` parent strings, indexed by reading the string as a
//! binary number with `x_1` most significant, so `1^n` is the last state.
//!
//! Two chains are derived from the same ingredients:
//!
//! * the plain parent chain, `P(x -> y) = mut(x, y) * acc(x, y)` for `y != x`,
//!   used for stationary distributions and the monotonicity check;
//! * the sampling-absorbed chain, which stops as soon as an offspring equals
//!   `1^n` (accepted or not). Its hitting times match the simulated
//!   optimisation times measured in generations.

use std::collections::VecDeque;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::bitstring::BitString;
use crate::engine::AlgorithmConfig;
use crate::error::{Error, Result};
use crate::mutation::MutationOperator;
use crate::noise::{noise_kernel, NoiseModel};
use crate::problem::{Fitness, ProblemInstance, ProblemKind};
use crate::sum::CompensatedSum;

pub const MAX_N_ONE_BIT: usize = 8;
pub const MAX_N_BIT_WISE: usize = 6;

fn guard(instance: &ProblemInstance, model: &NoiseModel) -> Result<()> {
    let n = instance.n();
    model.validate_for(n)?;
    let limit = match model {
        NoiseModel::BitWise { .. } => MAX_N_BIT_WISE,
        _ => MAX_N_ONE_BIT,
    };
    if n > limit {
        return Err(Error::CostGuard(format!(
            "exact analysis with {model} is limited to n <= {limit} (n = {n})"
        )));
    }
    Ok(())
}

fn guard_config(instance: &ProblemInstance, cfg: &AlgorithmConfig) -> Result<()> {
    if cfg.lambda() != 1 {
        return Err(Error::invalid(format!(
            "the exact oracle supports lambda = 1 only (lambda = {})",
            cfg.lambda()
        )));
    }
    guard(instance, &cfg.noise())
}

/// Distribution of the noisy fitness of one point: values ascending, with the
/// cumulative probability `P(noisy <= value)`.
#[derive(Debug, Clone)]
struct NoisyFitness {
    values: Vec<Fitness>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl NoisyFitness {
    fn of(x: &BitString, model: &NoiseModel, instance: &ProblemInstance) -> Self {
        let n = x.len();
        let mut outcomes: Vec<(Fitness, f64)> = Vec::new();
        let mut push = |y: &BitString| {
            let w = noise_kernel(x, y, model);
            if w > 0.0 {
                outcomes.push((instance.fitness(y), w));
            }
        };
        match model {
            NoiseModel::BitWise { .. } => {
                for idx in 0..1u64 << n {
                    push(&BitString::from_index(n, idx));
                }
            }
            _ => {
                push(x);
                for i in 0..n {
                    let mut y = x.clone();
                    y.flip(i);
                    push(&y);
                }
            }
        }
        outcomes.sort_by_key(|&(f, _)| f);
        let mut values = Vec::new();
        let mut sums: Vec<CompensatedSum> = Vec::new();
        for (f, w) in outcomes {
            if values.last() != Some(&f) {
                values.push(f);
                sums.push(CompensatedSum::new());
            }
            sums.last_mut().unwrap().add(w);
        }
        let probs: Vec<f64> = sums.iter().map(|s| s.value()).collect();
        let mut acc = CompensatedSum::new();
        let cdf = probs
            .iter()
            .map(|&p| {
                acc.add(p);
                acc.value()
            })
            .collect();
        Self { values, probs, cdf }
    }

    /// `P(noisy <= v)`.
    fn at_most(&self, v: Fitness) -> f64 {
        match self.values.partition_point(|&f| f <= v) {
            0 => 0.0,
            k => self.cdf[k - 1],
        }
    }
}

fn acceptance_from(parent: &NoisyFitness, offspring: &NoisyFitness) -> f64 {
    let mut s = CompensatedSum::new();
    for (&v, &p) in offspring.values.iter().zip(&offspring.probs) {
        s.add(p * parent.at_most(v));
    }
    s.value().min(1.0)
}

/// Exact probability that offspring `y` is accepted against parent `x`:
/// `P(f(noise(y)) >= f(noise(x)))` with independent noise.
pub fn acceptance_probability(
    x: &BitString,
    y: &BitString,
    model: &NoiseModel,
    instance: &ProblemInstance,
) -> Result<f64> {
    x.check_len(instance.n())?;
    y.check_len(instance.n())?;
    if let NoiseModel::BitWise { .. } = model {
        guard(instance, model)?;
    }
    let px = NoisyFitness::of(x, model, instance);
    let py = NoisyFitness::of(y, model, instance);
    Ok(acceptance_from(&px, &py))
}

/// Per-state ingredients shared by both chains.
struct ChainParts {
    n: usize,
    size: usize,
    mutation: MutationOperator,
    noisy: Vec<NoisyFitness>,
}

impl ChainParts {
    fn new(instance: &ProblemInstance, cfg: &AlgorithmConfig) -> Result<Self> {
        guard_config(instance, cfg)?;
        let n = instance.n();
        let size = 1usize << n;
        let model = cfg.noise();
        let noisy = (0..size)
            .into_par_iter()
            .map(|i| NoisyFitness::of(&BitString::from_index(n, i as u64), &model, instance))
            .collect();
        Ok(Self {
            n,
            size,
            mutation: cfg.mutation(),
            noisy,
        })
    }

    fn mutation_prob(&self, x: usize, y: usize) -> f64 {
        self.mutation
            .kernel_by_distance(self.n, (x ^ y).count_ones() as usize)
    }

    fn acceptance(&self, x: usize, y: usize) -> f64 {
        acceptance_from(&self.noisy[x], &self.noisy[y])
    }

    /// Row `x` of the parent chain. When `absorb_at` is set, offspring equal
    /// to that state are removed from the row (they end the process).
    fn row(&self, x: usize, absorb_at: Option<usize>) -> Vec<f64> {
        let mut row = vec![0.0; self.size];
        let mut stay = CompensatedSum::new();
        stay.add(self.mutation_prob(x, x));
        for (y, slot) in row.iter_mut().enumerate() {
            if y == x {
                continue;
            }
            let m = self.mutation_prob(x, y);
            if m == 0.0 || Some(y) == absorb_at {
                continue;
            }
            let a = self.acceptance(x, y);
            *slot = m * a;
            stay.add(m * (1.0 - a));
        }
        row[x] = stay.value();
        row
    }
}

/// Dense row-stochastic matrix of the parent chain.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    n: usize,
    size: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.entries[from * self.size + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.entries[from * self.size..(from + 1) * self.size]
    }

    /// Largest deviation of a row sum from 1.
    pub fn max_row_defect(&self) -> f64 {
        (0..self.size)
            .map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Writes `state_from,state_to,prob` lines for all non-zero entries.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "state_from,state_to,prob")?;
        for i in 0..self.size {
            for (j, &p) in self.row(i).iter().enumerate() {
                if p != 0.0 {
                    writeln!(out, "{i},{j},{p:e}")?;
                }
            }
        }
        Ok(())
    }

    fn as_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.size, self.size, &self.entries)
    }
}

pub fn build_transition_matrix(
    instance: &ProblemInstance,
    cfg: &AlgorithmConfig,
) -> Result<TransitionMatrix> {
    let parts = ChainParts::new(instance, cfg)?;
    let rows: Vec<Vec<f64>> = (0..parts.size)
        .into_par_iter()
        .map(|x| parts.row(x, None))
        .collect();
    Ok(TransitionMatrix {
        n: parts.n,
        size: parts.size,
        entries: rows.concat(),
    })
}

#[derive(Debug, Clone)]
pub struct HittingTimeResult {
    /// Expected generations until `1^n` is first sampled; infinite where the
    /// optimum is not reached almost surely.
    pub expected_time_by_state: Vec<f64>,
    pub expected_time_uniform_start: f64,
    pub worst_case_state: usize,
    pub reachable: Vec<bool>,
    /// `max |((I - P') t - 1)_x|` over the finite states.
    pub residual: f64,
}

impl HittingTimeResult {
    pub fn worst_case_time(&self) -> f64 {
        self.expected_time_by_state[self.worst_case_state]
    }
}

/// The sampling-absorbed chain restricted to non-optimal states.
#[derive(Debug, Clone)]
pub struct AbsorbedChain {
    n: usize,
    /// Number of transient states (`2^n - 1`).
    size: usize,
    /// `P'` over transient states, row-major.
    entries: Vec<f64>,
    /// Probability of sampling `1^n` in one generation.
    absorb: Vec<f64>,
}

impl AbsorbedChain {
    pub fn new(instance: &ProblemInstance, cfg: &AlgorithmConfig) -> Result<Self> {
        let parts = ChainParts::new(instance, cfg)?;
        let opt = parts.size - 1;
        let rows: Vec<(Vec<f64>, f64)> = (0..opt)
            .into_par_iter()
            .map(|x| {
                let mut row = parts.row(x, Some(opt));
                row.truncate(opt);
                (row, parts.mutation_prob(x, opt))
            })
            .collect();
        let (rows, absorb): (Vec<Vec<f64>>, Vec<f64>) = rows.into_iter().unzip();
        Ok(Self {
            n: parts.n,
            size: opt,
            entries: rows.concat(),
            absorb,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn get(&self, from: usize, to: usize) -> f64 {
        self.entries[from * self.size + to]
    }

    /// Transient states from which absorption happens almost surely.
    pub fn almost_surely_absorbed(&self) -> Vec<bool> {
        let m = self.size;
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); m];
        for x in 0..m {
            for (y, pred) in preds.iter_mut().enumerate() {
                if y != x && self.get(x, y) > 0.0 {
                    pred.push(x);
                }
            }
        }
        let backward = |seeds: Vec<usize>| {
            let mut seen = vec![false; m];
            let mut queue: VecDeque<usize> = VecDeque::new();
            for s in seeds {
                if !seen[s] {
                    seen[s] = true;
                    queue.push_back(s);
                }
            }
            while let Some(y) = queue.pop_front() {
                for &x in &preds[y] {
                    if !seen[x] {
                        seen[x] = true;
                        queue.push_back(x);
                    }
                }
            }
            seen
        };
        let can_absorb = backward((0..m).filter(|&x| self.absorb[x] > 0.0).collect());
        let trapped: Vec<usize> = (0..m).filter(|&x| !can_absorb[x]).collect();
        let doomed = backward(trapped);
        doomed.into_iter().map(|d| !d).collect()
    }

    pub fn expected_times(&self) -> Result<HittingTimeResult> {
        let m = self.size;
        let full = m + 1;
        let finite = self.almost_surely_absorbed();
        let idx: Vec<usize> = (0..m).filter(|&x| finite[x]).collect();
        let k = idx.len();

        let mut times = vec![f64::INFINITY; full];
        times[m] = 0.0;
        let mut residual = 0.0;
        if k > 0 {
            let a = DMatrix::from_fn(k, k, |r, c| {
                let diag = if r == c { 1.0 } else { 0.0 };
                diag - self.get(idx[r], idx[c])
            });
            let b = DVector::from_element(k, 1.0);
            let t = a
                .clone()
                .lu()
                .solve(&b)
                .ok_or_else(|| Error::Numerical("hitting-time system is singular".into()))?;
            residual = (&a * &t - &b).amax();
            if residual > 1e-8 || t.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numerical(format!(
                    "hitting-time solve residual {residual:e}"
                )));
            }
            for (r, &x) in idx.iter().enumerate() {
                times[x] = t[r];
            }
        }
        let uniform = times.iter().sum::<f64>() / full as f64;
        let worst = (0..full)
            .max_by(|&a, &b| times[a].total_cmp(&times[b]))
            .expect("non-empty");
        let mut reachable = finite;
        reachable.push(true);
        Ok(HittingTimeResult {
            expected_time_by_state: times,
            expected_time_uniform_start: uniform,
            worst_case_state: worst,
            reachable,
            residual,
        })
    }

    /// Smallest `t` with `P(T <= t) >= 1/2` for a start distribution over all
    /// `2^n` states. `None` if not reached within `max_steps`.
    pub fn median_time_from(&self, start: &[f64], max_steps: u64) -> Option<u64> {
        assert_eq!(start.len(), self.size + 1);
        let mut done = start[self.size];
        if done >= 0.5 - 1e-12 {
            return Some(0);
        }
        let mut dist = start[..self.size].to_vec();
        let mut next = vec![0.0; self.size];
        for t in 1..=max_steps {
            let mut hit = CompensatedSum::new();
            next.iter_mut().for_each(|v| *v = 0.0);
            for (x, &px) in dist.iter().enumerate() {
                if px == 0.0 {
                    continue;
                }
                hit.add(px * self.absorb[x]);
                let row = &self.entries[x * self.size..(x + 1) * self.size];
                for (nv, &r) in next.iter_mut().zip(row) {
                    *nv += px * r;
                }
            }
            done += hit.value();
            if done >= 0.5 - 1e-12 {
                return Some(t);
            }
            std::mem::swap(&mut dist, &mut next);
        }
        None
    }

    pub fn median_time_from_state(&self, state: usize, max_steps: u64) -> Option<u64> {
        let mut start = vec![0.0; self.size + 1];
        start[state] = 1.0;
        self.median_time_from(&start, max_steps)
    }

    /// Worst-case median optimisation time over all start states.
    pub fn worst_case_median(&self, max_steps: u64) -> Option<u64> {
        (0..=self.size)
            .into_par_iter()
            .map(|s| self.median_time_from_state(s, max_steps))
            .collect::<Option<Vec<u64>>>()
            .map(|v| v.into_iter().max().unwrap_or(0))
    }

    pub fn uniform_start_median(&self, max_steps: u64) -> Option<u64> {
        let full = self.size + 1;
        self.median_time_from(&vec![1.0 / full as f64; full], max_steps)
    }
}

pub fn expected_optimisation_time(
    instance: &ProblemInstance,
    cfg: &AlgorithmConfig,
) -> Result<HittingTimeResult> {
    AbsorbedChain::new(instance, cfg)?.expected_times()
}

/// Stationary distribution of the plain parent chain, for noisy settings.
pub fn stationary_distribution(
    matrix: &TransitionMatrix,
    noise: &NoiseModel,
) -> Result<Vec<f64>> {
    if noise.is_noise_free() {
        return Err(Error::NotErgodic(
            "the noise-free chain is absorbing; a noisy model is required".into(),
        ));
    }
    let size = matrix.size;
    // Solve pi (P - I) = 0 with the last equation replaced by sum(pi) = 1.
    let p = matrix.as_dmatrix();
    let mut a = p.transpose() - DMatrix::<f64>::identity(size, size);
    for c in 0..size {
        a[(size - 1, c)] = 1.0;
    }
    let mut b = DVector::zeros(size);
    b[size - 1] = 1.0;
    let mut pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::NotErgodic("stationary system is singular".into()))?;
    // polish with a few power steps
    for _ in 0..8 {
        let next = (pi.transpose() * &p).transpose();
        let total = next.sum();
        pi = next / total;
    }
    let pi: Vec<f64> = pi.iter().copied().collect();
    let defect = stationary_defect(matrix, &pi);
    if defect > 1e-10 || pi.iter().any(|&v| v < -1e-12) {
        return Err(Error::Numerical(format!(
            "stationary solve defect {defect:e}"
        )));
    }
    Ok(pi)
}

/// `||pi P - pi||_1`.
pub fn stationary_defect(matrix: &TransitionMatrix, pi: &[f64]) -> f64 {
    let size = matrix.size;
    (0..size)
        .map(|j| {
            let s: CompensatedSum = (0..size).map(|i| pi[i] * matrix.get(i, j)).collect();
            (s.value() - pi[j]).abs()
        })
        .sum()
}

/// Pairs `(x, y)` with `LO(x) < LO(y)` but `P(x -> y) < P(y -> x) - 1e-10`.
pub fn check_monotonicity(
    matrix: &TransitionMatrix,
    instance: &ProblemInstance,
) -> Result<Vec<(usize, usize)>> {
    if instance.kind() != ProblemKind::LeadingOnes {
        return Err(Error::invalid(
            "the monotonicity check applies to LeadingOnes only",
        ));
    }
    let n = matrix.n;
    let lo: Vec<usize> = (0..matrix.size)
        .map(|i| BitString::from_index(n, i as u64).leading_ones())
        .collect();
    let mut violations = Vec::new();
    for x in 0..matrix.size {
        for y in 0..matrix.size {
            if lo[x] < lo[y] && matrix.get(x, y) < matrix.get(y, x) - 1e-10 {
                violations.push((x, y));
            }
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lo(n: usize) -> ProblemInstance {
        ProblemInstance::leading_ones(n).unwrap()
    }

    /// Brute force over all pairs of noisy points, independent of the
    /// fitness-distribution path.
    fn acceptance_brute(x: &BitString, y: &BitString, m: &NoiseModel, inst: &ProblemInstance) -> f64 {
        let n = x.len();
        let mut s = 0.0;
        for a in 0..1u64 << n {
            let xa = BitString::from_index(n, a);
            let wa = noise_kernel(x, &xa, m);
            if wa == 0.0 {
                continue;
            }
            for b in 0..1u64 << n {
                let yb = BitString::from_index(n, b);
                let wb = noise_kernel(y, &yb, m);
                if wb > 0.0 && inst.fitness(&yb) >= inst.fitness(&xa) {
                    s += wa * wb;
                }
            }
        }
        s
    }

    #[test]
    fn acceptance_noise_free_is_an_indicator() {
        let inst = lo(3);
        let x: BitString = "110".parse().unwrap();
        let better: BitString = "111".parse().unwrap();
        let worse: BitString = "100".parse().unwrap();
        for m in [NoiseModel::NoNoise, NoiseModel::one_bit(0.0).unwrap()] {
            assert_eq!(acceptance_probability(&x, &better, &m, &inst).unwrap(), 1.0);
            assert_eq!(acceptance_probability(&x, &worse, &m, &inst).unwrap(), 0.0);
        }
    }

    #[test]
    fn acceptance_matches_brute_force() {
        let inst = lo(3);
        let x: BitString = "110".parse().unwrap();
        let y: BitString = "100".parse().unwrap();
        let m = NoiseModel::one_bit(0.5).unwrap();
        let fast = acceptance_probability(&x, &y, &m, &inst).unwrap();
        // parent noisy LO: 2 w.p. 1/2, and 0, 1, 3 w.p. 1/6 each
        // offspring noisy LO: 1 w.p. 2/3, and 0, 2 w.p. 1/6 each
        let hand = (1.0 / 6.0) * 1.0 + (1.0 / 6.0) * (5.0 / 6.0) + 0.5 * (1.0 / 6.0);
        assert!((fast - hand).abs() < 1e-15, "{fast} vs {hand}");
        assert!((fast - acceptance_brute(&x, &y, &m, &inst)).abs() < 1e-15);

        let models = [
            NoiseModel::one_bit(0.3).unwrap(),
            NoiseModel::asymmetric_one_bit(0.45).unwrap(),
            NoiseModel::bit_wise(0.6, 1.7, 4).unwrap(),
            NoiseModel::bit_wise(1.0, 2.0, 4).unwrap(),
        ];
        for inst in [lo(4), ProblemInstance::hurdle(4, 2).unwrap(), ProblemInstance::onemax(4).unwrap()] {
            for m in &models {
                for a in 0..16 {
                    for b in 0..16 {
                        let x = BitString::from_index(4, a);
                        let y = BitString::from_index(4, b);
                        let fast = acceptance_probability(&x, &y, m, &inst).unwrap();
                        let slow = acceptance_brute(&x, &y, m, &inst);
                        assert!((fast - slow).abs() < 1e-13, "{inst} {m} {x} {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn cost_guards() {
        let cfg = AlgorithmConfig::ea(1, NoiseModel::bit_wise(1.0, 1.0, 7).unwrap()).unwrap();
        assert!(matches!(build_transition_matrix(&lo(7), &cfg), Err(Error::CostGuard(_))));
        let x = BitString::zeros(7);
        assert!(acceptance_probability(&x, &x, &cfg.noise(), &lo(7)).is_err());
        let cfg = AlgorithmConfig::ea(1, NoiseModel::one_bit(0.1).unwrap()).unwrap();
        assert!(matches!(build_transition_matrix(&lo(9), &cfg), Err(Error::CostGuard(_))));
        let cfg = AlgorithmConfig::ea(2, NoiseModel::NoNoise).unwrap();
        assert!(build_transition_matrix(&lo(3), &cfg).is_err());
    }

    fn configs() -> Vec<AlgorithmConfig> {
        let mut v = Vec::new();
        for noise in [
            NoiseModel::NoNoise,
            NoiseModel::one_bit(0.2).unwrap(),
            NoiseModel::asymmetric_one_bit(0.5).unwrap(),
            NoiseModel::bit_wise(1.0, 1.0, 3).unwrap(),
        ] {
            v.push(AlgorithmConfig::ea(1, noise).unwrap());
            v.push(AlgorithmConfig::rls(1, noise).unwrap());
        }
        v
    }

    #[test]
    fn rows_are_stochastic() {
        for n in 3..=6 {
            for inst in [lo(n), ProblemInstance::hurdle(n, 2).unwrap(), ProblemInstance::onemax(n).unwrap()] {
                for cfg in configs() {
                    let m = build_transition_matrix(&inst, &cfg).unwrap();
                    assert!(m.max_row_defect() < 1e-10, "{inst} {cfg:?}");
                    assert!(m.entries.iter().all(|&p| (0.0..=1.0 + 1e-12).contains(&p)));
                }
            }
        }
    }

    #[test]
    fn noise_free_leadingones_never_moves_down() {
        let inst = lo(5);
        let m = build_transition_matrix(&inst, &AlgorithmConfig::ea(1, NoiseModel::NoNoise).unwrap()).unwrap();
        for x in 0..32 {
            for y in 0..32 {
                let fx = BitString::from_index(5, x as u64).leading_ones();
                let fy = BitString::from_index(5, y as u64).leading_ones();
                if fy < fx {
                    assert_eq!(m.get(x, y), 0.0);
                }
            }
        }
    }

    #[test]
    fn single_bit_chain() {
        let cfg = AlgorithmConfig::ea(1, NoiseModel::NoNoise).unwrap();
        let r = expected_optimisation_time(&lo(1), &cfg).unwrap();
        assert_eq!(r.expected_time_by_state, vec![1.0, 0.0]);
        assert_eq!(r.expected_time_uniform_start, 0.5);
    }

    #[test]
    fn rls_trapped_on_hurdle_without_noise() {
        let inst = ProblemInstance::hurdle(4, 2).unwrap();
        let cfg = AlgorithmConfig::rls(1, NoiseModel::NoNoise).unwrap();
        let r = expected_optimisation_time(&inst, &cfg).unwrap();
        let trap = BitString::from_index(4, 0b1100);
        assert!(r.expected_time_by_state[trap.to_index() as usize].is_infinite());
        assert!(!r.reachable[trap.to_index() as usize]);
        // with one zero, moving to two zeros is also accepted, so only the
        // optimum itself is safe
        assert_eq!(r.reachable.iter().filter(|&&b| b).count(), 1);
        assert_eq!(r.expected_time_by_state[15], 0.0);
        assert!(r.expected_time_uniform_start.is_infinite());
        // noise makes every state finite
        let noisy = AlgorithmConfig::rls(1, NoiseModel::one_bit(0.1).unwrap()).unwrap();
        let r = expected_optimisation_time(&inst, &noisy).unwrap();
        assert!(r.reachable.iter().all(|&b| b));
        assert!(r.expected_time_uniform_start.is_finite());
    }

    #[test]
    fn rls_noise_free_leadingones_closed_form() {
        // 1110 -> done w.p. 1/4; 1100 and 1101 swap on the last bit and
        // advance on bit 3: a = 4 + b/2, b = 2 + a/2.
        let cfg = AlgorithmConfig::rls(1, NoiseModel::NoNoise).unwrap();
        let r = expected_optimisation_time(&lo(4), &cfg).unwrap();
        let t = &r.expected_time_by_state;
        assert!((t[0b1110] - 4.0).abs() < 1e-9);
        assert!((t[0b1100] - 20.0 / 3.0).abs() < 1e-9);
        assert!((t[0b1101] - 16.0 / 3.0).abs() < 1e-9);
        assert!(r.residual < 1e-8);
    }

    #[test]
    fn stationary_properties() {
        for n in 3..=5 {
            for p in [0.1, 0.5] {
                let inst = lo(n);
                let cfg = AlgorithmConfig::ea(1, NoiseModel::one_bit(p).unwrap()).unwrap();
                let m = build_transition_matrix(&inst, &cfg).unwrap();
                let pi = stationary_distribution(&m, &cfg.noise()).unwrap();
                assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                assert!(stationary_defect(&m, &pi) < 1e-10);
            }
        }
        let m = build_transition_matrix(&lo(3), &AlgorithmConfig::ea(1, NoiseModel::NoNoise).unwrap()).unwrap();
        assert!(matches!(
            stationary_distribution(&m, &NoiseModel::NoNoise),
            Err(Error::NotErgodic(_))
        ));
    }

    #[test]
    fn monotonicity_only_for_leadingones() {
        let inst = ProblemInstance::onemax(3).unwrap();
        let m = build_transition_matrix(&inst, &AlgorithmConfig::ea(1, NoiseModel::NoNoise).unwrap()).unwrap();
        assert!(check_monotonicity(&m, &inst).is_err());
    }

    #[test]
    fn csv_dump_lists_nonzero_entries() {
        let m = build_transition_matrix(&lo(2), &AlgorithmConfig::rls(1, NoiseModel::NoNoise).unwrap()).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("state_from,state_to,prob"));
        // state 3 = "11" is absorbing without noise
        assert!(text.contains("\n3,3,1e0\n"));
        for line in lines {
            let parts: Vec<&str> = line.split(',').collect();
            assert_eq!(parts.len(), 3);
            assert!(parts[2].parse::<f64>().unwrap() > 0.0);
        }
    }
}
