//! Benchmark fixtures shared by the criterion targets.

use noisy_ea::{AlgorithmConfig, NoiseModel, ProblemInstance};

/// LeadingOnes with n = 100 under one-bit noise, the setting of the main sweeps.
pub fn leading_ones_100(lambda: usize, p: f64) -> (ProblemInstance, AlgorithmConfig) {
    let inst = ProblemInstance::leading_ones(100).expect("valid size");
    let cfg = AlgorithmConfig::ea(lambda, NoiseModel::one_bit(p).expect("valid p")).expect("valid lambda");
    (inst, cfg)
}
