//! Simulation and exact analysis of the (1+λ) EA and (1+λ) RLS under prior
//! noise on OneMax, LeadingOnes and Hurdle.
//!
//! * [`engine`] runs the algorithms,
//! * [`oracle`] builds the exact Markov chains for `λ = 1` and small `n`,
//! * [`bounds`] evaluates the closed-form runtime bounds,
//! * [`harness`] runs seeded parameter sweeps and writes CSV summaries.

pub mod bitstring;
pub mod bounds;
pub mod engine;
pub mod error;
pub mod harness;
pub mod mutation;
pub mod noise;
pub mod oracle;
pub mod problem;
pub mod rng;
pub mod sum;


pub use bitstring::BitString;
pub use engine::{AlgorithmConfig, RunRecord, StoppingRule};
pub use error::{Error, Result};
pub use mutation::MutationOperator;
pub use noise::NoiseModel;
pub use problem::{Fitness, ProblemInstance, ProblemKind};
pub use rng::RandomSource;
