//! Benchmark functions: OneMax, LeadingOnes and Hurdle.

use std::fmt;

use crate::bitstring::BitString;
use crate::error::{Error, Result};

/// Fitness on an instance-specific exact scale.
///
/// OneMax and LeadingOnes values are stored as-is. Hurdle values are scaled
/// by the hurdle width `w`, so `Fitness(-5)` under `w = 4` means `-5/4`.
/// Comparisons never involve floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fitness(pub i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    OneMax,
    LeadingOnes,
    Hurdle { width: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemInstance {
    kind: ProblemKind,
    n: usize,
}

pub fn eval_onemax(x: &BitString) -> usize {
    x.count_ones()
}

pub fn eval_leadingones(x: &BitString) -> usize {
    x.leading_ones()
}

/// `-ceil(z/w) - (z mod w)/w` scaled by `w`, where `z` counts the 0-bits.
pub fn eval_hurdle(x: &BitString, width: usize) -> Fitness {
    Fitness(hurdle_scaled(x.count_zeros(), width))
}

#[inline]
fn hurdle_scaled(zeros: usize, width: usize) -> i64 {
    let z = zeros as i64;
    let w = width as i64;
    let ceil = (z + w - 1) / w;
    -(ceil * w + z % w)
}

impl ProblemInstance {
    pub fn onemax(n: usize) -> Result<Self> {
        Self::new(ProblemKind::OneMax, n)
    }

    pub fn leading_ones(n: usize) -> Result<Self> {
        Self::new(ProblemKind::LeadingOnes, n)
    }

    pub fn hurdle(n: usize, width: usize) -> Result<Self> {
        Self::new(ProblemKind::Hurdle { width }, n)
    }

    pub fn new(kind: ProblemKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension n must be positive"));
        }
        if let ProblemKind::Hurdle { width } = kind {
            if width < 2 || width > n {
                return Err(Error::invalid(format!(
                    "hurdle width must satisfy 2 <= w <= n (w = {width}, n = {n})"
                )));
            }
        }
        Ok(Self { kind, n })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Denominator of the exact fitness scale.
    pub fn denominator(&self) -> i64 {
        match self.kind {
            ProblemKind::Hurdle { width } => width as i64,
            _ => 1,
        }
    }

    pub fn to_real(&self, f: Fitness) -> f64 {
        f.0 as f64 / self.denominator() as f64
    }

    /// Fitness of `x`; the caller guarantees `x.len() == n`.
    #[inline]
    pub fn fitness(&self, x: &BitString) -> Fitness {
        debug_assert_eq!(x.len(), self.n);
        match self.kind {
            ProblemKind::OneMax => Fitness(x.count_ones() as i64),
            ProblemKind::LeadingOnes => Fitness(x.leading_ones() as i64),
            ProblemKind::Hurdle { width } => eval_hurdle(x, width),
        }
    }

    pub fn eval(&self, x: &BitString) -> Result<Fitness> {
        x.check_len(self.n)?;
        Ok(self.fitness(x))
    }

    pub fn optimum_fitness(&self) -> Fitness {
        match self.kind {
            ProblemKind::OneMax | ProblemKind::LeadingOnes => Fitness(self.n as i64),
            ProblemKind::Hurdle { .. } => Fitness(0),
        }
    }

    /// All three functions have the unique optimum `1^n`.
    #[inline]
    pub fn is_optimum(&self, x: &BitString) -> bool {
        x.is_all_ones()
    }
}

impl fmt::Display for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ProblemKind::OneMax => write!(f, "OneMax(n={})", self.n),
            ProblemKind::LeadingOnes => write!(f, "LeadingOnes(n={})", self.n),
            ProblemKind::Hurdle { width } => write!(f, "Hurdle(n={}, w={width})", self.n),
        }
    }
}
