//! Mutation operators and their exact kernels.

use rand::Rng;

use crate::bitstring::BitString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationOperator {
    /// Flip every bit independently with probability `1/n`.
    StandardBit,
    /// Flip exactly one uniformly chosen bit.
    OneBitFlip,
}

/// Flips every bit of `x` independently with probability `rate`.
pub fn flip_each_with_prob<R: Rng + ?Sized>(x: &mut BitString, rate: f64, rng: &mut R) {
    BitFlipper::new(x.len(), rate).apply(x, rng)
}

/// Independent per-bit flips at a fixed rate for strings of one length.
///
/// Positions are visited by geometric jumps, so the cost is proportional to
/// the number of flipped bits rather than the length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitFlipper {
    len: usize,
    rate: f64,
    log_keep: f64,
    /// `(1 - rate)^len`, the chance that nothing flips.
    keep_all: f64,
}

impl BitFlipper {
    pub fn new(len: usize, rate: f64) -> Self {
        let log_keep = (-rate.clamp(0.0, 1.0)).ln_1p();
        Self {
            len,
            rate,
            log_keep,
            keep_all: (len as f64 * log_keep).exp(),
        }
    }

    #[inline]
    pub fn apply<R: Rng + ?Sized>(&self, x: &mut BitString, rng: &mut R) {
        debug_assert_eq!(x.len(), self.len);
        let n = self.len;
        if self.rate <= 0.0 {
            return;
        }
        if self.rate >= 1.0 {
            for i in 0..n {
                x.flip(i);
            }
            return;
        }
        // 1 - U lies in (0, 1], so the logarithm is finite.
        let mut u: f64 = 1.0 - rng.random::<f64>();
        if u <= self.keep_all {
            return;
        }
        let mut pos = 0usize;
        loop {
            let skip = (u.ln() / self.log_keep).floor();
            if skip >= (n - pos) as f64 {
                return;
            }
            pos += skip as usize;
            x.flip(pos);
            pos += 1;
            if pos >= n {
                return;
            }
            u = 1.0 - rng.random::<f64>();
        }
    }
}

/// A mutation operator bound to a string length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PreparedMutation {
    StandardBit(BitFlipper),
    OneBitFlip(usize),
}

impl PreparedMutation {
    #[inline]
    pub fn apply<R: Rng + ?Sized>(&self, x: &mut BitString, rng: &mut R) {
        match self {
            PreparedMutation::StandardBit(f) => f.apply(x, rng),
            PreparedMutation::OneBitFlip(n) => x.flip(rng.random_range(0..*n)),
        }
    }
}

impl MutationOperator {
    /// In-place mutation.
    #[inline]
    pub fn apply<R: Rng + ?Sized>(&self, x: &mut BitString, rng: &mut R) {
        self.prepare(x.len()).apply(x, rng)
    }

    pub fn prepare(&self, n: usize) -> PreparedMutation {
        match self {
            MutationOperator::StandardBit => PreparedMutation::StandardBit(BitFlipper::new(n, 1.0 / n as f64)),
            MutationOperator::OneBitFlip => PreparedMutation::OneBitFlip(n),
        }
    }

    /// Probability that mutating a string of length `n` yields a string at
    /// Hamming distance `d`.
    pub fn kernel_by_distance(&self, n: usize, d: usize) -> f64 {
        match self {
            MutationOperator::StandardBit => {
                let r = 1.0 / n as f64;
                r.powi(d as i32) * (1.0 - r).powi((n - d) as i32)
            }
            MutationOperator::OneBitFlip => {
                if d == 1 {
                    1.0 / n as f64
                } else {
                    0.0
                }
            }
        }
    }
}

/// Returns a mutated copy; `x` is left unchanged.
pub fn mutate<R: Rng + ?Sized>(x: &BitString, op: MutationOperator, rng: &mut R) -> BitString {
    let mut y = x.clone();
    op.apply(&mut y, rng);
    y
}

/// Exact probability that `mutate(x, op)` returns `y`.
pub fn mutation_kernel(x: &BitString, y: &BitString, op: MutationOperator) -> f64 {
    op.kernel_by_distance(x.len(), x.hamming_distance(y))
}
