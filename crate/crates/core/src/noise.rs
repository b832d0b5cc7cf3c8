//! Prior noise models.
//!
//! Each model perturbs a search point before it is evaluated. With
//! probability `1 - p` the point is left alone; otherwise:
//!
//! * one-bit: one uniformly chosen bit is flipped,
//! * bit-wise `(p, q/n)`: every bit is flipped independently with probability `q/n`,
//! * asymmetric one-bit: a uniform 0-bit or a uniform 1-bit is flipped, each
//!   class with probability 1/2; at `0^n` and `1^n` a uniform bit is flipped.
//!
//! Every application draws fresh randomness.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::error::{Error, Result};
use crate::mutation::flip_each_with_prob;
use crate::problem::{Fitness, ProblemInstance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NoiseSpec", into = "NoiseSpec")]
pub enum NoiseModel {
    NoNoise,
    OneBit { p: f64 },
    /// Trigger probability `p` (often written `p'`), per-bit rate `q/n`.
    BitWise { p: f64, q: f64 },
    AsymmetricOneBit { p: f64 },
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("noise probability {p} is outside [0, 1]")))
    }
}

impl NoiseModel {
    pub fn one_bit(p: f64) -> Result<Self> {
        check_prob(p)?;
        Ok(NoiseModel::OneBit { p })
    }

    pub fn asymmetric_one_bit(p: f64) -> Result<Self> {
        check_prob(p)?;
        Ok(NoiseModel::AsymmetricOneBit { p })
    }

    /// Bit-wise noise for dimension `n`; requires `q/n <= 1/2`. Values
    /// `q > 1` are allowed.
    pub fn bit_wise(p: f64, q: f64, n: usize) -> Result<Self> {
        let model = Self::bit_wise_unchecked(p, q)?;
        model.validate_for(n)?;
        Ok(model)
    }

    /// Bit-wise noise without the `q/n <= 1/2` restriction, for exploratory
    /// use only.
    pub fn bit_wise_unchecked(p: f64, q: f64) -> Result<Self> {
        check_prob(p)?;
        if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::invalid(format!("bit-wise noise q = {q} must be finite and >= 0")));
        }
        Ok(NoiseModel::BitWise { p, q })
    }

    /// Checks the parameter ranges for dimension `n`.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        match *self {
            NoiseModel::NoNoise => Ok(()),
            NoiseModel::OneBit { p } | NoiseModel::AsymmetricOneBit { p } => check_prob(p),
            NoiseModel::BitWise { p, q } => {
                check_prob(p)?;
                if q / n as f64 > 0.5 {
                    return Err(Error::invalid(format!(
                        "bit-wise noise needs q/n <= 1/2 (q = {q}, n = {n})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Trigger probability `p` (0 for no noise).
    pub fn p(&self) -> f64 {
        match *self {
            NoiseModel::NoNoise => 0.0,
            NoiseModel::OneBit { p }
            | NoiseModel::AsymmetricOneBit { p }
            | NoiseModel::BitWise { p, .. } => p,
        }
    }

    /// Effective noise strength: `p`, or `p * min(q, 1)` for bit-wise noise.
    pub fn effective_strength(&self) -> f64 {
        match *self {
            NoiseModel::BitWise { p, q } => p * q.min(1.0),
            other => other.p(),
        }
    }

    pub fn is_noise_free(&self) -> bool {
        match *self {
            NoiseModel::NoNoise => true,
            NoiseModel::BitWise { p, q } => p == 0.0 || q == 0.0,
            other => other.p() == 0.0,
        }
    }

    /// Perturbs `x` in place.
    #[inline]
    pub fn apply<R: Rng + ?Sized>(&self, x: &mut BitString, rng: &mut R) {
        match *self {
            NoiseModel::NoNoise => {}
            NoiseModel::OneBit { p } => {
                if rng.random_bool(p) {
                    let i = rng.random_range(0..x.len());
                    x.flip(i);
                }
            }
            NoiseModel::BitWise { p, q } => {
                if rng.random_bool(p) {
                    let n = x.len();
                    flip_each_with_prob(x, q / n as f64, rng);
                }
            }
            NoiseModel::AsymmetricOneBit { p } => {
                if rng.random_bool(p) {
                    flip_asymmetric(x, rng);
                }
            }
        }
    }

    /// Fitness of a freshly perturbed copy of `x`.
    #[inline]
    pub fn noisy_fitness<R: Rng + ?Sized>(
        &self,
        instance: &ProblemInstance,
        x: &BitString,
        rng: &mut R,
    ) -> Fitness {
        let fires = match *self {
            NoiseModel::NoNoise => false,
            NoiseModel::OneBit { p }
            | NoiseModel::BitWise { p, .. }
            | NoiseModel::AsymmetricOneBit { p } => rng.random_bool(p),
        };
        if !fires {
            return instance.fitness(x);
        }
        let mut y = x.clone();
        match *self {
            NoiseModel::NoNoise => {}
            NoiseModel::OneBit { .. } => {
                let i = rng.random_range(0..y.len());
                y.flip(i);
            }
            NoiseModel::BitWise { q, .. } => {
                let n = y.len();
                flip_each_with_prob(&mut y, q / n as f64, rng);
            }
            NoiseModel::AsymmetricOneBit { .. } => flip_asymmetric(&mut y, rng),
        }
        instance.fitness(&y)
    }
}

fn flip_asymmetric<R: Rng + ?Sized>(x: &mut BitString, rng: &mut R) {
    let n = x.len();
    let ones = x.count_ones();
    if ones == 0 || ones == n {
        let i = rng.random_range(0..n);
        x.flip(i);
        return;
    }
    let flip_a_one = rng.random_bool(0.5);
    let pool = if flip_a_one { ones } else { n - ones };
    let rank = rng.random_range(0..pool);
    let pos = x
        .nth_position(flip_a_one, rank)
        .expect("rank is below the class size");
    x.flip(pos);
}

/// Returns a perturbed copy; `x` is left unchanged.
pub fn apply_noise<R: Rng + ?Sized>(x: &BitString, model: &NoiseModel, rng: &mut R) -> BitString {
    let mut y = x.clone();
    model.apply(&mut y, rng);
    y
}

/// Exact probability that `apply_noise(x, model)` returns `y`.
pub fn noise_kernel(x: &BitString, y: &BitString, model: &NoiseModel) -> f64 {
    let n = x.len();
    let d = x.hamming_distance(y);
    let same = if d == 0 { 1.0 } else { 0.0 };
    match *model {
        NoiseModel::NoNoise => same,
        NoiseModel::OneBit { p } => {
            (1.0 - p) * same + if d == 1 { p / n as f64 } else { 0.0 }
        }
        NoiseModel::BitWise { p, q } => {
            let r = q / n as f64;
            (1.0 - p) * same + p * r.powi(d as i32) * (1.0 - r).powi((n - d) as i32)
        }
        NoiseModel::AsymmetricOneBit { p } => {
            let noisy = if d != 1 {
                0.0
            } else {
                let ones = x.count_ones();
                if ones == 0 || ones == n {
                    1.0 / n as f64
                } else if y.count_ones() > ones {
                    // a 0-bit was flipped
                    0.5 / (n - ones) as f64
                } else {
                    0.5 / ones as f64
                }
            };
            (1.0 - p) * same + p * noisy
        }
    }
}

/// Probability that noise changes a search point of length `n`.
pub fn prob_noise_occurs(model: &NoiseModel, n: usize) -> f64 {
    match *model {
        NoiseModel::NoNoise => 0.0,
        NoiseModel::OneBit { p } | NoiseModel::AsymmetricOneBit { p } => p,
        NoiseModel::BitWise { p, q } => {
            let r = q / n as f64;
            // 1 - (1 - r)^n without cancellation for small r
            p * -(n as f64 * (-r).ln_1p()).exp_m1()
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NoiseModel::NoNoise => write!(f, "none"),
            NoiseModel::OneBit { p } => write!(f, "onebit(p={p})"),
            NoiseModel::BitWise { p, q } => write!(f, "bitwise(p={p}, q={q})"),
            NoiseModel::AsymmetricOneBit { p } => write!(f, "asym(p={p})"),
        }
    }
}

/// Serialized form: `{"kind": "onebit"|"bitwise"|"asym"|"none", "p": .., "q": ..}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: String,
    #[serde(default)]
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

impl TryFrom<NoiseSpec> for NoiseModel {
    type Error = Error;

    fn try_from(spec: NoiseSpec) -> Result<Self> {
        match spec.kind.as_str() {
            "none" => Ok(NoiseModel::NoNoise),
            "onebit" => NoiseModel::one_bit(spec.p),
            "asym" => NoiseModel::asymmetric_one_bit(spec.p),
            "bitwise" => {
                let q = spec
                    .q
                    .ok_or_else(|| Error::invalid("bit-wise noise needs a q value"))?;
                NoiseModel::bit_wise_unchecked(spec.p, q)
            }
            other => Err(Error::invalid(format!("unknown noise kind {other:?}"))),
        }
    }
}

impl From<NoiseModel> for NoiseSpec {
    fn from(model: NoiseModel) -> Self {
        let (kind, p, q) = match model {
            NoiseModel::NoNoise => ("none", 0.0, None),
            NoiseModel::OneBit { p } => ("onebit", p, None),
            NoiseModel::BitWise { p, q } => ("bitwise", p, Some(q)),
            NoiseModel::AsymmetricOneBit { p } => ("asym", p, None),
        };
        NoiseSpec {
            kind: kind.to_string(),
            p,
            q,
        }
    }
}
