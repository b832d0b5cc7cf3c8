//! Closed-form runtime bounds and the elementary inequalities behind them.
//!
//! Bounds that grow like `(1-p)^{-M}` overflow `f64` quickly, so they are
//! carried as natural logarithms in [`LogValue`].

use std::fmt;

use crate::error::{Error, Result};

/// A positive quantity stored by its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogValue {
    pub ln: f64,
}

impl LogValue {
    pub fn from_ln(ln: f64) -> Self {
        Self { ln }
    }

    /// Raw value; `inf` when it exceeds the `f64` range.
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.value();
        if v.is_finite() {
            write!(f, "{v:.6e}")
        } else {
            write!(f, "exp({:.6})", self.ln)
        }
    }
}

fn check_restart_inputs(m: f64, p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::invalid(format!("failure probability must satisfy 0 <= p < 1 (p = {p})")));
    }
    if !(m >= 1.0 && m.is_finite()) {
        return Err(Error::invalid(format!("median time must be finite and >= 1 (M = {m})")));
    }
    Ok(())
}

/// Restart bound for a per-iteration failure probability `p` and a
/// noise-free worst-case median time `m`: returns
/// `(2M (1-p)^{-M}, 2M e^{pM/(1-p)})`; the first never exceeds the second.
pub fn restart_bound(m: f64, p: f64) -> Result<(LogValue, LogValue)> {
    check_restart_inputs(m, p)?;
    let base = (2.0 * m).ln();
    let tight = base - m * (-p).ln_1p();
    let loose = base + p * m / (1.0 - p);
    Ok((LogValue::from_ln(tight), LogValue::from_ln(loose)))
}

/// `2M (1-p)^{-νM}` for an algorithm evaluating up to `nu` points per
/// iteration, each perturbed with probability at most `p`.
pub fn noisy_restart_bound(m: f64, p: f64, nu: u32) -> Result<LogValue> {
    check_restart_inputs(m, p)?;
    if nu == 0 {
        return Err(Error::invalid("nu must be at least 1"));
    }
    Ok(LogValue::from_ln(
        (2.0 * m).ln() - nu as f64 * m * (-p).ln_1p(),
    ))
}

/// The chain `½ min{pℓ,1} <= pℓ/(1+pℓ) <= 1-(1-p)^ℓ <= min{pℓ,1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityChain {
    pub half_min: f64,
    pub ratio: f64,
    pub complement_power: f64,
    pub min: f64,
    pub holds: bool,
}

pub const EQ1_TOLERANCE: f64 = 1e-12;

pub fn inequality_chain(p: f64, ell: u64) -> Result<InequalityChain> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p must lie in [0, 1] (p = {p})")));
    }
    if ell == 0 {
        return Err(Error::invalid("ell must be at least 1"));
    }
    let pl = p * ell as f64;
    let min = pl.min(1.0);
    let half_min = 0.5 * min;
    let ratio = pl / (1.0 + pl);
    let complement_power = if p == 1.0 {
        1.0
    } else {
        -(ell as f64 * (-p).ln_1p()).exp_m1()
    };
    let holds = half_min <= ratio + EQ1_TOLERANCE
        && ratio <= complement_power + EQ1_TOLERANCE
        && complement_power <= min + EQ1_TOLERANCE;
    Ok(InequalityChain {
        half_min,
        ratio,
        complement_power,
        min,
        holds,
    })
}

/// Probability that the parent and every clone of it among `lambda`
/// offspring are all perturbed: `p (1 - (1-1/n)^n (1-p))^λ`.
pub fn clone_noise_probability(p: f64, n: u64, lambda: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p must lie in [0, 1] (p = {p})")));
    }
    if n == 0 || lambda == 0 {
        return Err(Error::invalid("n and lambda must be at least 1"));
    }
    let clone = (1.0 - 1.0 / n as f64).powi(n as i32);
    Ok(p * (1.0 - clone * (1.0 - p)).powf(lambda as f64))
}

/// Upper bound `½ (1 + (1 - 2/n)^t)` on `P(x^t = 1)` for a bit flipped with
/// probability `1/n` per step. Exact when the bit starts at 1.
pub fn mixing_bound(t: u64, n: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::invalid("mixing bound needs n >= 3"));
    }
    Ok(0.5 * (1.0 + (1.0 - 2.0 / n as f64).powf(t as f64)))
}

/// Inputs for a side-by-side bound table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub median: f64,
    pub p: f64,
    pub nu: u32,
    pub lambda: u64,
    pub n: u64,
    pub ell: u64,
    pub t: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub name: &'static str,
    pub value: f64,
    pub ln: f64,
}

impl BoundRow {
    fn plain(name: &'static str, value: f64) -> Self {
        Self {
            name,
            value,
            ln: value.ln(),
        }
    }

    fn log(name: &'static str, v: LogValue) -> Self {
        Self {
            name,
            value: v.value(),
            ln: v.ln,
        }
    }
}

pub fn bound_table(inputs: &BoundInputs) -> Result<Vec<BoundRow>> {
    let (tight, loose) = restart_bound(inputs.median, inputs.p)?;
    let noisy = noisy_restart_bound(inputs.median, inputs.p, inputs.nu)?;
    let chain = inequality_chain(inputs.p, inputs.ell)?;
    let mut rows = vec![
        BoundRow::log("restart_bound", tight),
        BoundRow::log("restart_bound_exp", loose),
        BoundRow::log("noisy_restart_bound", noisy),
        BoundRow::plain("inequality_chain_half_min", chain.half_min),
        BoundRow::plain("inequality_chain_ratio", chain.ratio),
        BoundRow::plain("inequality_chain_one_minus_power", chain.complement_power),
        BoundRow::plain("inequality_chain_min", chain.min),
        BoundRow::plain(
            "clone_noise_probability",
            clone_noise_probability(inputs.p, inputs.n, inputs.lambda)?,
        ),
    ];
    if inputs.n >= 3 {
        rows.push(BoundRow::plain("mixing_bound", mixing_bound(inputs.t, inputs.n)?));
    }
    Ok(rows)
}
