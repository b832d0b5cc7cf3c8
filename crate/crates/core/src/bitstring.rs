//! Packed fixed-length bit strings.
//!
//! Position `i` (0-based, `x_1` is position 0) lives in word `i / 64` at bit
//! `i % 64`. Strings of up to 128 bits are stored inline without allocation.

use std::fmt;

use rand::Rng;
use smallvec::SmallVec;

use crate::error::{Error, Result};

const WORD: usize = 64;

type Words = SmallVec<[u64; 2]>;

#[derive(PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Words,
}

impl Clone for BitString {
    #[inline]
    fn clone(&self) -> Self {
        Self {
            len: self.len,
            words: Words::from_slice(&self.words),
        }
    }

    #[inline]
    fn clone_from(&mut self, source: &Self) {
        if self.len == source.len {
            self.words.copy_from_slice(&source.words);
        } else {
            *self = source.clone();
        }
    }
}

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// Mask of the valid bits in the last word.
fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "bit strings must have positive length");
        Self {
            len,
            words: smallvec::smallvec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut x = Self::zeros(len);
        for w in x.words.iter_mut() {
            *w = u64::MAX;
        }
        x.clear_tail();
        x
    }

    /// Uniformly random string of length `len`.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut x = Self::zeros(len);
        for w in x.words.iter_mut() {
            *w = rng.random();
        }
        x.clear_tail();
        x
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut x = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            x.set(i, b);
        }
        x
    }

    /// Converts the oracle state index: the string read as a binary integer,
    /// `x_1` most significant.
    pub fn from_index(len: usize, index: u64) -> Self {
        assert!(len <= 64, "state indexing is limited to 64 bits");
        let mut x = Self::zeros(len);
        for i in 0..len {
            x.set(i, (index >> (len - 1 - i)) & 1 == 1);
        }
        x
    }

    pub fn to_index(&self) -> u64 {
        assert!(self.len <= 64, "state indexing is limited to 64 bits");
        (0..self.len).fold(0u64, |acc, i| (acc << 1) | self.get(i) as u64)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Length of the longest all-ones prefix.
    #[inline]
    pub fn leading_ones(&self) -> usize {
        let mut total = 0;
        for &w in &self.words {
            let t = w.trailing_ones() as usize;
            total += t;
            if t < WORD {
                break;
            }
        }
        total.min(self.len)
    }

    #[inline]
    pub fn is_all_ones(&self) -> bool {
        let (last, rest) = self.words.split_last().expect("positive length");
        rest.iter().all(|&w| w == u64::MAX) && *last == tail_mask(self.len)
    }

    pub fn hamming_distance(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Position of the `rank`-th (0-based) bit equal to `value`.
    pub fn nth_position(&self, value: bool, rank: usize) -> Option<usize> {
        let mut remaining = rank;
        for (wi, &raw) in self.words.iter().enumerate() {
            let mut w = if value { raw } else { !raw };
            if wi + 1 == self.words.len() {
                w &= tail_mask(self.len);
            }
            let c = w.count_ones() as usize;
            if remaining < c {
                for _ in 0..remaining {
                    w &= w - 1;
                }
                return Some(wi * WORD + w.trailing_zeros() as usize);
            }
            remaining -= c;
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub(crate) fn check_len(&self, expected: usize) -> Result<()> {
        if self.len == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.len,
            })
        }
    }

    fn clear_tail(&mut self) {
        let mask = tail_mask(self.len);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl std::str::FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::invalid("bit string must not be empty"));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }
}
