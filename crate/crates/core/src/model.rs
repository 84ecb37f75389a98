//! Core value types: binary outcomes, data prefixes, forecast
//! probabilities, and running discrepancy statistics.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A single binary outcome. 1 = snow, 0 = no snow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bit(bool);

impl Bit {
    pub const ZERO: Bit = Bit(false);
    pub const ONE: Bit = Bit(true);

    pub fn from_u8(v: u8) -> Result<Bit> {
        match v {
            0 => Ok(Bit::ZERO),
            1 => Ok(Bit::ONE),
            _ => Err(Error::config(format!("bit value must be 0 or 1, got {v}"))),
        }
    }

    #[inline]
    pub fn as_u8(self) -> u8 {
        self.0 as u8
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as u8 as f64
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Bit {
        Bit(b)
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

/// Finite record of the outcomes seen so far. The next forecast is for
/// day `len() + 1`; days are 1-indexed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Prefix {
    bits: Vec<Bit>,
}

impl Prefix {
    pub fn new() -> Prefix {
        Prefix::default()
    }

    pub fn with_capacity(n: usize) -> Prefix {
        Prefix {
            bits: Vec::with_capacity(n),
        }
    }

    pub fn from_bits(bits: Vec<Bit>) -> Prefix {
        Prefix { bits }
    }

    /// Parse an ASCII '0'/'1' string, the text form used in config files
    /// and CLI flags. Rejects any other character, naming its index.
    pub fn parse(text: &str) -> Result<Prefix> {
        let mut bits = Vec::with_capacity(text.len());
        for (position, ch) in text.chars().enumerate() {
            match ch {
                '0' => bits.push(Bit::ZERO),
                '1' => bits.push(Bit::ONE),
                found => return Err(Error::PrefixParse { position, found }),
            }
        }
        Ok(Prefix { bits })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// 1-indexed day of the next forecast.
    #[inline]
    pub fn next_day(&self) -> u64 {
        self.bits.len() as u64 + 1
    }

    #[inline]
    pub fn push(&mut self, bit: Bit) {
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &Prefix) {
        self.bits.extend_from_slice(&other.bits);
    }

    #[inline]
    pub fn bits(&self) -> &[Bit] {
        &self.bits
    }

    #[inline]
    pub fn last(&self) -> Option<Bit> {
        self.bits.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = Bit> + '_ {
        self.bits.iter().copied()
    }

    /// The first `n` bits as a new prefix.
    pub fn truncated(&self, n: usize) -> Prefix {
        Prefix {
            bits: self.bits[..n.min(self.bits.len())].to_vec(),
        }
    }

    /// True if `self` is an initial segment of `other`.
    pub fn is_prefix_of(&self, other: &Prefix) -> bool {
        other.bits.len() >= self.bits.len() && other.bits[..self.bits.len()] == self.bits[..]
    }
}

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Prefix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Prefix> {
        Prefix::parse(s)
    }
}

impl FromIterator<Bit> for Prefix {
    fn from_iter<T: IntoIterator<Item = Bit>>(iter: T) -> Prefix {
        Prefix {
            bits: iter.into_iter().collect(),
        }
    }
}

/// A probability for the next bit. Always finite and within `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Forecast(f64);

impl Forecast {
    pub fn new(p: f64) -> Result<Forecast> {
        if p.is_finite() && (0.0..=1.0).contains(&p) {
            Ok(Forecast(p))
        } else {
            Err(Error::config(format!(
                "forecast probability must be a finite number in [0, 1], got {p}"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The tie at 0.5 belongs to the high side.
    #[inline]
    pub fn is_high(self) -> bool {
        self.0 >= 0.5
    }
}

impl fmt::Display for Forecast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Signed error of a day's forecast: outcome minus forecast probability.
#[inline]
pub fn discrepancy(outcome: Bit, forecast: Forecast) -> f64 {
    outcome.as_f64() - forecast.value()
}

/// Count and sum of discrepancies over a selected subsequence of days.
///
/// The sum carries a Neumaier compensation term: at horizons of 10^5 days
/// and beyond, bucket totals stay correctly rounded, which keeps the
/// high/low/all partition identity inside 1e-12.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BucketStats {
    count: u64,
    sum: f64,
    comp: f64,
}

impl BucketStats {
    pub fn new() -> BucketStats {
        BucketStats::default()
    }

    /// Fold one discrepancy into the bucket.
    pub fn update(&mut self, d: f64) {
        debug_assert!(d.abs() <= 1.0, "discrepancy out of range: {d}");
        self.count += 1;
        let t = self.sum + d;
        if self.sum.abs() >= d.abs() {
            self.comp += (self.sum - t) + d;
        } else {
            self.comp += (d - t) + self.sum;
        }
        self.sum = t;
    }

    /// Pure-functional form of [`BucketStats::update`].
    pub fn updated(mut self, d: f64) -> BucketStats {
        self.update(d);
        self
    }

    #[inline]
    pub fn count(&self) -> u64 {
        self.count
    }

    #[inline]
    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }

    /// Mean discrepancy; `None` when no day has been selected.
    pub fn mean(&self) -> Option<f64> {
        if self.count > 0 {
            Some(self.sum() / self.count as f64)
        } else {
            None
        }
    }
}
