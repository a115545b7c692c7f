//! Rough numbers built from groups of ordinal judgments.
//!
//! A judgment is placed against the whole multiset of judgments given for the
//! same criterion pair. Its lower approximation is every judgment at or below
//! it, its upper approximation every judgment at or above it, and the means of
//! the two sets form a [`RoughNumber`]. Duplicates are kept, so all means are
//! multiset means.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inclusive judgment scale, `0..=4` unless a study says otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub min: u8,
    pub max: u8,
}

impl Scale {
    pub const LIKERT_0_4: Scale = Scale { min: 0, max: 4 };

    pub fn new(min: u8, max: u8) -> Result<Self> {
        if min >= max {
            return Err(Error::invalid(format!(
                "scale minimum {min} must be below maximum {max}"
            )));
        }
        Ok(Scale { min, max })
    }

    pub fn contains(&self, value: i64) -> bool {
        value >= i64::from(self.min) && value <= i64::from(self.max)
    }

    pub fn judgment(&self, value: i64) -> Result<Judgment> {
        if self.contains(value) {
            Ok(Judgment(value as u8))
        } else {
            Err(Error::invalid(format!(
                "judgment {value} outside scale {}..={}",
                self.min, self.max
            )))
        }
    }
}

impl Default for Scale {
    fn default() -> Self {
        Scale::LIKERT_0_4
    }
}

/// One expert's score for an ordered criterion pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Judgment(u8);

impl Judgment {
    pub const ZERO: Judgment = Judgment(0);

    /// Judgment on the default `0..=4` scale.
    pub fn new(value: u8) -> Result<Self> {
        Scale::LIKERT_0_4.judgment(i64::from(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Non-empty multiset of judgments, kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JudgmentSet {
    values: Vec<Judgment>,
}

impl JudgmentSet {
    pub fn new(mut values: Vec<Judgment>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("judgment set is empty"));
        }
        values.sort_unstable();
        Ok(JudgmentSet { values })
    }

    pub fn from_values(values: &[u8]) -> Result<Self> {
        let judgments = values
            .iter()
            .map(|&v| Judgment::new(v))
            .collect::<Result<Vec<_>>>()?;
        JudgmentSet::new(judgments)
    }

    pub fn values(&self) -> &[Judgment] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> Judgment {
        self.values[0]
    }

    pub fn max(&self) -> Judgment {
        self.values[self.values.len() - 1]
    }

    pub fn contains(&self, k: Judgment) -> bool {
        self.values.binary_search(&k).is_ok()
    }

    fn mean(&self) -> f64 {
        let sum: u64 = self.values.iter().map(|j| u64::from(j.0)).sum();
        sum as f64 / self.values.len() as f64
    }

    fn require(&self, k: Judgment) -> Result<()> {
        if self.contains(k) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "judgment {k} is not a member of the set"
            )))
        }
    }
}

/// All members `<= k`, duplicates included.
pub fn lower_approximation(set: &JudgmentSet, k: Judgment) -> Result<JudgmentSet> {
    set.require(k)?;
    let end = set.values.partition_point(|&v| v <= k);
    Ok(JudgmentSet {
        values: set.values[..end].to_vec(),
    })
}

/// All members `>= k`, duplicates included.
pub fn upper_approximation(set: &JudgmentSet, k: Judgment) -> Result<JudgmentSet> {
    set.require(k)?;
    let start = set.values.partition_point(|&v| v < k);
    Ok(JudgmentSet {
        values: set.values[start..].to_vec(),
    })
}

/// Rough number of `k` relative to `set`: the means of its lower and upper
/// approximations.
pub fn rough_bounds(set: &JudgmentSet, k: Judgment) -> Result<RoughNumber> {
    let lower = lower_approximation(set, k)?.mean();
    let upper = upper_approximation(set, k)?.mean();
    Ok(RoughNumber { lower, upper })
}

/// Closed interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", try_from = "[f64; 2]")]
pub struct RoughNumber {
    lower: f64,
    upper: f64,
}

impl RoughNumber {
    pub const ZERO: RoughNumber = RoughNumber {
        lower: 0.0,
        upper: 0.0,
    };

    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::invalid(format!(
                "rough number bounds must be finite, got [{lower}, {upper}]"
            )));
        }
        if lower > upper {
            return Err(Error::IntervalOrder { lower, upper });
        }
        Ok(RoughNumber { lower, upper })
    }

    pub fn point(value: f64) -> Self {
        RoughNumber {
            lower: value,
            upper: value,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Width of the boundary region.
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn checked_sub(self, rhs: RoughNumber) -> Result<RoughNumber> {
        RoughNumber::new(self.lower - rhs.lower, self.upper - rhs.upper)
    }

    pub fn checked_mul(self, rhs: RoughNumber) -> Result<RoughNumber> {
        RoughNumber::new(self.lower * rhs.lower, self.upper * rhs.upper)
    }

    /// Componentwise division; both divisor bounds must be nonzero and share a sign.
    pub fn checked_div(self, rhs: RoughNumber) -> Result<RoughNumber> {
        for b in [rhs.lower, rhs.upper] {
            if b == 0.0 {
                return Err(Error::DivisionByZero(b));
            }
        }
        if rhs.lower.signum() != rhs.upper.signum() {
            return Err(Error::invalid(format!(
                "divisor [{}, {}] straddles zero",
                rhs.lower, rhs.upper
            )));
        }
        RoughNumber::new(self.lower / rhs.lower, self.upper / rhs.upper)
    }

    pub fn scale(self, factor: f64) -> Result<RoughNumber> {
        RoughNumber::new(factor * self.lower, factor * self.upper)
    }
}

impl From<RoughNumber> for [f64; 2] {
    fn from(r: RoughNumber) -> Self {
        [r.lower, r.upper]
    }
}

impl TryFrom<[f64; 2]> for RoughNumber {
    type Error = Error;

    fn try_from([lower, upper]: [f64; 2]) -> Result<Self> {
        RoughNumber::new(lower, upper)
    }
}

impl fmt::Display for RoughNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "[{:.*}, {:.*}]", p, self.lower, p, self.upper),
            None => write!(f, "[{}, {}]", self.lower, self.upper),
        }
    }
}

impl Add for RoughNumber {
    type Output = RoughNumber;

    fn add(self, rhs: RoughNumber) -> RoughNumber {
        RoughNumber {
            lower: self.lower + rhs.lower,
            upper: self.upper + rhs.upper,
        }
    }
}

pub fn rough_add(a: RoughNumber, b: RoughNumber) -> Result<RoughNumber> {
    RoughNumber::new(a.lower + b.lower, a.upper + b.upper)
}

pub fn rough_sub(a: RoughNumber, b: RoughNumber) -> Result<RoughNumber> {
    a.checked_sub(b)
}

pub fn rough_mul(a: RoughNumber, b: RoughNumber) -> Result<RoughNumber> {
    a.checked_mul(b)
}

pub fn rough_div(a: RoughNumber, b: RoughNumber) -> Result<RoughNumber> {
    a.checked_div(b)
}

pub fn rough_scale(a: RoughNumber, factor: f64) -> Result<RoughNumber> {
    a.scale(factor)
}

/// The per-expert rough numbers for one criterion pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughSequence {
    intervals: Vec<RoughNumber>,
}

impl RoughSequence {
    pub fn new(intervals: Vec<RoughNumber>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::invalid("rough sequence is empty"));
        }
        Ok(RoughSequence { intervals })
    }

    /// Converts every judgment of `set` against the set itself.
    pub fn from_judgments(set: &JudgmentSet) -> Self {
        let intervals = set
            .values()
            .iter()
            .map(|&k| rough_bounds(set, k).expect("member of its own set"))
            .collect();
        RoughSequence { intervals }
    }

    pub fn intervals(&self) -> &[RoughNumber] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Componentwise mean of a sequence of rough numbers.
pub fn average_rough(seq: &RoughSequence) -> Result<RoughNumber> {
    let n = seq.intervals.len();
    if n == 0 {
        return Err(Error::invalid("cannot average an empty rough sequence"));
    }
    let (lo, hi) = seq
        .intervals
        .iter()
        .fold((0.0, 0.0), |(lo, hi), r| (lo + r.lower, hi + r.upper));
    RoughNumber::new(lo / n as f64, hi / n as f64)
}

/// Converts a list of rough numbers to crisp values against the list's
/// common envelope `[min lower, max upper]`.
///
/// Each interval is normalized into the envelope, blended into a single
/// position `alpha` in `[0, 1]`, then mapped back. A zero-width envelope
/// returns the common point for every entry.
pub fn crisp_convert(intervals: &[RoughNumber]) -> Result<Vec<f64>> {
    if intervals.is_empty() {
        return Err(Error::invalid("cannot crisp-convert an empty list"));
    }
    let min_lower = intervals
        .iter()
        .map(|r| r.lower)
        .fold(f64::INFINITY, f64::min);
    let max_upper = intervals
        .iter()
        .map(|r| r.upper)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(crisp_convert_in(intervals, min_lower, max_upper))
}

/// [`crisp_convert`] against an explicit envelope, which must contain every interval.
pub(crate) fn crisp_convert_in(
    intervals: &[RoughNumber],
    min_lower: f64,
    max_upper: f64,
) -> Vec<f64> {
    let delta = max_upper - min_lower;
    if delta == 0.0 {
        return vec![min_lower; intervals.len()];
    }
    intervals
        .iter()
        .map(|r| {
            let lo = (r.lower - min_lower) / delta;
            let hi = (r.upper - min_lower) / delta;
            let alpha = (lo * (1.0 - lo) + hi * hi) / (1.0 - lo + hi);
            min_lower + alpha * delta
        })
        .collect()
}
