//! Values with recognizable abort and the deterministic combinators over them.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::Bits;
use crate::error::{check_len, Error, Result};

/// Either a bitstring of the producing primitive's declared length, or the
/// abort symbol ⊥.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum BotValue {
    Bot,
    Bits(Bits),
}

impl BotValue {
    pub fn is_bot(&self) -> bool {
        matches!(self, BotValue::Bot)
    }

    pub fn bits(&self) -> Option<&Bits> {
        match self {
            BotValue::Bot => None,
            BotValue::Bits(b) => Some(b),
        }
    }

    pub fn into_bits(self) -> Option<Bits> {
        match self {
            BotValue::Bot => None,
            BotValue::Bits(b) => Some(b),
        }
    }
}

impl From<Bits> for BotValue {
    fn from(b: Bits) -> Self {
        BotValue::Bits(b)
    }
}

impl From<Option<Bits>> for BotValue {
    fn from(b: Option<Bits>) -> Self {
        b.map_or(BotValue::Bot, BotValue::Bits)
    }
}

impl fmt::Display for BotValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BotValue::Bot => f.write_str("BOT"),
            BotValue::Bits(b) => write!(f, "{b}"),
        }
    }
}

impl Serialize for BotValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BotValue::Bot => s.serialize_str("BOT"),
            BotValue::Bits(b) => b.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for BotValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "BOT" {
            Ok(BotValue::Bot)
        } else {
            s.parse().map(BotValue::Bits).map_err(serde::de::Error::custom)
        }
    }
}

/// Is-⊥: ⊥ when `a` is ⊥, otherwise `b` verbatim.
///
/// `b` must have the length carried by `a` when `a` is not ⊥.
pub fn is_bot(a: &BotValue, b: &Bits) -> Result<BotValue> {
    match a {
        BotValue::Bot => Ok(BotValue::Bot),
        BotValue::Bits(a) => {
            check_len(a.len(), b.len())?;
            Ok(BotValue::Bits(b.clone()))
        }
    }
}

/// XOR that absorbs ⊥.
pub fn bot_xor(values: &[BotValue]) -> Result<BotValue> {
    let first_len = values
        .iter()
        .find_map(|v| v.bits().map(Bits::len))
        .or_else(|| (!values.is_empty()).then_some(0));
    let Some(len) = first_len else {
        return Err(Error::EmptyInput);
    };
    for b in values.iter().filter_map(BotValue::bits) {
        check_len(len, b.len())?;
    }
    if values.iter().any(BotValue::is_bot) {
        return Ok(BotValue::Bot);
    }
    let mut acc = Bits::zeros(len);
    for b in values.iter().filter_map(BotValue::bits) {
        acc.xor_assign(b)?;
    }
    Ok(BotValue::Bits(acc))
}

/// Smallest count that is at least 60% of `reps`, i.e. ⌈0.6·reps⌉.
pub fn vote_threshold(reps: usize) -> usize {
    (3 * reps).div_ceil(5)
}

/// Returns the value held by at least 60% of `samples`, if any.
///
/// Since the threshold exceeds one half, at most one value can qualify.
pub fn vote_by<T: Eq + Hash>(samples: &[T]) -> Option<&T> {
    let threshold = vote_threshold(samples.len());
    let mut counts: HashMap<&T, usize> = HashMap::new();
    for s in samples {
        let c = counts.entry(s).or_default();
        *c += 1;
        if *c >= threshold {
            return Some(s);
        }
    }
    None
}

/// 60%-majority vote over equal-length bitstrings.
pub fn vote(samples: &[Bits]) -> Result<BotValue> {
    let first = samples.first().ok_or(Error::EmptyInput)?;
    for s in samples {
        check_len(first.len(), s.len())?;
    }
    Ok(vote_by(samples).cloned().into())
}

/// A finite distribution over bitstrings, kept in caller order.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteOutputDistribution {
    entries: Vec<(Bits, f64)>,
}

impl FiniteOutputDistribution {
    pub const MASS_TOLERANCE: f64 = 1e-9;

    pub fn new(entries: Vec<(Bits, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut seen = std::collections::HashSet::new();
        let mut total = 0.0;
        for (y, p) in &entries {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::InvalidParameter(format!("mass {p} for {y:?}")));
            }
            if !seen.insert(y) {
                return Err(Error::InvalidParameter(format!("duplicate outcome {y:?}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > Self::MASS_TOLERANCE {
            return Err(Error::InvalidParameter(format!("masses sum to {total}, expected 1")));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(Bits, f64)] {
        &self.entries
    }

    pub fn mass_of<'a>(&self, set: impl IntoIterator<Item = &'a Bits>) -> f64 {
        let lookup: HashMap<&Bits, f64> = self.entries.iter().map(|(y, p)| (y, *p)).collect();
        set.into_iter().map(|y| lookup.get(y).copied().unwrap_or(0.0)).sum()
    }
}

/// Greedy split of the support into three sets of mass at most one half each.
///
/// Entries are visited in order; each joins the current set if that keeps
/// its mass ≤ 0.5, otherwise it opens the next set. Requires every point mass
/// to be below 0.5, in which case three sets always suffice (two consecutive
/// sets always weigh more than 0.5 together).
pub fn set_division(dist: &FiniteOutputDistribution) -> Result<[Vec<Bits>; 3]> {
    if let Some((y, p)) = dist.entries().iter().find(|(_, p)| *p >= 0.5) {
        return Err(Error::PreconditionViolated(format!("point mass {p} >= 0.5 at {y:?}")));
    }
    let mut sets: [Vec<Bits>; 3] = Default::default();
    let mut current = 0;
    let mut mass = 0.0;
    for (y, p) in dist.entries() {
        if mass + p > 0.5 {
            current += 1;
            mass = 0.0;
            if current == sets.len() {
                return Err(Error::PreconditionViolated("support needs more than three sets".into()));
            }
        }
        sets[current].push(y.clone());
        mass += p;
    }
    Ok(sets)
}
