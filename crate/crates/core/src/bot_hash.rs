//! ⊥-one-way function from a ⊥-PRG, and compressing keyed hashes with
//! recognizable abort.
//!
//! [`BotUowhfSpec`] is a keyed-hash instantiation: its collision resistance
//! comes from BLAKE3, not from any reduction to the generator. The abort
//! behaviour is injected: a `mu` fraction of (key, input) pairs is bad, and a
//! bad pair evaluates to ⊥ half of the time and to the canonical value
//! otherwise. The support of every evaluation is therefore `{canonical, ⊥}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::bot_core::BotValue;
use crate::bot_prg::BotPrgSpec;
use crate::error::{check_len, Error, Result};
use crate::expander::{unit_interval, Expander};
use crate::tape::RandomTape;

const CONTEXT: &str = "botsig 2024 uowhf expander";
const DOMAIN_HASH: u8 = 1;

/// `F(x, y) = G(x)`: the trailing bits of `z` are padding.
pub fn bot_owf_eval(prg: &BotPrgSpec, z: &Bits, tape: &mut RandomTape) -> Result<BotValue> {
    let key_len = prg.composite_key_len();
    if prg.out_len() < 3 * key_len {
        return Err(Error::PreconditionViolated(format!(
            "one-way function needs out_len {} >= 3 x key_len {}",
            prg.out_len(),
            key_len
        )));
    }
    check_len(prg.out_len(), z.len())?;
    prg.xor_prg_eval(&z.slice(0..key_len), tape)
}

/// A value where abort has been replaced by a marker that compares unequal
/// to every legitimate image.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TopValue {
    Top,
    Bits(Bits),
}

impl fmt::Display for TopValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopValue::Top => f.write_str("TOP"),
            TopValue::Bits(b) => write!(f, "{b}"),
        }
    }
}

pub fn f_top(v: BotValue) -> TopValue {
    match v {
        BotValue::Bot => TopValue::Top,
        BotValue::Bits(b) => TopValue::Bits(b),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BotUowhfSpecDoc", into = "BotUowhfSpecDoc")]
pub struct BotUowhfSpec {
    key_len: usize,
    in_len: usize,
    out_len: usize,
    mu: f64,
    master_seed: Vec<u8>,
    expander: Expander,
}

#[derive(Serialize, Deserialize)]
struct BotUowhfSpecDoc {
    key_len: usize,
    in_len: usize,
    out_len: usize,
    mu: f64,
    master_seed_hex: String,
}

impl TryFrom<BotUowhfSpecDoc> for BotUowhfSpec {
    type Error = Error;

    fn try_from(d: BotUowhfSpecDoc) -> Result<Self> {
        let seed = hex::decode(&d.master_seed_hex).map_err(|e| Error::Decode(e.to_string()))?;
        BotUowhfSpec::new(d.key_len, d.in_len, d.out_len, d.mu, seed)
    }
}

impl From<BotUowhfSpec> for BotUowhfSpecDoc {
    fn from(s: BotUowhfSpec) -> Self {
        Self {
            key_len: s.key_len,
            in_len: s.in_len,
            out_len: s.out_len,
            mu: s.mu,
            master_seed_hex: hex::encode(&s.master_seed),
        }
    }
}

impl BotUowhfSpec {
    pub fn new(key_len: usize, in_len: usize, out_len: usize, mu: f64, master_seed: Vec<u8>) -> Result<Self> {
        if key_len == 0 || out_len == 0 {
            return Err(Error::InvalidParameter("key_len and out_len must be positive".into()));
        }
        if in_len <= out_len {
            return Err(Error::InvalidParameter(format!(
                "hash must compress: in_len {in_len} <= out_len {out_len}"
            )));
        }
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::InvalidParameter(format!("mu = {mu} outside [0, 1)")));
        }
        let expander = Expander::new(CONTEXT, &master_seed);
        Ok(Self {
            key_len,
            in_len,
            out_len,
            mu,
            master_seed,
            expander,
        })
    }

    pub fn key_len(&self) -> usize {
        self.key_len
    }

    pub fn in_len(&self) -> usize {
        self.in_len
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn master_seed(&self) -> &[u8] {
        &self.master_seed
    }

    fn check(&self, k: &Bits, x: &Bits) -> Result<()> {
        check_len(self.key_len, k.len())?;
        check_len(self.in_len, x.len())
    }

    fn lookup(&self, k: &Bits, x: &Bits) -> (bool, Bits) {
        let ([class_word, _], y) = self.expander.words_and_bits(DOMAIN_HASH, &[k, x], self.out_len);
        (unit_interval(class_word) >= self.mu, y)
    }

    /// Whether `x` is in the good set of `H(k, ·)`.
    pub fn is_good_input(&self, k: &Bits, x: &Bits) -> Result<bool> {
        self.check(k, x)?;
        Ok(self.lookup(k, x).0)
    }

    pub fn canonical(&self, k: &Bits, x: &Bits) -> Result<Bits> {
        self.check(k, x)?;
        Ok(self.lookup(k, x).1)
    }

    pub fn eval(&self, k: &Bits, x: &Bits, tape: &mut RandomTape) -> Result<BotValue> {
        self.check(k, x)?;
        let (good, y) = self.lookup(k, x);
        if !good && tape.bit() {
            return Ok(BotValue::Bot);
        }
        Ok(BotValue::Bits(y))
    }

    /// `H(k, ·)` as a standalone evaluator.
    pub fn keyed(&self, k: Bits) -> Result<KeyedUowhf<'_>> {
        check_len(self.key_len, k.len())?;
        Ok(KeyedUowhf { spec: self, key: k })
    }
}

/// A randomized map on fixed-length inputs with abort.
pub trait BotEvaluator {
    fn in_len(&self) -> usize;
    fn eval(&self, x: &Bits, tape: &mut RandomTape) -> Result<BotValue>;
}

#[derive(Clone, Debug)]
pub struct KeyedUowhf<'a> {
    spec: &'a BotUowhfSpec,
    key: Bits,
}

impl KeyedUowhf<'_> {
    pub fn key(&self) -> &Bits {
        &self.key
    }
}

impl BotEvaluator for KeyedUowhf<'_> {
    fn in_len(&self) -> usize {
        self.spec.in_len
    }

    fn eval(&self, x: &Bits, tape: &mut RandomTape) -> Result<BotValue> {
        self.spec.eval(&self.key, x, tape)
    }
}

/// `F_y(x) = F(y ⊕ x)`.
#[derive(Clone, Debug)]
pub struct Shifted<E> {
    base: E,
    y: Bits,
}

pub fn shift_family<E: BotEvaluator>(base: E, y: Bits) -> Result<Shifted<E>> {
    check_len(base.in_len(), y.len())?;
    Ok(Shifted { base, y })
}

impl<E> Shifted<E> {
    pub fn shift(&self) -> &Bits {
        &self.y
    }
}

impl<E: BotEvaluator> BotEvaluator for Shifted<E> {
    fn in_len(&self) -> usize {
        self.base.in_len()
    }

    fn eval(&self, x: &Bits, tape: &mut RandomTape) -> Result<BotValue> {
        self.base.eval(&self.y.xor(x)?, tape)
    }
}

impl<E: BotEvaluator + ?Sized> BotEvaluator for &E {
    fn in_len(&self) -> usize {
        (**self).in_len()
    }

    fn eval(&self, x: &Bits, tape: &mut RandomTape) -> Result<BotValue> {
        (**self).eval(x, tape)
    }
}
