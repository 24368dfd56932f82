//! Simulated pseudodeterministic PRG.
//!
//! A deterministic expander keyed by a master seed provides one canonical
//! output per key. On top of it two kinds of noise are injected:
//!
//! * a `mu` fraction of keys is classified bad; a bad key returns one of two
//!   fixed candidates (the canonical output and a distinct alternative) with
//!   probability 1/2 each, so no single value reaches 60% in a vote;
//! * a good key returns its canonical output except with probability `nu`,
//!   where it returns the canonical output with one key-derived bit flipped.
//!
//! Every key therefore has a support of at most two points.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{check_len, Error, Result};
use crate::expander::{unit_interval, Expander};
use crate::tape::RandomTape;

const CONTEXT: &str = "botsig 2024 pdprg-sim expander";
/// Class word, flip word, then the canonical output.
const DOMAIN_OUT: u8 = 1;
const DOMAIN_ALT: u8 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PdPrgSpecDoc", into = "PdPrgSpecDoc")]
pub struct PdPrgSpec {
    key_len: usize,
    out_len: usize,
    mu: f64,
    nu: f64,
    master_seed: Vec<u8>,
    expander: Expander,
}

/// JSON shape of [`PdPrgSpec`].
#[derive(Serialize, Deserialize)]
struct PdPrgSpecDoc {
    key_len: usize,
    out_len: usize,
    mu: f64,
    nu: f64,
    master_seed_hex: String,
}

impl TryFrom<PdPrgSpecDoc> for PdPrgSpec {
    type Error = Error;

    fn try_from(d: PdPrgSpecDoc) -> Result<Self> {
        let seed = hex::decode(&d.master_seed_hex).map_err(|e| Error::Decode(e.to_string()))?;
        PdPrgSpec::new(d.key_len, d.out_len, d.mu, d.nu, seed)
    }
}

impl From<PdPrgSpec> for PdPrgSpecDoc {
    fn from(s: PdPrgSpec) -> Self {
        Self {
            key_len: s.key_len,
            out_len: s.out_len,
            mu: s.mu,
            nu: s.nu,
            master_seed_hex: hex::encode(&s.master_seed),
        }
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..0.5).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {p} outside [0, 0.5)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KeyClass {
    Good,
    Bad,
}

/// Which point of a key's two-point support an evaluation landed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Canonical,
    /// Good key, canonical output with the designated bit flipped.
    Perturbed,
    /// Bad key, the second candidate.
    Alternative,
}

/// Everything an evaluation needs about one key, computed once.
#[derive(Clone, Debug)]
pub struct PreparedKey {
    class: KeyClass,
    canonical: Bits,
    /// `None` when the flipped bit lies outside the prepared window.
    flip_pos: Option<usize>,
    alternative: Option<Bits>,
    nu: f64,
}

impl PreparedKey {
    pub fn class(&self) -> KeyClass {
        self.class
    }

    pub fn canonical(&self) -> &Bits {
        &self.canonical
    }

    /// Draws which support point one evaluation returns.
    pub fn sample(&self, tape: &mut RandomTape) -> Outcome {
        match self.class {
            KeyClass::Good if tape.bernoulli(self.nu) => Outcome::Perturbed,
            KeyClass::Good => Outcome::Canonical,
            KeyClass::Bad if tape.bit() => Outcome::Alternative,
            KeyClass::Bad => Outcome::Canonical,
        }
    }

    /// How many of `reps` independent evaluations land on each outcome,
    /// indexed `[Canonical, Perturbed, Alternative]`. Same distribution as
    /// `reps` calls to [`sample`](Self::sample), at the cost of one draw.
    pub fn tally(&self, reps: usize, tape: &mut RandomTape) -> [usize; 3] {
        match self.class {
            KeyClass::Good => {
                let flipped = tape.binomial(reps, self.nu);
                [reps - flipped, flipped, 0]
            }
            KeyClass::Bad => {
                let alt = tape.binomial(reps, 0.5);
                [reps - alt, 0, alt]
            }
        }
    }

    pub fn materialize(&self, outcome: Outcome) -> Bits {
        match outcome {
            Outcome::Canonical => self.canonical.clone(),
            Outcome::Perturbed => {
                let mut y = self.canonical.clone();
                if let Some(pos) = self.flip_pos {
                    y.flip(pos);
                }
                y
            }
            Outcome::Alternative => self
                .alternative
                .clone()
                .expect("alternative outcome drawn for a good key"),
        }
    }

    /// The (at most two) values an evaluation can return, restricted to the
    /// prepared window.
    pub fn support(&self) -> Vec<Bits> {
        let second = match self.class {
            KeyClass::Good if self.nu > 0.0 => Outcome::Perturbed,
            KeyClass::Good => return vec![self.canonical.clone()],
            KeyClass::Bad => Outcome::Alternative,
        };
        vec![self.canonical.clone(), self.materialize(second)]
    }
}

impl PdPrgSpec {
    pub fn new(key_len: usize, out_len: usize, mu: f64, nu: f64, master_seed: Vec<u8>) -> Result<Self> {
        if key_len == 0 {
            return Err(Error::InvalidParameter("key_len must be positive".into()));
        }
        if out_len <= key_len {
            return Err(Error::InvalidParameter(format!(
                "out_len {out_len} must exceed key_len {key_len}"
            )));
        }
        check_probability("mu", mu)?;
        check_probability("nu", nu)?;
        let expander = Expander::new(CONTEXT, &master_seed);
        Ok(Self {
            key_len,
            out_len,
            mu,
            nu,
            master_seed,
            expander,
        })
    }

    pub fn key_len(&self) -> usize {
        self.key_len
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn master_seed(&self) -> &[u8] {
        &self.master_seed
    }

    fn meta(&self, [class_word, flip_word]: [u64; 2]) -> (KeyClass, usize) {
        let class = if unit_interval(class_word) < self.mu {
            KeyClass::Bad
        } else {
            KeyClass::Good
        };
        (class, (flip_word % self.out_len as u64) as usize)
    }

    pub fn classify_key(&self, key: &Bits) -> Result<KeyClass> {
        check_len(self.key_len, key.len())?;
        Ok(self.meta(self.expander.words(DOMAIN_OUT, &[key])).0)
    }

    pub fn canonical_output(&self, key: &Bits) -> Result<Bits> {
        check_len(self.key_len, key.len())?;
        Ok(self.expander.words_and_bits(DOMAIN_OUT, &[key], self.out_len).1)
    }

    pub fn prepare(&self, key: &Bits) -> Result<PreparedKey> {
        self.prepare_window(key, 0..self.out_len)
    }

    /// Like [`prepare`](Self::prepare), but every value it materializes is
    /// only output bits `range`. Outcome draws are unaffected.
    pub fn prepare_window(&self, key: &Bits, range: Range<usize>) -> Result<PreparedKey> {
        check_len(self.key_len, key.len())?;
        if range.start > range.end || range.end > self.out_len {
            return Err(Error::InvalidParameter(format!(
                "window {range:?} outside {} output bits",
                self.out_len
            )));
        }
        let (words, canonical) = self.expander.words_and_window(DOMAIN_OUT, &[key], range.clone());
        let (class, flip_pos) = self.meta(words);
        let alternative = match class {
            KeyClass::Good => None,
            KeyClass::Bad => {
                let mut mask = self.expander.window(DOMAIN_ALT, &[key], range.clone());
                // The full mask is never all-zero; bit 0 is forced on in
                // that (astronomically unlikely) case.
                if range.contains(&0)
                    && mask.is_zero()
                    && self.expander.bits(DOMAIN_ALT, &[key], self.out_len).is_zero()
                {
                    mask.set(0, true);
                }
                Some(canonical.xor(&mask)?)
            }
        };
        Ok(PreparedKey {
            class,
            canonical,
            flip_pos: range.contains(&flip_pos).then(|| flip_pos - range.start),
            alternative,
            nu: self.nu,
        })
    }

    /// One noisy evaluation of the generator.
    pub fn eval(&self, key: &Bits, tape: &mut RandomTape) -> Result<Bits> {
        let prepared = self.prepare(key)?;
        let outcome = prepared.sample(tape);
        Ok(prepared.materialize(outcome))
    }
}
