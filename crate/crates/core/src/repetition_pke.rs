//! Parallel repetition for bit encryption whose decryption may abort.
//!
//! The base scheme is a classical stand-in: a keyed-hash one-time pad on a
//! single bit, where decryption independently returns ⊥ with probability
//! `delta`. The same key both encrypts and decrypts; the lifter never looks
//! inside keys, so only its combining rule and error arithmetic matter.

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{check_len, Error, Result};
use crate::expander::Expander;
use crate::tape::RandomTape;

const CONTEXT: &str = "botsig 2024 mock bit encryption";
const DOMAIN_PAD: u8 = 0;
const NONCE_LEN: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MockBasePkeDoc", into = "MockBasePkeDoc")]
pub struct MockBasePke {
    key_len: usize,
    delta: f64,
    master_seed: Vec<u8>,
    expander: Expander,
}

#[derive(Serialize, Deserialize)]
struct MockBasePkeDoc {
    key_len: usize,
    delta: f64,
    master_seed_hex: String,
}

impl TryFrom<MockBasePkeDoc> for MockBasePke {
    type Error = Error;

    fn try_from(d: MockBasePkeDoc) -> Result<Self> {
        let seed = hex::decode(&d.master_seed_hex).map_err(|e| Error::Decode(e.to_string()))?;
        MockBasePke::new(d.key_len, d.delta, seed)
    }
}

impl From<MockBasePke> for MockBasePkeDoc {
    fn from(s: MockBasePke) -> Self {
        Self {
            key_len: s.key_len,
            delta: s.delta,
            master_seed_hex: hex::encode(&s.master_seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    pub nonce: Bits,
    pub body: bool,
}

impl MockBasePke {
    pub fn new(key_len: usize, delta: f64, master_seed: Vec<u8>) -> Result<Self> {
        if key_len == 0 {
            return Err(Error::InvalidParameter("key_len must be positive".into()));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!("delta = {delta} outside [0, 1)")));
        }
        let expander = Expander::new(CONTEXT, &master_seed);
        Ok(Self {
            key_len,
            delta,
            master_seed,
            expander,
        })
    }

    pub fn key_len(&self) -> usize {
        self.key_len
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn keygen(&self, tape: &mut RandomTape) -> Bits {
        tape.bits(self.key_len)
    }

    fn pad(&self, key: &Bits, nonce: &Bits) -> bool {
        self.expander.bits(DOMAIN_PAD, &[key, nonce], 1).get(0)
    }

    pub fn encrypt(&self, key: &Bits, bit: bool, tape: &mut RandomTape) -> Result<Ciphertext> {
        check_len(self.key_len, key.len())?;
        let nonce = tape.bits(NONCE_LEN);
        let body = bit ^ self.pad(key, &nonce);
        Ok(Ciphertext { nonce, body })
    }

    /// `None` is ⊥.
    pub fn decrypt(&self, key: &Bits, ct: &Ciphertext, tape: &mut RandomTape) -> Result<Option<bool>> {
        check_len(self.key_len, key.len())?;
        check_len(NONCE_LEN, ct.nonce.len())?;
        if tape.bernoulli(self.delta) {
            return Ok(None);
        }
        Ok(Some(ct.body ^ self.pad(key, &ct.nonce)))
    }
}

/// Encrypts `bit` independently under every key.
pub fn rep_encrypt(base: &MockBasePke, keys: &[Bits], bit: bool, tape: &mut RandomTape) -> Result<Vec<Ciphertext>> {
    if keys.is_empty() {
        return Err(Error::EmptyInput);
    }
    keys.iter().map(|k| base.encrypt(k, bit, tape)).collect()
}

/// Decrypts every component and combines them with [`combine`].
pub fn rep_decrypt(
    base: &MockBasePke,
    keys: &[Bits],
    cts: &[Ciphertext],
    tape: &mut RandomTape,
) -> Result<Option<bool>> {
    check_len(keys.len(), cts.len())?;
    let results = keys
        .iter()
        .zip(cts)
        .map(|(k, c)| base.decrypt(k, c, tape))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine(&results))
}

/// ⊥ if every component aborted or two non-⊥ components disagree;
/// otherwise the bit at the first non-⊥ position.
pub fn combine(results: &[Option<bool>]) -> Option<bool> {
    let mut decided = results.iter().flatten();
    let first = *decided.next()?;
    decided.all(|&b| b == first).then_some(first)
}

/// Probability that every one of `q` components aborts.
pub fn lifted_failure_bound(delta: f64, q: usize) -> f64 {
    delta.powi(q as i32)
}
