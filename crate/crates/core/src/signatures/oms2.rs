//! Hash-then-sign: a one-message scheme for long messages. The message is
//! compressed with a fresh hash key `k`, and the inner scheme signs
//! `k ‖ H(k, m)`.

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::bot_core::BotValue;
use crate::bot_hash::BotUowhfSpec;
use crate::codec::{Decode, Encode, Reader, Writer};
use crate::error::{check_len, Error, Result};
use crate::signatures::oms::{OmsScheme, OmsSignature, OmsSigningKey, OmsVerifyingKey};
use crate::signatures::{SignatureScheme, Verdict};
use crate::tape::{CoinSource, RandomTape};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Oms2Scheme {
    outer: BotUowhfSpec,
    inner: OmsScheme,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Oms2SigningKey {
    pub inner: OmsSigningKey,
    pub k: Bits,
}

pub type Oms2VerifyingKey = OmsVerifyingKey;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Oms2Signature {
    pub k: Bits,
    pub inner: OmsSignature,
}

impl Oms2Scheme {
    /// `outer` maps `q`-bit messages to `λ` bits under `ℓ`-bit keys;
    /// `inner_hash` is the 2:1 hash of the inner scheme, which signs
    /// `ℓ + λ` bits. Requires `ℓ + λ < q / 2`.
    pub fn new(outer: BotUowhfSpec, inner_hash: BotUowhfSpec) -> Result<Self> {
        let inner_len = outer.key_len() + outer.out_len();
        if 2 * inner_len >= outer.in_len() {
            return Err(Error::PreconditionViolated(format!(
                "need key_len + out_len = {inner_len} < message_len / 2 = {}",
                outer.in_len() as f64 / 2.0
            )));
        }
        let inner = OmsScheme::new(inner_hash, inner_len)?;
        Ok(Self { outer, inner })
    }

    pub fn outer(&self) -> &BotUowhfSpec {
        &self.outer
    }

    pub fn inner(&self) -> &OmsScheme {
        &self.inner
    }

    pub fn coin_len(&self) -> usize {
        self.inner.coin_len() + self.outer.key_len()
    }

    pub fn vk_bit_len(&self) -> usize {
        self.inner.vk_bit_len()
    }

    pub fn keygen_from_coins(
        &self,
        coins: &mut impl CoinSource,
        tape: &mut RandomTape,
    ) -> Result<(Oms2SigningKey, Oms2VerifyingKey)> {
        let (inner, vk) = self.inner.keygen_from_coins(coins, tape)?;
        let k = coins.take(self.outer.key_len())?;
        Ok((Oms2SigningKey { inner, k }, vk))
    }
}

impl SignatureScheme for Oms2Scheme {
    type SigningKey = Oms2SigningKey;
    type VerifyingKey = Oms2VerifyingKey;
    type Signature = Oms2Signature;

    fn message_len(&self) -> usize {
        self.outer.in_len()
    }

    fn keygen(&self, tape: &mut RandomTape) -> Result<(Oms2SigningKey, Oms2VerifyingKey)> {
        let mut coins = tape.split();
        self.keygen_from_coins(&mut coins, tape)
    }

    fn sign(&self, sk: &mut Oms2SigningKey, m: &Bits, tape: &mut RandomTape) -> Result<Option<Oms2Signature>> {
        check_len(self.outer.in_len(), m.len())?;
        let y = match self.outer.eval(&sk.k, m, tape)? {
            BotValue::Bot => return Ok(None),
            BotValue::Bits(y) => y,
        };
        let inner = self.inner.sign(&mut sk.inner, &sk.k.concat(&y), tape)?;
        Ok(inner.map(|inner| Oms2Signature { k: sk.k.clone(), inner }))
    }

    fn verify(
        &self,
        vk: &Oms2VerifyingKey,
        m: &Bits,
        sig: Option<&Oms2Signature>,
        tape: &mut RandomTape,
    ) -> Result<Verdict> {
        check_len(self.outer.in_len(), m.len())?;
        let Some(sig) = sig else {
            return Ok(Verdict::Bot);
        };
        if sig.k.len() != self.outer.key_len() {
            return Ok(Verdict::Reject);
        }
        match self.outer.eval(&sig.k, m, tape)? {
            BotValue::Bot => Ok(Verdict::Bot),
            BotValue::Bits(y) => self.inner.verify(vk, &sig.k.concat(&y), Some(&sig.inner), tape),
        }
    }

    fn random_signature(&self, tape: &mut RandomTape) -> Oms2Signature {
        Oms2Signature {
            k: tape.bits(self.outer.key_len()),
            inner: self.inner.random_signature(tape),
        }
    }
}

impl Encode for Oms2SigningKey {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.inner);
        w.put(&self.k);
    }
}

impl Decode for Oms2SigningKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self {
            inner: r.get()?,
            k: r.get()?,
        })
    }
}

impl Encode for Oms2Signature {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.k);
        w.put(&self.inner);
    }
}

impl Decode for Oms2Signature {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self {
            k: r.get()?,
            inner: r.get()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::round_trip;

    fn scheme(mu: f64, q: usize) -> Oms2Scheme {
        let outer = BotUowhfSpec::new(8, q, 16, mu, b"oms2-outer".to_vec()).unwrap();
        let inner = BotUowhfSpec::new(8, 32, 16, mu, b"oms2-inner".to_vec()).unwrap();
        Oms2Scheme::new(outer, inner).unwrap()
    }

    #[test]
    fn length_constraint() {
        let inner = BotUowhfSpec::new(8, 32, 16, 0.0, vec![]).unwrap();
        let outer = BotUowhfSpec::new(8, 48, 16, 0.0, vec![]).unwrap();
        assert!(matches!(
            Oms2Scheme::new(outer, inner.clone()),
            Err(Error::PreconditionViolated(_))
        ));
        let outer = BotUowhfSpec::new(8, 49, 16, 0.0, vec![]).unwrap();
        assert!(Oms2Scheme::new(outer, inner).is_ok());
    }

    #[test]
    fn noiseless_round_trips() {
        let s = scheme(0.0, 64);
        let mut tape = RandomTape::from_seed(1);
        for _ in 0..1000 {
            let m = tape.bits(64);
            assert_eq!(round_trip(&s, &m, &mut tape).unwrap(), Verdict::Accept);
        }
    }

    #[test]
    fn hash_abort_aborts_the_signature() {
        let s = scheme(0.99, 64);
        let mut tape = RandomTape::from_seed(2);
        let (mut sk, vk) = s.keygen(&mut tape).unwrap();
        let mut aborted = 0;
        for _ in 0..200 {
            let m = tape.bits(64);
            match s.sign(&mut sk, &m, &mut tape).unwrap() {
                None => {
                    aborted += 1;
                    assert_eq!(s.verify(&vk, &m, None, &mut tape).unwrap(), Verdict::Bot);
                }
                Some(_) => {}
            }
        }
        assert!(aborted > 50);
    }

    #[test]
    fn other_message_rejects() {
        let s = scheme(0.0, 64);
        let mut tape = RandomTape::from_seed(3);
        let (mut sk, vk) = s.keygen(&mut tape).unwrap();
        let m = tape.bits(64);
        let sig = s.sign(&mut sk, &m, &mut tape).unwrap().unwrap();
        for _ in 0..200 {
            let other = tape.bits(64);
            assert_eq!(s.verify(&vk, &other, Some(&sig), &mut tape).unwrap(), Verdict::Reject);
        }
        let mut bad = sig.clone();
        bad.k = Bits::zeros(7);
        assert_eq!(s.verify(&vk, &m, Some(&bad), &mut tape).unwrap(), Verdict::Reject);
    }

    #[test]
    fn coins_determine_keys() {
        let s = scheme(0.0, 64);
        assert_eq!(s.coin_len(), 2 * 24 * (8 + 32) + 8);
        let coins = RandomTape::from_seed(4).bits(s.coin_len());
        let mut r1 = crate::tape::CoinReader::new(&coins);
        let a = s.keygen_from_coins(&mut r1, &mut RandomTape::from_seed(5)).unwrap();
        r1.finish().unwrap();
        let b = s
            .keygen_from_coins(&mut crate::tape::CoinReader::new(&coins), &mut RandomTape::from_seed(6))
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1.to_bits().unwrap().len(), s.vk_bit_len());
    }

    #[test]
    fn codec_round_trip() {
        let s = scheme(0.0, 64);
        let mut tape = RandomTape::from_seed(7);
        let (mut sk, _) = s.keygen(&mut tape).unwrap();
        let sig = s.sign(&mut sk, &tape.bits(64), &mut tape).unwrap().unwrap();
        assert_eq!(Oms2SigningKey::from_bytes(&sk.to_bytes()).unwrap(), sk);
        assert_eq!(Oms2Signature::from_bytes(&sig.to_bytes()).unwrap(), sig);
    }
}
