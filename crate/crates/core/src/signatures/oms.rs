//! Lamport-style one-message signatures over a 2:1 compressing ⊥-UOWHF.

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::bot_core::BotValue;
use crate::bot_hash::BotUowhfSpec;
use crate::codec::{Decode, Encode, Reader, Writer};
use crate::error::{check_len, Error, Result};
use crate::signatures::{SignatureScheme, Verdict};
use crate::tape::{CoinSource, RandomTape};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmsScheme {
    hash: BotUowhfSpec,
    q: usize,
}

/// Preimages `x[j][b]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmsSigningKey {
    pub preimages: Vec<[Bits; 2]>,
}

/// Hash keys `k[j][b]` and images `y[j][b]`; an image may be ⊥.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmsVerifyingKey {
    pub keys: Vec<[Bits; 2]>,
    pub images: Vec<[BotValue; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmsSignature {
    pub preimages: Vec<Bits>,
}

impl OmsScheme {
    pub fn new(hash: BotUowhfSpec, q: usize) -> Result<Self> {
        if hash.in_len() != 2 * hash.out_len() {
            return Err(Error::InvalidParameter(format!(
                "one-message scheme needs a 2:1 hash, got {} -> {}",
                hash.in_len(),
                hash.out_len()
            )));
        }
        if q == 0 {
            return Err(Error::InvalidParameter("message length must be positive".into()));
        }
        Ok(Self { hash, q })
    }

    pub fn hash(&self) -> &BotUowhfSpec {
        &self.hash
    }

    /// Number of coin tosses key generation consumes.
    pub fn coin_len(&self) -> usize {
        2 * self.q * (self.hash.key_len() + self.hash.in_len())
    }

    /// Length of [`OmsVerifyingKey::to_bits`].
    pub fn vk_bit_len(&self) -> usize {
        2 * self.q * (self.hash.key_len() + self.hash.out_len())
    }

    fn entry(&self, coins: &mut impl CoinSource, tape: &mut RandomTape) -> Result<(Bits, Bits, BotValue)> {
        let k = coins.take(self.hash.key_len())?;
        let x = coins.take(self.hash.in_len())?;
        let y = self.hash.eval(&k, &x, tape)?;
        Ok((k, x, y))
    }

    /// Key generation with the sampling decisions read from `coins`; the
    /// hash evaluations still draw their noise from `tape`.
    pub fn keygen_from_coins(
        &self,
        coins: &mut impl CoinSource,
        tape: &mut RandomTape,
    ) -> Result<(OmsSigningKey, OmsVerifyingKey)> {
        let mut preimages = Vec::with_capacity(self.q);
        let mut keys = Vec::with_capacity(self.q);
        let mut images = Vec::with_capacity(self.q);
        for _ in 0..self.q {
            let (k0, x0, y0) = self.entry(coins, tape)?;
            let (k1, x1, y1) = self.entry(coins, tape)?;
            preimages.push([x0, x1]);
            keys.push([k0, k1]);
            images.push([y0, y1]);
        }
        Ok((OmsSigningKey { preimages }, OmsVerifyingKey { keys, images }))
    }
}

impl OmsVerifyingKey {
    /// `k[j][b] ‖ y[j][b]` over all entries, or `None` if an image is ⊥.
    pub fn to_bits(&self) -> Option<Bits> {
        let mut out = Bits::empty();
        for (keys, images) in self.keys.iter().zip(&self.images) {
            for b in 0..2 {
                out = out.concat(&keys[b]).concat(images[b].bits()?);
            }
        }
        Some(out)
    }
}

impl SignatureScheme for OmsScheme {
    type SigningKey = OmsSigningKey;
    type VerifyingKey = OmsVerifyingKey;
    type Signature = OmsSignature;

    fn message_len(&self) -> usize {
        self.q
    }

    fn keygen(&self, tape: &mut RandomTape) -> Result<(OmsSigningKey, OmsVerifyingKey)> {
        let mut coins = tape.split();
        self.keygen_from_coins(&mut coins, tape)
    }

    fn sign(&self, sk: &mut OmsSigningKey, m: &Bits, _tape: &mut RandomTape) -> Result<Option<OmsSignature>> {
        check_len(self.q, m.len())?;
        check_len(self.q, sk.preimages.len())?;
        let preimages = m
            .iter()
            .zip(&sk.preimages)
            .map(|(bit, pair)| pair[bit as usize].clone())
            .collect();
        Ok(Some(OmsSignature { preimages }))
    }

    fn verify(
        &self,
        vk: &OmsVerifyingKey,
        m: &Bits,
        sig: Option<&OmsSignature>,
        tape: &mut RandomTape,
    ) -> Result<Verdict> {
        check_len(self.q, m.len())?;
        let Some(sig) = sig else {
            return Ok(Verdict::Bot);
        };
        if sig.preimages.len() != self.q || vk.keys.len() != self.q || vk.images.len() != self.q {
            return Ok(Verdict::Reject);
        }
        for (j, bit) in m.iter().enumerate() {
            let b = bit as usize;
            let (k, x) = (&vk.keys[j][b], &sig.preimages[j]);
            if k.len() != self.hash.key_len() || x.len() != self.hash.in_len() {
                return Ok(Verdict::Reject);
            }
            let expected = match &vk.images[j][b] {
                BotValue::Bot => return Ok(Verdict::Reject),
                BotValue::Bits(y) => y,
            };
            match self.hash.eval(k, x, tape)? {
                BotValue::Bits(y) if &y == expected => {}
                _ => return Ok(Verdict::Reject),
            }
        }
        Ok(Verdict::Accept)
    }

    fn random_signature(&self, tape: &mut RandomTape) -> OmsSignature {
        OmsSignature {
            preimages: (0..self.q).map(|_| tape.bits(self.hash.in_len())).collect(),
        }
    }
}

impl Encode for OmsSigningKey {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.preimages);
    }
}

impl Decode for OmsSigningKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self { preimages: r.get()? })
    }
}

impl Encode for OmsVerifyingKey {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.keys);
        w.put(&self.images);
    }
}

impl Decode for OmsVerifyingKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let keys: Vec<[Bits; 2]> = r.get()?;
        let images: Vec<[BotValue; 2]> = r.get()?;
        if keys.len() != images.len() {
            return Err(Error::Decode("key and image tables differ in size".into()));
        }
        Ok(Self { keys, images })
    }
}

impl Encode for OmsSignature {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.preimages);
    }
}

impl Decode for OmsSignature {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self { preimages: r.get()? })
    }
}
