//! Correctness amplification over any signature scheme.
//!
//! [`AmplifiedSuf`] signs under `3p` independent keys and keeps the first
//! signature that did not abort, tagged with its 1-based index; this
//! preserves strong unforgeability. [`AmplifiedUf`] signs under `reps` keys
//! and ships every component; verification accepts if any component does.

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::signatures::{SignatureScheme, Verdict};
use crate::tape::RandomTape;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplifiedSuf<S> {
    base: S,
    copies: usize,
}

/// `(j, σ_j)` with `j` counted from 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedSignature<T> {
    pub index: usize,
    pub sig: T,
}

impl<S: SignatureScheme> AmplifiedSuf<S> {
    /// `3p` copies of `base`.
    pub fn new(base: S, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParameter("p must be positive".into()));
        }
        Ok(Self { base, copies: 3 * p })
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn copies(&self) -> usize {
        self.copies
    }
}

impl<S: SignatureScheme> SignatureScheme for AmplifiedSuf<S> {
    type SigningKey = Vec<S::SigningKey>;
    type VerifyingKey = Vec<S::VerifyingKey>;
    type Signature = IndexedSignature<S::Signature>;

    fn message_len(&self) -> usize {
        self.base.message_len()
    }

    fn keygen(&self, tape: &mut RandomTape) -> Result<(Self::SigningKey, Self::VerifyingKey)> {
        Ok((0..self.copies)
            .map(|_| self.base.keygen(tape))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip())
    }

    fn sign(&self, sk: &mut Self::SigningKey, m: &Bits, tape: &mut RandomTape) -> Result<Option<Self::Signature>> {
        if sk.len() != self.copies {
            return Err(Error::InvalidParameter(format!(
                "expected {} signing keys, got {}",
                self.copies,
                sk.len()
            )));
        }
        let mut first = None;
        for (i, k) in sk.iter_mut().enumerate() {
            let sig = self.base.sign(k, m, tape)?;
            if first.is_none() {
                first = sig.map(|sig| IndexedSignature { index: i + 1, sig });
            }
        }
        Ok(first)
    }

    fn verify(
        &self,
        vk: &Self::VerifyingKey,
        m: &Bits,
        sig: Option<&Self::Signature>,
        tape: &mut RandomTape,
    ) -> Result<Verdict> {
        let Some(sig) = sig else {
            return Ok(Verdict::Bot);
        };
        if vk.len() != self.copies || sig.index == 0 || sig.index > self.copies {
            return Ok(Verdict::Reject);
        }
        self.base.verify(&vk[sig.index - 1], m, Some(&sig.sig), tape)
    }

    fn random_signature(&self, tape: &mut RandomTape) -> Self::Signature {
        IndexedSignature {
            index: 1 + tape.below(self.copies),
            sig: self.base.random_signature(tape),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplifiedUf<S> {
    base: S,
    reps: usize,
}

impl<S: SignatureScheme> AmplifiedUf<S> {
    pub fn new(base: S, reps: usize) -> Result<Self> {
        if reps == 0 {
            return Err(Error::InvalidParameter("reps must be positive".into()));
        }
        Ok(Self { base, reps })
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn reps(&self) -> usize {
        self.reps
    }
}

impl<S: SignatureScheme> SignatureScheme for AmplifiedUf<S> {
    type SigningKey = Vec<S::SigningKey>;
    type VerifyingKey = Vec<S::VerifyingKey>;
    type Signature = Vec<Option<S::Signature>>;

    fn message_len(&self) -> usize {
        self.base.message_len()
    }

    fn keygen(&self, tape: &mut RandomTape) -> Result<(Self::SigningKey, Self::VerifyingKey)> {
        Ok((0..self.reps)
            .map(|_| self.base.keygen(tape))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip())
    }

    fn sign(&self, sk: &mut Self::SigningKey, m: &Bits, tape: &mut RandomTape) -> Result<Option<Self::Signature>> {
        if sk.len() != self.reps {
            return Err(Error::InvalidParameter(format!(
                "expected {} signing keys, got {}",
                self.reps,
                sk.len()
            )));
        }
        let sigs = sk
            .iter_mut()
            .map(|k| self.base.sign(k, m, tape))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(sigs))
    }

    fn verify(
        &self,
        vk: &Self::VerifyingKey,
        m: &Bits,
        sig: Option<&Self::Signature>,
        tape: &mut RandomTape,
    ) -> Result<Verdict> {
        let Some(sigs) = sig else {
            return Ok(Verdict::Bot);
        };
        if vk.len() != self.reps || sigs.len() != self.reps {
            return Ok(Verdict::Reject);
        }
        let mut all_bot = true;
        for (k, s) in vk.iter().zip(sigs) {
            match self.base.verify(k, m, s.as_ref(), tape)? {
                Verdict::Accept => return Ok(Verdict::Accept),
                Verdict::Reject => all_bot = false,
                Verdict::Bot => {}
            }
        }
        Ok(if all_bot { Verdict::Bot } else { Verdict::Reject })
    }

    fn random_signature(&self, tape: &mut RandomTape) -> Self::Signature {
        (0..self.reps).map(|_| Some(self.base.random_signature(tape))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bot_hash::BotUowhfSpec;
    use crate::signatures::oms::OmsScheme;
    use crate::signatures::oms2::Oms2Scheme;

    fn oms(mu: f64) -> OmsScheme {
        OmsScheme::new(BotUowhfSpec::new(8, 32, 16, mu, b"amp-oms".to_vec()).unwrap(), 8).unwrap()
    }

    fn oms2(mu: f64) -> Oms2Scheme {
        let outer = BotUowhfSpec::new(8, 64, 16, mu, b"amp-outer".to_vec()).unwrap();
        let inner = BotUowhfSpec::new(8, 32, 16, 0.0, b"amp-inner".to_vec()).unwrap();
        Oms2Scheme::new(outer, inner).unwrap()
    }

    #[test]
    fn suf_noiseless_uses_first_copy() {
        let s = AmplifiedSuf::new(oms(0.0), 2).unwrap();
        assert_eq!(s.copies(), 6);
        let mut tape = RandomTape::from_seed(1);
        let (mut sk, vk) = s.keygen(&mut tape).unwrap();
        for _ in 0..100 {
            let m = tape.bits(8);
            let sig = s.sign(&mut sk, &m, &mut tape).unwrap().unwrap();
            assert_eq!(sig.index, 1);
            assert_eq!(s.verify(&vk, &m, Some(&sig), &mut tape).unwrap(), Verdict::Accept);
        }
    }

    #[test]
    fn suf_all_bot_is_bot() {
        let s = AmplifiedSuf::new(oms2(0.999_999), 1).unwrap();
        let mut tape = RandomTape::from_seed(2);
        let (mut sk, vk) = s.keygen(&mut tape).unwrap();
        let m = tape.bits(64);
        let mut bots = 0;
        for _ in 0..50 {
            let sig = s.sign(&mut sk, &m, &mut tape).unwrap();
            if sig.is_none() {
                bots += 1;
                assert_eq!(s.verify(&vk, &m, None, &mut tape).unwrap(), Verdict::Bot);
            }
        }
        // All three copies abort with probability 1/8 per attempt.
        assert!(bots > 0);
    }

    #[test]
    fn suf_picks_the_first_non_bot_index() {
        let s = AmplifiedSuf::new(oms2(0.999_999), 3).unwrap();
        let mut tape = RandomTape::from_seed(3);
        let (mut sk, vk) = s.keygen(&mut tape).unwrap();
        for _ in 0..100 {
            let m = tape.bits(64);
            let mut probe = tape.clone();
            let expected = sk
                .iter_mut()
                .map(|k| s.base().sign(k, &m, &mut probe).unwrap())
                .position(|sig| sig.is_some());
            let got = s.sign(&mut sk, &m, &mut tape).unwrap();
            assert_eq!(got.as_ref().map(|g| g.index - 1), expected);
            if let Some(g) = got {
                let direct = s
                    .base()
                    .verify(&vk[g.index - 1], &m, Some(&g.sig), &mut tape.clone())
                    .unwrap();
                assert_eq!(s.verify(&vk, &m, Some(&g), &mut tape).unwrap(), direct);
            }
        }
    }

    #[test]
    fn suf_index_out_of_range_rejects() {
        let s = AmplifiedSuf::new(oms(0.0), 1).unwrap();
        let mut tape = RandomTape::from_seed(4);
        let (mut sk, vk) = s.keygen(&mut tape).unwrap();
        let m = tape.bits(8);
        let mut sig = s.sign(&mut sk, &m, &mut tape).unwrap().unwrap();
        sig.index = 0;
        assert_eq!(s.verify(&vk, &m, Some(&sig), &mut tape).unwrap(), Verdict::Reject);
        sig.index = 4;
        assert_eq!(s.verify(&vk, &m, Some(&sig), &mut tape).unwrap(), Verdict::Reject);
        // Valid index, wrong key.
        sig.index = 2;
        assert_eq!(s.verify(&vk, &m, Some(&sig), &mut tape).unwrap(), Verdict::Reject);
    }

    #[test]
    fn uf_accepts_if_any_component_does() {
        let s = AmplifiedUf::new(oms(0.0), 4).unwrap();
        let mut tape = RandomTape::from_seed(5);
        let (mut sk, vk) = s.keygen(&mut tape).unwrap();
        let m = tape.bits(8);
        let sig = s.sign(&mut sk, &m, &mut tape).unwrap().unwrap();
        assert_eq!(s.verify(&vk, &m, Some(&sig), &mut tape).unwrap(), Verdict::Accept);

        for keep in 0..4 {
            let mut one = vec![None; 4];
            one[keep] = sig[keep].clone();
            assert_eq!(s.verify(&vk, &m, Some(&one), &mut tape).unwrap(), Verdict::Accept);
        }
        assert_eq!(
            s.verify(&vk, &m, Some(&vec![None; 4]), &mut tape).unwrap(),
            Verdict::Bot
        );
        let forged = s.random_signature(&mut tape);
        assert_eq!(s.verify(&vk, &m, Some(&forged), &mut tape).unwrap(), Verdict::Reject);
        assert_eq!(
            s.verify(&vk, &m, Some(&sig[..3].to_vec()), &mut tape).unwrap(),
            Verdict::Reject
        );
        assert_eq!(s.verify(&vk, &m, None, &mut tape).unwrap(), Verdict::Bot);
    }

    #[test]
    fn wrong_key_count_is_an_error() {
        let s = AmplifiedUf::new(oms(0.0), 2).unwrap();
        let mut tape = RandomTape::from_seed(6);
        let (mut sk, _) = s.keygen(&mut tape).unwrap();
        sk.pop();
        assert!(s.sign(&mut sk, &Bits::zeros(8), &mut tape).is_err());
        assert!(AmplifiedSuf::new(oms(0.0), 0).is_err());
        assert!(AmplifiedUf::new(oms(0.0), 0).is_err());
    }
}
