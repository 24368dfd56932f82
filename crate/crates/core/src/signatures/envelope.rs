//! Scheme-erased keys and signatures, and their versioned binary envelope.
//!
//! An envelope is the magic `BSIG1`, a tag byte, then length-prefixed fields
//! in declaration order. Signature tags: `0x00` ⊥, `0x01` OMS, `0x02` OMS2,
//! `0x03` stateful, `0x04` stateless, `0x05` amplified SUF, `0x06` amplified
//! UF. Signing keys use `0x10 + n` and verifying keys `0x20 + n` for the
//! same `n`. Key envelopes carry an opaque context field (the CLI stores the
//! parameter profile there) before the key body.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::codec::{Decode, Encode, Reader, Writer};
use crate::error::{Error, Result};
use crate::signatures::amplify::{AmplifiedSuf, AmplifiedUf, IndexedSignature};
use crate::signatures::oms::{OmsScheme, OmsSignature, OmsSigningKey, OmsVerifyingKey};
use crate::signatures::oms2::{Oms2Scheme, Oms2Signature, Oms2SigningKey, Oms2VerifyingKey};
use crate::signatures::tree::{
    StatefulScheme, StatefulSigningKey, StatelessScheme, StatelessSigningKey, TreeSignature,
};
use crate::signatures::{SignatureScheme, Verdict};
use crate::tape::RandomTape;

pub const MAGIC: &[u8; 5] = b"BSIG1";

const TAG_BOT: u8 = 0x00;
const SK_BASE: u8 = 0x10;
const VK_BASE: u8 = 0x20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Oms,
    Oms2,
    Stateful,
    Stateless,
    AmpSuf,
    AmpUf,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 6] = [
        SchemeKind::Oms,
        SchemeKind::Oms2,
        SchemeKind::Stateful,
        SchemeKind::Stateless,
        SchemeKind::AmpSuf,
        SchemeKind::AmpUf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Oms => "oms",
            SchemeKind::Oms2 => "oms2",
            SchemeKind::Stateful => "stateful",
            SchemeKind::Stateless => "stateless",
            SchemeKind::AmpSuf => "amp-suf",
            SchemeKind::AmpUf => "amp-uf",
        }
    }

    fn tag(self) -> u8 {
        1 + SchemeKind::ALL.iter().position(|&k| k == self).unwrap() as u8
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            1..=6 => Ok(SchemeKind::ALL[tag as usize - 1]),
            _ => Err(Error::Decode(format!("unknown scheme tag {tag:#04x}"))),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnyScheme {
    Oms(OmsScheme),
    Oms2(Oms2Scheme),
    Stateful(StatefulScheme),
    Stateless(StatelessScheme),
    AmpSuf(Box<AmplifiedSuf<AnyScheme>>),
    AmpUf(Box<AmplifiedUf<AnyScheme>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnySigningKey {
    Oms(OmsSigningKey),
    Oms2(Oms2SigningKey),
    Stateful(StatefulSigningKey),
    Stateless(StatelessSigningKey),
    AmpSuf(Vec<AnySigningKey>),
    AmpUf(Vec<AnySigningKey>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnyVerifyingKey {
    Oms(OmsVerifyingKey),
    Oms2(Oms2VerifyingKey),
    Stateful(Oms2VerifyingKey),
    Stateless(Oms2VerifyingKey),
    AmpSuf(Vec<AnyVerifyingKey>),
    AmpUf(Vec<AnyVerifyingKey>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignatureBundle {
    Oms(OmsSignature),
    Oms2(Oms2Signature),
    Stateful(TreeSignature),
    Stateless(TreeSignature),
    AmpSuf { index: usize, inner: Box<SignatureBundle> },
    AmpUf(Vec<Option<SignatureBundle>>),
}

impl AnyScheme {
    pub fn kind(&self) -> SchemeKind {
        match self {
            AnyScheme::Oms(_) => SchemeKind::Oms,
            AnyScheme::Oms2(_) => SchemeKind::Oms2,
            AnyScheme::Stateful(_) => SchemeKind::Stateful,
            AnyScheme::Stateless(_) => SchemeKind::Stateless,
            AnyScheme::AmpSuf(_) => SchemeKind::AmpSuf,
            AnyScheme::AmpUf(_) => SchemeKind::AmpUf,
        }
    }
}

impl AnySigningKey {
    pub fn kind(&self) -> SchemeKind {
        match self {
            AnySigningKey::Oms(_) => SchemeKind::Oms,
            AnySigningKey::Oms2(_) => SchemeKind::Oms2,
            AnySigningKey::Stateful(_) => SchemeKind::Stateful,
            AnySigningKey::Stateless(_) => SchemeKind::Stateless,
            AnySigningKey::AmpSuf(_) => SchemeKind::AmpSuf,
            AnySigningKey::AmpUf(_) => SchemeKind::AmpUf,
        }
    }
}

impl AnyVerifyingKey {
    pub fn kind(&self) -> SchemeKind {
        match self {
            AnyVerifyingKey::Oms(_) => SchemeKind::Oms,
            AnyVerifyingKey::Oms2(_) => SchemeKind::Oms2,
            AnyVerifyingKey::Stateful(_) => SchemeKind::Stateful,
            AnyVerifyingKey::Stateless(_) => SchemeKind::Stateless,
            AnyVerifyingKey::AmpSuf(_) => SchemeKind::AmpSuf,
            AnyVerifyingKey::AmpUf(_) => SchemeKind::AmpUf,
        }
    }
}

impl SignatureBundle {
    pub fn kind(&self) -> SchemeKind {
        match self {
            SignatureBundle::Oms(_) => SchemeKind::Oms,
            SignatureBundle::Oms2(_) => SchemeKind::Oms2,
            SignatureBundle::Stateful(_) => SchemeKind::Stateful,
            SignatureBundle::Stateless(_) => SchemeKind::Stateless,
            SignatureBundle::AmpSuf { .. } => SchemeKind::AmpSuf,
            SignatureBundle::AmpUf(_) => SchemeKind::AmpUf,
        }
    }
}

fn mismatch(kind: SchemeKind, other: SchemeKind) -> Error {
    Error::InvalidParameter(format!("{other} key used with {kind} scheme"))
}

impl SignatureScheme for AnyScheme {
    type SigningKey = AnySigningKey;
    type VerifyingKey = AnyVerifyingKey;
    type Signature = SignatureBundle;

    fn message_len(&self) -> usize {
        match self {
            AnyScheme::Oms(s) => s.message_len(),
            AnyScheme::Oms2(s) => s.message_len(),
            AnyScheme::Stateful(s) => s.message_len(),
            AnyScheme::Stateless(s) => s.message_len(),
            AnyScheme::AmpSuf(s) => s.message_len(),
            AnyScheme::AmpUf(s) => s.message_len(),
        }
    }

    fn keygen(&self, tape: &mut RandomTape) -> Result<(AnySigningKey, AnyVerifyingKey)> {
        Ok(match self {
            AnyScheme::Oms(s) => {
                let (sk, vk) = s.keygen(tape)?;
                (AnySigningKey::Oms(sk), AnyVerifyingKey::Oms(vk))
            }
            AnyScheme::Oms2(s) => {
                let (sk, vk) = s.keygen(tape)?;
                (AnySigningKey::Oms2(sk), AnyVerifyingKey::Oms2(vk))
            }
            AnyScheme::Stateful(s) => {
                let (sk, vk) = s.keygen(tape)?;
                (AnySigningKey::Stateful(sk), AnyVerifyingKey::Stateful(vk))
            }
            AnyScheme::Stateless(s) => {
                let (sk, vk) = s.keygen(tape)?;
                (AnySigningKey::Stateless(sk), AnyVerifyingKey::Stateless(vk))
            }
            AnyScheme::AmpSuf(s) => {
                let (sk, vk) = s.keygen(tape)?;
                (AnySigningKey::AmpSuf(sk), AnyVerifyingKey::AmpSuf(vk))
            }
            AnyScheme::AmpUf(s) => {
                let (sk, vk) = s.keygen(tape)?;
                (AnySigningKey::AmpUf(sk), AnyVerifyingKey::AmpUf(vk))
            }
        })
    }

    fn sign(&self, sk: &mut AnySigningKey, m: &Bits, tape: &mut RandomTape) -> Result<Option<SignatureBundle>> {
        Ok(match (self, sk) {
            (AnyScheme::Oms(s), AnySigningKey::Oms(k)) => s.sign(k, m, tape)?.map(SignatureBundle::Oms),
            (AnyScheme::Oms2(s), AnySigningKey::Oms2(k)) => s.sign(k, m, tape)?.map(SignatureBundle::Oms2),
            (AnyScheme::Stateful(s), AnySigningKey::Stateful(k)) => s.sign(k, m, tape)?.map(SignatureBundle::Stateful),
            (AnyScheme::Stateless(s), AnySigningKey::Stateless(k)) => {
                s.sign(k, m, tape)?.map(SignatureBundle::Stateless)
            }
            (AnyScheme::AmpSuf(s), AnySigningKey::AmpSuf(k)) => {
                s.sign(k, m, tape)?
                    .map(|IndexedSignature { index, sig }| SignatureBundle::AmpSuf {
                        index,
                        inner: Box::new(sig),
                    })
            }
            (AnyScheme::AmpUf(s), AnySigningKey::AmpUf(k)) => s.sign(k, m, tape)?.map(SignatureBundle::AmpUf),
            (s, k) => return Err(mismatch(s.kind(), k.kind())),
        })
    }

    fn verify(
        &self,
        vk: &AnyVerifyingKey,
        m: &Bits,
        sig: Option<&SignatureBundle>,
        tape: &mut RandomTape,
    ) -> Result<Verdict> {
        if vk.kind() != self.kind() {
            return Err(mismatch(self.kind(), vk.kind()));
        }
        if m.len() != self.message_len() {
            return Err(Error::InvalidLength {
                expected: self.message_len(),
                actual: m.len(),
            });
        }
        let Some(sig) = sig else {
            return Ok(Verdict::Bot);
        };
        match (self, vk, sig) {
            (AnyScheme::Oms(s), AnyVerifyingKey::Oms(k), SignatureBundle::Oms(g)) => s.verify(k, m, Some(g), tape),
            (AnyScheme::Oms2(s), AnyVerifyingKey::Oms2(k), SignatureBundle::Oms2(g)) => s.verify(k, m, Some(g), tape),
            (AnyScheme::Stateful(s), AnyVerifyingKey::Stateful(k), SignatureBundle::Stateful(g)) => {
                s.verify(k, m, Some(g), tape)
            }
            (AnyScheme::Stateless(s), AnyVerifyingKey::Stateless(k), SignatureBundle::Stateless(g)) => {
                s.verify(k, m, Some(g), tape)
            }
            (AnyScheme::AmpSuf(s), AnyVerifyingKey::AmpSuf(k), SignatureBundle::AmpSuf { index, inner }) => {
                let g = IndexedSignature {
                    index: *index,
                    sig: (**inner).clone(),
                };
                s.verify(k, m, Some(&g), tape)
            }
            (AnyScheme::AmpUf(s), AnyVerifyingKey::AmpUf(k), SignatureBundle::AmpUf(g)) => {
                s.verify(k, m, Some(g), tape)
            }
            _ => Ok(Verdict::Reject),
        }
    }

    fn random_signature(&self, tape: &mut RandomTape) -> SignatureBundle {
        match self {
            AnyScheme::Oms(s) => SignatureBundle::Oms(s.random_signature(tape)),
            AnyScheme::Oms2(s) => SignatureBundle::Oms2(s.random_signature(tape)),
            AnyScheme::Stateful(s) => SignatureBundle::Stateful(s.random_signature(tape)),
            AnyScheme::Stateless(s) => SignatureBundle::Stateless(s.random_signature(tape)),
            AnyScheme::AmpSuf(s) => {
                let g = s.random_signature(tape);
                SignatureBundle::AmpSuf {
                    index: g.index,
                    inner: Box::new(g.sig),
                }
            }
            AnyScheme::AmpUf(s) => SignatureBundle::AmpUf(s.random_signature(tape)),
        }
    }
}

impl Encode for SignatureBundle {
    fn encode(&self, w: &mut Writer) {
        w.put_u8(self.kind().tag());
        match self {
            SignatureBundle::Oms(g) => w.put(g),
            SignatureBundle::Oms2(g) => w.put(g),
            SignatureBundle::Stateful(g) | SignatureBundle::Stateless(g) => w.put(g),
            SignatureBundle::AmpSuf { index, inner } => {
                w.put(index);
                w.put(inner.as_ref());
            }
            SignatureBundle::AmpUf(g) => w.put(g),
        }
    }
}

impl Decode for SignatureBundle {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(match SchemeKind::from_tag(r.u8()?)? {
            SchemeKind::Oms => SignatureBundle::Oms(r.get()?),
            SchemeKind::Oms2 => SignatureBundle::Oms2(r.get()?),
            SchemeKind::Stateful => SignatureBundle::Stateful(r.get()?),
            SchemeKind::Stateless => SignatureBundle::Stateless(r.get()?),
            SchemeKind::AmpSuf => SignatureBundle::AmpSuf {
                index: r.get()?,
                inner: Box::new(r.get()?),
            },
            SchemeKind::AmpUf => SignatureBundle::AmpUf(r.get()?),
        })
    }
}

impl Encode for AnySigningKey {
    fn encode(&self, w: &mut Writer) {
        w.put_u8(SK_BASE + self.kind().tag());
        match self {
            AnySigningKey::Oms(k) => w.put(k),
            AnySigningKey::Oms2(k) => w.put(k),
            AnySigningKey::Stateful(k) => w.put(k),
            AnySigningKey::Stateless(k) => w.put(k),
            AnySigningKey::AmpSuf(k) | AnySigningKey::AmpUf(k) => w.put(k),
        }
    }
}

impl Decode for AnySigningKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let tag = r.u8()?;
        let kind = SchemeKind::from_tag(tag.wrapping_sub(SK_BASE))
            .map_err(|_| Error::Decode(format!("not a signing key tag: {tag:#04x}")))?;
        Ok(match kind {
            SchemeKind::Oms => AnySigningKey::Oms(r.get()?),
            SchemeKind::Oms2 => AnySigningKey::Oms2(r.get()?),
            SchemeKind::Stateful => AnySigningKey::Stateful(r.get()?),
            SchemeKind::Stateless => AnySigningKey::Stateless(r.get()?),
            SchemeKind::AmpSuf => AnySigningKey::AmpSuf(r.get()?),
            SchemeKind::AmpUf => AnySigningKey::AmpUf(r.get()?),
        })
    }
}

impl Encode for AnyVerifyingKey {
    fn encode(&self, w: &mut Writer) {
        w.put_u8(VK_BASE + self.kind().tag());
        match self {
            AnyVerifyingKey::Oms(k)
            | AnyVerifyingKey::Oms2(k)
            | AnyVerifyingKey::Stateful(k)
            | AnyVerifyingKey::Stateless(k) => w.put(k),
            AnyVerifyingKey::AmpSuf(k) | AnyVerifyingKey::AmpUf(k) => w.put(k),
        }
    }
}

impl Decode for AnyVerifyingKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let tag = r.u8()?;
        let kind = SchemeKind::from_tag(tag.wrapping_sub(VK_BASE))
            .map_err(|_| Error::Decode(format!("not a verifying key tag: {tag:#04x}")))?;
        Ok(match kind {
            SchemeKind::Oms => AnyVerifyingKey::Oms(r.get()?),
            SchemeKind::Oms2 => AnyVerifyingKey::Oms2(r.get()?),
            SchemeKind::Stateful => AnyVerifyingKey::Stateful(r.get()?),
            SchemeKind::Stateless => AnyVerifyingKey::Stateless(r.get()?),
            SchemeKind::AmpSuf => AnyVerifyingKey::AmpSuf(r.get()?),
            SchemeKind::AmpUf => AnyVerifyingKey::AmpUf(r.get()?),
        })
    }
}

fn check_magic(r: &mut Reader<'_>) -> Result<()> {
    if r.raw(MAGIC.len()).ok() != Some(MAGIC.as_slice()) {
        return Err(Error::Decode("missing BSIG1 magic".into()));
    }
    Ok(())
}

/// Envelope for a signature; `None` is the aborted signature.
pub fn seal_signature(sig: Option<&SignatureBundle>) -> Vec<u8> {
    let mut w = Writer::new();
    w.put_raw(MAGIC);
    match sig {
        None => w.put_u8(TAG_BOT),
        Some(s) => s.encode(&mut w),
    }
    w.into_bytes()
}

pub fn open_signature(bytes: &[u8]) -> Result<Option<SignatureBundle>> {
    let mut r = Reader::new(bytes);
    check_magic(&mut r)?;
    let rest = &bytes[MAGIC.len()..];
    if rest == [TAG_BOT] {
        return Ok(None);
    }
    Ok(Some(SignatureBundle::from_bytes(rest)?))
}

/// Envelope for a key with an opaque context field.
pub fn seal_key<K: Encode>(key: &K, context: &[u8]) -> Vec<u8> {
    let bytes = key.to_bytes();
    let mut w = Writer::new();
    w.put_raw(MAGIC);
    // The key's own tag goes first so the envelope reads tag, then fields.
    w.put_u8(bytes[0]);
    w.put_bytes(context);
    w.put_raw(&bytes[1..]);
    w.into_bytes()
}

pub fn open_key<K: Decode>(bytes: &[u8]) -> Result<(Vec<u8>, K)> {
    let mut r = Reader::new(bytes);
    check_magic(&mut r)?;
    let tag = r.u8()?;
    let context = r.bytes()?.to_vec();
    let mut body = vec![tag];
    body.extend_from_slice(r.raw(r.remaining())?);
    Ok((context, K::from_bytes(&body)?))
}

/// Reads the tag byte of any envelope without decoding the body.
pub fn peek_tag(bytes: &[u8]) -> Result<u8> {
    let mut r = Reader::new(bytes);
    check_magic(&mut r)?;
    r.u8()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bot_hash::BotUowhfSpec;

    fn oms2() -> Oms2Scheme {
        let outer = BotUowhfSpec::new(4, 64, 8, 0.0, b"env-outer".to_vec()).unwrap();
        let inner = BotUowhfSpec::new(4, 16, 8, 0.0, b"env-inner".to_vec()).unwrap();
        Oms2Scheme::new(outer, inner).unwrap()
    }

    fn schemes() -> Vec<AnyScheme> {
        let oms = OmsScheme::new(BotUowhfSpec::new(4, 16, 8, 0.0, b"env-oms".to_vec()).unwrap(), 6).unwrap();
        vec![
            AnyScheme::Oms(oms),
            AnyScheme::Oms2(oms2()),
            AnyScheme::AmpSuf(Box::new(AmplifiedSuf::new(AnyScheme::Oms2(oms2()), 1).unwrap())),
            AnyScheme::AmpUf(Box::new(AmplifiedUf::new(AnyScheme::Oms2(oms2()), 3).unwrap())),
        ]
    }

    #[test]
    fn kinds_round_trip_through_names_and_tags() {
        for k in SchemeKind::ALL {
            assert_eq!(k.name().parse::<SchemeKind>().unwrap(), k);
            assert_eq!(SchemeKind::from_tag(k.tag()).unwrap(), k);
        }
        assert!("rsa".parse::<SchemeKind>().is_err());
        assert!(SchemeKind::from_tag(0).is_err());
    }

    #[test]
    fn envelopes_round_trip() {
        let mut tape = RandomTape::from_seed(1);
        for s in schemes() {
            let (mut sk, vk) = s.keygen(&mut tape).unwrap();
            let m = tape.bits(s.message_len());
            let sig = s.sign(&mut sk, &m, &mut tape).unwrap();
            assert_eq!(s.verify(&vk, &m, sig.as_ref(), &mut tape).unwrap(), Verdict::Accept);

            let sealed = seal_signature(sig.as_ref());
            assert_eq!(&sealed[..5], b"BSIG1");
            assert_eq!(sealed[5], s.kind().tag());
            assert_eq!(open_signature(&sealed).unwrap(), sig);

            let sealed = seal_key(&sk, b"ctx");
            assert_eq!(peek_tag(&sealed).unwrap(), 0x10 + s.kind().tag());
            let (ctx, back): (Vec<u8>, AnySigningKey) = open_key(&sealed).unwrap();
            assert_eq!((ctx.as_slice(), &back), (b"ctx".as_slice(), &sk));

            let sealed = seal_key(&vk, b"");
            assert_eq!(peek_tag(&sealed).unwrap(), 0x20 + s.kind().tag());
            let (_, back): (Vec<u8>, AnyVerifyingKey) = open_key(&sealed).unwrap();
            assert_eq!(back, vk);
            assert!(open_key::<AnySigningKey>(&sealed).is_err());

            let json = serde_json::to_string(&sig).unwrap();
            assert_eq!(serde_json::from_str::<Option<SignatureBundle>>(&json).unwrap(), sig);
        }
    }

    #[test]
    fn bot_signature_envelope() {
        let sealed = seal_signature(None);
        assert_eq!(sealed, b"BSIG1\x00");
        assert_eq!(open_signature(&sealed).unwrap(), None);
        assert!(open_signature(b"BSIG2\x00").is_err());
        assert!(open_signature(b"BSIG1\x07").is_err());
        assert!(open_signature(b"BSIG1").is_err());
    }

    #[test]
    fn mismatched_pieces() {
        let mut tape = RandomTape::from_seed(2);
        let all = schemes();
        let (mut sk0, vk0) = all[0].keygen(&mut tape).unwrap();
        let (_, vk1) = all[1].keygen(&mut tape).unwrap();
        let m = tape.bits(all[1].message_len());
        assert!(all[1].sign(&mut sk0, &m, &mut tape).is_err());
        assert!(all[1].verify(&vk0, &m, None, &mut tape).is_err());
        let wrong = all[0].sign(&mut sk0, &tape.bits(6), &mut tape).unwrap();
        assert_eq!(
            all[1].verify(&vk1, &m, wrong.as_ref(), &mut tape).unwrap(),
            Verdict::Reject
        );
    }
}
