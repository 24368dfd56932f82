//! Signature schemes with recognizable abort.
//!
//! The ladder, bottom to top:
//!
//! * [`oms::OmsScheme`] — Lamport-style one-message signature on `q`-bit
//!   messages over a 2:1 compressing ⊥-UOWHF;
//! * [`oms2::Oms2Scheme`] — hash-then-sign on top of it, for long messages;
//! * [`tree::StatefulScheme`] — authentication tree of one-message keys with
//!   persistent signer memory;
//! * [`tree::StatelessScheme`] — the same tree, with every node key derived
//!   on demand from ⊥-PRF output;
//! * [`amplify`] — two correctness amplifiers over any scheme.
//!
//! Signing may abort: `sign` returns `Ok(None)` for ⊥. Verification of ⊥
//! yields [`Verdict::Bot`], never [`Verdict::Accept`].

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::Result;
use crate::tape::RandomTape;

pub mod amplify;
pub mod envelope;
pub mod oms;
pub mod oms2;
pub mod tree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
    Bot,
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }

    /// Conjunction of checks: the first non-accepting verdict wins.
    pub fn and_then(self, next: impl FnOnce() -> Result<Verdict>) -> Result<Verdict> {
        match self {
            Verdict::Accept => next(),
            other => Ok(other),
        }
    }
}

pub trait SignatureScheme: Sync {
    type SigningKey: Clone + Debug + PartialEq + Send + Sync;
    type VerifyingKey: Clone + Debug + PartialEq + Send + Sync;
    type Signature: Clone + Debug + PartialEq + Send + Sync;

    fn message_len(&self) -> usize;

    fn keygen(&self, tape: &mut RandomTape) -> Result<(Self::SigningKey, Self::VerifyingKey)>;

    /// `Ok(None)` is an aborted signature.
    fn sign(&self, sk: &mut Self::SigningKey, m: &Bits, tape: &mut RandomTape) -> Result<Option<Self::Signature>>;

    /// Malformed signatures are rejected, not reported as errors; only a
    /// message of the wrong length is an error.
    fn verify(
        &self,
        vk: &Self::VerifyingKey,
        m: &Bits,
        sig: Option<&Self::Signature>,
        tape: &mut RandomTape,
    ) -> Result<Verdict>;

    /// A well-shaped signature with uniformly random contents.
    fn random_signature(&self, tape: &mut RandomTape) -> Self::Signature;
}

/// One keygen, one signature, one verification on `m`.
pub fn round_trip<S: SignatureScheme + ?Sized>(scheme: &S, m: &Bits, tape: &mut RandomTape) -> Result<Verdict> {
    let (mut sk, vk) = scheme.keygen(tape)?;
    let sig = scheme.sign(&mut sk, m, tape)?;
    scheme.verify(&vk, m, sig.as_ref(), tape)
}
