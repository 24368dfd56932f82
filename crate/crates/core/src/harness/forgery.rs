//! Forgery experiments against signature schemes, and a target collision
//! game for the hash.

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::bot_core::BotValue;
use crate::bot_hash::BotUowhfSpec;
use crate::error::{check_len, Result};
use crate::harness::count_trials;
use crate::harness::report::ExperimentReport;
use crate::signatures::oms::{OmsScheme, OmsSignature};
use crate::signatures::{SignatureScheme, Verdict};
use crate::tape::RandomTape;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Win,
    Lose,
}

/// Signing-oracle answers in query order; `None` is an aborted signature.
#[derive(Clone, Debug, PartialEq)]
pub struct QueryLog<T> {
    entries: Vec<(Bits, Option<T>)>,
}

impl<T: PartialEq> QueryLog<T> {
    fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[(Bits, Option<T>)] {
        &self.entries
    }

    pub fn contains(&self, m: &Bits, sig: &T) -> bool {
        self.entries.iter().any(|(lm, ls)| lm == m && ls.as_ref() == Some(sig))
    }

    /// Whether at most one distinct message was queried.
    pub fn single_message(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].0 == w[1].0)
    }
}

pub struct SigningOracle<'a, S: SignatureScheme> {
    scheme: &'a S,
    sk: S::SigningKey,
    tape: RandomTape,
    log: QueryLog<S::Signature>,
    leaked: bool,
}

impl<'a, S: SignatureScheme> SigningOracle<'a, S> {
    pub fn new(scheme: &'a S, sk: S::SigningKey, tape: RandomTape) -> Self {
        Self {
            scheme,
            sk,
            tape,
            log: QueryLog::new(),
            leaked: false,
        }
    }

    pub fn sign(&mut self, m: &Bits) -> Result<Option<S::Signature>> {
        check_len(self.scheme.message_len(), m.len())?;
        let sig = self.scheme.sign(&mut self.sk, m, &mut self.tape)?;
        self.log.entries.push((m.clone(), sig.clone()));
        Ok(sig)
    }

    pub fn log(&self) -> &QueryLog<S::Signature> {
        &self.log
    }

    /// Hands out the signing key. Only the positive-control adversary uses
    /// this; the experiment still scores it normally.
    pub fn leak_signing_key(&mut self) -> S::SigningKey {
        self.leaked = true;
        self.sk.clone()
    }

    pub fn leaked(&self) -> bool {
        self.leaked
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Forgery<T> {
    pub message: Bits,
    pub signature: T,
}

pub trait Forger<S: SignatureScheme>: Sync {
    fn forge(
        &self,
        scheme: &S,
        vk: &S::VerifyingKey,
        oracle: &mut SigningOracle<'_, S>,
        tape: &mut RandomTape,
    ) -> Result<Option<Forgery<S::Signature>>>;
}

/// Signs a random message and hands the answer back.
#[derive(Clone, Copy, Debug, Default)]
pub struct Replayer;

impl<S: SignatureScheme> Forger<S> for Replayer {
    fn forge(
        &self,
        scheme: &S,
        _vk: &S::VerifyingKey,
        oracle: &mut SigningOracle<'_, S>,
        tape: &mut RandomTape,
    ) -> Result<Option<Forgery<S::Signature>>> {
        let m = tape.bits(scheme.message_len());
        for _ in 0..8 {
            if let Some(signature) = oracle.sign(&m)? {
                return Ok(Some(Forgery { message: m, signature }));
            }
        }
        Ok(None)
    }
}

/// Never queries; submits a well-shaped random signature.
#[derive(Clone, Copy, Debug, Default)]
pub struct RandomForger;

impl<S: SignatureScheme> Forger<S> for RandomForger {
    fn forge(
        &self,
        scheme: &S,
        _vk: &S::VerifyingKey,
        _oracle: &mut SigningOracle<'_, S>,
        tape: &mut RandomTape,
    ) -> Result<Option<Forgery<S::Signature>>> {
        Ok(Some(Forgery {
            message: tape.bits(scheme.message_len()),
            signature: scheme.random_signature(tape),
        }))
    }
}

/// Takes the signing key from the oracle and signs a fresh message.
#[derive(Clone, Copy, Debug, Default)]
pub struct SkLeak;

impl<S: SignatureScheme> Forger<S> for SkLeak {
    fn forge(
        &self,
        scheme: &S,
        _vk: &S::VerifyingKey,
        oracle: &mut SigningOracle<'_, S>,
        tape: &mut RandomTape,
    ) -> Result<Option<Forgery<S::Signature>>> {
        let mut sk = oracle.leak_signing_key();
        let message = tape.bits(scheme.message_len());
        Ok(scheme
            .sign(&mut sk, &message, tape)?
            .map(|signature| Forgery { message, signature }))
    }
}

/// Queries `0^q` and `1^q`, then splices the revealed preimages into a
/// signature on a random third message. Breaks the one-message scheme as
/// soon as two distinct messages are signed.
#[derive(Clone, Copy, Debug, Default)]
pub struct TwoMessage;

impl Forger<OmsScheme> for TwoMessage {
    fn forge(
        &self,
        scheme: &OmsScheme,
        _vk: &<OmsScheme as SignatureScheme>::VerifyingKey,
        oracle: &mut SigningOracle<'_, OmsScheme>,
        tape: &mut RandomTape,
    ) -> Result<Option<Forgery<OmsSignature>>> {
        let q = scheme.message_len();
        let zeros = Bits::zeros(q);
        let mut ones = Bits::zeros(q);
        for j in 0..q {
            ones.set(j, true);
        }
        let (Some(s0), Some(s1)) = (oracle.sign(&zeros)?, oracle.sign(&ones)?) else {
            return Ok(None);
        };
        let mut message = tape.bits(q);
        while message == zeros || message == ones {
            message = tape.bits(q);
        }
        let preimages = message
            .iter()
            .enumerate()
            .map(|(j, bit)| {
                if bit {
                    s1.preimages[j].clone()
                } else {
                    s0.preimages[j].clone()
                }
            })
            .collect();
        Ok(Some(Forgery {
            message,
            signature: OmsSignature { preimages },
        }))
    }
}

fn experiment<S, F>(scheme: &S, forger: &F, single_message: bool, tape: &mut RandomTape) -> Result<Outcome>
where
    S: SignatureScheme,
    F: Forger<S> + ?Sized,
{
    let (sk, vk) = scheme.keygen(tape)?;
    let mut oracle = SigningOracle::new(scheme, sk, tape.split());
    // Anything the adversary does wrong, including oracle misuse, loses.
    let Ok(Some(forgery)) = forger.forge(scheme, &vk, &mut oracle, &mut tape.split()) else {
        return Ok(Outcome::Lose);
    };
    let log = oracle.log();
    if forgery.message.len() != scheme.message_len()
        || (single_message && !log.single_message())
        || log.contains(&forgery.message, &forgery.signature)
    {
        return Ok(Outcome::Lose);
    }
    Ok(
        match scheme.verify(&vk, &forgery.message, Some(&forgery.signature), tape)? {
            Verdict::Accept => Outcome::Win,
            _ => Outcome::Lose,
        },
    )
}

/// Strong unforgeability when every signing query is on one message.
pub fn om_suf_experiment<S, F>(scheme: &S, forger: &F, tape: &mut RandomTape) -> Result<Outcome>
where
    S: SignatureScheme,
    F: Forger<S> + ?Sized,
{
    experiment(scheme, forger, true, tape)
}

/// Strong unforgeability under arbitrary signing queries.
pub fn suf_experiment<S, F>(scheme: &S, forger: &F, tape: &mut RandomTape) -> Result<Outcome>
where
    S: SignatureScheme,
    F: Forger<S> + ?Sized,
{
    experiment(scheme, forger, false, tape)
}

/// Win rate of `forger` over `trials` independent runs.
pub fn forgery_rate<S, F>(
    scheme: &S,
    forger: &F,
    one_message: bool,
    trials: usize,
    tape: &mut RandomTape,
) -> Result<ExperimentReport>
where
    S: SignatureScheme,
    F: Forger<S> + ?Sized,
{
    let wins = count_trials(trials, tape, |t| {
        Ok(experiment(scheme, forger, one_message, t)? == Outcome::Win)
    })?;
    let name = if one_message { "om-suf" } else { "suf" };
    Ok(ExperimentReport::rate(trials, wins).named(name))
}

/// Commits to `x` before seeing the hash key, then names a second input.
pub trait TcrAdversary: Sync {
    fn commit(&self, spec: &BotUowhfSpec, tape: &mut RandomTape) -> Bits;
    fn collide(&self, spec: &BotUowhfSpec, k: &Bits, x: &Bits, tape: &mut RandomTape) -> Option<Bits>;
}

/// Guesses a uniformly random second input.
#[derive(Clone, Copy, Debug, Default)]
pub struct RandomSecondInput;

impl TcrAdversary for RandomSecondInput {
    fn commit(&self, spec: &BotUowhfSpec, tape: &mut RandomTape) -> Bits {
        tape.bits(spec.in_len())
    }

    fn collide(&self, spec: &BotUowhfSpec, _k: &Bits, _x: &Bits, tape: &mut RandomTape) -> Option<Bits> {
        Some(tape.bits(spec.in_len()))
    }
}

/// Wins on `x' ≠ x` whose non-⊥ hashes agree.
pub fn tcr_experiment<A: TcrAdversary + ?Sized>(
    spec: &BotUowhfSpec,
    adversary: &A,
    tape: &mut RandomTape,
) -> Result<Outcome> {
    let x = adversary.commit(spec, tape);
    let k = tape.bits(spec.key_len());
    let Some(x2) = adversary.collide(spec, &k, &x, tape) else {
        return Ok(Outcome::Lose);
    };
    if x.len() != spec.in_len() || x2.len() != spec.in_len() || x == x2 {
        return Ok(Outcome::Lose);
    }
    Ok(match (spec.eval(&k, &x, tape)?, spec.eval(&k, &x2, tape)?) {
        (BotValue::Bits(a), BotValue::Bits(b)) if a == b => Outcome::Win,
        _ => Outcome::Lose,
    })
}
