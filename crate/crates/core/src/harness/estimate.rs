//! Frequency estimators.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::bits::Bits;
use crate::bot_core::BotValue;
use crate::error::{Error, Result};
use crate::harness::count_trials;
use crate::harness::report::{BoundKind, ExperimentReport};
use crate::signatures::{SignatureScheme, Verdict};
use crate::tape::RandomTape;

/// Fraction of ⊥ over fresh draws from `source`, each evaluated once.
pub fn estimate_bot_rate<X, K, E>(
    source: K,
    evaluator: E,
    trials: usize,
    tape: &mut RandomTape,
) -> Result<ExperimentReport>
where
    K: Fn(&mut RandomTape) -> X + Sync,
    E: Fn(&X, &mut RandomTape) -> Result<BotValue> + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let bots = count_trials(trials, tape, |t| {
        let x = source(t);
        Ok(evaluator(&x, t)?.is_bot())
    })?;
    Ok(ExperimentReport::rate(trials, bots).named("bot-rate"))
}

/// Per key, the fraction of evaluations that are neither ⊥ nor the most
/// frequent non-⊥ value. Reports the worst key; passes only at exactly 0.
pub fn check_pseudodeterminism<E>(
    evaluator: E,
    keys: &[Bits],
    reps_per_key: usize,
    tape: &mut RandomTape,
) -> Result<ExperimentReport>
where
    E: Fn(&Bits, &mut RandomTape) -> Result<BotValue> + Sync,
{
    if reps_per_key < 2 {
        return Err(Error::InvalidParameter("need at least two repetitions per key".into()));
    }
    let jobs: Vec<(&Bits, RandomTape)> = keys.iter().map(|k| (k, tape.split())).collect();
    let violations = jobs
        .into_par_iter()
        .map(|(k, mut t)| {
            let mut counts: HashMap<Bits, usize> = HashMap::new();
            for _ in 0..reps_per_key {
                if let BotValue::Bits(y) = evaluator(k, &mut t)? {
                    *counts.entry(y).or_default() += 1;
                }
            }
            let total: usize = counts.values().sum();
            Ok(total - counts.values().copied().max().unwrap_or(0))
        })
        .collect::<Result<Vec<usize>>>()?;
    let worst = violations.iter().copied().max().unwrap_or(0);
    let total = violations.iter().sum();
    Ok(
        ExperimentReport::max_violation(keys.len() * reps_per_key, total, worst, reps_per_key)
            .named("pseudodeterminism")
            .with_bound(BoundKind::Exact, 0.0),
    )
}

/// Fresh keys, uniformly random messages, one signature each: the fraction
/// that verifies.
pub fn estimate_correctness<S: SignatureScheme>(
    scheme: &S,
    trials: usize,
    tape: &mut RandomTape,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let accepted = count_trials(trials, tape, |t| {
        let (mut sk, vk) = scheme.keygen(t)?;
        let m = t.bits(scheme.message_len());
        let sig = scheme.sign(&mut sk, &m, t)?;
        Ok(scheme.verify(&vk, &m, sig.as_ref(), t)? == Verdict::Accept)
    })?;
    Ok(ExperimentReport::rate(trials, accepted).named("correctness"))
}
