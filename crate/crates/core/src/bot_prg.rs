//! ⊥-PRG: majority vote over repeated base evaluations, then ⊥-XOR of the
//! votes over independent subkeys.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::bot_core::{bot_xor, vote_threshold, BotValue};
use crate::error::{check_len, Error, Result};
use crate::pdprg_sim::{KeyClass, Outcome, PdPrgSpec};
use crate::tape::RandomTape;

/// A generator whose output is a bitstring or ⊥.
pub trait BotGenerator: Sync {
    fn key_len(&self) -> usize;
    fn out_len(&self) -> usize;
    fn eval(&self, key: &Bits, tape: &mut RandomTape) -> Result<BotValue>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BotPrgSpecDoc", into = "BotPrgSpecDoc")]
pub struct BotPrgSpec {
    base: PdPrgSpec,
    vote_reps: usize,
    fanin: usize,
    strict_stretch: bool,
}

#[derive(Serialize, Deserialize)]
struct BotPrgSpecDoc {
    base: PdPrgSpec,
    vote_reps: usize,
    fanin: usize,
    #[serde(default)]
    strict_stretch: bool,
}

impl TryFrom<BotPrgSpecDoc> for BotPrgSpec {
    type Error = Error;

    fn try_from(d: BotPrgSpecDoc) -> Result<Self> {
        BotPrgSpec::new(d.base, d.vote_reps, d.fanin, d.strict_stretch)
    }
}

impl From<BotPrgSpec> for BotPrgSpecDoc {
    fn from(s: BotPrgSpec) -> Self {
        Self {
            base: s.base,
            vote_reps: s.vote_reps,
            fanin: s.fanin,
            strict_stretch: s.strict_stretch,
        }
    }
}

impl BotPrgSpec {
    /// With `strict_stretch` the output must be longer than the composite
    /// key, which is the regime where the ⊥-XOR stage is a generator at all.
    pub fn new(base: PdPrgSpec, vote_reps: usize, fanin: usize, strict_stretch: bool) -> Result<Self> {
        if vote_reps == 0 || fanin == 0 {
            return Err(Error::InvalidParameter("vote_reps and fanin must be positive".into()));
        }
        let spec = Self {
            base,
            vote_reps,
            fanin,
            strict_stretch,
        };
        if strict_stretch && spec.out_len() <= spec.composite_key_len() {
            return Err(Error::InvalidParameter(format!(
                "strict stretch needs out_len {} > composite key length {}",
                spec.out_len(),
                spec.composite_key_len()
            )));
        }
        Ok(spec)
    }

    pub fn base(&self) -> &PdPrgSpec {
        &self.base
    }

    pub fn vote_reps(&self) -> usize {
        self.vote_reps
    }

    pub fn fanin(&self) -> usize {
        self.fanin
    }

    pub fn strict_stretch(&self) -> bool {
        self.strict_stretch
    }

    pub fn composite_key_len(&self) -> usize {
        self.fanin * self.base.key_len()
    }

    pub fn out_len(&self) -> usize {
        self.base.out_len()
    }

    /// Majority vote over `vote_reps` base evaluations on one subkey.
    pub fn vote_prg_eval(&self, key: &Bits, tape: &mut RandomTape) -> Result<BotValue> {
        self.vote_window(key, 0..self.out_len(), tape)
    }

    /// Output bits `range` of [`vote_prg_eval`](Self::vote_prg_eval) on the
    /// same tape, computing nothing outside the window.
    pub fn vote_window(&self, key: &Bits, range: Range<usize>, tape: &mut RandomTape) -> Result<BotValue> {
        let prepared = self.base.prepare_window(key, range)?;
        // Distinct outcomes are distinct bitstrings, so counting outcomes is
        // the same vote as counting values.
        let counts = prepared.tally(self.vote_reps, tape);
        let threshold = vote_threshold(self.vote_reps);
        let winner = [Outcome::Canonical, Outcome::Perturbed, Outcome::Alternative]
            .into_iter()
            .zip(counts)
            .find(|&(_, c)| c >= threshold);
        Ok(match winner {
            Some((outcome, _)) => BotValue::Bits(prepared.materialize(outcome)),
            None => BotValue::Bot,
        })
    }

    pub fn subkeys<'a>(&'a self, composite_key: &'a Bits) -> Result<impl Iterator<Item = Bits> + 'a> {
        check_len(self.composite_key_len(), composite_key.len())?;
        let kl = self.base.key_len();
        Ok((0..self.fanin).map(move |i| composite_key.slice(i * kl..(i + 1) * kl)))
    }

    /// ⊥-XOR of the per-subkey votes.
    pub fn xor_prg_eval(&self, composite_key: &Bits, tape: &mut RandomTape) -> Result<BotValue> {
        self.xor_prg_window(composite_key, 0..self.out_len(), tape)
    }

    /// Output bits `range` of [`xor_prg_eval`](Self::xor_prg_eval).
    pub fn xor_prg_window(&self, composite_key: &Bits, range: Range<usize>, tape: &mut RandomTape) -> Result<BotValue> {
        if self.fanin == 1 {
            return self.vote_window(composite_key, range, tape);
        }
        let votes = self
            .subkeys(composite_key)?
            .map(|k| self.vote_window(&k, range.clone(), tape))
            .collect::<Result<Vec<_>>>()?;
        bot_xor(&votes)
    }

    /// Whether every subkey lies in the base generator's good set.
    pub fn composite_good(&self, composite_key: &Bits) -> Result<bool> {
        for k in self.subkeys(composite_key)? {
            if self.base.classify_key(&k)? == KeyClass::Bad {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The value every non-⊥ evaluation must equal: XOR of the canonical
    /// subkey outputs.
    pub fn canonical_output(&self, composite_key: &Bits) -> Result<Bits> {
        let mut acc = Bits::zeros(self.out_len());
        for k in self.subkeys(composite_key)? {
            acc.xor_assign(&self.base.canonical_output(&k)?)?;
        }
        Ok(acc)
    }
}

impl BotGenerator for BotPrgSpec {
    fn key_len(&self) -> usize {
        self.composite_key_len()
    }

    fn out_len(&self) -> usize {
        BotPrgSpec::out_len(self)
    }

    fn eval(&self, key: &Bits, tape: &mut RandomTape) -> Result<BotValue> {
        self.xor_prg_eval(key, tape)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bot_core::vote;
    use crate::test_oracles::binomial_tail_ge;

    fn base(mu: f64, nu: f64) -> PdPrgSpec {
        PdPrgSpec::new(16, 96, mu, nu, b"bot-prg-tests".to_vec()).unwrap()
    }

    fn find_key(spec: &PdPrgSpec, class: KeyClass, tape: &mut RandomTape) -> Bits {
        loop {
            let k = tape.bits(spec.key_len());
            if spec.classify_key(&k).unwrap() == class {
                return k;
            }
        }
    }

    #[test]
    fn validation() {
        assert!(BotPrgSpec::new(base(0.0, 0.0), 0, 1, false).is_err());
        assert!(BotPrgSpec::new(base(0.0, 0.0), 1, 0, false).is_err());
        // 96-bit output, 6 x 16 = 96-bit composite key: no strict stretch.
        assert!(BotPrgSpec::new(base(0.0, 0.0), 8, 6, true).is_err());
        assert!(BotPrgSpec::new(base(0.0, 0.0), 8, 5, true).is_ok());
        assert!(BotPrgSpec::new(base(0.0, 0.0), 8, 6, false).is_ok());
    }

    #[test]
    fn vote_matches_naive_repeated_evaluation() {
        // Tallying outcomes in one draw must give the same result
        // distribution as voting over separate evaluations.
        let spec = BotPrgSpec::new(base(0.3, 0.3), 7, 1, false).unwrap();
        let mut keys = RandomTape::from_seed(10);
        let picked = [KeyClass::Good, KeyClass::Bad].map(|c| find_key(spec.base(), c, &mut keys));
        let n = 20_000;
        let mut tape = RandomTape::from_seed(11);
        for k in &picked {
            let canonical = BotValue::Bits(spec.base().canonical_output(k).unwrap());
            let (mut fast, mut naive) = ([0usize; 3], [0usize; 3]);
            let slot = |v: &BotValue| {
                if v.is_bot() {
                    0
                } else if *v == canonical {
                    1
                } else {
                    2
                }
            };
            for _ in 0..n {
                fast[slot(&spec.vote_prg_eval(k, &mut tape).unwrap())] += 1;
                let samples: Vec<Bits> = (0..7).map(|_| spec.base().eval(k, &mut tape).unwrap()).collect();
                naive[slot(&vote(&samples).unwrap())] += 1;
            }
            for i in 0..3 {
                let diff = (fast[i] as f64 - naive[i] as f64).abs() / n as f64;
                assert!(diff < 0.02, "{fast:?} vs {naive:?}");
            }
        }
    }

    #[test]
    fn windows_match_full_votes() {
        let spec = BotPrgSpec::new(base(0.4, 0.3), 5, 3, false).unwrap();
        let mut keys = RandomTape::from_seed(12);
        for seed in 0..300 {
            let k = keys.bits(48);
            let full = spec.xor_prg_eval(&k, &mut RandomTape::from_seed(seed)).unwrap();
            for range in [0..96, 0..48, 48..96, 3..77] {
                let part = spec
                    .xor_prg_window(&k, range.clone(), &mut RandomTape::from_seed(seed))
                    .unwrap();
                assert_eq!(part, full.bits().map(|y| y.slice(range)).into());
            }
        }
        assert!(spec.base().prepare_window(&keys.bits(16), 90..97).is_err());
    }

    #[test]
    fn noiseless_good_key_votes_canonical() {
        let spec = BotPrgSpec::new(base(0.0, 0.0), 16, 1, false).unwrap();
        let mut tape = RandomTape::from_seed(11);
        for _ in 0..50 {
            let k = tape.bits(16);
            let y = spec.base().canonical_output(&k).unwrap();
            assert_eq!(spec.vote_prg_eval(&k, &mut tape).unwrap(), BotValue::Bits(y));
        }
    }

    #[test]
    fn bad_key_aborts() {
        // A fair two-point key survives only if one side reaches 154 of 256.
        let survive = 2.0 * binomial_tail_ge(256, 0.5, vote_threshold(256));
        assert!(1.0 - survive >= 0.99, "analytic abort rate {}", 1.0 - survive);

        let spec = BotPrgSpec::new(base(0.2, 0.1), 256, 1, false).unwrap();
        let mut tape = RandomTape::from_seed(12);
        let k = find_key(spec.base(), KeyClass::Bad, &mut tape);
        let trials = 2000;
        let bots = (0..trials)
            .filter(|_| spec.vote_prg_eval(&k, &mut tape).unwrap().is_bot())
            .count();
        assert!(bots as f64 / trials as f64 >= 0.99);
    }

    #[test]
    fn noisy_good_key_vote_concentrates() {
        let bound = (-64.0f64 / 5.0).exp();
        let analytic = binomial_tail_ge(64, 0.1, 64 - vote_threshold(64) + 1);
        assert!(analytic <= bound);

        let spec = BotPrgSpec::new(base(0.2, 0.1), 64, 1, false).unwrap();
        let mut tape = RandomTape::from_seed(13);
        let k = find_key(spec.base(), KeyClass::Good, &mut tape);
        let y = BotValue::Bits(spec.base().canonical_output(&k).unwrap());
        let misses = (0..100_000)
            .filter(|_| spec.vote_prg_eval(&k, &mut tape).unwrap() != y)
            .count();
        assert_eq!(misses, 0);
    }

    #[test]
    fn fanin_one_is_the_vote() {
        let spec = BotPrgSpec::new(base(0.3, 0.2), 9, 1, false).unwrap();
        let mut keys = RandomTape::from_seed(14);
        for seed in 0..200 {
            let k = keys.bits(16);
            let a = spec.vote_prg_eval(&k, &mut RandomTape::from_seed(seed)).unwrap();
            let b = spec.xor_prg_eval(&k, &mut RandomTape::from_seed(seed)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn noiseless_xor_is_xor_of_canonical_outputs() {
        let spec = BotPrgSpec::new(base(0.0, 0.0), 5, 4, false).unwrap();
        let mut tape = RandomTape::from_seed(15);
        for _ in 0..50 {
            let ck = tape.bits(64);
            let mut expected = Bits::zeros(96);
            for i in 0..4 {
                let sub = ck.slice(i * 16..(i + 1) * 16);
                expected = expected.xor(&spec.base().canonical_output(&sub).unwrap()).unwrap();
            }
            assert_eq!(
                spec.xor_prg_eval(&ck, &mut tape).unwrap(),
                BotValue::Bits(expected.clone())
            );
            assert_eq!(spec.canonical_output(&ck).unwrap(), expected);
        }
    }

    #[test]
    fn bad_subkey_poisons_the_composite() {
        let spec = BotPrgSpec::new(base(0.2, 0.0), 256, 4, false).unwrap();
        let mut tape = RandomTape::from_seed(16);
        let good = [0, 1, 2].map(|_| find_key(spec.base(), KeyClass::Good, &mut tape));
        let bad = find_key(spec.base(), KeyClass::Bad, &mut tape);
        let ck = good[0].concat(&good[1]).concat(&bad).concat(&good[2]);
        assert!(!spec.composite_good(&ck).unwrap());
        let bots = (0..500)
            .filter(|_| spec.xor_prg_eval(&ck, &mut tape).unwrap().is_bot())
            .count();
        assert!(bots >= 495);
    }

    #[test]
    fn composite_good_fraction() {
        let spec = BotPrgSpec::new(base(0.0, 0.0), 1, 16, false).unwrap();
        let mut tape = RandomTape::from_seed(17);
        assert!((0..1000).all(|_| spec.composite_good(&tape.bits(256)).unwrap()));

        let spec = BotPrgSpec::new(base(0.05, 0.0), 1, 16, false).unwrap();
        let n = 10_000;
        let good = (0..n).filter(|_| spec.composite_good(&tape.bits(256)).unwrap()).count();
        let expected = 0.95f64.powi(16);
        assert!((good as f64 / n as f64 - expected).abs() <= 0.02);
    }

    #[test]
    fn length_errors() {
        let spec = BotPrgSpec::new(base(0.0, 0.0), 3, 2, false).unwrap();
        let mut tape = RandomTape::from_seed(18);
        assert!(matches!(
            spec.vote_prg_eval(&Bits::zeros(15), &mut tape),
            Err(Error::InvalidLength { .. })
        ));
        assert!(matches!(
            spec.xor_prg_eval(&Bits::zeros(16), &mut tape),
            Err(Error::InvalidLength { .. })
        ));
        assert!(matches!(
            spec.composite_good(&Bits::zeros(33)),
            Err(Error::InvalidLength { .. })
        ));
    }

    /// Every non-⊥ output of a composite key equals one fixed value.
    #[test]
    fn bot_determinism() {
        let noisy = BotPrgSpec::new(base(0.0, 0.1), 64, 4, false).unwrap();
        let mixed = BotPrgSpec::new(base(0.1, 0.1), 64, 4, false).unwrap();
        let mut tape = RandomTape::from_seed(19);
        let mut checked = 0;
        for spec in [&noisy, &mixed] {
            for _ in 0..200 {
                let ck = tape.bits(64);
                // A bad subkey may let either candidate win a vote.
                if !spec.composite_good(&ck).unwrap() {
                    continue;
                }
                checked += 1;
                let y = spec.canonical_output(&ck).unwrap();
                for _ in 0..1000 {
                    if let BotValue::Bits(out) = spec.xor_prg_eval(&ck, &mut tape).unwrap() {
                        assert_eq!(out, y);
                    }
                }
            }
        }
        assert!(checked >= 300);
    }

    #[test]
    fn good_composite_bot_rate() {
        let spec = BotPrgSpec::new(base(0.05, 0.1), 32, 4, false).unwrap();
        let per_vote = binomial_tail_ge(32, 0.1, 32 - vote_threshold(32) + 1);
        let bound = (4.0 * (-32.0f64 / 5.0).exp()).max(4.0 * per_vote);
        let mut tape = RandomTape::from_seed(20);
        let (mut trials, mut bots) = (0usize, 0usize);
        while trials < 20_000 {
            let ck = tape.bits(64);
            if !spec.composite_good(&ck).unwrap() {
                continue;
            }
            trials += 1;
            bots += spec.xor_prg_eval(&ck, &mut tape).unwrap().is_bot() as usize;
        }
        let rate = bots as f64 / trials as f64;
        let slack = 3.0 * (bound * (1.0 - bound) / trials as f64).sqrt() + 1.0 / trials as f64;
        assert!(rate <= bound + slack, "rate {rate} bound {bound}");
    }

    #[test]
    fn json_round_trip() {
        let spec = BotPrgSpec::new(base(0.05, 0.1), 64, 4, true).unwrap();
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<BotPrgSpec>(&s).unwrap(), spec);
    }
}
