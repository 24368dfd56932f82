//! GGM tree PRF over a length-doubling ⊥-PRG. Any level that aborts aborts
//! the whole evaluation.

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::bot_core::BotValue;
use crate::bot_prg::BotPrgSpec;
use crate::error::{check_len, Error, Result};
use crate::tape::RandomTape;

/// A keyed function whose output is a bitstring or ⊥.
pub trait BotFunction: Sync {
    fn key_len(&self) -> usize;
    fn input_len(&self) -> usize;
    fn output_len(&self) -> usize;
    fn eval(&self, key: &Bits, x: &Bits, tape: &mut RandomTape) -> Result<BotValue>;
}

/// First half of `y` for `b = false`, second half for `b = true`.
pub fn half_select(y: &Bits, b: bool) -> Result<Bits> {
    if !y.len().is_multiple_of(2) {
        return Err(Error::InvalidLength {
            expected: y.len() + 1,
            actual: y.len(),
        });
    }
    let h = y.len() / 2;
    Ok(if b { y.slice(h..y.len()) } else { y.slice(0..h) })
}

/// `m·μ + δ`: the pointwise ⊥ bound of an `m`-level tree.
pub fn prf_bot_rate_bound(m: usize, mu: f64, delta: f64) -> f64 {
    m as f64 * mu + delta
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TreePrfSpecDoc", into = "TreePrfSpecDoc")]
pub struct TreePrfSpec {
    prg: BotPrgSpec,
    input_len: usize,
}

#[derive(Serialize, Deserialize)]
struct TreePrfSpecDoc {
    prg: BotPrgSpec,
    input_len: usize,
}

impl TryFrom<TreePrfSpecDoc> for TreePrfSpec {
    type Error = Error;

    fn try_from(d: TreePrfSpecDoc) -> Result<Self> {
        TreePrfSpec::new(d.prg, d.input_len)
    }
}

impl From<TreePrfSpec> for TreePrfSpecDoc {
    fn from(s: TreePrfSpec) -> Self {
        Self {
            prg: s.prg,
            input_len: s.input_len,
        }
    }
}

impl TreePrfSpec {
    pub fn new(prg: BotPrgSpec, input_len: usize) -> Result<Self> {
        if prg.out_len() != 2 * prg.composite_key_len() {
            return Err(Error::InvalidParameter(format!(
                "tree PRF needs a length-doubling generator, got {} -> {}",
                prg.composite_key_len(),
                prg.out_len()
            )));
        }
        if input_len == 0 {
            return Err(Error::InvalidParameter("input_len must be at least 1".into()));
        }
        Ok(Self { prg, input_len })
    }

    pub fn prg(&self) -> &BotPrgSpec {
        &self.prg
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn key_len(&self) -> usize {
        self.prg.composite_key_len()
    }

    /// Same generator, different input length.
    pub fn with_input_len(&self, input_len: usize) -> Result<Self> {
        Self::new(self.prg.clone(), input_len)
    }

    pub fn eval(&self, key: &Bits, x: &Bits, tape: &mut RandomTape) -> Result<BotValue> {
        self.descend(key, x, tape, None)
    }

    /// Like [`eval`](Self::eval), also returning the intermediate keys
    /// `k_1, k_2, …` reached before the result (or the abort).
    pub fn eval_traced(&self, key: &Bits, x: &Bits, tape: &mut RandomTape) -> Result<(BotValue, Vec<Bits>)> {
        let mut trace = Vec::with_capacity(self.input_len);
        let out = self.descend(key, x, tape, Some(&mut trace))?;
        Ok((out, trace))
    }

    fn descend(
        &self,
        key: &Bits,
        x: &Bits,
        tape: &mut RandomTape,
        mut trace: Option<&mut Vec<Bits>>,
    ) -> Result<BotValue> {
        check_len(self.key_len(), key.len())?;
        check_len(self.input_len, x.len())?;
        let mut k = key.clone();
        let half = self.key_len();
        for bit in x.iter() {
            // Only the selected half of the generator output is computed.
            let start = if bit { half } else { 0 };
            k = match self.prg.xor_prg_window(&k, start..start + half, tape)? {
                BotValue::Bot => return Ok(BotValue::Bot),
                BotValue::Bits(y) => y,
            };
            if let Some(t) = trace.as_deref_mut() {
                t.push(k.clone());
            }
        }
        Ok(BotValue::Bits(k))
    }
}

impl BotFunction for TreePrfSpec {
    fn key_len(&self) -> usize {
        TreePrfSpec::key_len(self)
    }

    fn input_len(&self) -> usize {
        self.input_len
    }

    fn output_len(&self) -> usize {
        TreePrfSpec::key_len(self)
    }

    fn eval(&self, key: &Bits, x: &Bits, tape: &mut RandomTape) -> Result<BotValue> {
        TreePrfSpec::eval(self, key, x, tape)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdprg_sim::PdPrgSpec;

    fn spec(mu: f64, nu: f64, vote_reps: usize, input_len: usize) -> TreePrfSpec {
        let base = PdPrgSpec::new(16, 64, mu, nu, b"bot-prf-tests".to_vec()).unwrap();
        TreePrfSpec::new(BotPrgSpec::new(base, vote_reps, 2, false).unwrap(), input_len).unwrap()
    }

    /// The descent spelled out with full generator outputs.
    fn naive_descent(s: &TreePrfSpec, key: &Bits, x: &Bits, tape: &mut RandomTape) -> BotValue {
        let mut k = key.clone();
        for bit in x.iter() {
            match s.prg().xor_prg_eval(&k, tape).unwrap() {
                BotValue::Bot => return BotValue::Bot,
                BotValue::Bits(y) => k = half_select(&y, bit).unwrap(),
            }
        }
        BotValue::Bits(k)
    }

    #[test]
    fn windowed_descent_matches_full_outputs() {
        for (mu, nu) in [(0.0, 0.0), (0.3, 0.2), (0.45, 0.4)] {
            let s = spec(mu, nu, 5, 12);
            let mut keys = RandomTape::from_seed(40);
            for seed in 0..200 {
                let (k, x) = (keys.bits(s.key_len()), keys.bits(12));
                let fast = s.eval(&k, &x, &mut RandomTape::from_seed(seed)).unwrap();
                assert_eq!(fast, naive_descent(&s, &k, &x, &mut RandomTape::from_seed(seed)));
            }
        }
    }

    #[test]
    fn half_select_examples() {
        let y = Bits::from_bit_str("10110100").unwrap();
        assert_eq!(half_select(&y, false).unwrap(), Bits::from_bit_str("1011").unwrap());
        assert_eq!(half_select(&y, true).unwrap(), Bits::from_bit_str("0100").unwrap());
        assert!(matches!(
            half_select(&Bits::zeros(7), false),
            Err(Error::InvalidLength { .. })
        ));
    }

    #[test]
    fn bound_examples() {
        assert_eq!(prf_bot_rate_bound(0, 0.1, 0.0), 0.0);
        assert!((prf_bot_rate_bound(32, 0.001, 0.0) - 0.032).abs() < 1e-15);
        assert!(prf_bot_rate_bound(5, 0.1, 0.01) < prf_bot_rate_bound(6, 0.1, 0.01));
        assert!(prf_bot_rate_bound(5, 0.1, 0.01) < prf_bot_rate_bound(5, 0.2, 0.01));
        assert!(prf_bot_rate_bound(5, 0.1, 0.01) < prf_bot_rate_bound(5, 0.1, 0.02));
    }

    #[test]
    fn validation() {
        let base = PdPrgSpec::new(16, 48, 0.0, 0.0, b"x".to_vec()).unwrap();
        let prg = BotPrgSpec::new(base, 1, 1, false).unwrap();
        assert!(TreePrfSpec::new(prg, 4).is_err());
        let base = PdPrgSpec::new(16, 64, 0.0, 0.0, b"x".to_vec()).unwrap();
        let prg = BotPrgSpec::new(base, 1, 2, false).unwrap();
        assert!(TreePrfSpec::new(prg.clone(), 0).is_err());
        assert!(TreePrfSpec::new(prg, 1).is_ok());
    }

    #[test]
    fn single_level_is_first_half() {
        let s = spec(0.0, 0.0, 3, 1);
        let mut tape = RandomTape::from_seed(1);
        let key = tape.bits(32);
        let y = s.prg().canonical_output(&key).unwrap();
        let out = s.eval(&key, &Bits::from_bit_str("0").unwrap(), &mut tape).unwrap();
        assert_eq!(out, BotValue::Bits(y.slice(0..32)));
        let out = s.eval(&key, &Bits::from_bit_str("1").unwrap(), &mut tape).unwrap();
        assert_eq!(out, BotValue::Bits(y.slice(32..64)));
    }

    #[test]
    fn noiseless_is_deterministic() {
        let s = spec(0.0, 0.0, 3, 16);
        let mut tape = RandomTape::from_seed(2);
        for _ in 0..20 {
            let (key, x) = (tape.bits(32), tape.bits(16));
            let a = s.eval(&key, &x, &mut tape).unwrap();
            assert!(!a.is_bot());
            assert_eq!(a, s.eval(&key, &x, &mut tape).unwrap());
        }
    }

    #[test]
    fn length_errors() {
        let s = spec(0.0, 0.0, 1, 4);
        let mut tape = RandomTape::from_seed(3);
        assert!(s.eval(&Bits::zeros(31), &Bits::zeros(4), &mut tape).is_err());
        assert!(s.eval(&Bits::zeros(32), &Bits::zeros(5), &mut tape).is_err());
    }

    #[test]
    fn shared_prefixes_share_intermediate_keys() {
        let s = spec(0.0, 0.0, 1, 12);
        let mut tape = RandomTape::from_seed(4);
        let key = tape.bits(32);
        for _ in 0..50 {
            let x = tape.bits(12);
            let cut = tape.below(12);
            let mut x2 = x.clone();
            x2.flip(cut);
            let (_, t1) = s.eval_traced(&key, &x, &mut tape).unwrap();
            let (_, t2) = s.eval_traced(&key, &x2, &mut tape).unwrap();
            assert_eq!(t1[..cut], t2[..cut]);
            assert_ne!(t1[cut], t2[cut]);
        }
    }

    #[test]
    fn bot_determinism() {
        let s = spec(0.0, 0.1, 64, 16);
        let mut tape = RandomTape::from_seed(5);
        for _ in 0..100 {
            let (key, x) = (tape.bits(32), tape.bits(16));
            let mut seen: Option<Bits> = None;
            for _ in 0..200 {
                if let BotValue::Bits(y) = s.eval(&key, &x, &mut tape).unwrap() {
                    match &seen {
                        Some(s) => assert_eq!(s, &y),
                        None => seen = Some(y),
                    }
                }
            }
        }
    }

    #[test]
    fn abort_rate_respects_per_level_bound() {
        // Measure the per-level ⊥ rate on fresh keys, then check the tree.
        let s = spec(0.01, 0.0, 16, 32);
        let mut tape = RandomTape::from_seed(6);
        let n = 20_000;
        let level_bots = (0..n)
            .filter(|_| s.prg().xor_prg_eval(&tape.bits(32), &mut tape).unwrap().is_bot())
            .count();
        let p = level_bots as f64 / n as f64;
        for m in [4, 8, 16, 32] {
            let s = s.with_input_len(m).unwrap();
            let trials = 4000;
            let bots = (0..trials)
                .filter(|_| s.eval(&tape.bits(32), &tape.bits(m), &mut tape).unwrap().is_bot())
                .count();
            let rate = bots as f64 / trials as f64;
            let exact = 1.0 - (1.0 - p).powi(m as i32);
            let bound = prf_bot_rate_bound(m, p, 0.0);
            assert!(exact <= bound + 1e-12);
            let sigma = (bound.min(1.0) * (1.0 - bound.min(1.0)) / trials as f64).sqrt();
            assert!(rate <= bound + 3.0 * sigma, "m={m} rate={rate} bound={bound}");
        }
    }

    #[test]
    fn json_round_trip() {
        let s = spec(0.01, 0.1, 8, 7);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<TreePrfSpec>(&j).unwrap(), s);
    }
}
