//! Distinguishing games for generators and functions with abort.
//!
//! In both games a fair coin picks the world. The real world shows the
//! primitive's outputs on a hidden key; the ideal world shows a uniformly
//! random value in every position where the real output did not abort, so
//! both worlds have the same abort pattern.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::bot_core::{is_bot, BotValue};
use crate::bot_prf::BotFunction;
use crate::bot_prg::BotGenerator;
use crate::error::{check_len, Error, Result};
use crate::harness::count_trials;
use crate::harness::report::{BoundKind, ExperimentReport};
use crate::tape::RandomTape;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum World {
    Real,
    Ideal,
}

impl World {
    pub fn flip(tape: &mut RandomTape) -> World {
        if tape.bit() {
            World::Ideal
        } else {
            World::Real
        }
    }
}

pub trait MultitimeDistinguisher: Sync {
    /// May evaluate `prg` on keys of its own choosing.
    fn guess(&self, prg: &dyn BotGenerator, shown: &[BotValue], tape: &mut RandomTape) -> Result<World>;
}

pub trait PrfDistinguisher: Sync {
    /// Queries beyond the oracle's budget fail with
    /// [`Error::BudgetExhausted`].
    fn run(&self, prf: &dyn BotFunction, oracle: &mut dyn PrfOracle, tape: &mut RandomTape) -> Result<World>;
}

/// The built-in statistical probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distinguisher {
    /// Always answers "real".
    Constant,
    /// Evaluates the primitive on a fresh key of its own and answers "real"
    /// on a match.
    CrossKey,
    /// Answers "real" if the transcript holds two distinct non-⊥ values
    /// (multi-time), or "ideal" if a repeated query gives two distinct
    /// non-⊥ values (function game).
    RepeatConsistency,
    /// Answers "real" if the first non-⊥ value has more ones than zeros.
    BitBias,
}

impl Distinguisher {
    pub const ALL: [Distinguisher; 4] = [
        Distinguisher::Constant,
        Distinguisher::CrossKey,
        Distinguisher::RepeatConsistency,
        Distinguisher::BitBias,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Distinguisher::Constant => "constant",
            Distinguisher::CrossKey => "cross-key",
            Distinguisher::RepeatConsistency => "repeat-consistency",
            Distinguisher::BitBias => "bit-bias",
        }
    }
}

fn biased(y: &Bits) -> bool {
    2 * y.count_ones() > y.len()
}

fn real_if(b: bool) -> World {
    if b {
        World::Real
    } else {
        World::Ideal
    }
}

impl MultitimeDistinguisher for Distinguisher {
    fn guess(&self, prg: &dyn BotGenerator, shown: &[BotValue], tape: &mut RandomTape) -> Result<World> {
        let mut values = shown.iter().filter_map(BotValue::bits);
        Ok(match self {
            Distinguisher::Constant => World::Real,
            Distinguisher::CrossKey => {
                let own = prg.eval(&tape.bits(prg.key_len()), tape)?;
                real_if(own.bits().is_some_and(|y| values.any(|v| v == y)))
            }
            Distinguisher::RepeatConsistency => {
                let first = values.next();
                real_if(first.is_some_and(|f| values.any(|v| v != f)))
            }
            Distinguisher::BitBias => real_if(values.next().is_some_and(biased)),
        })
    }
}

impl PrfDistinguisher for Distinguisher {
    fn run(&self, prf: &dyn BotFunction, oracle: &mut dyn PrfOracle, tape: &mut RandomTape) -> Result<World> {
        let x = tape.bits(prf.input_len());
        Ok(match self {
            Distinguisher::Constant => World::Real,
            Distinguisher::CrossKey => {
                let seen = oracle.query(&x)?;
                let own = prf.eval(&tape.bits(prf.key_len()), &x, tape)?;
                real_if(!seen.is_bot() && seen == own)
            }
            Distinguisher::RepeatConsistency => {
                let a = oracle.query(&x)?;
                let b = oracle.query(&x)?;
                real_if(a.is_bot() || b.is_bot() || a == b)
            }
            Distinguisher::BitBias => real_if(oracle.query(&x)?.bits().is_some_and(biased)),
        })
    }
}

/// One multi-time transcript: the underlying evaluations and what the
/// distinguisher is shown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultitimeTranscript {
    pub world: World,
    pub evals: Vec<BotValue>,
    pub shown: Vec<BotValue>,
}

pub fn multitime_transcript<G: BotGenerator + ?Sized>(
    prg: &G,
    q: usize,
    world: World,
    tape: &mut RandomTape,
) -> Result<MultitimeTranscript> {
    let key = tape.bits(prg.key_len());
    let evals = (0..q).map(|_| prg.eval(&key, tape)).collect::<Result<Vec<_>>>()?;
    let shown = match world {
        World::Real => evals.clone(),
        World::Ideal => {
            let y = tape.bits(prg.out_len());
            evals.iter().map(|e| is_bot(e, &y)).collect::<Result<Vec<_>>>()?
        }
    };
    Ok(MultitimeTranscript { world, evals, shown })
}

/// Advantage of `dist` at telling `q` evaluations on one key from the
/// ⊥-masked copies of a single uniform string. Passes when the interval
/// contains 0.
pub fn multitime_game<G, D>(
    prg: &G,
    q: usize,
    dist: &D,
    trials: usize,
    tape: &mut RandomTape,
) -> Result<ExperimentReport>
where
    G: BotGenerator,
    D: MultitimeDistinguisher + ?Sized,
{
    if q == 0 || trials == 0 {
        return Err(Error::InvalidParameter("q and trials must be positive".into()));
    }
    let correct = count_trials(trials, tape, |t| {
        let world = World::flip(t);
        let tr = multitime_transcript(prg, q, world, t)?;
        Ok(dist.guess(prg, &tr.shown, t)? == world)
    })?;
    Ok(ExperimentReport::advantage(trials, correct)
        .named("multitime")
        .with_bound(BoundKind::Contains, 0.0))
}

pub trait PrfOracle {
    fn query(&mut self, x: &Bits) -> Result<BotValue>;
}

pub struct RealOracle<'a, F: ?Sized> {
    prf: &'a F,
    key: Bits,
    tape: RandomTape,
}

impl<'a, F: BotFunction + ?Sized> RealOracle<'a, F> {
    pub fn new(prf: &'a F, key: Bits, tape: RandomTape) -> Self {
        Self { prf, key, tape }
    }
}

impl<F: BotFunction + ?Sized> PrfOracle for RealOracle<'_, F> {
    fn query(&mut self, x: &Bits) -> Result<BotValue> {
        self.prf.eval(&self.key, x, &mut self.tape)
    }
}

/// `x ↦ Is-⊥(f_K(x), F(x))` with `F` a random function sampled lazily and
/// cached for the oracle's lifetime. Every answer is logged.
pub struct IdealOracle<'a, F: ?Sized> {
    real: RealOracle<'a, F>,
    cache: HashMap<Bits, Bits>,
    log: Vec<(Bits, BotValue)>,
}

impl<'a, F: BotFunction + ?Sized> IdealOracle<'a, F> {
    pub fn new(prf: &'a F, key: Bits, tape: RandomTape) -> Self {
        Self {
            real: RealOracle::new(prf, key, tape),
            cache: HashMap::new(),
            log: Vec::new(),
        }
    }

    pub fn log(&self) -> &[(Bits, BotValue)] {
        &self.log
    }
}

impl<F: BotFunction + ?Sized> PrfOracle for IdealOracle<'_, F> {
    fn query(&mut self, x: &Bits) -> Result<BotValue> {
        let v = self.real.query(x)?;
        let out = if v.is_bot() {
            BotValue::Bot
        } else {
            let (out_len, tape) = (self.real.prf.output_len(), &mut self.real.tape);
            BotValue::Bits(
                self.cache
                    .entry(x.clone())
                    .or_insert_with(|| tape.bits(out_len))
                    .clone(),
            )
        };
        self.log.push((x.clone(), out.clone()));
        Ok(out)
    }
}

/// A faulty ideal oracle that redraws `F(x)` on every query.
pub struct NonCachingOracle<'a, F: ?Sized> {
    real: RealOracle<'a, F>,
}

impl<F: BotFunction + ?Sized> PrfOracle for NonCachingOracle<'_, F> {
    fn query(&mut self, x: &Bits) -> Result<BotValue> {
        let v = self.real.query(x)?;
        let fresh = self.real.tape.bits(self.real.prf.output_len());
        is_bot(&v, &fresh)
    }
}

struct Budgeted<'o> {
    inner: &'o mut dyn PrfOracle,
    budget: usize,
    used: usize,
    input_len: usize,
}

impl PrfOracle for Budgeted<'_> {
    fn query(&mut self, x: &Bits) -> Result<BotValue> {
        check_len(self.input_len, x.len())?;
        if self.used == self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        self.used += 1;
        self.inner.query(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdealMode {
    Cached,
    /// Plants the non-caching fault, to check that probes catch it.
    NonCaching,
}

/// Advantage of `dist`, given at most `budget` adaptive queries, at telling
/// the function on a hidden key from its ⊥-masked random counterpart.
pub fn prf_game<F, D>(
    prf: &F,
    dist: &D,
    budget: usize,
    trials: usize,
    tape: &mut RandomTape,
) -> Result<ExperimentReport>
where
    F: BotFunction,
    D: PrfDistinguisher + ?Sized,
{
    prf_game_with(prf, dist, budget, IdealMode::Cached, trials, tape)
}

pub fn prf_game_with<F, D>(
    prf: &F,
    dist: &D,
    budget: usize,
    mode: IdealMode,
    trials: usize,
    tape: &mut RandomTape,
) -> Result<ExperimentReport>
where
    F: BotFunction,
    D: PrfDistinguisher + ?Sized,
{
    if budget == 0 || trials == 0 {
        return Err(Error::InvalidParameter("budget and trials must be positive".into()));
    }
    let correct = count_trials(trials, tape, |t| {
        let world = World::flip(t);
        let real = RealOracle::new(prf, t.bits(prf.key_len()), t.split());
        let mut inner: Box<dyn PrfOracle + '_> = match (world, mode) {
            (World::Real, _) => Box::new(real),
            (World::Ideal, IdealMode::Cached) => Box::new(IdealOracle {
                real,
                cache: HashMap::new(),
                log: Vec::new(),
            }),
            (World::Ideal, IdealMode::NonCaching) => Box::new(NonCachingOracle { real }),
        };
        let mut oracle = Budgeted {
            inner: inner.as_mut(),
            budget,
            used: 0,
            input_len: prf.input_len(),
        };
        Ok(dist.run(prf, &mut oracle, t)? == world)
    })?;
    Ok(ExperimentReport::advantage(trials, correct)
        .named("prf")
        .with_bound(BoundKind::Contains, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bot_prf::TreePrfSpec;
    use crate::bot_prg::BotPrgSpec;
    use crate::harness::plants::ConstantPrg;
    use crate::harness::ReportVerdict;
    use crate::pdprg_sim::PdPrgSpec;

    fn prg(mu: f64, nu: f64) -> BotPrgSpec {
        BotPrgSpec::new(PdPrgSpec::new(16, 32, mu, nu, b"games".to_vec()).unwrap(), 16, 1, true).unwrap()
    }

    fn prf(mu: f64, nu: f64) -> TreePrfSpec {
        TreePrfSpec::new(prg(mu, nu), 8).unwrap()
    }

    #[test]
    fn ideal_world_keeps_the_abort_pattern() {
        let g = prg(0.4, 0.1);
        let mut tape = RandomTape::from_seed(1);
        let mut saw_bot = false;
        for _ in 0..200 {
            let tr = multitime_transcript(&g, 6, World::Ideal, &mut tape).unwrap();
            for (e, s) in tr.evals.iter().zip(&tr.shown) {
                assert_eq!(e.is_bot(), s.is_bot());
                saw_bot |= e.is_bot();
            }
            let vals: Vec<_> = tr.shown.iter().filter_map(BotValue::bits).collect();
            assert!(vals.windows(2).all(|w| w[0] == w[1]));
        }
        assert!(saw_bot);
        let tr = multitime_transcript(&g, 3, World::Real, &mut tape).unwrap();
        assert_eq!(tr.evals, tr.shown);
    }

    #[test]
    fn honest_prg_is_not_distinguished() {
        let g = prg(0.05, 0.05);
        let mut tape = RandomTape::from_seed(2);
        for d in Distinguisher::ALL {
            let r = multitime_game(&g, 4, &d, 4_000, &mut tape).unwrap();
            assert_eq!(r.verdict, ReportVerdict::Pass, "{}: {r:?}", d.name());
        }
    }

    #[test]
    fn constant_prg_is_caught() {
        let g = ConstantPrg::new(16, Bits::from_hex("0f0f0f0f", 32).unwrap());
        let r = multitime_game(&g, 4, &Distinguisher::CrossKey, 1_000, &mut RandomTape::from_seed(3)).unwrap();
        assert!(r.rate >= 0.9, "{r:?}");
        assert_eq!(r.verdict, ReportVerdict::Fail);
    }

    #[test]
    fn constant_distinguisher_has_no_advantage() {
        let r = multitime_game(
            &prg(0.0, 0.0),
            1,
            &Distinguisher::Constant,
            2_000,
            &mut RandomTape::from_seed(4),
        )
        .unwrap();
        assert!(r.passed());
        let r = prf_game(
            &prf(0.0, 0.0),
            &Distinguisher::Constant,
            1,
            2_000,
            &mut RandomTape::from_seed(4),
        )
        .unwrap();
        assert!(r.passed());
    }

    #[test]
    fn honest_prf_is_not_distinguished() {
        let f = prf(0.02, 0.05);
        let mut tape = RandomTape::from_seed(5);
        for d in Distinguisher::ALL {
            let r = prf_game(&f, &d, 4, 3_000, &mut tape).unwrap();
            assert_eq!(r.verdict, ReportVerdict::Pass, "{}: {r:?}", d.name());
        }
    }

    #[test]
    fn non_caching_stub_is_flagged() {
        let f = prf(0.0, 0.0);
        let mut tape = RandomTape::from_seed(6);
        let r = prf_game_with(
            &f,
            &Distinguisher::RepeatConsistency,
            2,
            IdealMode::NonCaching,
            1_000,
            &mut tape,
        )
        .unwrap();
        assert!(r.rate > 0.9, "{r:?}");
        assert_eq!(r.verdict, ReportVerdict::Fail);
    }

    #[test]
    fn cached_oracle_is_consistent() {
        let f = prf(0.3, 0.1);
        let mut tape = RandomTape::from_seed(7);
        let mut oracle = IdealOracle::new(&f, tape.bits(16), tape.split());
        let xs: Vec<Bits> = (0..4).map(|_| tape.bits(8)).collect();
        for _ in 0..20 {
            for x in &xs {
                oracle.query(x).unwrap();
            }
        }
        let mut first: HashMap<&Bits, &Bits> = HashMap::new();
        for (x, v) in oracle.log() {
            if let Some(y) = v.bits() {
                assert_eq!(*first.entry(x).or_insert(y), y);
            }
        }
        assert!(!first.is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let f = prf(0.0, 0.0);
        let err = prf_game(
            &f,
            &Distinguisher::RepeatConsistency,
            1,
            10,
            &mut RandomTape::from_seed(8),
        )
        .unwrap_err();
        assert!(matches!(err, Error::BudgetExhausted(1)));
        assert!(prf_game(&f, &Distinguisher::Constant, 0, 10, &mut RandomTape::from_seed(8)).is_err());
    }

    #[test]
    fn reports_reproduce() {
        let f = prf(0.1, 0.1);
        let run = |seed| prf_game(&f, &Distinguisher::BitBias, 2, 500, &mut RandomTape::from_seed(seed)).unwrap();
        assert_eq!(run(9), run(9));
    }
}
