//! Report-producing commands: estimators, games, the repetition demo, and
//! profile inspection.

use botsig::bot_hash::bot_owf_eval;
use botsig::bot_prf::{prf_bot_rate_bound, BotFunction};
use botsig::bot_prg::BotPrgSpec;
use botsig::harness::estimate::{check_pseudodeterminism, estimate_bot_rate, estimate_correctness};
use botsig::harness::forgery::{forgery_rate, Forger, RandomForger, Replayer, SkLeak};
use botsig::harness::games::{multitime_game, prf_game, Distinguisher};
use botsig::harness::{count_trials, BoundKind, ExperimentReport};
use botsig::profile::Profile;
use botsig::repetition_pke::{lifted_failure_bound, rep_decrypt, rep_encrypt, MockBasePke};
use botsig::signatures::envelope::{AnyScheme, SchemeKind};
use botsig::{Bits, BotValue, RandomTape};
use clap::ValueEnum;
use serde_json::json;

use crate::{emit_reports, CliResult, Format, UsageError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Estimate {
    BotRate,
    Pseudodet,
    Correctness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Game {
    Multitime,
    Prf,
    Omsuf,
    Suf,
}

type Evaluator = Box<dyn Fn(&Bits, &mut RandomTape) -> botsig::Result<BotValue> + Sync>;

/// A keyed primitive evaluated on one packed bitstring (key, then input).
struct Target {
    name: &'static str,
    input_len: usize,
    bot_bound: f64,
    eval: Evaluator,
}

fn composite_bound(prg: &BotPrgSpec) -> f64 {
    1.0 - (1.0 - prg.base().mu()).powi(prg.fanin() as i32)
}

fn target(name: &str, profile: &Profile) -> CliResult<Target> {
    Ok(match name {
        "prg" => {
            let prg = profile.prf_prg.clone();
            Target {
                name: "prg",
                input_len: prg.composite_key_len(),
                bot_bound: composite_bound(&prg),
                eval: Box::new(move |k, t| prg.xor_prg_eval(k, t)),
            }
        }
        "owf" => {
            let prg = profile.owf_prg.clone();
            Target {
                name: "owf",
                input_len: prg.out_len(),
                bot_bound: composite_bound(&prg),
                eval: Box::new(move |z, t| bot_owf_eval(&prg, z, t)),
            }
        }
        "hash" => {
            let h = profile.compressing_hash("oms")?;
            let kl = h.key_len();
            Target {
                name: "hash",
                input_len: kl + h.in_len(),
                bot_bound: h.mu(),
                eval: Box::new(move |kx, t| h.eval(&kx.slice(0..kl), &kx.slice(kl..kx.len()), t)),
            }
        }
        "prf" => {
            let prf = profile.tree_prf()?.with_input_len(profile.lambda)?;
            let kl = prf.key_len();
            Target {
                name: "prf",
                input_len: kl + prf.input_len(),
                bot_bound: prf_bot_rate_bound(prf.input_len(), prf.prg().base().mu(), 0.0),
                eval: Box::new(move |kx, t| BotFunction::eval(&prf, &kx.slice(0..kl), &kx.slice(kl..kx.len()), t)),
            }
        }
        other => {
            return Err(UsageError(format!(
                "unknown target {other:?}; expected prg, owf, hash or prf"
            )))
        }
    })
}

pub fn estimate(
    what: Estimate,
    target_name: &str,
    trials: usize,
    profile: &str,
    reps: usize,
    format: Format,
    tape: &mut RandomTape,
) -> CliResult<bool> {
    let profile = Profile::load(profile)?;
    let report = match what {
        Estimate::BotRate => {
            let tg = target(target_name, &profile)?;
            estimate_bot_rate(|t| t.bits(tg.input_len), |x, t| (tg.eval)(x, t), trials, tape)?
                .named(format!("bot-rate/{}", tg.name))
                .with_bound(BoundKind::AtMost, tg.bot_bound)
        }
        Estimate::Pseudodet => {
            let tg = target(target_name, &profile)?;
            let keys: Vec<Bits> = (0..trials).map(|_| tape.bits(tg.input_len)).collect();
            check_pseudodeterminism(|x, t| (tg.eval)(x, t), &keys, reps, tape)?.named(format!("pseudodet/{}", tg.name))
        }
        Estimate::Correctness => {
            let kind: SchemeKind = target_name.parse()?;
            let scheme = profile.build(kind)?;
            estimate_correctness(&scheme, trials, tape)?
                .named(format!("correctness/{kind}"))
                .with_bound(BoundKind::AtLeast, profile.correctness_bound(kind)?)
        }
    };
    Ok(emit_reports(&[report], format))
}

fn forgeries(
    scheme: &AnyScheme,
    one_message: bool,
    trials: usize,
    tape: &mut RandomTape,
) -> CliResult<Vec<ExperimentReport>> {
    let forgers: [(&str, &dyn Forger<AnyScheme>); 3] =
        [("replay", &Replayer), ("random", &RandomForger), ("sk-leak", &SkLeak)];
    forgers
        .into_iter()
        .map(|(name, f)| {
            let r = forgery_rate(scheme, f, one_message, trials, tape)?;
            let r = r.named(format!("{}/{name}", if one_message { "om-suf" } else { "suf" }));
            // Leaking the key is a positive control: it should win whenever
            // signing does not abort, so it is reported, not judged.
            Ok(if name == "sk-leak" {
                r
            } else {
                r.with_bound(BoundKind::Exact, 0.0)
            })
        })
        .collect()
}

pub fn game(
    which: Game,
    trials: usize,
    profile: &str,
    scheme: Option<SchemeKind>,
    queries: usize,
    format: Format,
    tape: &mut RandomTape,
) -> CliResult<bool> {
    let profile = Profile::load(profile)?;
    let reports = match which {
        Game::Multitime => Distinguisher::ALL
            .into_iter()
            .map(|d| {
                Ok(multitime_game(&profile.prf_prg, queries, &d, trials, tape)?
                    .named(format!("multitime/{}", d.name())))
            })
            .collect::<CliResult<Vec<_>>>()?,
        Game::Prf => {
            let prf = profile.tree_prf()?.with_input_len(profile.lambda)?;
            Distinguisher::ALL
                .into_iter()
                .map(|d| Ok(prf_game(&prf, &d, queries, trials, tape)?.named(format!("prf/{}", d.name()))))
                .collect::<CliResult<Vec<_>>>()?
        }
        Game::Omsuf => forgeries(&profile.build(scheme.unwrap_or(SchemeKind::Oms2))?, true, trials, tape)?,
        Game::Suf => forgeries(
            &profile.build(scheme.unwrap_or(SchemeKind::Stateful))?,
            false,
            trials,
            tape,
        )?,
    };
    Ok(emit_reports(&reports, format))
}

pub fn pke_demo(q: usize, delta: f64, trials: usize, format: Format, tape: &mut RandomTape) -> CliResult<bool> {
    if q == 0 || trials == 0 {
        return Err(UsageError("q and trials must be positive".into()));
    }
    let base = MockBasePke::new(128, delta, b"pke-demo".to_vec())?;
    let failures = count_trials(trials, tape, |t| {
        let keys: Vec<Bits> = (0..q).map(|_| base.keygen(t)).collect();
        let bit = t.bit();
        let cts = rep_encrypt(&base, &keys, bit, t)?;
        Ok(rep_decrypt(&base, &keys, &cts, t)? != Some(bit))
    })?;
    let report = ExperimentReport::rate(trials, failures)
        .named(format!("pke-failure/q={q}"))
        .with_bound(BoundKind::AtMost, lifted_failure_bound(delta, q));
    Ok(emit_reports(&[report], format))
}

pub fn params(profile: &str, format: Format) -> CliResult<bool> {
    let profile = Profile::load(profile)?;
    let mut rows = Vec::new();
    for kind in SchemeKind::ALL {
        let scheme = profile.build(kind)?;
        rows.push((
            kind,
            botsig::signatures::SignatureScheme::message_len(&scheme),
            profile.correctness_bound(kind)?,
        ));
    }
    match format {
        Format::Json => {
            let schemes: Vec<_> = rows
                .iter()
                .map(|(k, len, b)| json!({ "scheme": k.name(), "message_len": len, "correctness_bound": b }))
                .collect();
            let profile_json: serde_json::Value = serde_json::from_str(&profile.to_json())?;
            println!("{}", json!({ "profile": profile_json, "schemes": schemes }));
        }
        Format::Table => {
            println!(
                "profile {}: lambda={} n={} hash_key_len={} hash_mu={}",
                profile.name, profile.lambda, profile.n, profile.hash_key_len, profile.hash_mu
            );
            println!("{:<10}  {:>11}  correctness bound", "scheme", "message bits");
            for (k, len, b) in rows {
                println!("{:<10}  {len:>11}  {b:.6}", k.name());
            }
        }
    }
    Ok(true)
}
