//! Cross-module behaviour through the public API: profiles build every
//! scheme, artifacts survive their envelopes, and the primitives keep
//! their abort structure under arbitrary inputs.

use botsig::bot_core::{bot_xor, vote_threshold};
use botsig::bot_prf::TreePrfSpec;
use botsig::bot_prg::BotPrgSpec;
use botsig::codec::{Decode, Encode};
use botsig::pdprg_sim::PdPrgSpec;
use botsig::profile::Profile;
use botsig::repetition_pke::combine;
use botsig::signatures::envelope::{
    open_key, open_signature, seal_key, seal_signature, AnySigningKey, AnyVerifyingKey, SchemeKind,
};
use botsig::signatures::{SignatureScheme, Verdict};
use botsig::{Bits, BotValue, RandomTape};
use proptest::prelude::*;

#[test]
fn every_scheme_survives_its_envelopes() {
    let profile = Profile::builtin("desk-small").unwrap();
    let context = profile.to_json();
    let mut tape = RandomTape::from_seed(100);
    for kind in SchemeKind::ALL {
        let scheme = profile.build(kind).unwrap();
        let (sk, vk) = scheme.keygen(&mut tape).unwrap();
        let sealed_sk = seal_key(&sk, context.as_bytes());
        let sealed_vk = seal_key(&vk, context.as_bytes());
        let (ctx, sk2): (_, AnySigningKey) = open_key(&sealed_sk).unwrap();
        let (_, vk2): (_, AnyVerifyingKey) = open_key(&sealed_vk).unwrap();
        assert_eq!(ctx, context.as_bytes());
        assert_eq!((&sk2, &vk2), (&sk, &vk), "{kind}");
        assert_eq!(Profile::from_json(std::str::from_utf8(&ctx).unwrap()).unwrap(), profile);

        let m = tape.bits(scheme.message_len());
        let sig = (0..20)
            .find_map(|_| scheme.sign(&mut sk2.clone(), &m, &mut tape).unwrap())
            .unwrap_or_else(|| panic!("{kind}: every signature aborted"));
        let reopened = open_signature(&seal_signature(Some(&sig))).unwrap();
        assert_eq!(reopened.as_ref(), Some(&sig));
        let verdicts: Vec<Verdict> = (0..5)
            .map(|_| scheme.verify(&vk2, &m, reopened.as_ref(), &mut tape).unwrap())
            .collect();
        assert!(verdicts.contains(&Verdict::Accept), "{kind}: {verdicts:?}");
        assert!(!verdicts.contains(&Verdict::Reject), "{kind}: {verdicts:?}");
        assert_eq!(scheme.verify(&vk2, &m, None, &mut tape).unwrap(), Verdict::Bot);
    }
}

#[test]
fn stateful_key_reloads_between_signatures() {
    let profile = Profile::builtin("desk-small").unwrap();
    let scheme = profile.build(SchemeKind::Stateful).unwrap();
    let mut tape = RandomTape::from_seed(101);
    let (mut sk, vk) = scheme.keygen(&mut tape).unwrap();
    let mut accepted = 0;
    for i in 0..8u8 {
        let m = Bits::from_bools((0..4).map(|b| i >> b & 1 == 1));
        // Persist and reload between signatures, as a caller with a key
        // file would.
        sk = AnySigningKey::from_bytes(&sk.to_bytes()).unwrap();
        if let Some(sig) = scheme.sign(&mut sk, &m, &mut tape).unwrap() {
            accepted += scheme.verify(&vk, &m, Some(&sig), &mut tape).unwrap().is_accept() as usize;
        }
    }
    assert!(accepted >= 4, "{accepted}");
}

#[test]
fn seeds_reproduce_whole_runs() {
    let profile = Profile::builtin("desk-small").unwrap();
    let scheme = profile.build(SchemeKind::Stateless).unwrap();
    let run = |seed| {
        let mut tape = RandomTape::from_seed(seed);
        let (mut sk, vk) = scheme.keygen(&mut tape).unwrap();
        let m = tape.bits(4);
        (vk, scheme.sign(&mut sk, &m, &mut tape).unwrap())
    };
    assert_eq!(run(7), run(7));
    assert_ne!(run(7).0, run(8).0);
}

fn small_prf(mu: f64, nu: f64, input_len: usize) -> TreePrfSpec {
    let base = PdPrgSpec::new(16, 64, mu, nu, b"pipeline".to_vec()).unwrap();
    TreePrfSpec::new(BotPrgSpec::new(base, 16, 2, false).unwrap(), input_len).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn good_key_outputs_are_canonical_or_bot(seed in any::<u64>(), nu in 0.0f64..0.1) {
        // Every key is good, so per-evaluation noise surfaces as ⊥ unless the
        // flipped point wins a 16-vote majority, which is negligible at this ν.
        let noisy = small_prf(0.0, nu, 6);
        let exact = small_prf(0.0, 0.0, 6);
        let mut tape = RandomTape::from_seed(seed);
        let (k, x) = (tape.bits(32), tape.bits(6));
        let canonical = exact.eval(&k, &x, &mut tape).unwrap();
        for _ in 0..8 {
            let out = noisy.eval(&k, &x, &mut tape).unwrap();
            prop_assert!(out.is_bot() || out == canonical);
        }
    }

    #[test]
    fn noiseless_prf_is_a_function(seed in any::<u64>()) {
        let prf = small_prf(0.0, 0.0, 5);
        let mut tape = RandomTape::from_seed(seed);
        let (k, x) = (tape.bits(32), tape.bits(5));
        let a = prf.eval(&k, &x, &mut tape).unwrap();
        prop_assert!(!a.is_bot());
        prop_assert_eq!(prf.eval(&k, &x, &mut tape).unwrap(), a);
    }

    #[test]
    fn xor_with_any_bot_is_bot(seed in any::<u64>(), n in 1usize..6, bot_at in 0usize..6) {
        let mut tape = RandomTape::from_seed(seed);
        let mut values: Vec<BotValue> = (0..n).map(|_| BotValue::Bits(tape.bits(13))).collect();
        let plain = bot_xor(&values).unwrap();
        prop_assert!(!plain.is_bot());
        values[bot_at % n] = BotValue::Bot;
        prop_assert!(bot_xor(&values).unwrap().is_bot());
    }

    #[test]
    fn threshold_is_a_strict_majority(reps in 1usize..2000) {
        let t = vote_threshold(reps);
        prop_assert!(5 * t >= 3 * reps && 5 * (t - 1) < 3 * reps);
        prop_assert!(2 * t > reps);
    }

    #[test]
    fn combine_agrees_with_unanimity(results in proptest::collection::vec(proptest::option::of(any::<bool>()), 1..20)) {
        let decided: Vec<bool> = results.iter().flatten().copied().collect();
        let expected = match decided.first() {
            Some(&b) if decided.iter().all(|&d| d == b) => Some(b),
            _ => None,
        };
        prop_assert_eq!(combine(&results), expected);
    }
}
