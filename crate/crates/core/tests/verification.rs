mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use distred::candidate::{leq_delta, upward_set, CandidateReduction};
use distred::merge::{all_merges, keep_minimal, minimal_merges, DEFAULT_MERGE_CAP};
use distred::substitution::{saturate, shared_symbols, substitutable, substitute, Budget, SaturationOutcome};
use distred::verifier::{
    exists_reduction, refute_reduction, verify_reduction, Evidence, Mechanism, VerifyOptions,
};
use distred::{Alphabet, Distribution, Error, Outcome};

use common::{d, load, load_all};

fn members(src: &Distribution, file: &str) -> Vec<Distribution> {
    let sigma = src.alphabet();
    load_all(file)
        .iter()
        .map(|m| Distribution::parse(sigma.clone(), &m.render()).unwrap())
        .collect()
}

#[test]
fn substitution_on_the_chain() {
    let sigma = Alphabet::from_chars("abcdef").unwrap();
    let left = d(&sigma, "abc|def");
    let right = d(&sigma, "abde|bcef");
    assert!(shared_symbols(&left).is_empty());
    assert_eq!(shared_symbols(&right), sigma.parse_set("be").unwrap());
    assert!(substitutable(&left, &right, 0));
    assert_eq!(substitute(&left, &right, 0).unwrap(), d(&sigma, "ab|bcef|de"));
    assert!(!substitutable(&right, &left, 0));
    assert!(matches!(substitute(&right, &left, 0), Err(Error::NotSubstitutable(0))));
}

#[test]
fn chain_proof_replays() {
    let src = load("chain6.dist");
    let v = verify_reduction(&src, &members(&src, "chain6_short.dist"), &VerifyOptions::default()).unwrap();
    assert_eq!(v.outcome, Outcome::ValidReduction);
    assert_eq!(v.mechanism, Some(Mechanism::Substitution));
    let t = v.trace().unwrap();
    assert_eq!(t.steps.len(), 2);
    t.replay().unwrap();
    let mut broken = t.clone();
    broken.steps[0].position ^= 1;
    assert!(broken.replay().is_err());
}

#[test]
fn saturation_reaches_a_fixpoint_on_the_triangles() {
    let src = load("two_triangles.dist");
    let ms = members(&src, "two_triangles_candidate.dist");
    let out = saturate(&ms, &src, Budget::default());
    assert!(matches!(out, SaturationOutcome::Fixpoint { .. }), "{}", out.label());
    let cand = CandidateReduction::new(src.clone(), ms).unwrap();
    let up = upward_set(&cand, DEFAULT_MERGE_CAP).unwrap();
    assert!(up.contains(&d(src.alphabet(), "abc|def")));
    assert!(saturate(&up, &src, Budget::default()).trace().is_some());
}

#[test]
fn meet_refutes_before_lcand() {
    let src = load("chain5.dist");
    let v = refute_reduction(&src, &members(&src, "chain5_candidate.dist")).unwrap().unwrap();
    assert_eq!(v.mechanism, Some(Mechanism::Meet));
    match &v.evidence {
        Some(Evidence::MeetMismatch { meet }) => assert!(src.lt(meet)),
        e => panic!("unexpected evidence {e:?}"),
    }
}

#[test]
fn valid_candidates_are_not_refuted() {
    let src = load("chain6.dist");
    for f in ["chain6_short.dist", "chain6_tall.dist"] {
        assert!(refute_reduction(&src, &members(&src, f)).unwrap().is_none());
    }
}

#[test]
fn malformed_candidates_are_rejected() {
    let src = load("chain6.dist");
    let one = vec![d(src.alphabet(), "abc|def")];
    assert!(matches!(verify_reduction(&src, &one, &VerifyOptions::default()), Err(Error::MalformedCandidate(_))));
    let with_source = vec![src.clone(), d(src.alphabet(), "abc|def")];
    assert!(verify_reduction(&src, &with_source, &VerifyOptions::default()).is_err());
}

#[test]
fn existence_without_merges_and_with_one() {
    let sigma = Alphabet::from_chars("abc").unwrap();
    let tri = d(&sigma, "ab|bc|ca");
    let v = exists_reduction(&tri, &VerifyOptions::default()).unwrap();
    assert_eq!((v.outcome, v.mechanism), (Outcome::NotReduction, Some(Mechanism::NoMerges)));
    let pair = d(&sigma, "ab|bc");
    let v = exists_reduction(&pair, &VerifyOptions::default()).unwrap();
    assert_eq!(v.outcome, Outcome::NotReduction);
}

#[test]
fn parallel_and_sequential_agree() {
    let seq = VerifyOptions::default();
    let par = VerifyOptions { parallel: true, ..seq };
    for (s, c) in [
        ("chain6.dist", "chain6_short.dist"),
        ("ring5.dist", "ring5_bottom.dist"),
        ("two_triangles.dist", "two_triangles_candidate.dist"),
        ("chain5.dist", "chain5_candidate.dist"),
    ] {
        let src = load(s);
        let ms = members(&src, c);
        assert_eq!(verify_reduction(&src, &ms, &seq).unwrap(), verify_reduction(&src, &ms, &par).unwrap(), "{s}");
    }
}

fn chainish(rng: &mut ChaCha8Rng) -> Distribution {
    let n = rng.gen_range(4..=6);
    let sigma = distred::sample::standard_alphabet(n);
    let mut text: Vec<String> = (0..n - 1)
        .map(|i| format!("{}{}", (b'a' + i as u8) as char, (b'a' + i as u8 + 1) as char))
        .collect();
    if rng.gen_bool(0.5) {
        text.push(format!("a{}", (b'a' + rng.gen_range(2..n) as u8) as char));
    }
    Distribution::from_maximal(sigma.clone(), text.iter().map(|t| sigma.parse_set(t).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Below a validated candidate, the verifier never refutes.
    #[test]
    fn validation_is_downward_consistent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = chainish(&mut rng);
        let opts = VerifyOptions::default();
        let merges = all_merges(&src, DEFAULT_MERGE_CAP).unwrap();
        prop_assume!(merges.len() >= 3);
        let pick: Vec<Distribution> = (0..3).map(|_| merges[rng.gen_range(0..merges.len())].clone()).collect();
        let q = keep_minimal(pick);
        prop_assume!(q.len() >= 2);
        let vq = verify_reduction(&src, &q, &opts).unwrap();
        if vq.outcome == Outcome::ValidReduction {
            let mut lower: Vec<Distribution> = q.clone();
            lower.extend(keep_minimal(minimal_merges(&src)).into_iter().take(2));
            let p = keep_minimal(lower);
            let (pc, qc) = (
                CandidateReduction::new(src.clone(), p.clone()).unwrap(),
                CandidateReduction::new(src.clone(), q.clone()).unwrap(),
            );
            prop_assert!(leq_delta(&pc, &qc).unwrap());
            if p.len() >= 2 {
                let vp = verify_reduction(&src, &p, &opts).unwrap();
                prop_assert_ne!(vp.outcome, Outcome::NotReduction);
            }
        }
    }

    /// Refuters and validators never disagree on one input.
    #[test]
    fn three_valued_consistency(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = chainish(&mut rng);
        let merges = all_merges(&src, DEFAULT_MERGE_CAP).unwrap();
        prop_assume!(merges.len() >= 2);
        let pick: Vec<Distribution> = (0..2).map(|_| merges[rng.gen_range(0..merges.len())].clone()).collect();
        let ms = keep_minimal(pick);
        prop_assume!(ms.len() >= 2);
        let refuted = refute_reduction(&src, &ms).unwrap().is_some();
        let proved = saturate(&ms, &src, Budget::default()).trace().is_some();
        prop_assert!(!(refuted && proved));
    }
}
