mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use distred::counterexample::{build_lcand, build_lcand_ordered, parikh_decomposable, parikh_witness, refute_candidate};
use distred::language::{
    decomposition_closure, is_decomposable, is_trace_closed, shuffle, trace_closure, trace_equivalent, FiniteLanguage,
};
use distred::merge::{all_merges, DEFAULT_MERGE_CAP};
use distred::sample::{random_distribution, random_language, standard_alphabet};
use distred::{Alphabet, Error, SymSet};

use common::{d, load};

fn lang(sigma: &std::sync::Arc<Alphabet>, words: &[&str]) -> FiniteLanguage {
    FiniteLanguage::parse_words(sigma.clone(), words.iter().copied()).unwrap()
}

#[test]
fn shuffle_of_two_letters() {
    let got: BTreeSet<Vec<u8>> = shuffle(&[0, 1], &[2]);
    let want: BTreeSet<Vec<u8>> = [vec![0, 1, 2], vec![0, 2, 1], vec![2, 0, 1]].into_iter().collect();
    assert_eq!(got, want);
}

#[test]
fn decomposability_of_a_commuting_pair() {
    let sigma = Alphabet::from_chars("abc").unwrap();
    let dist = d(&sigma, "ab|c");
    assert!(!is_decomposable(&lang(&sigma, &["ac"]), &dist).unwrap());
    assert!(is_decomposable(&lang(&sigma, &["ac", "ca"]), &dist).unwrap());
    assert!(is_decomposable(&lang(&sigma, &["ab", "ba", ""]), &d(&sigma, "ab|bc")).unwrap());
}

#[test]
fn trace_closure_adds_swaps() {
    let sigma = Alphabet::from_chars("abc").unwrap();
    let dist = d(&sigma, "ab|c");
    let l = trace_closure(&lang(&sigma, &["abc"]), &dist.independence(), 100).unwrap();
    assert_eq!(l.render(), ["abc", "acb", "cab"]);
    assert!(is_trace_closed(&l, &dist.independence()));
    assert!(trace_equivalent(&[0, 1, 2], &[2, 0, 1], &dist.independence(), 3));
    assert!(!trace_equivalent(&[0, 1, 2], &[1, 0, 2], &dist.independence(), 3));
}

#[test]
fn closure_respects_the_word_cap() {
    let sigma = Alphabet::from_chars("abcd").unwrap();
    let dist = d(&sigma, "a|b|c|d");
    let r = decomposition_closure(&lang(&sigma, &["abcd", "dcba"]), &dist, 10);
    assert!(matches!(r, Err(Error::CapacityExceeded { .. })));
}

#[test]
fn ring4_candidate_language() {
    let ring4 = load("ring4.dist");
    let sigma = ring4.alphabet().clone();
    let written: Vec<SymSet> = ["ab", "bc", "cd", "da"].iter().map(|p| sigma.parse_set(p).unwrap()).collect();
    let l = build_lcand_ordered(&sigma, &written);
    let counts: Vec<Vec<u32>> = l.classes().iter().map(|c| c.0.clone()).collect();
    assert_eq!(counts, [vec![1, 1, 2, 2], vec![3, 1, 1, 3], vec![4, 4, 1, 1], vec![1, 5, 5, 1]]);
    let words = l.materialize(100_000).unwrap();
    assert_eq!(words.len() as u128, l.word_count());
    assert!(is_trace_closed(&words, &ring4.independence()));
    assert!(!is_decomposable(&words, &ring4).unwrap());
}

#[test]
fn ring4_bottom_is_refuted() {
    let ring4 = load("ring4.dist");
    let bottom = distred::merge::keep_minimal(distred::merge::minimal_merges(&ring4));
    let ev = refute_candidate(&ring4, &bottom).expect("refuted");
    let words = ev.lcand.materialize(100_000).unwrap();
    for m in &bottom {
        assert!(is_decomposable(&words, m).unwrap(), "{m}");
    }
}

#[test]
fn materialisation_guard() {
    let sigma = standard_alphabet(6);
    let chain = d(&sigma, "ab|bc|cd|de|ef");
    assert!(matches!(build_lcand(&chain).materialize(1_000), Err(Error::CapacityExceeded { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The exponent-vector oracle agrees with materialising the language.
    #[test]
    fn parikh_oracle_matches_words(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=4);
        let sigma = standard_alphabet(n);
        let parts = rng.gen_range(3..=5);
        let dist = random_distribution(&mut rng, &sigma, parts);
        prop_assume!(dist.size() >= 3);
        let l = build_lcand(&dist);
        prop_assume!(l.word_count() <= 30_000);
        let words = l.materialize(30_000).unwrap();
        for m in all_merges(&dist, DEFAULT_MERGE_CAP).unwrap() {
            let exact = is_decomposable(&words, &m).unwrap();
            prop_assert_eq!(parikh_decomposable(&l, &m), exact, "{} in {}", m, dist);
            if let Some(w) = parikh_witness(&l, &m) {
                prop_assert!(!l.contains_vector(&w));
            }
        }
    }

    /// Closure is idempotent and yields a decomposable superset.
    #[test]
    fn closure_is_decomposable(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = standard_alphabet(rng.gen_range(2..=4));
        let parts = rng.gen_range(2..=4);
        let dist = random_distribution(&mut rng, &sigma, parts);
        let l = random_language(&mut rng, &sigma, 4, 3);
        let closed = decomposition_closure(&l, &dist, 50_000).unwrap();
        prop_assert!(l.is_subset(&closed));
        prop_assert!(is_decomposable(&closed, &dist).unwrap());
        prop_assert_eq!(decomposition_closure(&closed, &dist, 50_000).unwrap(), closed.clone());
        prop_assert!(is_trace_closed(&closed, &dist.independence()));
    }
}
