//! Seeded random distributions and languages for testing and tooling.

use std::sync::Arc;

use rand::Rng;

use crate::distribution::Distribution;
use crate::language::{FiniteLanguage, Word};
use crate::symbols::{Alphabet, SymSet, Symbol};

/// `a`, `b`, … for up to 26 symbols, `s0`, `s1`, … beyond.
pub fn standard_alphabet(n: usize) -> Arc<Alphabet> {
    if n <= 26 {
        Alphabet::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string())).expect("valid alphabet")
    } else {
        Alphabet::new((0..n).map(|i| format!("s{i}"))).expect("valid alphabet")
    }
}

/// Draws `parts` random subsets, patches coverage and keeps the maximal
/// ones. The result may have fewer parts than requested.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, alphabet: &Arc<Alphabet>, parts: usize) -> Distribution {
    let n = alphabet.len();
    let parts = parts.max(1);
    let mut sets: Vec<SymSet> = (0..parts)
        .map(|_| {
            let size = rng.gen_range(1..=n.max(2) - 1).min(n);
            let mut s = SymSet::EMPTY;
            while s.len() < size {
                s.insert(rng.gen_range(0..n) as Symbol);
            }
            s
        })
        .collect();
    for s in alphabet.symbols() {
        if !sets.iter().any(|p| p.contains(s)) {
            let i = rng.gen_range(0..sets.len());
            sets[i].insert(s);
        }
    }
    Distribution::from_maximal(alphabet.clone(), sets)
}

/// Up to `count` random words of length at most `max_len`.
pub fn random_language<R: Rng + ?Sized>(rng: &mut R, alphabet: &Arc<Alphabet>, count: usize, max_len: usize) -> FiniteLanguage {
    let n = alphabet.len();
    let words: Vec<Word> = (0..count)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            (0..len).map(|_| rng.gen_range(0..n) as Symbol).collect()
        })
        .collect();
    FiniteLanguage::new(alphabet.clone(), words).expect("symbols in range")
}
