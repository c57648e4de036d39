//! Brute-force oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use distred::io::parse_distribution_file;
use distred::{Alphabet, Distribution, SymSet};

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn load(name: &str) -> Distribution {
    let text = fs::read_to_string(data(name)).expect("fixture exists");
    parse_distribution_file(&text).expect("fixture parses").single().expect("one distribution").distribution.clone()
}

pub fn load_all(name: &str) -> Vec<Distribution> {
    let text = fs::read_to_string(data(name)).expect("fixture exists");
    parse_distribution_file(&text).expect("fixture parses").distributions()
}

pub fn d(sigma: &Arc<Alphabet>, text: &str) -> Distribution {
    Distribution::parse(sigma.clone(), text).expect("valid distribution")
}

pub fn distred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distred")).args(args).output().expect("binary runs")
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

/// `a ⊆ b` on raw bitmasks, kept apart from the library's set type.
fn sub(a: u64, b: u64) -> bool {
    a & !b == 0
}

fn masks(d: &Distribution) -> Vec<u64> {
    d.parts().iter().map(|p| p.iter().fold(0u64, |m, s| m | 1 << s)).collect()
}

fn from_masks(sigma: &Arc<Alphabet>, ms: &[u64]) -> Distribution {
    let parts = ms.iter().map(|&m| (0..64u8).filter(|&s| m >> s & 1 == 1).collect::<SymSet>());
    Distribution::new(sigma.clone(), parts).expect("antichain cover")
}

/// Every distribution of `sigma`: antichains of non-empty subsets covering it.
pub fn all_distributions(sigma: &Arc<Alphabet>) -> Vec<Distribution> {
    let n = sigma.len();
    let full = (1u64 << n) - 1;
    let subsets: Vec<u64> = (1..=full).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn rec(i: usize, subsets: &[u64], full: u64, chosen: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == subsets.len() {
            if chosen.iter().fold(0, |a, &b| a | b) == full {
                out.push(chosen.clone());
            }
            return;
        }
        rec(i + 1, subsets, full, chosen, out);
        let s = subsets[i];
        if chosen.iter().all(|&c| !sub(c, s) && !sub(s, c)) {
            chosen.push(s);
            rec(i + 1, subsets, full, chosen, out);
            chosen.pop();
        }
    }
    let mut raw = Vec::new();
    rec(0, &subsets, full, &mut chosen, &mut raw);
    for ms in raw {
        out.push(from_masks(sigma, &ms));
    }
    out
}

/// `a ≤_Σ b`: every part of `a` inside some part of `b`.
pub fn leq(a: &Distribution, b: &Distribution) -> bool {
    let (ma, mb) = (masks(a), masks(b));
    ma.iter().all(|&p| mb.iter().any(|&q| sub(p, q)))
}

/// Greatest element of `cands` by exhaustive comparison.
fn greatest<'a>(cands: impl Iterator<Item = &'a Distribution> + Clone) -> Option<&'a Distribution> {
    cands.clone().find(|g| cands.clone().all(|x| leq(x, g)))
}

fn least<'a>(cands: impl Iterator<Item = &'a Distribution> + Clone) -> Option<&'a Distribution> {
    cands.clone().find(|g| cands.clone().all(|x| leq(g, x)))
}

pub fn brute_glb<'a>(all: &'a [Distribution], a: &Distribution, b: &Distribution) -> Option<&'a Distribution> {
    greatest(all.iter().filter(|x| leq(x, a) && leq(x, b)))
}

pub fn brute_lub<'a>(all: &'a [Distribution], a: &Distribution, b: &Distribution) -> Option<&'a Distribution> {
    least(all.iter().filter(|x| leq(a, x) && leq(b, x)))
}

/// Bit `k` set when the `k`-th subset of size at least two (in mask order)
/// lies inside some part.
pub fn cover_mask(d: &Distribution, order: &[u64]) -> u64 {
    let ms = masks(d);
    order
        .iter()
        .enumerate()
        .filter(|&(_, &s)| ms.iter().any(|&p| sub(s, p)))
        .fold(0, |acc, (k, _)| acc | 1 << k)
}

pub fn pair_subsets(n: usize) -> Vec<u64> {
    (1u64..1 << n).filter(|m| m.count_ones() >= 2).collect()
}

/// Independent pairs of `d`, from the definition: never together in a part.
pub fn brute_independence(d: &Distribution) -> Vec<(u8, u8)> {
    let ms = masks(d);
    let n = d.alphabet().len() as u8;
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !ms.iter().any(|&p| p >> a & 1 == 1 && p >> b & 1 == 1) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Every antichain of `elems` under `leq`, the empty one included.
pub fn all_antichains(elems: &[Distribution]) -> Vec<Vec<Distribution>> {
    let n = elems.len();
    assert!(n <= 20);
    (0u32..1 << n)
        .filter_map(|mask| {
            let pick: Vec<&Distribution> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| &elems[i]).collect();
            let anti = pick
                .iter()
                .enumerate()
                .all(|(i, a)| pick[i + 1..].iter().all(|b| !leq(a, b) && !leq(b, a)));
            anti.then(|| {
                let mut v: Vec<Distribution> = pick.into_iter().cloned().collect();
                v.sort();
                v
            })
        })
        .collect()
}

/// `p ≤_Δ q` from the definition.
pub fn leq_family(p: &[Distribution], q: &[Distribution]) -> bool {
    q.iter().all(|b| p.iter().any(|a| leq(a, b)))
}
pub mod suites;
